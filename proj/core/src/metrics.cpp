// Copyright 2026 The ResViT Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "resvit/metrics.hpp"

#include <cstdio>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "resvit/error.hpp"

namespace resvit {

std::size_t EvalReport::total() const {
  std::size_t n = 0;
  for (const auto& row : confusion)
    for (auto c : row) n += c;
  return n;
}

EvalReport report_from_confusion(ConfusionMatrix confusion) {
  const std::size_t k = confusion.size();
  if (k == 0) throw UsageError("report_from_confusion: empty confusion matrix");
  for (const auto& row : confusion) {
    if (row.size() != k) throw DimensionError("report_from_confusion: matrix is not square");
  }

  EvalReport r;
  r.confusion = std::move(confusion);
  const std::size_t total = r.total();
  if (total == 0) throw UsageError("report_from_confusion: no samples");

  std::size_t correct = 0;
  for (std::size_t c = 0; c < k; ++c) correct += r.confusion[c][c];
  r.accuracy = static_cast<double>(correct) / static_cast<double>(total);

  r.precision_per_class.assign(k, 0.0);
  r.recall_per_class.assign(k, 0.0);
  r.f1_per_class.assign(k, 0.0);
  r.precision_undefined.assign(k, false);
  r.recall_undefined.assign(k, false);
  r.f1_undefined.assign(k, false);

  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t tp = r.confusion[c][c];
    std::size_t predicted = 0, actual = 0;
    for (std::size_t o = 0; o < k; ++o) {
      predicted += r.confusion[o][c];
      actual += r.confusion[c][o];
    }
    if (predicted == 0) {
      r.precision_undefined[c] = true;
    } else {
      r.precision_per_class[c] = static_cast<double>(tp) / static_cast<double>(predicted);
    }
    if (actual == 0) {
      r.recall_undefined[c] = true;
    } else {
      r.recall_per_class[c] = static_cast<double>(tp) / static_cast<double>(actual);
    }
    const double p = r.precision_per_class[c], q = r.recall_per_class[c];
    if (p + q == 0.0) {
      r.f1_undefined[c] = true;
    } else {
      r.f1_per_class[c] = 2.0 * p * q / (p + q);
    }
  }

  for (std::size_t c = 0; c < k; ++c) {
    r.macro_precision += r.precision_per_class[c];
    r.macro_recall += r.recall_per_class[c];
    r.macro_f1 += r.f1_per_class[c];
  }
  r.macro_precision /= static_cast<double>(k);
  r.macro_recall /= static_cast<double>(k);
  r.macro_f1 /= static_cast<double>(k);
  return r;
}

EvalReport evaluate_predictions(std::span<const std::size_t> labels,
                                std::span<const std::size_t> predictions,
                                std::size_t num_classes) {
  if (labels.size() != predictions.size()) {
    throw DimensionError("evaluate_predictions: " + std::to_string(labels.size()) + " labels but " +
                         std::to_string(predictions.size()) + " predictions");
  }
  ConfusionMatrix confusion(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes || predictions[i] >= num_classes) {
      throw UsageError("evaluate_predictions: class index out of range at sample " +
                       std::to_string(i));
    }
    ++confusion[labels[i]][predictions[i]];
  }
  return report_from_confusion(std::move(confusion));
}

std::string to_json(const EvalReport& report) {
  auto flagged = [](const std::vector<bool>& flags) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < flags.size(); ++i)
      if (flags[i]) out.push_back(i);
    return out;
  };
  nlohmann::ordered_json j;
  j["confusion"] = report.confusion;
  j["accuracy"] = report.accuracy;
  j["precision_per_class"] = report.precision_per_class;
  j["recall_per_class"] = report.recall_per_class;
  j["f1_per_class"] = report.f1_per_class;
  j["macro_precision"] = report.macro_precision;
  j["macro_recall"] = report.macro_recall;
  j["macro_f1"] = report.macro_f1;
  j["undefined"] = {{"precision", flagged(report.precision_undefined)},
                    {"recall", flagged(report.recall_undefined)},
                    {"f1", flagged(report.f1_undefined)}};
  return j.dump(2) + "\n";
}

std::string to_table(const EvalReport& report, const std::vector<std::string>& class_names) {
  auto name = [&](std::size_t c) {
    return c < class_names.size() ? class_names[c] : "class" + std::to_string(c);
  };
  auto cell = [](double v, bool undefined) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%9.4f%s", v, undefined ? "*" : " ");
    return std::string(buf);
  };

  std::ostringstream os;
  os << "samples: " << report.total() << "  accuracy: " << std::fixed << std::setprecision(4)
     << report.accuracy << "\n\n";
  os << std::left << std::setw(16) << "class" << " precision    recall        f1\n";
  bool any_flag = false;
  for (std::size_t c = 0; c < report.num_classes(); ++c) {
    os << std::left << std::setw(16) << name(c)
       << cell(report.precision_per_class[c], report.precision_undefined[c])
       << cell(report.recall_per_class[c], report.recall_undefined[c])
       << cell(report.f1_per_class[c], report.f1_undefined[c]) << '\n';
    any_flag = any_flag || report.precision_undefined[c] || report.recall_undefined[c] ||
               report.f1_undefined[c];
  }
  os << std::left << std::setw(16) << "macro" << cell(report.macro_precision, false)
     << cell(report.macro_recall, false) << cell(report.macro_f1, false) << "\n";
  if (any_flag) os << "(* zero denominator, reported as 0)\n";

  os << "\nconfusion (rows = truth, columns = prediction)\n";
  for (std::size_t t = 0; t < report.num_classes(); ++t) {
    os << std::left << std::setw(16) << name(t);
    for (auto c : report.confusion[t]) os << std::right << std::setw(8) << c;
    os << '\n';
  }
  return os.str();
}

}  // namespace resvit
