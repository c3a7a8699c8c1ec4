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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace resvit {

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

/**
 * Classification metrics. confusion[t][p] counts samples of true class t
 * predicted as p. Per-class precision = TP/(TP+FP), recall = TP/(TP+FN),
 * F1 their harmonic mean; a zero denominator yields 0 and sets the
 * matching *_undefined flag. Macro values are unweighted class means.
 */
struct EvalReport {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  std::vector<double> precision_per_class;
  std::vector<double> recall_per_class;
  std::vector<double> f1_per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;

  std::vector<bool> precision_undefined;
  std::vector<bool> recall_undefined;
  std::vector<bool> f1_undefined;

  std::size_t num_classes() const noexcept { return confusion.size(); }
  std::size_t total() const;
};

/// Derives all metrics from a square, non-empty confusion matrix.
EvalReport report_from_confusion(ConfusionMatrix confusion);

/// Counts (label, prediction) pairs and derives the report.
EvalReport evaluate_predictions(std::span<const std::size_t> labels,
                                std::span<const std::size_t> predictions,
                                std::size_t num_classes);

/// JSON with keys confusion, accuracy, precision_per_class,
/// recall_per_class, f1_per_class, macro_precision, macro_recall, macro_f1,
/// plus "undefined" listing the flagged classes per metric.
std::string to_json(const EvalReport& report);

/// Fixed-width text table.
std::string to_table(const EvalReport& report, const std::vector<std::string>& class_names);

}  // namespace resvit
