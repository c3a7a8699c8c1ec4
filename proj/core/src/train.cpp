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

#include "resvit/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "resvit/ops.hpp"

namespace resvit {

double cross_entropy(const Tensor& logits, std::size_t label) {
  if (label >= logits.size()) {
    throw UsageError("cross_entropy: label " + std::to_string(label) + " out of range for " +
                     std::to_string(logits.size()) + " classes");
  }
  const auto values = logits.data();
  const double mx = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += std::exp(v - mx);
  return mx + std::log(total) - values[label];
}

OptimizerKind parse_optimizer(std::string_view text) {
  if (text == "adam") return OptimizerKind::kAdam;
  if (text == "sgd") return OptimizerKind::kSgd;
  throw ConfigError("unknown optimizer '" + std::string(text) + "' (expected sgd or adam)");
}

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("train config: epochs must be positive");
  if (batch_size == 0) throw ConfigError("train config: batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("train config: learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && adam_eps > 0.0)) {
    throw ConfigError("train config: invalid Adam hyperparameters");
  }
}

void Sgd::step(ParameterSet& params) {
  for (Parameter& p : params)
    for (std::size_t i = 0; i < p.value.size(); ++i) p.value[i] -= lr_ * p.grad[i];
}

void Adam::step(ParameterSet& params) {
  if (m_.empty()) {
    for (const Parameter& p : params) {
      m_.emplace_back(p.value.shape());
      v_.emplace_back(p.value.shape());
    }
  }
  if (m_.size() != params.size()) throw UsageError("Adam: parameter set changed between steps");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = params[k];
    Tensor& m = m_[k];
    Tensor& v = v_[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
      p.value[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

std::unique_ptr<Optimizer> make_optimizer(const TrainConfig& tcfg) {
  if (tcfg.optimizer == OptimizerKind::kSgd) return std::make_unique<Sgd>(tcfg.learning_rate);
  return std::make_unique<Adam>(tcfg.learning_rate, tcfg.beta1, tcfg.beta2, tcfg.adam_eps);
}

double train_epoch(ModelState& model, const LabeledDataset& data, const TrainConfig& tcfg,
                   Optimizer& optimizer, std::size_t epoch) {
  if (data.empty()) throw UsageError("train_epoch: empty dataset");
  if (tcfg.batch_size == 0) throw ConfigError("train_epoch: batch_size must be positive");

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(tcfg.seed), static_cast<std::uint32_t>(tcfg.seed >> 32),
                    static_cast<std::uint32_t>(epoch)};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);

  double loss_total = 0.0;
  const std::size_t batches = (data.size() + tcfg.batch_size - 1) / tcfg.batch_size;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = b * tcfg.batch_size;
    const std::size_t end = std::min(begin + tcfg.batch_size, data.size());
    const double weight = 1.0 / static_cast<double>(end - begin);
    model.params.zero_grad();
    for (std::size_t i = begin; i < end; ++i) {
      const Sample& s = data.samples[order[i]];
      ad::Tape tape;
      ad::Var logits;
      ad::Var loss;
      try {
        logits = forward(tape, s.image, model).logits;
        loss = ad::cross_entropy(logits, s.label);
      } catch (const NumericError& e) {
        throw NumericError("train_epoch: batch " + std::to_string(b) + ": " + e.what());
      }
      const double value = loss.value().item();
      if (!std::isfinite(value)) {
        throw NumericError("train_epoch: non-finite loss in batch " + std::to_string(b));
      }
      loss_total += value;
      tape.backward(ad::scale(loss, weight));
    }
    for (const Parameter& p : model.params) {
      if (!p.grad.all_finite()) {
        throw NumericError("train_epoch: non-finite gradient for " + p.name + " in batch " +
                           std::to_string(b));
      }
    }
    optimizer.step(model.params);
  }
  return loss_total / static_cast<double>(data.size());
}

Predictions predict(const ModelState& model, const LabeledDataset& data) {
  Predictions out;
  out.labels.reserve(data.size());
  out.predicted.reserve(data.size());
  double loss_total = 0.0;
  for (const Sample& s : data.samples) {
    const Tensor logits = predict_logits(model, s.image);
    out.labels.push_back(s.label);
    out.predicted.push_back(argmax(logits, 0).front());
    loss_total += cross_entropy(logits, s.label);
  }
  out.mean_loss = data.empty() ? 0.0 : loss_total / static_cast<double>(data.size());
  return out;
}

EvalReport evaluate(const ModelState& model, const LabeledDataset& data) {
  if (data.empty()) throw UsageError("evaluate: empty dataset");
  const Predictions p = predict(model, data);
  return evaluate_predictions(p.labels, p.predicted, model.config.num_classes);
}

std::string epoch_csv_header() { return "epoch,split,accuracy,loss\n"; }

std::string to_csv_row(const EpochRecord& record) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g\n", record.epoch, record.split.c_str(),
                record.accuracy, record.loss);
  return buf;
}

std::vector<EpochRecord> fit(ModelState& model, const LabeledDataset& train,
                             const LabeledDataset& test, const TrainConfig& tcfg,
                             const std::function<void(const EpochRecord&)>& on_epoch) {
  tcfg.validate();
  auto optimizer = make_optimizer(tcfg);
  std::vector<EpochRecord> records;
  auto emit = [&](EpochRecord r) {
    if (on_epoch) on_epoch(r);
    records.push_back(std::move(r));
  };
  for (std::size_t epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    train_epoch(model, train, tcfg, *optimizer, epoch);
    const Predictions tr = predict(model, train);
    emit({epoch, "train", evaluate_predictions(tr.labels, tr.predicted, model.config.num_classes).accuracy,
          tr.mean_loss});
    if (!test.empty()) {
      const Predictions te = predict(model, test);
      emit({epoch, "test",
            evaluate_predictions(te.labels, te.predicted, model.config.num_classes).accuracy,
            te.mean_loss});
    }
  }
  return records;
}

}  // namespace resvit
