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

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "resvit/data.hpp"
#include "resvit/metrics.hpp"
#include "resvit/vit.hpp"

namespace resvit {

/// -log softmax(logits)[label], computed as logsumexp(logits) - logits[label].
/// Throws UsageError if label is out of range.
double cross_entropy(const Tensor& logits, std::size_t label);

enum class OptimizerKind { kSgd, kAdam };

OptimizerKind parse_optimizer(std::string_view text);
std::string_view to_string(OptimizerKind kind);

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 8;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  /// Applies one update from the gradients currently held in `params`.
  virtual void step(ParameterSet& params) = 0;
};

class Sgd final : public Optimizer {
 public:
  explicit Sgd(double learning_rate) : lr_(learning_rate) {}
  void step(ParameterSet& params) override;

 private:
  double lr_;
};

class Adam final : public Optimizer {
 public:
  Adam(double learning_rate, double beta1, double beta2, double eps)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(ParameterSet& params) override;

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<Tensor> m_, v_;
};

std::unique_ptr<Optimizer> make_optimizer(const TrainConfig& tcfg);

/**
 * One pass over `data` in a shuffled order derived from (tcfg.seed, epoch).
 * Each minibatch runs one tape per sample, averages the cross-entropy
 * gradients, and takes one optimizer step. Returns the mean sample loss.
 *
 * Throws NumericError naming the batch index if a loss is non-finite.
 */
double train_epoch(ModelState& model, const LabeledDataset& data, const TrainConfig& tcfg,
                   Optimizer& optimizer, std::size_t epoch);

struct Predictions {
  std::vector<std::size_t> labels;
  std::vector<std::size_t> predicted;
  double mean_loss = 0.0;
};

/// Forward pass over every sample; argmax of the logits is the prediction.
Predictions predict(const ModelState& model, const LabeledDataset& data);

EvalReport evaluate(const ModelState& model, const LabeledDataset& data);

struct EpochRecord {
  std::size_t epoch = 0;
  std::string split;
  double accuracy = 0.0;
  double loss = 0.0;
};

std::string epoch_csv_header();
std::string to_csv_row(const EpochRecord& record);

/// Runs tcfg.epochs epochs, recording train and (if non-empty) test
/// accuracy/loss after each one. `on_epoch` sees each record as produced.
std::vector<EpochRecord> fit(ModelState& model, const LabeledDataset& train,
                             const LabeledDataset& test, const TrainConfig& tcfg,
                             const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace resvit
