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

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "resvit/data.hpp"
#include "resvit/metrics.hpp"
#include "resvit/run_config.hpp"
#include "resvit/train.hpp"

namespace resvit {

/// File names written into RunConfig::out.
inline constexpr const char* kCheckpointFile = "checkpoint.bin";
inline constexpr const char* kEpochsFile = "epochs.csv";
inline constexpr const char* kReportJsonFile = "report.json";
inline constexpr const char* kReportTableFile = "report.txt";
inline constexpr const char* kRunConfigFile = "run_config.txt";
inline constexpr const char* kAttentionFile = "attention.json";

/**
 * Loads the dataset named by `rc.data` and splits it by `rc.split_ratio`
 * with `rc.seed`. For a folder dataset the model's num_classes is set to
 * the number of class folders.
 */
std::pair<LabeledDataset, LabeledDataset> load_split(RunConfig& rc);

struct TrainOutcome {
  ModelState model;
  std::vector<EpochRecord> epochs;
  EvalReport report;  ///< on the test split
};

/**
 * Trains from scratch and writes checkpoint, per-epoch CSV, test-split
 * report (JSON and table), the resolved run config, and, if requested, the
 * per-sample head scores. Output bytes depend only on the config.
 */
TrainOutcome run_train(RunConfig rc, std::ostream* log = nullptr);

/// Evaluates a checkpoint on the named split ("train", "test" or "all")
/// of the dataset in `rc`; writes the report files into `rc.out`.
EvalReport run_eval(RunConfig rc, const std::filesystem::path& checkpoint,
                    const std::string& which_split, std::ostream* log = nullptr);

/// Per-sample, per-block head scores and selections as JSON.
std::string attention_json(const ModelState& model, const LabeledDataset& data);

}  // namespace resvit
