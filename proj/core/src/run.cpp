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


#include "resvit/run.hpp"

#include <fstream>

#include <json.hpp>

#include "resvit/checkpoint.hpp"

namespace resvit {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw IoError("cannot write " + path.string());
}

void write_reports(const fs::path& out, const EvalReport& report,
                   const std::vector<std::string>& class_names) {
  write_text(out / kReportJsonFile, to_json(report));
  write_text(out / kReportTableFile, to_table(report, class_names));
}

void prepare_out_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw IoError("cannot create output directory " + out.string());
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> load_split(RunConfig& rc) {
  rc.validate();
  LabeledDataset ds;
  if (rc.data == "synthetic") {
    ds = synth_dataset(rc.model.num_classes, rc.synth_per_class, rc.model.image_size, rc.seed,
                       rc.model.channels, rc.synth_noise);
  } else {
    ds = load_folder_dataset(rc.data, rc.model.image_size, rc.model.channels);
    rc.model.num_classes = ds.num_classes();
  }
  return split(ds, rc.split_ratio, rc.seed);
}

TrainOutcome run_train(RunConfig rc, std::ostream* log) {
  auto [train_set, test_set] = load_split(rc);
  prepare_out_dir(rc.out);
  write_text(rc.out / kRunConfigFile, format_key_values(rc.to_key_values()));

  TrainOutcome outcome{init_params(rc.model, rc.seed), {}, {}};
  std::string csv = epoch_csv_header();
  outcome.epochs = fit(outcome.model, train_set, test_set, rc.train, [&](const EpochRecord& r) {
    csv += to_csv_row(r);
    if (log) *log << "epoch " << r.epoch << " " << r.split << " accuracy " << r.accuracy
                  << " loss " << r.loss << '\n';
  });
  write_text(rc.out / kEpochsFile, csv);
  save_checkpoint(rc.out / kCheckpointFile, outcome.model);

  outcome.report = evaluate(outcome.model, test_set);
  write_reports(rc.out, outcome.report, test_set.class_names);
  if (rc.dump_attention) {
    write_text(rc.out / kAttentionFile, attention_json(outcome.model, test_set));
  }
  return outcome;
}

EvalReport run_eval(RunConfig rc, const fs::path& checkpoint, const std::string& which_split,
                    std::ostream* log) {
  if (which_split != "train" && which_split != "test" && which_split != "all") {
    throw ConfigError("split must be train, test or all, got '" + which_split + "'");
  }
  const ModelState model = load_checkpoint(checkpoint);
  // Geometry comes from the checkpoint; the data source and split from rc.
  rc.model = model.config;
  auto [train_set, test_set] = load_split(rc);
  if (rc.model.num_classes != model.config.num_classes) {
    throw ConfigError("dataset has " + std::to_string(rc.model.num_classes) +
                      " classes but the checkpoint was trained for " +
                      std::to_string(model.config.num_classes));
  }
  LabeledDataset data;
  if (which_split == "train") {
    data = std::move(train_set);
  } else if (which_split == "test") {
    data = std::move(test_set);
  } else {
    data = std::move(train_set);
    for (auto& s : test_set.samples) data.samples.push_back(std::move(s));
  }
  const EvalReport report = evaluate(model, data);
  prepare_out_dir(rc.out);
  write_reports(rc.out, report, data.class_names);
  if (rc.dump_attention) write_text(rc.out / kAttentionFile, attention_json(model, data));
  if (log) *log << to_table(report, data.class_names);
  return report;
}

std::string attention_json(const ModelState& model, const LabeledDataset& data) {
  nlohmann::ordered_json j;
  j["variant"] = std::string(to_string(model.config.variant));
  j["norm"] = std::string(to_string(model.config.norm_policy));
  nlohmann::ordered_json samples = nlohmann::ordered_json::array();
  for (const Sample& s : data.samples) {
    ad::Tape tape;
    const ForwardResult r = forward(tape, s.image, model, {.keep_traces = true});
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const AttentionTrace& t : r.traces) {
      blocks.push_back({{"norms", t.norms}, {"selected", t.selected}, {"ranking", t.ranking()}});
    }
    samples.push_back({{"id", s.id}, {"label", s.label}, {"blocks", std::move(blocks)}});
  }
  j["samples"] = std::move(samples);
  return j.dump(2) + "\n";
}

}  // namespace resvit
