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


// resvit: train, evaluate, gradient-check and benchmark ViT classifiers
// with standard or residual multi-head attention.
//
// Exit codes: 0 success, 1 other failure (I/O, failed gate),
// 2 invalid configuration, 3 numeric failure during a run.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resvit/bench.hpp"
#include "resvit/error.hpp"
#include "resvit/model_check.hpp"
#include "resvit/run.hpp"

namespace {

using namespace resvit;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

// Flags shared by train and eval; each overrides the matching config key.
struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  std::string variant, norm, data, out;
  bool dump_attention = false;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config, "key=value config file");
    cmd.add_option("--set", sets, "override one config key (key=value), repeatable");
    cmd.add_option("--seed", seed, "seed for init, data, split and batch order");
    cmd.add_option("--variant", variant, "attention variant")
        ->check(CLI::IsMember({"standard", "residual"}));
    cmd.add_option("--norm", norm, "head score")->check(CLI::IsMember({"entrywise", "induced"}));
    cmd.add_option("--data", data, "dataset folder or 'synthetic'");
    cmd.add_option("--out", out, "output directory");
    cmd.add_flag("--dump-attention", dump_attention, "write per-sample head scores");
  }

  RunConfig resolve(const CLI::App& cmd) const {
    KeyValues kv;
    if (!config.empty()) kv = read_key_value_file(config);
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
      kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (cmd.count("--seed")) kv["seed"] = std::to_string(seed);
    if (!variant.empty()) kv["variant"] = variant;
    if (!norm.empty()) kv["norm"] = norm;
    if (!data.empty()) kv["data"] = data;
    if (!out.empty()) kv["out"] = out;
    if (dump_attention) kv["dump_attention"] = "true";
    RunConfig rc = RunConfig::from_key_values(kv);
    rc.validate();
    return rc;
  }
};

int cmd_train(const CommonFlags& flags, const CLI::App& cmd) {
  const RunConfig rc = flags.resolve(cmd);
  const TrainOutcome outcome = run_train(rc, &std::cerr);
  std::cout << to_table(outcome.report, {}) << "artifacts written to " << rc.out.string() << '\n';
  return 0;
}

int cmd_eval(const CommonFlags& flags, const CLI::App& cmd, const std::string& checkpoint,
             const std::string& which) {
  const RunConfig rc = flags.resolve(cmd);
  const EvalReport report = run_eval(rc, checkpoint, which);
  std::cout << to_json(report) << to_table(report, {});
  return 0;
}

int cmd_grad_check(const CommonFlags& flags, const CLI::App& cmd, double eps) {
  const RunConfig rc = flags.resolve(cmd);
  ViTConfig cfg = tiny_grad_check_config();
  cfg.variant = rc.model.variant;
  cfg.norm_policy = rc.model.norm_policy;
  const ModelGradCheck r = check_model_gradients(cfg, rc.seed, eps);
  std::printf("coordinates %zu  loss %.6f  eps %g\n", r.report.coordinates, r.loss, eps);
  for (const GradCheckEntry& e : r.report.per_param) {
    std::printf("  %-24s max rel error %.3e\n", e.param.c_str(), e.rel_error);
  }
  std::printf("worst %s[%zu]: analytic %.9e numeric %.9e\n", r.report.worst.param.c_str(),
              r.report.worst.index, r.report.worst.analytic, r.report.worst.numeric);
  if (cfg.variant == AttentionVariant::kResidual) {
    std::printf("top-two head score gap %.3e, selection %s under perturbation\n", r.min_top_gap,
                r.selection_stable ? "stable" : "CHANGED");
  }
  std::printf("max relative error %.3e (threshold 1e-5)\n", r.report.max_rel_error);
  // Near a tie the finite differences straddle a selection change and mean nothing.
  const bool selection_ok =
      cfg.variant != AttentionVariant::kResidual || (r.min_top_gap > 1e-6 && r.selection_stable);
  return r.report.max_rel_error < 1e-5 && selection_ok ? 0 : kExitFailure;
}

struct BenchFlags {
  BenchConfig cfg;
  std::string norm = "induced";
  std::string out;
};

int cmd_bench(BenchFlags flags) {
  flags.cfg.policy = parse_norm_policy(flags.norm);
  const BenchReport report = bench_attention(flags.cfg);
  const std::string csv = to_csv(report);
  std::cout << csv;
  if (!flags.out.empty()) {
    std::filesystem::create_directories(flags.out);
    std::ofstream(std::filesystem::path(flags.out) / "bench.csv", std::ios::binary) << csv;
  }
  for (const auto& note : report.notes) std::cerr << "note: " << note << '\n';
  const BenchGate gate;
  std::fprintf(stderr, "max residual/standard ratio %.4f (<= %.2f), standard slope %.3f (in [%.1f, %.1f]), "
               "residual slope %.3f, identical attention %s\n",
               report.max_ratio(), gate.max_ratio, report.slope_standard, gate.slope_min,
               gate.slope_max, report.slope_residual, report.identical_probs ? "yes" : "NO");
  return gate.passes(report) ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resvit: Vision Transformer with residual multi-head attention"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, grad_flags;
  CLI::App* train = app.add_subcommand("train", "train a model and write run artifacts");
  train_flags.attach(*train);

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_flags.attach(*eval);
  std::string checkpoint, which = "test";
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--split", which, "train, test or all")->check(CLI::IsMember({"train", "test", "all"}));

  CLI::App* grad = app.add_subcommand("grad-check", "finite-difference check on a tiny model");
  grad_flags.attach(*grad);
  double eps = 1e-5;
  grad->add_option("--eps", eps, "central-difference step");

  CLI::App* bench = app.add_subcommand("bench", "time standard vs residual attention");
  BenchFlags bench_flags;
  bench->add_option("--ns", bench_flags.cfg.ns, "sequence lengths");
  bench->add_option("--heads", bench_flags.cfg.heads, "heads");
  bench->add_option("--d-head", bench_flags.cfg.d_head, "per-head width");
  bench->add_option("--reps", bench_flags.cfg.reps, "timed repetitions per n");
  bench->add_option("--seed", bench_flags.cfg.seed, "input seed");
  bench->add_option("--norm", bench_flags.norm, "head score")->check(CLI::IsMember({"entrywise", "induced"}));
  bench->add_flag("--float", bench_flags.cfg.single_precision, "time in single precision");
  bench->add_option("--out", bench_flags.out, "also write bench.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*train) return cmd_train(train_flags, *train);
    if (*eval) return cmd_eval(eval_flags, *eval, checkpoint, which);
    if (*grad) return cmd_grad_check(grad_flags, *grad, eps);
    if (*bench) return cmd_bench(bench_flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
