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

// Wall-clock scaling of the standard and residual attention cores.
//
// Both variants run attention_core() on the same pre-projected heads, so the
// measured difference is exactly the residual bookkeeping: one norm per
// head, one argmax and one tiled add.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "resvit/attention.hpp"

namespace resvit {

struct BenchConfig {
  std::vector<std::size_t> ns{64, 128, 256, 512};
  std::size_t heads = 8;
  std::size_t d_head = 32;
  std::size_t reps = 9;
  std::uint64_t seed = 0;
  NormPolicy policy = NormPolicy::kInducedL1;
  bool single_precision = false;
  /// Each timed sample repeats the kernel until it spans at least this long,
  /// so one scheduler hiccup cannot dominate a sample at small n.
  double min_sample_seconds = 0.05;

  void validate() const;
};

struct BenchResult {
  AttentionVariant variant = AttentionVariant::kStandard;
  std::size_t n = 0;
  std::size_t heads = 0;
  std::size_t d_head = 0;
  std::size_t reps = 0;
  /// Median over timed repetitions; the warm-up run is discarded.
  double median_seconds = 0.0;
  /// Log-log slope of median time vs n for this variant (same on every row).
  double slope = 0.0;
  /// Core calls per timed sample, raised when the clock is too coarse.
  std::size_t inner_iterations = 1;
};

struct BenchReport {
  std::vector<BenchResult> results;  ///< standard then residual, per n
  double slope_standard = 0.0;
  double slope_residual = 0.0;
  /// residual / standard median time, per n in config order.
  std::vector<double> ratios;
  /// Both variants produced bit-identical attention matrices.
  bool identical_probs = false;
  std::vector<std::string> notes;

  double max_ratio() const;
};

struct BenchGate {
  double max_ratio = 1.15;
  double slope_min = 1.6;
  double slope_max = 2.4;

  bool passes(const BenchReport& report) const;
};

BenchReport bench_attention(const BenchConfig& config);

/// Least-squares slope of log(time) against log(n) over the upper half of
/// the points (by n), i.e. the last ceil(k/2) of k sorted points.
double fit_loglog_slope(std::span<const std::size_t> ns, std::span<const double> seconds);

/// "variant,n,h,d_head,reps,median_seconds,slope" plus one row per result.
std::string to_csv(const BenchReport& report);

/// Runs the full multi-head attention once per variant with operation
/// counting enabled.
AttentionOpCounts count_attention_ops(std::size_t n, std::size_t heads, std::size_t d_head,
                                      AttentionVariant variant, NormPolicy policy,
                                      std::uint64_t seed = 0);

}  // namespace resvit
