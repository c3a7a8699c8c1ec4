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

#include "resvit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace resvit {

void BenchConfig::validate() const {
  if (ns.empty()) throw ConfigError("bench: no sequence lengths");
  for (auto n : ns) {
    if (n < 8) throw ConfigError("bench: every n must be at least 8, got " + std::to_string(n));
  }
  if (reps < 5) throw ConfigError("bench: reps must be at least 5");
  if (heads == 0 || d_head == 0) throw ConfigError("bench: heads and d_head must be positive");
  if (!(min_sample_seconds >= 0.0)) throw ConfigError("bench: min_sample_seconds must be >= 0");
}

double BenchReport::max_ratio() const {
  return ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
}

bool BenchGate::passes(const BenchReport& report) const {
  return report.max_ratio() <= max_ratio && report.slope_standard >= slope_min &&
         report.slope_standard <= slope_max;
}

double fit_loglog_slope(std::span<const std::size_t> ns, std::span<const double> seconds) {
  if (ns.size() != seconds.size() || ns.size() < 2) {
    throw UsageError("fit_loglog_slope: need at least two (n, time) pairs");
  }
  std::vector<std::size_t> order(ns.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ns[a] < ns[b]; });
  const std::size_t first = std::min(ns.size() / 2, ns.size() - 2);

  std::vector<double> xs, ys;
  for (std::size_t i = first; i < order.size(); ++i) {
    xs.push_back(std::log(static_cast<double>(ns[order[i]])));
    ys.push_back(std::log(seconds[order[i]]));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw UsageError("fit_loglog_slope: all n equal");
  return sxy / sxx;
}

namespace {

using Clock = std::chrono::steady_clock;

double clock_resolution_seconds() {
  double best = 1.0;
  for (int i = 0; i < 200; ++i) {
    const auto t0 = Clock::now();
    auto t1 = Clock::now();
    while (t1 == t0) t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <typename T>
std::vector<HeadInputs<T>> random_heads(std::size_t n, std::size_t heads, std::size_t d,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto matrix = [&] {
    BasicTensor<T> m(Shape{n, d});
    for (auto& v : m.data()) v = static_cast<T>(normal(rng));
    return m;
  };
  std::vector<HeadInputs<T>> out;
  for (std::size_t i = 0; i < heads; ++i) {
    auto q = matrix();
    auto k = matrix();
    auto v = matrix();
    out.push_back({std::move(q), std::move(k), std::move(v)});
  }
  return out;
}

// Sink that keeps the optimizer from discarding benchmarked work.
volatile double g_sink = 0.0;

template <typename T>
double time_once(std::span<const HeadInputs<T>> heads, AttentionVariant variant,
                 NormPolicy policy) {
  const auto t0 = Clock::now();
  const auto out = attention_core(heads, variant, policy);
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  g_sink = g_sink + static_cast<double>(out[0]);
  return seconds;
}

// One timed sample per variant. The variants alternate call by call (and
// swap which goes first) so both see the same machine state; on shared or
// virtualised CPUs the available speed drifts over seconds.
template <typename T>
std::pair<double, double> time_pair(std::span<const HeadInputs<T>> heads, NormPolicy policy,
                                    std::size_t inner) {
  double standard = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < inner; ++i) {
    if (i % 2 == 0) {
      standard += time_once(heads, AttentionVariant::kStandard, policy);
      residual += time_once(heads, AttentionVariant::kResidual, policy);
    } else {
      residual += time_once(heads, AttentionVariant::kResidual, policy);
      standard += time_once(heads, AttentionVariant::kStandard, policy);
    }
  }
  const double k = static_cast<double>(inner);
  return {standard / k, residual / k};
}

template <typename T>
BenchReport run(const BenchConfig& cfg) {
  BenchReport report;
  const double resolution = clock_resolution_seconds();
  std::vector<double> standard_medians, residual_medians;
  bool identical = true;

  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    const std::size_t n = cfg.ns[ni];
    const auto heads = random_heads<T>(n, cfg.heads, cfg.d_head, cfg.seed + ni);
    const std::span<const HeadInputs<T>> view(heads);

    BasicAttentionTrace<T> ts, tr;
    attention_core(view, AttentionVariant::kStandard, cfg.policy, &ts);
    attention_core(view, AttentionVariant::kResidual, cfg.policy, &tr);
    identical = identical && ts.probs == tr.probs;

    // Warm-up, discarded; also sizes the inner loop.
    const double warm = time_pair(view, cfg.policy, 1).first;
    const double one_call = std::max(warm, 1e-12);
    std::size_t inner = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(cfg.min_sample_seconds / one_call)));
    if (resolution > 0.01 * one_call * static_cast<double>(inner)) {
      inner = static_cast<std::size_t>(std::ceil(100.0 * resolution / one_call));
      report.notes.push_back("n=" + std::to_string(n) + ": clock resolution " +
                             std::to_string(resolution) + " s exceeds 1% of a sample; timing " +
                             std::to_string(inner) + " calls per sample");
    }

    std::vector<double> st, rs;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
      const auto [standard, residual] = time_pair(view, cfg.policy, inner);
      st.push_back(standard);
      rs.push_back(residual);
    }
    standard_medians.push_back(median(st));
    residual_medians.push_back(median(rs));
    report.ratios.push_back(residual_medians.back() / standard_medians.back());
    for (auto [variant, med] : {std::pair{AttentionVariant::kStandard, standard_medians.back()},
                                std::pair{AttentionVariant::kResidual, residual_medians.back()}}) {
      report.results.push_back(BenchResult{variant, n, cfg.heads, cfg.d_head, cfg.reps, med, 0.0, inner});
    }
  }

  report.identical_probs = identical;
  if (cfg.ns.size() >= 2) {
    report.slope_standard = fit_loglog_slope(cfg.ns, standard_medians);
    report.slope_residual = fit_loglog_slope(cfg.ns, residual_medians);
  } else {
    report.notes.push_back("single n: slope not defined");
  }
  for (auto& r : report.results) {
    r.slope = r.variant == AttentionVariant::kStandard ? report.slope_standard : report.slope_residual;
  }
  return report;
}

}  // namespace

BenchReport bench_attention(const BenchConfig& config) {
  config.validate();
  return config.single_precision ? run<float>(config) : run<double>(config);
}

std::string to_csv(const BenchReport& report) {
  std::string out = "variant,n,h,d_head,reps,median_seconds,slope\n";
  char buf[256];
  for (const auto& r : report.results) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%zu,%.9e,%.6f\n",
                  std::string(to_string(r.variant)).c_str(), r.n, r.heads, r.d_head, r.reps,
                  r.median_seconds, r.slope);
    out += buf;
  }
  return out;
}

AttentionOpCounts count_attention_ops(std::size_t n, std::size_t heads, std::size_t d_head,
                                      AttentionVariant variant, NormPolicy policy,
                                      std::uint64_t seed) {
  const std::size_t dim = heads * d_head;
  const auto w = random_attention_weights<double>(dim, seed);
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor x(Shape{n, dim});
  for (auto& v : x.data()) v = normal(rng);
  AttentionOpCounts counts;
  if (variant == AttentionVariant::kStandard) {
    multi_head_attention_standard(x, w, heads, &counts);
  } else {
    multi_head_attention_residual(x, w, heads, policy, &counts);
  }
  return counts;
}

}  // namespace resvit
