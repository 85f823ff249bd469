// sfb/bench.h

// Copyright 2026  The sfb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SFB_BENCH_H_
#define SFB_BENCH_H_

// Mini-batch timing harness: one graph replicated I times, fresh random
// likelihoods per repetition, forward_backward_batch timed end to end.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sfb/fsm.h"
#include "sfb/inference.h"

namespace sfb {

/// Graph sizes of a typical numerator (alignment) graph and a 3-gram
/// phonotactic denominator graph.
inline constexpr std::size_t kAlignmentStates = 454;
inline constexpr std::size_t kAlignmentArcs = 1036;
inline constexpr std::size_t kNgramStates = 3022;
inline constexpr std::size_t kNgramArcs = 50984;
inline constexpr std::size_t kBenchFrames = 700;
inline constexpr std::size_t kBenchBatch = 128;

/// Uniform log-likelihoods in [lo, hi], deterministic in `seed`.
LikelihoodTensor random_likelihoods(std::size_t states, std::size_t frames,
                                    std::uint64_t seed, double lo = -10.0, double hi = 0.0);

struct BenchConfig {
  GraphKind kind = GraphKind::kAlignment;
  /// 0 selects the default size for `kind`.
  std::size_t states = 0;
  std::size_t arcs = 0;
  /// Full-scale batch size; the run uses max(1, round(batch * scale)).
  std::size_t batch = kBenchBatch;
  double scale = 1.0 / 16.0;
  std::size_t frames = kBenchFrames;
  std::size_t reps = 5;
  int threads = 1;
  std::uint64_t seed = 0;
  double loglik_min = -10.0;
  double loglik_max = 0.0;
  /// 0 means 80% of physical memory.
  std::size_t memory_limit_bytes = 0;
};

struct BenchRecord {
  std::string kind;
  std::size_t states = 0;
  std::size_t arcs = 0;
  std::size_t batch = 0;
  std::size_t frames = 0;
  std::size_t reps = 0;
  double median_s = 0.0;
  double spread_s = 0.0;  // max - min
  double nnz_per_s = 0.0;
  std::size_t composed_nnz = 0;
  std::vector<double> times_s;
};

std::size_t effective_batch(const BenchConfig &cfg);

/// Rough peak bytes for one batched forward-backward.
std::size_t estimate_bench_bytes(std::size_t composed_states, std::size_t composed_nnz,
                                 std::size_t frames);

/// Throws InfeasibleError when sizes cannot be generated, reps < 3, or the
/// memory estimate exceeds the limit (the message carries the estimate).
BenchRecord run_bench(const BenchConfig &cfg);

std::string bench_json(std::span<const BenchRecord> records);
std::string bench_csv(std::span<const BenchRecord> records);

}  // namespace sfb

#endif  // SFB_BENCH_H_
