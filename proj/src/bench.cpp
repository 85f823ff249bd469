// bench.cpp

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

#include "sfb/bench.h"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"
#include "sfb/errors.h"

namespace sfb {

LikelihoodTensor random_likelihoods(std::size_t states, std::size_t frames,
                                    std::uint64_t seed, double lo, double hi) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InfeasibleError("random_likelihoods: need finite lo <= hi");
  std::mt19937_64 engine(seed);
  LikelihoodTensor v(states, frames);
  for (std::size_t k = 0; k < states; ++k)
    for (std::size_t n = 0; n < frames; ++n) {
      const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      v.set(k, n, lo + (hi - lo) * u);
    }
  return v;
}

std::size_t effective_batch(const BenchConfig &cfg) {
  const auto scaled = std::llround(static_cast<double>(cfg.batch) * cfg.scale);
  return static_cast<std::size_t>(std::max<long long>(1, scaled));
}

std::size_t estimate_bench_bytes(std::size_t composed_states, std::size_t composed_nnz,
                                 std::size_t frames) {
  // likelihood tensors, emissions, alphas, betas, returned posteriors
  const std::size_t lattice = composed_states * (frames + 1) * sizeof(double);
  // CSR + CSC of the composed matrix, plus the triplet list used to build it
  const std::size_t matrix = composed_nnz * (2 * (sizeof(double) + sizeof(Index)) + 16);
  return 5 * lattice + 2 * matrix;
}

namespace {

std::size_t PhysicalMemory() {
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page = sysconf(_SC_PAGE_SIZE);
  if (pages <= 0 || page <= 0) return std::size_t(1) << 32;
  return static_cast<std::size_t>(pages) * static_cast<std::size_t>(page);
}

}  // namespace

BenchRecord run_bench(const BenchConfig &cfg) {
  if (cfg.reps < 3) throw InfeasibleError("bench: repetitions must be >= 3");
  if (cfg.frames == 0) throw InfeasibleError("bench: frames must be >= 1");
  const bool alignment = cfg.kind == GraphKind::kAlignment;
  const std::size_t states = cfg.states ? cfg.states : (alignment ? kAlignmentStates : kNgramStates);
  const std::size_t arcs = cfg.arcs ? cfg.arcs : (alignment ? kAlignmentArcs : kNgramArcs);
  const std::size_t batch = effective_batch(cfg);

  const WeightedGraph g = random_graph(states, arcs, cfg.seed, cfg.kind);
  const std::size_t composed_states = g.num_states() * batch;
  const std::size_t composed_nnz = g.num_arcs() * batch;
  const std::size_t need = estimate_bench_bytes(composed_states, composed_nnz, cfg.frames);
  const std::size_t limit =
      cfg.memory_limit_bytes ? cfg.memory_limit_bytes : PhysicalMemory() / 10 * 8;
  if (need > limit) {
    std::ostringstream msg;
    msg << "bench: configuration needs an estimated " << (need >> 20) << " MiB (batch "
        << batch << ", " << composed_states << " composed states, " << cfg.frames
        << " frames) but the limit is " << (limit >> 20) << " MiB";
    throw InfeasibleError(msg.str());
  }

  const BatchGraph bg = replicate(g, batch, cfg.frames);
  InferenceOptions opts;
  opts.threads = cfg.threads;

  BenchRecord rec;
  rec.kind = to_string(cfg.kind);
  rec.states = states;
  rec.arcs = arcs;
  rec.batch = batch;
  rec.frames = cfg.frames;
  rec.reps = cfg.reps;
  rec.composed_nnz = bg.composed.num_arcs();

  for (std::size_t r = 0; r < cfg.reps; ++r) {
    std::vector<LikelihoodTensor> vs;
    vs.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i)
      vs.push_back(random_likelihoods(states, cfg.frames,
                                      cfg.seed + 1 + r * batch + i, cfg.loglik_min,
                                      cfg.loglik_max));
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = forward_backward_batch(bg, vs, opts);
    const auto t1 = std::chrono::steady_clock::now();
    rec.times_s.push_back(std::chrono::duration<double>(t1 - t0).count());
  }

  std::vector<double> sorted = rec.times_s;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  rec.median_s = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  rec.spread_s = sorted.back() - sorted.front();
  double total = 0;
  for (double t : rec.times_s) total += t;
  rec.nnz_per_s = static_cast<double>(rec.composed_nnz) * static_cast<double>(cfg.frames) *
                  static_cast<double>(cfg.reps) / total;
  return rec;
}

std::string bench_json(std::span<const BenchRecord> records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &r : records) {
    arr.push_back({{"kind", r.kind},
                   {"K", r.states},
                   {"arcs", r.arcs},
                   {"batch", r.batch},
                   {"frames", r.frames},
                   {"reps", r.reps},
                   {"median_s", r.median_s},
                   {"spread_s", r.spread_s},
                   {"nnz_per_s", r.nnz_per_s},
                   {"composed_nnz", r.composed_nnz},
                   {"times_s", r.times_s}});
  }
  return arr.dump(2) + "\n";
}

std::string bench_csv(std::span<const BenchRecord> records) {
  std::ostringstream out;
  out.precision(9);
  out << "kind,K,arcs,batch,frames,reps,median_s,spread_s,nnz_per_s\n";
  for (const auto &r : records)
    out << r.kind << ',' << r.states << ',' << r.arcs << ',' << r.batch << ',' << r.frames
        << ',' << r.reps << ',' << r.median_s << ',' << r.spread_s << ',' << r.nnz_per_s
        << '\n';
  return out.str();
}

}  // namespace sfb
