// oracle.cpp

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

#include "sfb/oracle.h"

#include <cmath>
#include <limits>
#include <string>

#include "sfb/errors.h"

namespace sfb {

namespace {

constexpr long double kNegInfL = -std::numeric_limits<long double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0;
  long double comp_ = 0;
};

// Odometer over all K^N sequences.  Returns false after the last one.
bool NextPath(std::vector<std::size_t> &path, std::size_t k) {
  for (std::size_t n = path.size(); n-- > 0;) {
    if (++path[n] < k) return true;
    path[n] = 0;
  }
  return false;
}

}  // namespace

OracleResult brute_force(const WeightedGraph &g, const LikelihoodTensor &v,
                         std::size_t max_paths) {
  const std::size_t k = g.num_states(), n_frames = v.num_frames();
  if (v.num_states() != k) throw DimensionError("brute_force: likelihood states mismatch");
  {
    long double count = 1;
    for (std::size_t n = 0; n < n_frames; ++n) count *= static_cast<long double>(k);
    if (count > static_cast<long double>(max_paths))
      throw InfeasibleError("brute_force: " + std::to_string(k) + "^" +
                            std::to_string(n_frames) + " paths exceed the guard of " +
                            std::to_string(max_paths));
  }

  // Dense tables straight from the stored values.
  std::vector<double> arc(k * k, kNegInf), pi(k, kNegInf), omega(k, kNegInf);
  for (const auto &t : g.transitions().triplets()) arc[t.row * k + t.col] = t.weight.value();
  for (std::size_t e = 0; e < g.initial().nnz(); ++e)
    pi[g.initial().indices()[e]] = g.initial().values()[e].value();
  for (std::size_t e = 0; e < g.final_weights().nnz(); ++e)
    omega[g.final_weights().indices()[e]] = g.final_weights().values()[e].value();

  auto log_score = [&](const std::vector<std::size_t> &p) {
    long double s = static_cast<long double>(pi[p[0]]) + v(p[0], 0);
    for (std::size_t n = 1; n < n_frames; ++n)
      s += static_cast<long double>(arc[p[n - 1] * k + p[n]]) + v(p[n], n);
    s += omega[p.back()];
    return s;
  };
  // Same grouping as the max-plus recursion, in double.
  auto tropical_score = [&](const std::vector<std::size_t> &p) {
    double s = v(p[0], 0) + pi[p[0]];
    for (std::size_t n = 1; n < n_frames; ++n) s = v(p[n], n) + (arc[p[n - 1] * k + p[n]] + s);
    return s + omega[p.back()];
  };

  OracleResult out;
  out.posteriors = DenseMatrix<double>(k, n_frames, 0.0);
  out.best_score = kNegInf;

  long double max_log = kNegInfL;
  std::vector<std::size_t> path(n_frames, 0);
  do {
    const long double s = log_score(path);
    if (s > max_log) max_log = s;
    const double t = tropical_score(path);
    if (t > out.best_score) {
      out.best_score = t;
      out.best_path = path;
    }
  } while (NextPath(path, k));

  if (max_log == kNegInfL) {
    out.log_z = kNegInf;
    return out;
  }

  CompensatedSum total;
  std::vector<CompensatedSum> cell(k * n_frames);
  std::fill(path.begin(), path.end(), 0);
  do {
    const long double s = log_score(path);
    if (s == kNegInfL) continue;
    const long double w = std::exp(s - max_log);
    total.add(w);
    for (std::size_t n = 0; n < n_frames; ++n) cell[path[n] * n_frames + n].add(w);
  } while (NextPath(path, k));

  const long double z = total.value();
  out.log_z = static_cast<double>(max_log + std::log(z));
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t n = 0; n < n_frames; ++n)
      out.posteriors(s, n) = static_cast<double>(cell[s * n_frames + n].value() / z);
  return out;
}

}  // namespace sfb
