// tests/oracle_test.cc

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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "sfb/errors.h"
#include "sfb/oracle.h"
#include "test_util.h"

namespace sfb {
namespace {

using test::kInf;

/// The same graph with states renamed by `perm` (new index = perm[old]).
WeightedGraph Relabel(const WeightedGraph &g, const std::vector<std::size_t> &perm) {
  std::vector<Triplet<LogWeight>> trips;
  for (const auto &t : g.transitions().triplets())
    trips.push_back({static_cast<Index>(perm[t.row]), static_cast<Index>(perm[t.col]), t.weight});
  const std::size_t k = g.num_states();
  std::vector<LogWeight> pi(k), omega(k);
  for (std::size_t s = 0; s < k; ++s) {
    pi[perm[s]] = g.initial().at(s);
    omega[perm[s]] = g.final_weights().at(s);
  }
  return WeightedGraph(SparseMatrix<LogWeight>::from_triplets(k, k, trips),
                       SparseVector<LogWeight>::from_dense(pi),
                       SparseVector<LogWeight>::from_dense(omega));
}

TEST(BruteForce, OneStateAnalytic) {
  LikelihoodTensor v(1, 3);
  v.set(0, 0, -1.0);
  v.set(0, 1, -2.0);
  v.set(0, 2, -3.0);
  const auto o = brute_force(test::OneStateGraph(-0.5), v);
  EXPECT_EQ(o.log_z, -7.0);
  EXPECT_EQ(o.best_score, -7.0);
  EXPECT_EQ(o.best_path, (std::vector<std::size_t>{0, 0, 0}));
  for (std::size_t n = 0; n < 3; ++n) EXPECT_EQ(o.posteriors(0, n), 1.0);
}

TEST(BruteForce, AgreesWithFiftyDigitEnumeration) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const auto g = test::RandomSmallGraph(rng);
    const auto v = test::RandomLikelihoods(rng, g.num_states(), 1 + test::Below(rng, 6));
    const auto o = brute_force(g, v);
    const auto big = test::BigPathSum(g, v);
    if (big.log_z == -kInf) {
      EXPECT_EQ(o.log_z, -kInf);
      EXPECT_TRUE(o.best_path.empty());
      continue;
    }
    EXPECT_NEAR(o.log_z, big.log_z, 1e-13);
    EXPECT_LE(test::MaxAbsDiff(o.posteriors, big.posteriors), 1e-14);
  }
}

TEST(BruteForce, InvariantUnderRelabeling) {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 40; ++i) {
    const auto g = test::RandomSmallGraph(rng, {5, 12});
    const std::size_t k = g.num_states(), n = 1 + test::Below(rng, 5);
    const auto v = test::RandomLikelihoods(rng, k, n);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    LikelihoodTensor pv(k, n);
    for (std::size_t s = 0; s < k; ++s)
      for (std::size_t t = 0; t < n; ++t) pv.set(perm[s], t, v(s, t));
    const auto a = brute_force(g, v);
    const auto b = brute_force(Relabel(g, perm), pv);
    if (a.log_z == -kInf) {
      EXPECT_EQ(b.log_z, -kInf);
      continue;
    }
    EXPECT_NEAR(a.log_z, b.log_z, 1e-13);
    for (std::size_t s = 0; s < k; ++s)
      for (std::size_t t = 0; t < n; ++t)
        EXPECT_NEAR(a.posteriors(s, t), b.posteriors(perm[s], t), 1e-14);
  }
}

TEST(BruteForce, GuardRejectsLargeProblems) {
  const auto g = test::DenseGraph(10);
  EXPECT_THROW(brute_force(g, LikelihoodTensor(10, 8)), InfeasibleError);
  EXPECT_THROW(brute_force(g, LikelihoodTensor(10, 3), 999), InfeasibleError);
  EXPECT_NO_THROW(brute_force(g, LikelihoodTensor(10, 3), 1000));
}

}  // namespace
}  // namespace sfb
