// tests/inference_test.cc

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

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "sfb/errors.h"
#include "sfb/inference.h"
#include "sfb/oracle.h"
#include "test_util.h"

namespace sfb {
namespace {

using test::kInf;

LikelihoodTensor Abc(double a = -1.0, double b = -2.0, double c = -3.0) {
  LikelihoodTensor v(1, 3);
  v.set(0, 0, a);
  v.set(0, 1, b);
  v.set(0, 2, c);
  return v;
}

/// A random non-empty case: graph, likelihoods and the 50-digit oracle.
struct Case {
  WeightedGraph g;
  LikelihoodTensor v;
  test::BigOracle oracle;
};

Case RandomCase(std::mt19937_64 &rng, const test::SmallGraphShape &shape, std::size_t max_frames) {
  while (true) {
    auto g = test::RandomSmallGraph(rng, shape);
    const std::size_t n = 1 + test::Below(rng, max_frames);
    auto v = test::RandomLikelihoods(rng, g.num_states(), n);
    auto oracle = test::BigPathSum(g, v);
    if (oracle.log_z != -kInf) return {std::move(g), std::move(v), std::move(oracle)};
  }
}

TEST(Forward, OneState) {
  const auto alpha = forward(test::OneStateGraph(), Abc());
  EXPECT_EQ(alpha.at(0, 0).value(), -1.0);
  EXPECT_EQ(alpha.at(0, 1).value(), -3.0);
  EXPECT_EQ(alpha.at(0, 2).value(), -6.0);
}

TEST(Forward, AllZeroLikelihoods) {
  const auto g = test::DenseGraph(3);
  const LikelihoodTensor v(3, 4, -kInf);
  const auto alpha = forward(g, v);
  for (std::size_t n = 0; n < 4; ++n)
    for (std::size_t k = 0; k < 3; ++k) EXPECT_TRUE(alpha.at(k, n).is_zero());
  EXPECT_THROW(forward_backward(g, v), EmptyLatticeError);
}

TEST(Forward, UnreachableStatesAreExactlyZero) {
  // Chain of 4: state s is reachable from frame s on.
  const auto g = test::ChainGraph(4);
  std::mt19937_64 rng(1);
  const auto alpha = forward(g, test::RandomLikelihoods(rng, 4, 6));
  for (std::size_t n = 0; n < 6; ++n)
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(alpha.at(k, n).is_zero(), k > n);
}

TEST(Backward, OneState) {
  const auto beta = backward(test::OneStateGraph(), Abc());
  EXPECT_EQ(beta.at(0, 0).value(), -5.0);
  EXPECT_EQ(beta.at(0, 1).value(), -3.0);
  EXPECT_EQ(beta.at(0, 2).value(), 0.0);
}

TEST(Backward, LastFrameIsOmega) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto g = test::RandomSmallGraph(rng);
    const auto v = test::RandomLikelihoods(rng, g.num_states(), 4);
    const auto beta = backward(g, v);
    for (std::size_t k = 0; k < g.num_states(); ++k)
      EXPECT_EQ(beta.at(k, 3), g.final_weights().at(k));
  }
}

TEST(LogMarginal, OneState) {
  const auto alpha = forward(test::OneStateGraph(), Abc());
  EXPECT_EQ(log_marginal(alpha, test::OneStateGraph().final_weights()).value(), -6.0);
}

TEST(LogMarginal, UnreachableFinalsThrow) {
  std::istringstream in("K 2\nI 0 0\nF 1 0\nA 0 1 0\n");
  const auto g = load_graph(in);
  const LikelihoodTensor v(2, 3, -1.0);
  const auto alpha = forward(g, v);
  EXPECT_THROW(log_marginal(alpha, g.final_weights()), EmptyLatticeError);
  try {
    forward_backward(g, v);
    FAIL();
  } catch (const EmptyLatticeError &e) {
    EXPECT_NE(std::string(e.what()).find("no accepting path"), std::string::npos);
  }
}

TEST(Posteriors, OneStateAllOne) {
  const auto out = forward_backward(test::OneStateGraph(), Abc());
  EXPECT_EQ(out.log_z, -6.0);
  for (std::size_t n = 0; n < 3; ++n) {
    EXPECT_EQ(out.posteriors.log_posterior(0, n).value(), 0.0);
    EXPECT_EQ(out.posteriors.probability(0, n), 1.0);
  }
}

TEST(Posteriors, SymmetricTwoState) {
  const auto g = test::DenseGraph(2);
  LikelihoodTensor v(2, 5);
  for (std::size_t n = 0; n < 5; ++n) {
    v.set(0, n, -0.3 * static_cast<double>(n));
    v.set(1, n, -0.3 * static_cast<double>(n));
  }
  const auto out = forward_backward(g, v);
  for (std::size_t n = 0; n < 5; ++n)
    for (std::size_t k = 0; k < 2; ++k)
      EXPECT_NEAR(out.posteriors.log_posterior(k, n).value(), std::log(0.5), 1e-15);
}

TEST(ForwardBackward, MatchesBigPrecisionOracle) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 60; ++i) {
    const auto c = RandomCase(rng, {4, 12}, 5);
    const auto out = forward_backward(c.g, c.v);
    EXPECT_NEAR(out.log_z, c.oracle.log_z, 1e-11);
    EXPECT_LE(test::MaxAbsDiff(out.posteriors.to_probabilities(), c.oracle.posteriors), 1e-11);
  }
}

TEST(ForwardBackward, BackwardAgreesWithForward) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 60; ++i) {
    const auto c = RandomCase(rng, {4, 12}, 5);
    const auto beta = backward(c.g, c.v);
    std::vector<double> terms;
    for (std::size_t k = 0; k < c.g.num_states(); ++k)
      terms.push_back(c.g.initial().at(k).value() + c.v(k, 0) + beta.at(k, 0).value());
    EXPECT_NEAR(test::BigLogSumExp(terms), forward_backward(c.g, c.v).log_z, 1e-11);
  }
}

TEST(ForwardBackward, LatticeConsistencyAndNormalization) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto c = RandomCase(rng, {6, 12}, 7);
    const auto alpha = forward(c.g, c.v);
    const auto beta = backward(c.g, c.v);
    const auto out = forward_backward(c.g, c.v);
    for (std::size_t n = 0; n < c.v.num_frames(); ++n) {
      LogWeight::Accumulator acc;
      double mass = 0.0;
      for (std::size_t k = 0; k < c.g.num_states(); ++k) {
        acc.add(otimes(alpha.at(k, n), beta.at(k, n)));
        mass += out.posteriors.probability(k, n);
        if (otimes(alpha.at(k, n), beta.at(k, n)).is_zero())
          EXPECT_TRUE(out.posteriors.log_posterior(k, n).is_zero());
      }
      EXPECT_NEAR(acc.result().value(), out.log_z, 1e-8);
      EXPECT_NEAR(mass, 1.0, 1e-8);
    }
  }
}

TEST(ForwardBackward, DimensionMismatch) {
  EXPECT_THROW(forward_backward(test::ChainGraph(3), LikelihoodTensor(2, 4)), DimensionError);
  EXPECT_THROW(viterbi(test::ChainGraph(3), LikelihoodTensor(2, 4)), DimensionError);
}

TEST(ForwardBackward, ProbSemiringMatchesLog) {
  std::mt19937_64 rng(6);
  InferenceOptions prob;
  prob.semiring = SemiringKind::kProb;
  for (int i = 0; i < 30; ++i) {
    const auto c = RandomCase(rng, {5, 12}, 8);
    const auto a = forward_backward(c.g, c.v);
    const auto b = forward_backward(c.g, c.v, prob);
    EXPECT_NEAR(a.log_z, b.log_z, 1e-10);
    EXPECT_LE(test::MaxAbsDiff(a.posteriors.to_probabilities(), b.posteriors.to_probabilities()),
              1e-10);
  }
}

TEST(ForwardBackward, ThreadsDoNotChangeBits) {
  std::mt19937_64 rng(7);
  const auto g = random_graph(60, 400, 3, GraphKind::kNgram);
  const auto v = test::RandomLikelihoods(rng, 60, 30);
  const auto serial = forward_backward(g, v);
  for (int threads : {2, 3, 4}) {
    InferenceOptions opts;
    opts.threads = threads;
    const auto par = forward_backward(g, v, opts);
    EXPECT_EQ(par.log_z, serial.log_z);
    EXPECT_EQ(par.posteriors, serial.posteriors);
    EXPECT_EQ(viterbi(g, v, opts).states, viterbi(g, v).states);
  }
}

TEST(SemiringKind, Parse) {
  EXPECT_EQ(parse_semiring_kind("log"), SemiringKind::kLog);
  EXPECT_EQ(parse_semiring_kind("prob"), SemiringKind::kProb);
  EXPECT_THROW(parse_semiring_kind("tropical"), Error);
}

// Long sequences: the log semiring stays finite where plain probabilities
// underflow to zero.
TEST(Stability, LongSequenceUnderflowsOnlyInProb) {
  const auto g = test::ChainGraph(10);
  std::mt19937_64 rng(8);
  const auto v = test::RandomLikelihoods(rng, 10, 1000, -100.0, -50.0);
  const auto out = forward_backward(g, v);
  EXPECT_TRUE(std::isfinite(out.log_z));
  for (std::size_t n = 0; n < 1000; ++n) {
    double mass = 0.0;
    for (std::size_t k = 0; k < 10; ++k) mass += out.posteriors.probability(k, n);
    ASSERT_NEAR(mass, 1.0, 1e-8);
  }
  InferenceOptions prob;
  prob.semiring = SemiringKind::kProb;
  EXPECT_THROW(forward_backward(g, v, prob), EmptyLatticeError);
  const auto pg = to_semiring<ProbWeight>(g);
  const auto alphas = forward<ProbWeight>(pg, emissions<ProbWeight>(v));
  EXPECT_TRUE(total_weight<ProbWeight>(alphas, pg.final_weights).is_zero());
}

// ------------------------------------------------------------- batching

TEST(Batch, SingleMemberEqualsSolo) {
  std::mt19937_64 rng(9);
  const auto c = RandomCase(rng, {5, 12}, 6);
  const auto b = replicate(c.g, 1, c.v.num_frames());
  const std::vector<LikelihoodTensor> vs{c.v};
  const auto out = forward_backward_batch(b, vs);
  const auto solo = forward_backward(c.g, c.v);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].log_z, solo.log_z);
  EXPECT_EQ(out[0].posteriors, solo.posteriors);
}

TEST(Batch, IdenticalMembersIdenticalResults) {
  std::mt19937_64 rng(10);
  const auto c = RandomCase(rng, {5, 12}, 6);
  const auto b = replicate(c.g, 4, c.v.num_frames());
  const std::vector<LikelihoodTensor> vs(4, c.v);
  const auto out = forward_backward_batch(b, vs);
  for (const auto &o : out) {
    EXPECT_EQ(o.log_z, out[0].log_z);
    EXPECT_EQ(o.posteriors, out[0].posteriors);
  }
}

TEST(Batch, MixedLengthsBitIdenticalToSolo) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    for (bool phony : {false, true}) {
      std::vector<WeightedGraph> gs;
      std::vector<LikelihoodTensor> vs;
      std::vector<std::size_t> ns;
      const std::size_t members = 2 + test::Below(rng, 5);
      for (std::size_t i = 0; i < members; ++i) {
        auto c = RandomCase(rng, {5, 12}, 7);
        ns.push_back(c.v.num_frames());
        gs.push_back(std::move(c.g));
        vs.push_back(std::move(c.v));
      }
      const auto b = compose_batch(gs, ns, phony);
      for (int threads : {1, 3}) {
        InferenceOptions opts;
        opts.threads = threads;
        const auto out = forward_backward_batch(b, vs, opts);
        ASSERT_EQ(out.size(), members);
        for (std::size_t i = 0; i < members; ++i) {
          const auto solo = forward_backward(gs[i], vs[i]);
          EXPECT_EQ(out[i].log_z, solo.log_z);
          EXPECT_EQ(out[i].posteriors, solo.posteriors);
          EXPECT_EQ(out[i].posteriors.num_frames(), ns[i]);
        }
      }
    }
  }
}

TEST(Batch, MemberErrors) {
  const auto g = test::ChainGraph(3);
  const auto b = replicate(g, 2, 4);
  EXPECT_THROW(forward_backward_batch(b, std::vector<LikelihoodTensor>(1, LikelihoodTensor(3, 4))),
               DimensionError);
  EXPECT_THROW(forward_backward_batch(b, std::vector<LikelihoodTensor>(2, LikelihoodTensor(2, 4))),
               DimensionError);
  EXPECT_THROW(forward_backward_batch(b, std::vector<LikelihoodTensor>(2, LikelihoodTensor(3, 5))),
               DimensionError);
  // Chain of 3 needs at least 3 frames.
  const std::vector<WeightedGraph> gs{g, g};
  const std::vector<std::size_t> ns{2, 4};
  const std::vector<LikelihoodTensor> vs{LikelihoodTensor(3, 2), LikelihoodTensor(3, 4)};
  const auto members = forward_backward_batch_members(compose_batch(gs, ns), vs);
  EXPECT_FALSE(members[0].result.has_value());
  EXPECT_TRUE(members[1].result.has_value());
  try {
    forward_backward_batch(compose_batch(gs, ns), vs);
    FAIL();
  } catch (const EmptyLatticeError &e) {
    EXPECT_EQ(e.which(), "batch member 0");
  }
}

// -------------------------------------------------------------- viterbi

TEST(Viterbi, OneState) {
  const auto p = viterbi(test::OneStateGraph(), Abc());
  EXPECT_EQ(p.states, (std::vector<std::size_t>{0, 0, 0}));
  EXPECT_EQ(p.score.value(), -6.0);
}

TEST(Viterbi, MatchesOracleAndRescores) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto c = RandomCase(rng, {6, 12}, 7);
    const auto p = viterbi(c.g, c.v);
    const auto o = brute_force(c.g, c.v);
    EXPECT_EQ(p.score.value(), o.best_score);
    EXPECT_EQ(score_path(c.g, c.v, p.states), p.score);
    EXPECT_LE(p.score.value(), forward_backward(c.g, c.v).log_z + 1e-12);
    for (std::size_t n = 1; n < p.states.size(); ++n)
      EXPECT_FALSE(c.g.transitions().lookup(p.states[n - 1], p.states[n]).is_zero());
  }
}

TEST(Viterbi, TiesPickLowestIndex) {
  const auto g = test::DenseGraph(3);
  const LikelihoodTensor v(3, 4, -1.0);
  const auto p = viterbi(g, v);
  EXPECT_EQ(p.states, (std::vector<std::size_t>{0, 0, 0, 0}));
}

TEST(Viterbi, EmptyLatticeThrows) {
  std::istringstream in("K 2\nI 0 0\nF 1 0\nA 0 1 0\n");
  EXPECT_THROW(viterbi(load_graph(in), LikelihoodTensor(2, 3)), EmptyLatticeError);
}

TEST(ScorePath, RejectsBadPaths) {
  const auto g = test::ChainGraph(3);
  const LikelihoodTensor v(3, 3, -1.0);
  const std::vector<std::size_t> bad{0, 2, 2};
  EXPECT_TRUE(score_path(g, v, bad).is_zero());
  const std::vector<std::size_t> short_path{0, 1};
  EXPECT_THROW(score_path(g, v, short_path), DimensionError);
}

}  // namespace
}  // namespace sfb
