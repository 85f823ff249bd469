// inference.cpp

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

#include "sfb/inference.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sfb {

// -------------------------------------------------------- LikelihoodTensor

namespace {
void CheckLogLikelihood(double v) {
  if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
    throw InvalidWeightError("log-likelihood must be finite or -inf");
}
}  // namespace

LikelihoodTensor::LikelihoodTensor(std::size_t states, std::size_t frames, double fill)
    : values_(states, frames, fill) {
  if (states == 0 || frames == 0)
    throw DimensionError("LikelihoodTensor: dimensions must be positive");
  CheckLogLikelihood(fill);
}

LikelihoodTensor::LikelihoodTensor(DenseMatrix<double> values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0)
    throw DimensionError("LikelihoodTensor: dimensions must be positive");
  for (double v : values_.data()) CheckLogLikelihood(v);
}

void LikelihoodTensor::set(std::size_t state, std::size_t frame, double log_likelihood) {
  CheckLogLikelihood(log_likelihood);
  values_(state, frame) = log_likelihood;
}

// --------------------------------------------------------- PosteriorMatrix

double PosteriorMatrix::probability(std::size_t state, std::size_t frame) const {
  return std::exp(log_.at(state, frame).value());
}

DenseMatrix<double> PosteriorMatrix::to_probabilities() const {
  DenseMatrix<double> out(num_states(), num_frames());
  for (std::size_t k = 0; k < num_states(); ++k)
    for (std::size_t n = 0; n < num_frames(); ++n) out(k, n) = probability(k, n);
  return out;
}

SemiringKind parse_semiring_kind(const std::string &name) {
  if (name == "log") return SemiringKind::kLog;
  if (name == "prob") return SemiringKind::kProb;
  throw Error("unknown semiring '" + name + "' (expected log or prob)");
}

// ------------------------------------------------------------ single run

Lattice<LogWeight> forward(const WeightedGraph &g, const LikelihoodTensor &v,
                           const InferenceOptions &opts) {
  return forward(to_semiring<LogWeight>(g), emissions<LogWeight>(v), opts.exec());
}

Lattice<LogWeight> backward(const WeightedGraph &g, const LikelihoodTensor &v,
                            const InferenceOptions &opts) {
  return backward(to_semiring<LogWeight>(g), emissions<LogWeight>(v), opts.exec());
}

LogWeight log_marginal(const Lattice<LogWeight> &alphas,
                       const SparseVector<LogWeight> &final_weights) {
  const auto omega = final_weights.to_dense();
  const LogWeight z = total_weight<LogWeight>(alphas, omega);
  if (z.is_zero()) throw EmptyLatticeError("graph");
  return z;
}

namespace {

template <Semiring W>
ForwardBackwardOutput RunSingle(const WeightedGraph &g, const LikelihoodTensor &v,
                                Exec exec) {
  const auto sg = to_semiring<W>(g);
  const auto fb = compute_lattices(sg, emissions<W>(v), exec);
  return {posteriors(fb), static_cast<double>(to_log_prob(fb.total))};
}

// Stacks the members' likelihoods into one frame-major emission lattice over
// the composed states.  With phony finals, each member gets padding frames
// carrying one on its phony state and zero elsewhere.
template <Semiring W>
Lattice<W> StackEmissions(const BatchGraph &batch,
                          std::span<const LikelihoodTensor> likelihoods,
                          std::size_t frames) {
  using Real = typename W::ValueType;
  Lattice<W> emit(batch.composed.num_states(), frames);
  for (std::size_t i = 0; i < batch.members(); ++i) {
    const auto &v = likelihoods[i];
    const std::size_t off = batch.offsets[i];
    for (std::size_t n = 0; n < v.num_frames(); ++n) {
      auto column = emit.frame(n);
      for (std::size_t k = 0; k < v.num_states(); ++k)
        column[off + k] = from_log_prob<W>(static_cast<Real>(v(k, n)));
    }
    if (batch.phony_finals) {
      const std::size_t phony = off + batch.member_states[i];
      for (std::size_t n = v.num_frames(); n < frames; ++n) emit.at(phony, n) = W::one();
    }
  }
  return emit;
}

template <Semiring W>
std::vector<BatchMemberOutput> RunBatch(const BatchGraph &batch,
                                        std::span<const LikelihoodTensor> likelihoods,
                                        Exec exec) {
  if (likelihoods.size() != batch.members())
    throw DimensionError("forward_backward_batch: " + std::to_string(likelihoods.size()) +
                         " likelihood tensors for " + std::to_string(batch.members()) +
                         " members");
  std::size_t max_len = 0;
  bool mixed = false;
  for (std::size_t i = 0; i < batch.members(); ++i) {
    const auto &v = likelihoods[i];
    if (v.num_states() != batch.member_states[i])
      throw DimensionError("forward_backward_batch: member " + std::to_string(i) + " has " +
                           std::to_string(batch.member_states[i]) +
                           " states but its likelihoods have " +
                           std::to_string(v.num_states()));
    if (v.num_frames() != batch.lengths[i])
      throw DimensionError("forward_backward_batch: member " + std::to_string(i) +
                           " declared " + std::to_string(batch.lengths[i]) +
                           " frames but its likelihoods have " +
                           std::to_string(v.num_frames()));
    if (i > 0 && v.num_frames() != likelihoods[0].num_frames()) mixed = true;
    max_len = std::max(max_len, v.num_frames());
  }

  const BatchGraph *use = &batch;
  BatchGraph padded;
  if (mixed && !batch.phony_finals) {
    std::vector<WeightedGraph> members;
    members.reserve(batch.members());
    for (std::size_t i = 0; i < batch.members(); ++i)
      members.push_back(member_graph(batch, i));
    padded = compose_batch(members, batch.lengths, /*phony_finals=*/true);
    use = &padded;
  }
  // Phony batches always run one padding frame past the longest member, so
  // that every member's mass ends on its phony state.
  const std::size_t frames = max_len + (use->phony_finals ? 1 : 0);

  const auto sg = to_semiring<W>(use->composed);
  const auto emit = StackEmissions<W>(*use, likelihoods, frames);
  const auto alphas = forward(sg, emit, exec);
  const auto betas = backward(sg, emit, exec);

  std::vector<BatchMemberOutput> out(use->members());
  const auto last = alphas.frame(frames - 1);
  for (std::size_t i = 0; i < use->members(); ++i) {
    const std::size_t off = use->offsets[i];
    typename W::Accumulator acc;
    for (std::size_t s = off; s < off + use->block_states(i); ++s)
      acc.add(otimes(last[s], sg.final_weights[s]));
    const W total = acc.result();
    if (total.is_zero()) continue;

    const std::size_t k = use->member_states[i], n_frames = use->lengths[i];
    Lattice<LogWeight> post(k, n_frames);
    for (std::size_t n = 0; n < n_frames; ++n)
      for (std::size_t s = 0; s < k; ++s)
        post.at(s, n) = PosteriorEntry(alphas.at(off + s, n), betas.at(off + s, n), total);
    out[i].result = ForwardBackwardOutput{PosteriorMatrix(std::move(post)),
                                          static_cast<double>(to_log_prob(total))};
  }
  return out;
}

}  // namespace

ForwardBackwardOutput forward_backward(const WeightedGraph &g, const LikelihoodTensor &v,
                                       const InferenceOptions &opts) {
  if (opts.semiring == SemiringKind::kProb) return RunSingle<ProbWeight>(g, v, opts.exec());
  return RunSingle<LogWeight>(g, v, opts.exec());
}

std::vector<BatchMemberOutput> forward_backward_batch_members(
    const BatchGraph &batch, std::span<const LikelihoodTensor> likelihoods,
    const InferenceOptions &opts) {
  if (opts.semiring == SemiringKind::kProb)
    return RunBatch<ProbWeight>(batch, likelihoods, opts.exec());
  return RunBatch<LogWeight>(batch, likelihoods, opts.exec());
}

std::vector<ForwardBackwardOutput> forward_backward_batch(
    const BatchGraph &batch, std::span<const LikelihoodTensor> likelihoods,
    const InferenceOptions &opts) {
  auto members = forward_backward_batch_members(batch, likelihoods, opts);
  std::vector<ForwardBackwardOutput> out;
  out.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!members[i].result) throw EmptyLatticeError("batch member " + std::to_string(i));
    out.push_back(std::move(*members[i].result));
  }
  return out;
}

// ---------------------------------------------------------------- Viterbi

ViterbiPath viterbi(const WeightedGraph &g, const LikelihoodTensor &v,
                    const InferenceOptions &opts) {
  using W = TropicalWeight;
  kernels::CheckDim(v.num_states(), g.num_states(), "viterbi: likelihood states");
  const auto sg = to_semiring<W>(g);
  const auto emit = emissions<W>(v);
  const std::size_t k = g.num_states(), n_frames = v.num_frames();

  std::vector<W> prev(k), cur(k);
  std::vector<std::int32_t> backpointers(k * n_frames, -1);
  const auto v0 = emit.frame(0);
  for (std::size_t s = 0; s < k; ++s) prev[s] = otimes(v0[s], sg.initial[s]);
  for (std::size_t n = 1; n < n_frames; ++n) {
    std::span<std::int32_t> bp(backpointers.data() + n * k, k);
    if (opts.threads > 1)
      kernels::parallel::viterbi_step<double>(sg.transitions, prev, emit.frame(n), cur, bp,
                                              opts.threads);
    else
      kernels::serial::viterbi_step<double>(sg.transitions, prev, emit.frame(n), cur, bp);
    std::swap(prev, cur);
  }

  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_state = 0;
  for (std::size_t s = 0; s < k; ++s) {
    const double cand = otimes(prev[s], sg.final_weights[s]).value();
    if (cand > best) {
      best = cand;
      best_state = s;
    }
  }
  if (best == -std::numeric_limits<double>::infinity()) throw EmptyLatticeError("graph");

  ViterbiPath path;
  path.score = W::Unchecked(best);
  path.states.resize(n_frames);
  path.states[n_frames - 1] = best_state;
  for (std::size_t n = n_frames - 1; n > 0; --n)
    path.states[n - 1] = static_cast<std::size_t>(backpointers[n * k + path.states[n]]);
  return path;
}

TropicalWeight score_path(const WeightedGraph &g, const LikelihoodTensor &v,
                          std::span<const std::size_t> states) {
  using W = TropicalWeight;
  kernels::CheckDim(v.num_states(), g.num_states(), "score_path: likelihood states");
  kernels::CheckDim(states.size(), v.num_frames(), "score_path: path length");
  for (std::size_t s : states)
    if (s >= g.num_states()) throw DimensionError("score_path: state out of range");
  auto emit = [&](std::size_t n) { return W::Unchecked(v(states[n], n)); };
  W score = otimes(emit(0), W::Unchecked(g.initial().at(states[0]).value()));
  for (std::size_t n = 1; n < states.size(); ++n) {
    const W arc = W::Unchecked(g.transitions().lookup(states[n - 1], states[n]).value());
    score = otimes(emit(n), otimes(arc, score));
  }
  return otimes(score, W::Unchecked(g.final_weights().at(states.back()).value()));
}

}  // namespace sfb
