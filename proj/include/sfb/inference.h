// sfb/inference.h

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

#ifndef SFB_INFERENCE_H_
#define SFB_INFERENCE_H_

// Forward-backward and Viterbi as sparse semiring matrix-vector products.
//
//   alpha_1 = v_1 ∘ pi                 alpha_n = v_n ∘ (T^T alpha_{n-1})
//   beta_N  = omega                    beta_n  = T (beta_{n+1} ∘ v_{n+1})
//   Z       = ⊕_k alpha_N(k) ⊗ omega(k)
//   gamma_n(k) = alpha_n(k) ⊗ beta_n(k) ⊘ Z
//
// The generic templates below work for any Semiring; the non-template
// functions at the bottom are the log-semiring entry points used by the CLI
// and by the LF-MMI code.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfb/errors.h"
#include "sfb/fsm.h"
#include "sfb/kernels.h"
#include "sfb/semiring.h"
#include "sfb/sparse.h"

namespace sfb {

/// K x N log-likelihoods; entry (i, n) = log p(x_n | z_n = i).
class LikelihoodTensor {
 public:
  LikelihoodTensor() = default;
  /// Filled with `fill`.  Throws DimensionError on a zero dimension.
  LikelihoodTensor(std::size_t states, std::size_t frames, double fill = 0.0);
  /// Validates every entry (finite or -inf).
  explicit LikelihoodTensor(DenseMatrix<double> values);

  std::size_t num_states() const noexcept { return values_.rows(); }
  std::size_t num_frames() const noexcept { return values_.cols(); }
  double operator()(std::size_t state, std::size_t frame) const {
    return values_(state, frame);
  }
  void set(std::size_t state, std::size_t frame, double log_likelihood);
  const DenseMatrix<double> &values() const noexcept { return values_; }

 private:
  DenseMatrix<double> values_;
};

/// State x frame values stored frame-major, so each frame is contiguous.
template <Semiring W>
class Lattice {
 public:
  Lattice() = default;
  Lattice(std::size_t states, std::size_t frames, W fill = W::zero())
      : states_(states), frames_(frames), data_(states * frames, fill) {}

  std::size_t num_states() const noexcept { return states_; }
  std::size_t num_frames() const noexcept { return frames_; }

  W &at(std::size_t state, std::size_t frame) { return data_[frame * states_ + state]; }
  const W &at(std::size_t state, std::size_t frame) const {
    return data_[frame * states_ + state];
  }
  std::span<W> frame(std::size_t n) { return {data_.data() + n * states_, states_}; }
  std::span<const W> frame(std::size_t n) const {
    return {data_.data() + n * states_, states_};
  }

  friend bool operator==(const Lattice &, const Lattice &) = default;

 private:
  std::size_t states_ = 0;
  std::size_t frames_ = 0;
  std::vector<W> data_;
};

/// Log-domain state posteriors log p(z_n = k | X).
class PosteriorMatrix {
 public:
  PosteriorMatrix() = default;
  explicit PosteriorMatrix(Lattice<LogWeight> log_posteriors)
      : log_(std::move(log_posteriors)) {}

  std::size_t num_states() const noexcept { return log_.num_states(); }
  std::size_t num_frames() const noexcept { return log_.num_frames(); }
  LogWeight log_posterior(std::size_t state, std::size_t frame) const {
    return log_.at(state, frame);
  }
  double probability(std::size_t state, std::size_t frame) const;
  /// K x N probability-domain view.
  DenseMatrix<double> to_probabilities() const;
  const Lattice<LogWeight> &lattice() const noexcept { return log_; }

  friend bool operator==(const PosteriorMatrix &, const PosteriorMatrix &) = default;

 private:
  Lattice<LogWeight> log_;
};

template <Semiring W>
struct FBResult {
  Lattice<W> alphas;
  Lattice<W> betas;
  /// Total weight of all accepting paths (log Z in the log semiring).
  W total;
};

/// A WeightedGraph with its weights embedded in semiring W; initial and
/// final vectors are dense.
template <Semiring W>
struct SemiringGraph {
  SparseMatrix<W> transitions;
  std::vector<W> initial;
  std::vector<W> final_weights;
  std::size_t num_states() const noexcept { return initial.size(); }
};

template <Semiring W>
SemiringGraph<W> to_semiring(const WeightedGraph &g) {
  using Real = typename W::ValueType;
  auto embed = [](LogWeight w) { return from_log_prob<W>(static_cast<Real>(w.value())); };
  SemiringGraph<W> out;
  out.transitions = g.transitions().map<W>(embed);
  for (LogWeight w : g.initial().to_dense()) out.initial.push_back(embed(w));
  for (LogWeight w : g.final_weights().to_dense()) out.final_weights.push_back(embed(w));
  return out;
}

/// Likelihoods embedded in W, frame-major.
template <Semiring W>
Lattice<W> emissions(const LikelihoodTensor &v) {
  using Real = typename W::ValueType;
  Lattice<W> out(v.num_states(), v.num_frames());
  for (std::size_t k = 0; k < v.num_states(); ++k)
    for (std::size_t n = 0; n < v.num_frames(); ++n)
      out.at(k, n) = from_log_prob<W>(static_cast<Real>(v(k, n)));
  return out;
}

template <Semiring W>
Lattice<W> forward(const SemiringGraph<W> &g, const Lattice<W> &emit, Exec exec = {}) {
  kernels::CheckDim(emit.num_states(), g.num_states(), "forward: likelihood states");
  const std::size_t k = g.num_states(), n_frames = emit.num_frames();
  Lattice<W> alphas(k, n_frames);
  auto first = alphas.frame(0);
  const auto v0 = emit.frame(0);
  for (std::size_t s = 0; s < k; ++s) first[s] = otimes(v0[s], g.initial[s]);
  for (std::size_t n = 1; n < n_frames; ++n) {
    std::span<const W> prev = alphas.frame(n - 1);
    if (exec.threads > 1)
      kernels::parallel::forward_step<W>(g.transitions, prev, emit.frame(n),
                                         alphas.frame(n), exec.threads);
    else
      kernels::serial::forward_step<W>(g.transitions, prev, emit.frame(n), alphas.frame(n));
  }
  return alphas;
}

template <Semiring W>
Lattice<W> backward(const SemiringGraph<W> &g, const Lattice<W> &emit, Exec exec = {}) {
  kernels::CheckDim(emit.num_states(), g.num_states(), "backward: likelihood states");
  const std::size_t k = g.num_states(), n_frames = emit.num_frames();
  Lattice<W> betas(k, n_frames);
  std::copy(g.final_weights.begin(), g.final_weights.end(), betas.frame(n_frames - 1).begin());
  std::vector<W> scratch(k);
  for (std::size_t n = n_frames - 1; n-- > 0;) {
    std::span<const W> next = betas.frame(n + 1);
    if (exec.threads > 1)
      kernels::parallel::backward_step<W>(g.transitions, next, emit.frame(n + 1), scratch,
                                          betas.frame(n), exec.threads);
    else
      kernels::serial::backward_step<W>(g.transitions, next, emit.frame(n + 1), scratch,
                                        betas.frame(n));
  }
  return betas;
}

/// ⊕_k alpha_N(k) ⊗ omega(k) in ascending k.  Does not throw on zero.
template <Semiring W>
W total_weight(const Lattice<W> &alphas, std::span<const W> final_weights) {
  kernels::CheckDim(final_weights.size(), alphas.num_states(), "total_weight");
  const auto last = alphas.frame(alphas.num_frames() - 1);
  typename W::Accumulator acc;
  for (std::size_t s = 0; s < last.size(); ++s) acc.add(otimes(last[s], final_weights[s]));
  return acc.result();
}

/// alpha ⊗ beta ⊘ total, as a log weight.  `total` must not be zero.
template <Semiring W>
inline LogWeight PosteriorEntry(W alpha, W beta, W total) {
  return LogWeight::Unchecked(
      static_cast<double>(to_log_prob(oslash(otimes(alpha, beta), total))));
}

/// Throws EmptyLatticeError when the total weight is zero.
template <Semiring W>
FBResult<W> compute_lattices(const SemiringGraph<W> &g, const Lattice<W> &emit,
                             Exec exec = {}) {
  FBResult<W> fb{forward(g, emit, exec), backward(g, emit, exec), W::zero()};
  fb.total = total_weight<W>(fb.alphas, g.final_weights);
  if (fb.total.is_zero()) throw EmptyLatticeError("graph");
  return fb;
}

template <Semiring W>
PosteriorMatrix posteriors(const FBResult<W> &fb) {
  if (fb.total.is_zero()) throw EmptyLatticeError("graph");
  Lattice<LogWeight> out(fb.alphas.num_states(), fb.alphas.num_frames());
  for (std::size_t n = 0; n < out.num_frames(); ++n)
    for (std::size_t k = 0; k < out.num_states(); ++k)
      out.at(k, n) = PosteriorEntry(fb.alphas.at(k, n), fb.betas.at(k, n), fb.total);
  return PosteriorMatrix(std::move(out));
}

// ------------------------------------------------------- log-semiring API

enum class SemiringKind { kLog, kProb };

SemiringKind parse_semiring_kind(const std::string &name);

struct InferenceOptions {
  /// Values above 1 run the OpenMP kernels; results are identical either way.
  int threads = 1;
  /// Semiring for forward_backward / forward_backward_batch.
  SemiringKind semiring = SemiringKind::kLog;

  Exec exec() const noexcept { return Exec{threads}; }
};

Lattice<LogWeight> forward(const WeightedGraph &g, const LikelihoodTensor &v,
                           const InferenceOptions &opts = {});
Lattice<LogWeight> backward(const WeightedGraph &g, const LikelihoodTensor &v,
                            const InferenceOptions &opts = {});

/// log Z.  Throws EmptyLatticeError when no accepting path exists.
LogWeight log_marginal(const Lattice<LogWeight> &alphas,
                       const SparseVector<LogWeight> &final_weights);

struct ForwardBackwardOutput {
  PosteriorMatrix posteriors;
  double log_z = 0.0;
};

ForwardBackwardOutput forward_backward(const WeightedGraph &g, const LikelihoodTensor &v,
                                       const InferenceOptions &opts = {});

/// Per-member result; nullopt marks a member whose lattice is empty.
struct BatchMemberOutput {
  std::optional<ForwardBackwardOutput> result;
};

/// Runs every member through one recursion on the composed graph.  Members
/// shorter than the longest are padded via phony final states (built on the
/// fly when `batch` was composed without them).  Each member's result is
/// bit-identical to forward_backward on that member alone.
std::vector<BatchMemberOutput> forward_backward_batch_members(
    const BatchGraph &batch, std::span<const LikelihoodTensor> likelihoods,
    const InferenceOptions &opts = {});

/// As above, but throws EmptyLatticeError naming the first empty member.
std::vector<ForwardBackwardOutput> forward_backward_batch(
    const BatchGraph &batch, std::span<const LikelihoodTensor> likelihoods,
    const InferenceOptions &opts = {});

struct ViterbiPath {
  std::vector<std::size_t> states;
  TropicalWeight score;
};

/// Best path under the max-plus semiring.  Ties resolve to the lowest state
/// index at every arg-max.  Throws EmptyLatticeError.
ViterbiPath viterbi(const WeightedGraph &g, const LikelihoodTensor &v,
                    const InferenceOptions &opts = {});

/// Re-scores a state sequence: pi ⊗ Π(emissions ⊗ arcs) ⊗ omega, with the
/// additions grouped exactly as the Viterbi recursion groups them.
TropicalWeight score_path(const WeightedGraph &g, const LikelihoodTensor &v,
                          std::span<const std::size_t> states);

}  // namespace sfb

#endif  // SFB_INFERENCE_H_
