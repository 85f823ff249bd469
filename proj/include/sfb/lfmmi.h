// sfb/lfmmi.h

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

#ifndef SFB_LFMMI_H_
#define SFB_LFMMI_H_

// Lattice-free MMI objective for one utterance:
//
//   loss = log p(X | G_num) - log p(X | G_den)
//   d loss / d phi(i, n) = p(z_n = i | X, G_num) - p(z_n = i | X, G_den)
//
// Both graphs share the emission index space: state i of either graph reads
// row i of the network output.  The loss is not normalized by frame count.
// The denominator recursion is exact; there is no leaky-HMM variant.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfb/fsm.h"
#include "sfb/inference.h"

namespace sfb {

struct LossResult {
  double loss = 0.0;
  /// K x N, probability domain.
  DenseMatrix<double> grad;
  LogWeight log_z_num;
  LogWeight log_z_den;
};

/// Throws DimensionError when the graphs and `phi` disagree on K, and
/// EmptyLatticeError (which() is "numerator" or "denominator") when either
/// graph admits no path of length N.
LossResult lfmmi(const WeightedGraph &num, const WeightedGraph &den,
                 const LikelihoodTensor &phi, const InferenceOptions &opts = {});

struct MemberLoss {
  std::optional<LossResult> result;
  /// Set when `result` is empty.
  std::string error;
};

struct BatchLossResult {
  std::vector<MemberLoss> members;
  /// Sums over the members that succeeded.
  double total_loss = 0.0;
  std::size_t total_frames = 0;
};

/// Evaluates a mini-batch in two batched recursions (numerators composed
/// block-diagonally, the denominator replicated once per member).  Member
/// results are bit-identical to lfmmi() on each utterance.  Per-member
/// lattice failures are reported in the member, not thrown; shape errors
/// still throw.
BatchLossResult lfmmi_batch(std::span<const WeightedGraph> nums, const WeightedGraph &den,
                            std::span<const LikelihoodTensor> phis,
                            const InferenceOptions &opts = {});

}  // namespace sfb

#endif  // SFB_LFMMI_H_
