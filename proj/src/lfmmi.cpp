// lfmmi.cpp

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

#include "sfb/lfmmi.h"

#include <cmath>

#include "sfb/errors.h"

namespace sfb {

namespace {

void CheckShapes(const WeightedGraph &num, const WeightedGraph &den,
                 const LikelihoodTensor &phi, const std::string &who) {
  if (num.num_states() != phi.num_states() || den.num_states() != phi.num_states())
    throw DimensionError(who + ": numerator has " + std::to_string(num.num_states()) +
                         " states, denominator " + std::to_string(den.num_states()) +
                         ", network output " + std::to_string(phi.num_states()));
}

LossResult Combine(const ForwardBackwardOutput &num, const ForwardBackwardOutput &den) {
  LossResult r;
  r.log_z_num = LogWeight(num.log_z);
  r.log_z_den = LogWeight(den.log_z);
  r.loss = num.log_z - den.log_z;
  const std::size_t k = num.posteriors.num_states(), n_frames = num.posteriors.num_frames();
  r.grad = DenseMatrix<double>(k, n_frames);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t n = 0; n < n_frames; ++n)
      r.grad(i, n) = num.posteriors.probability(i, n) - den.posteriors.probability(i, n);
  return r;
}

}  // namespace

LossResult lfmmi(const WeightedGraph &num, const WeightedGraph &den,
                 const LikelihoodTensor &phi, const InferenceOptions &opts) {
  CheckShapes(num, den, phi, "lfmmi");
  auto run = [&](const WeightedGraph &g, const char *which) {
    try {
      return forward_backward(g, phi, opts);
    } catch (const EmptyLatticeError &) {
      throw EmptyLatticeError(which);
    }
  };
  const auto num_out = run(num, "numerator");
  const auto den_out = run(den, "denominator");
  return Combine(num_out, den_out);
}

BatchLossResult lfmmi_batch(std::span<const WeightedGraph> nums, const WeightedGraph &den,
                            std::span<const LikelihoodTensor> phis,
                            const InferenceOptions &opts) {
  if (nums.empty()) throw DimensionError("lfmmi_batch: empty batch");
  if (nums.size() != phis.size())
    throw DimensionError("lfmmi_batch: " + std::to_string(nums.size()) +
                         " numerator graphs but " + std::to_string(phis.size()) +
                         " likelihood tensors");
  std::vector<std::size_t> lengths;
  for (std::size_t i = 0; i < nums.size(); ++i) {
    CheckShapes(nums[i], den, phis[i], "lfmmi_batch member " + std::to_string(i));
    lengths.push_back(phis[i].num_frames());
  }
  const std::vector<WeightedGraph> dens(nums.size(), den);
  const auto num_out = forward_backward_batch_members(compose_batch(nums, lengths), phis, opts);
  const auto den_out = forward_backward_batch_members(compose_batch(dens, lengths), phis, opts);

  BatchLossResult out;
  out.members.resize(nums.size());
  for (std::size_t i = 0; i < nums.size(); ++i) {
    auto &m = out.members[i];
    if (!num_out[i].result) {
      m.error = "utterance " + std::to_string(i) + ": empty lattice: numerator has no accepting path";
      continue;
    }
    if (!den_out[i].result) {
      m.error = "utterance " + std::to_string(i) + ": empty lattice: denominator has no accepting path";
      continue;
    }
    m.result = Combine(*num_out[i].result, *den_out[i].result);
    out.total_loss += m.result->loss;
    out.total_frames += phis[i].num_frames();
  }
  return out;
}

}  // namespace sfb
