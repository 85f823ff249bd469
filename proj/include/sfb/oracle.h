// sfb/oracle.h

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

#ifndef SFB_ORACLE_H_
#define SFB_ORACLE_H_

// Exhaustive path enumeration, used as the reference the recursions are
// tested against.  It shares no code with the sparse kernels: the graph is
// expanded to dense tables and every one of the K^N state sequences is
// scored directly.

#include <cstddef>
#include <vector>

#include "sfb/fsm.h"
#include "sfb/inference.h"
#include "sfb/sparse.h"

namespace sfb {

struct OracleResult {
  /// log of the total path weight; -inf when no path has non-zero weight.
  double log_z = 0.0;
  /// K x N probability-domain posteriors (all zero when log_z is -inf).
  DenseMatrix<double> posteriors;
  /// Highest-scoring path (first in enumeration order) and its max-plus
  /// score, with the additions grouped as in score_path().  Empty path and
  /// -inf score when no path exists.
  std::vector<std::size_t> best_path;
  double best_score = 0.0;
};

/// Throws InfeasibleError when K^N exceeds `max_paths`.
OracleResult brute_force(const WeightedGraph &g, const LikelihoodTensor &v,
                         std::size_t max_paths = 10'000'000);

}  // namespace sfb

#endif  // SFB_ORACLE_H_
