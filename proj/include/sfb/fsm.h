// sfb/fsm.h

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

#ifndef SFB_FSM_H_
#define SFB_FSM_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sfb/semiring.h"
#include "sfb/sparse.h"

namespace sfb {

/// A weighted automaton over states only (no labels).
///
/// transitions(i, j) is the log score of the arc i -> j.  `initial` and
/// `final_weights` play the role of the start distribution and the end
/// condition: the score of a state sequence s_1..s_N is
///   initial(s_1) ⊗ Π transitions(s_{n-1}, s_n) ⊗ final_weights(s_N)
/// (times the emissions, which live outside the graph).
class WeightedGraph {
 public:
  WeightedGraph() = default;
  /// Throws DimensionError on shape mismatch, InvalidWeightError when either
  /// `initial` or `final_weights` has no non-zero entry.
  WeightedGraph(SparseMatrix<LogWeight> transitions, SparseVector<LogWeight> initial,
                SparseVector<LogWeight> final_weights);

  std::size_t num_states() const noexcept { return transitions_.rows(); }
  std::size_t num_arcs() const noexcept { return transitions_.nnz(); }
  const SparseMatrix<LogWeight> &transitions() const noexcept { return transitions_; }
  const SparseVector<LogWeight> &initial() const noexcept { return initial_; }
  const SparseVector<LogWeight> &final_weights() const noexcept { return final_; }

  friend bool operator==(const WeightedGraph &, const WeightedGraph &) = default;

 private:
  SparseMatrix<LogWeight> transitions_;
  SparseVector<LogWeight> initial_;
  SparseVector<LogWeight> final_;
};

/// Several graphs stacked block-diagonally so that one recursion serves a
/// whole mini-batch.  Member i owns composed states
/// [offsets[i], offsets[i] + block_states(i)).
struct BatchGraph {
  WeightedGraph composed;
  std::vector<std::size_t> offsets;
  /// States of each member as given, excluding any phony final state.
  std::vector<std::size_t> member_states;
  std::vector<std::size_t> lengths;
  /// When set, every member block ends with one phony final state.
  bool phony_finals = false;

  std::size_t members() const noexcept { return offsets.size(); }
  std::size_t block_states(std::size_t i) const noexcept {
    return member_states[i] + (phony_finals ? 1 : 0);
  }
};

// ------------------------------------------------------------- text format
//
//   K <num_states>
//   I <state> <log_weight>
//   F <state> <log_weight>
//   A <src> <dst> <log_weight>
//
// `#` starts a comment; `-inf` is the zero weight; duplicates combine with ⊕.

WeightedGraph load_graph(std::istream &in);
WeightedGraph load_graph_file(const std::string &path);
std::string save_graph(const WeightedGraph &g);
void save_graph_file(const WeightedGraph &g, const std::string &path);

// --------------------------------------------------------------- batching

/// Block-diagonal composition.  With `phony_finals`, add_phony_final is
/// applied to every member first, which lets members of different lengths
/// share one recursion.
BatchGraph compose_batch(std::span<const WeightedGraph> graphs,
                         std::span<const std::size_t> lengths,
                         bool phony_finals = false);

/// compose_batch of `count` copies of g, each `frames` long.
BatchGraph replicate(const WeightedGraph &g, std::size_t count, std::size_t frames);

/// Recovers member i as it was passed to compose_batch.
WeightedGraph member_graph(const BatchGraph &batch, std::size_t i);

/// Appends a state with a one-weighted self-loop.  Every state s with a
/// non-zero final weight gets an arc s -> phony carrying that weight, and the
/// phony state becomes the only final state (weight one).
WeightedGraph add_phony_final(const WeightedGraph &g);

// ------------------------------------------------------------- generation

enum class GraphKind {
  kAlignment,  // left-to-right chain with self-loops and skips
  kNgram,      // strongly connected, every state final
};

GraphKind parse_graph_kind(const std::string &name);
std::string to_string(GraphKind kind);

/// Random graph with `states` states and `arcs` = nnz(transitions) + number
/// of final states.  Deterministic in `seed`.  Throws InfeasibleError when
/// the combination cannot be realized for the kind.
WeightedGraph random_graph(std::size_t states, std::size_t arcs, std::uint64_t seed,
                           GraphKind kind);

// -------------------------------------------------------------- utilities

/// States that lie on no initial -> final path (unreachable or dead ends),
/// considering only non-zero arcs.
std::vector<std::size_t> useless_states(const WeightedGraph &g);

/// Whether each state's outgoing arcs ⊕-sum to one within `tolerance`.
bool is_stochastic(const WeightedGraph &g, double tolerance = 1e-8);

}  // namespace sfb

#endif  // SFB_FSM_H_
