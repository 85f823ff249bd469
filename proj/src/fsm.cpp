// fsm.cpp

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

#include "sfb/fsm.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "sfb/errors.h"

namespace sfb {

WeightedGraph::WeightedGraph(SparseMatrix<LogWeight> transitions,
                             SparseVector<LogWeight> initial,
                             SparseVector<LogWeight> final_weights)
    : transitions_(std::move(transitions)),
      initial_(std::move(initial)),
      final_(std::move(final_weights)) {
  const std::size_t k = transitions_.rows();
  if (k == 0) throw DimensionError("WeightedGraph: zero states");
  if (transitions_.cols() != k)
    throw DimensionError("WeightedGraph: transition matrix is not square");
  if (initial_.dim() != k || final_.dim() != k)
    throw DimensionError("WeightedGraph: initial/final vectors must have dim K");
  if (!initial_.has_nonzero()) throw Error("WeightedGraph: no initial state");
  if (!final_.has_nonzero()) throw Error("WeightedGraph: no final state");
}

// ----------------------------------------------------------------- parsing

namespace {

std::vector<std::string_view> Tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::size_t ParseCount(std::string_view tok, std::size_t line, const char *what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(std::string("bad ") + what + " '" + std::string(tok) + "'", line);
  return v;
}

double ParseLogWeight(std::string_view tok, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("bad weight '" + std::string(tok) + "'", line);
  if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
    throw ParseError("weight '" + std::string(tok) + "' is not a log-probability", line);
  return v;
}

std::string FormatLogWeight(double v) {
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

SparseVector<LogWeight> ToSparse(std::size_t dim, const std::map<Index, LogWeight> &m) {
  std::vector<Index> idx;
  std::vector<LogWeight> val;
  for (const auto &[i, w] : m) {
    idx.push_back(i);
    val.push_back(w);
  }
  return SparseVector<LogWeight>(dim, std::move(idx), std::move(val));
}

}  // namespace

WeightedGraph load_graph(std::istream &in) {
  std::size_t num_states = 0;
  bool have_k = false;
  std::map<Index, LogWeight> initial, finals;
  std::vector<Triplet<LogWeight>> arcs;

  auto check_state = [&](std::size_t s, std::size_t line) {
    if (s >= num_states)
      throw ParseError("state " + std::to_string(s) + " out of range (K = " +
                           std::to_string(num_states) + ")",
                       line);
    return static_cast<Index>(s);
  };
  auto add_to = [](std::map<Index, LogWeight> &m, Index s, LogWeight w) {
    auto [it, inserted] = m.emplace(s, w);
    if (!inserted) it->second = oplus(it->second, w);
  };

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text(raw);
    if (auto hash = text.find('#'); hash != std::string_view::npos)
      text = text.substr(0, hash);
    const auto tok = Tokenize(text);
    if (tok.empty()) continue;

    const std::string_view tag = tok[0];
    auto expect_fields = [&](std::size_t n) {
      if (tok.size() != n)
        throw ParseError("record '" + std::string(tag) + "' expects " +
                             std::to_string(n - 1) + " fields, got " +
                             std::to_string(tok.size() - 1),
                         line);
    };
    if (tag == "K") {
      expect_fields(2);
      if (have_k) throw ParseError("duplicate K record", line);
      num_states = ParseCount(tok[1], line, "state count");
      if (num_states == 0) throw ParseError("graph has zero states", line);
      if (num_states > std::numeric_limits<Index>::max())
        throw ParseError("state count too large", line);
      have_k = true;
      continue;
    }
    if (!have_k) throw ParseError("K record must come first", line);
    if (tag == "I" || tag == "F") {
      expect_fields(3);
      const Index s = check_state(ParseCount(tok[1], line, "state"), line);
      const LogWeight w(ParseLogWeight(tok[2], line));
      add_to(tag == "I" ? initial : finals, s, w);
    } else if (tag == "A") {
      expect_fields(4);
      const Index src = check_state(ParseCount(tok[1], line, "state"), line);
      const Index dst = check_state(ParseCount(tok[2], line, "state"), line);
      arcs.push_back({src, dst, LogWeight(ParseLogWeight(tok[3], line))});
    } else {
      throw ParseError("unknown record '" + std::string(tag) + "'", line);
    }
  }
  if (!have_k) throw ParseError("empty graph: missing K record");
  auto pi = ToSparse(num_states, initial);
  auto omega = ToSparse(num_states, finals);
  if (!pi.has_nonzero()) throw ParseError("graph has no initial state");
  if (!omega.has_nonzero()) throw ParseError("graph has no final state");
  return WeightedGraph(SparseMatrix<LogWeight>::from_triplets(num_states, num_states, arcs),
                       std::move(pi), std::move(omega));
}

WeightedGraph load_graph_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file '" + path + "'");
  return load_graph(in);
}

std::string save_graph(const WeightedGraph &g) {
  std::ostringstream out;
  out << "K " << g.num_states() << '\n';
  const auto &pi = g.initial();
  for (std::size_t k = 0; k < pi.nnz(); ++k)
    out << "I " << pi.indices()[k] << ' ' << FormatLogWeight(pi.values()[k].value()) << '\n';
  const auto &omega = g.final_weights();
  for (std::size_t k = 0; k < omega.nnz(); ++k)
    out << "F " << omega.indices()[k] << ' '
        << FormatLogWeight(omega.values()[k].value()) << '\n';
  for (const auto &t : g.transitions().triplets())
    out << "A " << t.row << ' ' << t.col << ' ' << FormatLogWeight(t.weight.value())
        << '\n';
  return out.str();
}

void save_graph_file(const WeightedGraph &g, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write graph file '" + path + "'");
  out << save_graph(g);
  if (!out) throw Error("error writing graph file '" + path + "'");
}

// ---------------------------------------------------------------- batching

WeightedGraph add_phony_final(const WeightedGraph &g) {
  const std::size_t k = g.num_states();
  const auto phony = static_cast<Index>(k);
  std::vector<Triplet<LogWeight>> arcs = g.transitions().triplets();
  const auto &omega = g.final_weights();
  for (std::size_t e = 0; e < omega.nnz(); ++e)
    if (!omega.values()[e].is_zero())
      arcs.push_back({omega.indices()[e], phony, omega.values()[e]});
  arcs.push_back({phony, phony, LogWeight::one()});

  const auto &pi = g.initial();
  SparseVector<LogWeight> new_pi(
      k + 1, std::vector<Index>(pi.indices().begin(), pi.indices().end()),
      std::vector<LogWeight>(pi.values().begin(), pi.values().end()));
  SparseVector<LogWeight> new_omega(k + 1, {phony}, {LogWeight::one()});
  return WeightedGraph(SparseMatrix<LogWeight>::from_triplets(k + 1, k + 1, arcs),
                       std::move(new_pi), std::move(new_omega));
}

BatchGraph compose_batch(std::span<const WeightedGraph> graphs,
                         std::span<const std::size_t> lengths, bool phony_finals) {
  if (graphs.empty()) throw DimensionError("compose_batch: empty graph list");
  if (graphs.size() != lengths.size())
    throw DimensionError("compose_batch: " + std::to_string(graphs.size()) +
                         " graphs but " + std::to_string(lengths.size()) + " lengths");
  BatchGraph batch;
  batch.phony_finals = phony_finals;
  batch.lengths.assign(lengths.begin(), lengths.end());

  std::vector<SparseMatrix<LogWeight>> blocks;
  std::vector<SparseVector<LogWeight>> pis, omegas;
  blocks.reserve(graphs.size());
  std::size_t offset = 0;
  for (const auto &member : graphs) {
    batch.offsets.push_back(offset);
    batch.member_states.push_back(member.num_states());
    const WeightedGraph g = phony_finals ? add_phony_final(member) : member;
    offset += g.num_states();
    blocks.push_back(g.transitions());
    pis.push_back(g.initial());
    omegas.push_back(g.final_weights());
  }
  batch.composed = WeightedGraph(block_diagonal<LogWeight>(blocks),
                                 vstack<LogWeight>(pis), vstack<LogWeight>(omegas));
  return batch;
}

BatchGraph replicate(const WeightedGraph &g, std::size_t count, std::size_t frames) {
  if (count == 0) throw DimensionError("replicate: count must be >= 1");
  const std::vector<WeightedGraph> copies(count, g);
  const std::vector<std::size_t> lengths(count, frames);
  return compose_batch(copies, lengths);
}

WeightedGraph member_graph(const BatchGraph &batch, std::size_t i) {
  if (i >= batch.members()) throw DimensionError("member_graph: index out of range");
  const std::size_t off = batch.offsets[i];
  const std::size_t k = batch.member_states[i];
  const std::size_t phony = off + k;
  const auto &composed = batch.composed;
  const auto &t = composed.transitions();

  std::vector<Triplet<LogWeight>> arcs;
  std::map<Index, LogWeight> finals;
  for (std::size_t r = off; r < off + k; ++r) {
    for (std::size_t e = t.row_offsets()[r]; e < t.row_offsets()[r + 1]; ++e) {
      const std::size_t c = t.col_indices()[e];
      const LogWeight w = t.row_values()[e];
      if (batch.phony_finals && c == phony)
        finals.emplace(static_cast<Index>(r - off), w);
      else
        arcs.push_back({static_cast<Index>(r - off), static_cast<Index>(c - off), w});
    }
  }
  auto slice = [&](const SparseVector<LogWeight> &v) {
    std::map<Index, LogWeight> m;
    for (std::size_t e = 0; e < v.nnz(); ++e) {
      const std::size_t s = v.indices()[e];
      if (s >= off && s < off + k) m.emplace(static_cast<Index>(s - off), v.values()[e]);
    }
    return m;
  };
  if (!batch.phony_finals) finals = slice(composed.final_weights());
  return WeightedGraph(SparseMatrix<LogWeight>::from_triplets(k, k, arcs),
                       ToSparse(k, slice(composed.initial())), ToSparse(k, finals));
}

// -------------------------------------------------------------- generation

GraphKind parse_graph_kind(const std::string &name) {
  if (name == "alignment") return GraphKind::kAlignment;
  if (name == "ngram") return GraphKind::kNgram;
  throw Error("unknown graph kind '" + name + "' (expected alignment or ngram)");
}

std::string to_string(GraphKind kind) {
  return kind == GraphKind::kAlignment ? "alignment" : "ngram";
}

namespace {

// Fixed bit recipes on top of mt19937_64 so that generated files are
// byte-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  template <class T>
  void shuffle(std::vector<T> &v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// Gives each state's outgoing arcs log-normalized random positive weights.
std::vector<Triplet<LogWeight>> WeightArcs(
    std::size_t states, const std::vector<std::pair<Index, Index>> &pairs, Rng &rng) {
  std::vector<std::pair<Index, Index>> sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> raw(sorted.size());
  std::vector<double> row_sum(states, 0.0);
  for (std::size_t e = 0; e < sorted.size(); ++e) {
    raw[e] = 0.05 + 0.95 * rng.uniform();
    row_sum[sorted[e].first] += raw[e];
  }
  std::vector<Triplet<LogWeight>> arcs;
  arcs.reserve(sorted.size());
  for (std::size_t e = 0; e < sorted.size(); ++e) {
    const auto [src, dst] = sorted[e];
    arcs.push_back({src, dst, LogWeight(std::log(raw[e] / row_sum[src]))});
  }
  return arcs;
}

WeightedGraph RandomAlignment(std::size_t k, std::size_t arcs, Rng &rng) {
  const std::size_t skips_max = k >= 2 ? (k - 1) * (k - 2) / 2 : 0;
  const std::size_t max_arcs = (k - 1) + k + skips_max + 1;
  if (arcs < k || arcs > max_arcs)
    throw InfeasibleError("alignment graph with " + std::to_string(k) +
                          " states needs between " + std::to_string(k) + " and " +
                          std::to_string(max_arcs) + " arcs, got " +
                          std::to_string(arcs));
  std::vector<std::pair<Index, Index>> pairs;
  for (std::size_t s = 0; s + 1 < k; ++s)
    pairs.emplace_back(static_cast<Index>(s), static_cast<Index>(s + 1));
  std::size_t budget = arcs - k;  // one final state

  std::vector<Index> loops(k);
  for (std::size_t s = 0; s < k; ++s) loops[s] = static_cast<Index>(s);
  rng.shuffle(loops);
  for (std::size_t e = 0; e < k && budget > 0; ++e, --budget)
    pairs.emplace_back(loops[e], loops[e]);

  // Skips, shortest first: every gap-2 arc (in random order) before gap 3...
  for (std::size_t gap = 2; gap < k && budget > 0; ++gap) {
    std::vector<std::pair<Index, Index>> ring;
    for (std::size_t s = 0; s + gap < k; ++s)
      ring.emplace_back(static_cast<Index>(s), static_cast<Index>(s + gap));
    rng.shuffle(ring);
    for (std::size_t e = 0; e < ring.size() && budget > 0; ++e, --budget)
      pairs.push_back(ring[e]);
  }

  auto weighted = WeightArcs(k, pairs, rng);
  return WeightedGraph(SparseMatrix<LogWeight>::from_triplets(k, k, weighted),
                       SparseVector<LogWeight>(k, {0}, {LogWeight::one()}),
                       SparseVector<LogWeight>(k, {static_cast<Index>(k - 1)},
                                               {LogWeight::one()}));
}

WeightedGraph RandomNgram(std::size_t k, std::size_t arcs, Rng &rng) {
  const std::size_t max_arcs = k * k + k;
  if (arcs < 2 * k || arcs > max_arcs)
    throw InfeasibleError("ngram graph with " + std::to_string(k) +
                          " states needs between " + std::to_string(2 * k) + " and " +
                          std::to_string(max_arcs) + " arcs, got " +
                          std::to_string(arcs));
  // A random Hamiltonian cycle makes the graph strongly connected.
  std::vector<Index> order(k);
  for (std::size_t s = 0; s < k; ++s) order[s] = static_cast<Index>(s);
  rng.shuffle(order);
  std::vector<std::pair<Index, Index>> pairs;
  std::unordered_set<std::uint64_t> used;
  auto key = [k](Index a, Index b) { return std::uint64_t(a) * k + b; };
  for (std::size_t e = 0; e < k; ++e) {
    const Index a = order[e], b = order[(e + 1) % k];
    pairs.emplace_back(a, b);
    used.insert(key(a, b));
  }
  std::size_t extra = arcs - 2 * k;  // every state is final
  const std::size_t free_pairs = k * k - k;
  if (extra * 2 > free_pairs) {
    std::vector<std::pair<Index, Index>> rest;
    for (Index a = 0; a < k; ++a)
      for (Index b = 0; b < k; ++b)
        if (!used.count(key(a, b))) rest.emplace_back(a, b);
    rng.shuffle(rest);
    pairs.insert(pairs.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(extra));
  } else {
    while (extra > 0) {
      const auto a = static_cast<Index>(rng.below(k));
      const auto b = static_cast<Index>(rng.below(k));
      if (used.insert(key(a, b)).second) {
        pairs.emplace_back(a, b);
        --extra;
      }
    }
  }
  auto weighted = WeightArcs(k, pairs, rng);
  std::vector<Index> all(k);
  for (std::size_t s = 0; s < k; ++s) all[s] = static_cast<Index>(s);
  return WeightedGraph(SparseMatrix<LogWeight>::from_triplets(k, k, weighted),
                       SparseVector<LogWeight>(k, {0}, {LogWeight::one()}),
                       SparseVector<LogWeight>(k, all,
                                               std::vector<LogWeight>(k, LogWeight::one())));
}

}  // namespace

WeightedGraph random_graph(std::size_t states, std::size_t arcs, std::uint64_t seed,
                           GraphKind kind) {
  if (states == 0) throw InfeasibleError("random_graph: zero states");
  if (states > std::numeric_limits<Index>::max())
    throw InfeasibleError("random_graph: too many states");
  Rng rng(seed);
  return kind == GraphKind::kAlignment ? RandomAlignment(states, arcs, rng)
                                       : RandomNgram(states, arcs, rng);
}

// --------------------------------------------------------------- utilities

std::vector<std::size_t> useless_states(const WeightedGraph &g) {
  const std::size_t k = g.num_states();
  const auto &t = g.transitions();
  auto sweep = [&](const SparseVector<LogWeight> &seeds, bool forward) {
    std::vector<char> seen(k, 0);
    std::deque<std::size_t> queue;
    for (std::size_t e = 0; e < seeds.nnz(); ++e) {
      if (seeds.values()[e].is_zero()) continue;
      const std::size_t s = seeds.indices()[e];
      if (!seen[s]) {
        seen[s] = 1;
        queue.push_back(s);
      }
    }
    const auto offsets = forward ? t.row_offsets() : t.col_offsets();
    const auto targets = forward ? t.col_indices() : t.row_indices();
    const auto values = forward ? t.row_values() : t.col_values();
    while (!queue.empty()) {
      const std::size_t s = queue.front();
      queue.pop_front();
      for (std::size_t e = offsets[s]; e < offsets[s + 1]; ++e) {
        if (values[e].is_zero() || seen[targets[e]]) continue;
        seen[targets[e]] = 1;
        queue.push_back(targets[e]);
      }
    }
    return seen;
  };
  const auto reachable = sweep(g.initial(), true);
  const auto coreachable = sweep(g.final_weights(), false);
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < k; ++s)
    if (!reachable[s] || !coreachable[s]) out.push_back(s);
  return out;
}

bool is_stochastic(const WeightedGraph &g, double tolerance) {
  const auto &t = g.transitions();
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const std::size_t begin = t.row_offsets()[r], end = t.row_offsets()[r + 1];
    if (begin == end) continue;
    LogWeight::Accumulator acc;
    for (std::size_t e = begin; e < end; ++e) acc.add(t.row_values()[e]);
    if (std::abs(acc.result().value()) > tolerance) return false;
  }
  return true;
}

}  // namespace sfb
