// tools/sfb.cpp

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

// Command-line front end.
//
//   sfb fb GRAPH LIK OUT [--semiring log|prob]
//   sfb viterbi GRAPH LIK
//   sfb lfmmi NUM DEN LIK GRAD_OUT
//   sfb gen --kind alignment|ngram --states K --arcs A --frames N --seed S
//           --graph-out G --lik-out L
//   sfb bench --kind alignment|ngram [--batch I --scale F] --frames N --reps R
//             [--json|--csv]
//
// Exit codes: 0 ok, 1 usage/parse/dimension/infeasible, 2 empty lattice.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "sfb/bench.h"
#include "sfb/errors.h"
#include "sfb/fsm.h"
#include "sfb/inference.h"
#include "sfb/lfmmi.h"
#include "sfb/likelihood_io.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitEmptyLattice = 2;

int DefaultThreads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// 17 significant digits round-trip a double; integral values keep a ".0".
void PrintValue(const char *label, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string text(buf);
  if (std::isfinite(v) && text.find_first_of(".e") == std::string::npos) text += ".0";
  std::cout << label << ' ' << text << '\n';
}

sfb::ScalarType ScalarFor(bool float32) {
  return float32 ? sfb::ScalarType::kFloat32 : sfb::ScalarType::kFloat64;
}

struct FbArgs {
  std::string graph, lik, out, semiring = "log";
  bool float32 = false;
};

struct ViterbiArgs {
  std::string graph, lik;
};

struct LfmmiArgs {
  std::string num, den, lik, grad_out;
  bool float32 = false;
};

struct GenArgs {
  std::string kind = "alignment";
  std::size_t states = 0, arcs = 0, frames = sfb::kBenchFrames;
  std::uint64_t seed = 0;
  double lo = -10.0, hi = 0.0;
  std::string graph_out, lik_out;
  bool float32 = false;
};

struct BenchArgs {
  std::string kind = "alignment";
  sfb::BenchConfig cfg;
  std::size_t memory_mb = 0;
  bool json = false, csv = false;
};

int RunFb(const FbArgs &a, int threads) {
  const auto g = sfb::load_graph_file(a.graph);
  const auto v = sfb::read_likelihoods_file(a.lik);
  sfb::InferenceOptions opts;
  opts.threads = threads;
  opts.semiring = sfb::parse_semiring_kind(a.semiring);
  const auto out = sfb::forward_backward(g, v, opts);
  sfb::write_matrix_file(a.out, out.posteriors.to_probabilities(), ScalarFor(a.float32));
  PrintValue("logZ", out.log_z);
  return kExitOk;
}

int RunViterbi(const ViterbiArgs &a, int threads) {
  const auto g = sfb::load_graph_file(a.graph);
  const auto v = sfb::read_likelihoods_file(a.lik);
  sfb::InferenceOptions opts;
  opts.threads = threads;
  const auto path = sfb::viterbi(g, v, opts);
  for (std::size_t n = 0; n < path.states.size(); ++n)
    std::cout << (n ? " " : "") << path.states[n];
  std::cout << '\n';
  PrintValue("score", path.score.value());
  return kExitOk;
}

int RunLfmmi(const LfmmiArgs &a, int threads) {
  const auto num = sfb::load_graph_file(a.num);
  const auto den = sfb::load_graph_file(a.den);
  const auto v = sfb::read_likelihoods_file(a.lik);
  sfb::InferenceOptions opts;
  opts.threads = threads;
  const auto r = sfb::lfmmi(num, den, v, opts);
  sfb::write_matrix_file(a.grad_out, r.grad, ScalarFor(a.float32));
  PrintValue("loss", r.loss);
  PrintValue("logZ_num", r.log_z_num.value());
  PrintValue("logZ_den", r.log_z_den.value());
  return kExitOk;
}

int RunGen(const GenArgs &a) {
  const auto kind = sfb::parse_graph_kind(a.kind);
  const bool alignment = kind == sfb::GraphKind::kAlignment;
  const std::size_t states = a.states ? a.states : (alignment ? sfb::kAlignmentStates : sfb::kNgramStates);
  const std::size_t arcs = a.arcs ? a.arcs : (alignment ? sfb::kAlignmentArcs : sfb::kNgramArcs);
  const auto g = sfb::random_graph(states, arcs, a.seed, kind);
  const auto v = sfb::random_likelihoods(states, a.frames, a.seed + 1, a.lo, a.hi);
  sfb::save_graph_file(g, a.graph_out);
  sfb::write_matrix_file(a.lik_out, v.values(), ScalarFor(a.float32));
  std::cerr << "wrote " << states << "-state " << a.kind << " graph (" << g.num_arcs()
            << " transitions) to " << a.graph_out << ", " << a.frames << " frames to " << a.lik_out
            << '\n';
  return kExitOk;
}

int RunBench(BenchArgs a, int threads) {
  a.cfg.kind = sfb::parse_graph_kind(a.kind);
  a.cfg.threads = threads;
  a.cfg.memory_limit_bytes = a.memory_mb << 20;
  const auto rec = sfb::run_bench(a.cfg);
  const std::vector<sfb::BenchRecord> records{rec};
  std::cout << (a.csv && !a.json ? sfb::bench_csv(records) : sfb::bench_json(records));
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Semiring forward-backward, Viterbi and LF-MMI over sparse graphs"};
  app.require_subcommand(1);
  int threads = DefaultThreads();
  app.add_option("--threads", threads, "Worker threads for the kernels")
      ->check(CLI::PositiveNumber);

  FbArgs fb;
  auto *fb_cmd = app.add_subcommand("fb", "State posteriors and log Z");
  fb_cmd->add_option("graph", fb.graph, "Graph text file")->required();
  fb_cmd->add_option("likelihoods", fb.lik, "Likelihood container (K x N)")->required();
  fb_cmd->add_option("output", fb.out, "Posterior container to write")->required();
  fb_cmd->add_option("--semiring", fb.semiring, "log or prob")
      ->check(CLI::IsMember({"log", "prob"}));
  fb_cmd->add_flag("--float32", fb.float32, "Write 32-bit scalars");

  ViterbiArgs vit;
  auto *vit_cmd = app.add_subcommand("viterbi", "Best state sequence and its score");
  vit_cmd->add_option("graph", vit.graph, "Graph text file")->required();
  vit_cmd->add_option("likelihoods", vit.lik, "Likelihood container (K x N)")->required();

  LfmmiArgs mmi;
  auto *mmi_cmd = app.add_subcommand("lfmmi", "LF-MMI loss and gradient");
  mmi_cmd->add_option("numerator", mmi.num, "Numerator graph")->required();
  mmi_cmd->add_option("denominator", mmi.den, "Denominator graph")->required();
  mmi_cmd->add_option("likelihoods", mmi.lik, "Network output container (K x N)")->required();
  mmi_cmd->add_option("grad_output", mmi.grad_out, "Gradient container to write")->required();
  mmi_cmd->add_flag("--float32", mmi.float32, "Write 32-bit scalars");

  GenArgs gen;
  auto *gen_cmd = app.add_subcommand("gen", "Generate a synthetic graph and likelihoods");
  gen_cmd->add_option("--kind", gen.kind, "alignment or ngram")
      ->check(CLI::IsMember({"alignment", "ngram"}));
  gen_cmd->add_option("--states", gen.states, "States (default per kind)");
  gen_cmd->add_option("--arcs", gen.arcs, "Arcs incl. final entries (default per kind)");
  gen_cmd->add_option("--frames", gen.frames, "Frames")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--min-loglik", gen.lo, "Lower bound of log-likelihoods");
  gen_cmd->add_option("--max-loglik", gen.hi, "Upper bound of log-likelihoods");
  gen_cmd->add_option("--graph-out", gen.graph_out, "Graph text output")->required();
  gen_cmd->add_option("--lik-out", gen.lik_out, "Likelihood container output")->required();
  gen_cmd->add_flag("--float32", gen.float32, "Write 32-bit scalars");

  BenchArgs bench;
  auto *bench_cmd = app.add_subcommand("bench", "Time batched forward-backward");
  bench_cmd->add_option("--kind", bench.kind, "alignment or ngram")
      ->check(CLI::IsMember({"alignment", "ngram"}));
  bench_cmd->add_option("--states", bench.cfg.states, "States (default per kind)");
  bench_cmd->add_option("--arcs", bench.cfg.arcs, "Arcs (default per kind)");
  bench_cmd->add_option("--batch", bench.cfg.batch, "Full-scale batch size")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--scale", bench.cfg.scale, "Batch scale factor (run uses batch*scale)")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--frames", bench.cfg.frames, "Frames per sequence")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--reps", bench.cfg.reps, "Repetitions (>= 3)");
  bench_cmd->add_option("--seed", bench.cfg.seed, "Random seed");
  bench_cmd->add_option("--memory-limit-mb", bench.memory_mb,
                        "Memory budget (default 80% of RAM)");
  bench_cmd->add_flag("--json", bench.json, "JSON output (default)");
  bench_cmd->add_flag("--csv", bench.csv, "CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*fb_cmd) return RunFb(fb, threads);
    if (*vit_cmd) return RunViterbi(vit, threads);
    if (*mmi_cmd) return RunLfmmi(mmi, threads);
    if (*gen_cmd) return RunGen(gen);
    if (*bench_cmd) return RunBench(bench, threads);
  } catch (const sfb::EmptyLatticeError &e) {
    std::cerr << "sfb: " << e.what() << '\n';
    return kExitEmptyLattice;
  } catch (const std::exception &e) {
    std::cerr << "sfb: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
