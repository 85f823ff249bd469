// tests/bench_test.cc

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
#include <string>
#include <vector>

#include "json.hpp"
#include "sfb/bench.h"
#include "sfb/errors.h"

namespace sfb {
namespace {

BenchConfig Small() {
  BenchConfig cfg;
  cfg.states = 20;
  cfg.arcs = 50;
  cfg.batch = 4;
  cfg.scale = 1.0;
  cfg.frames = 30;
  cfg.reps = 3;
  return cfg;
}

TEST(Bench, RecordDefinitions) {
  const auto rec = run_bench(Small());
  EXPECT_EQ(rec.kind, "alignment");
  EXPECT_EQ(rec.batch, 4u);
  ASSERT_EQ(rec.times_s.size(), 3u);
  auto sorted = rec.times_s;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(rec.median_s, sorted[1]);
  EXPECT_EQ(rec.spread_s, sorted[2] - sorted[0]);
  double total = 0.0;
  for (double t : rec.times_s) total += t;
  EXPECT_DOUBLE_EQ(rec.nnz_per_s, static_cast<double>(rec.composed_nnz) * 30.0 * 3.0 / total);
  const auto g = random_graph(20, 50, 0, GraphKind::kAlignment);
  EXPECT_EQ(rec.composed_nnz, 4 * g.num_arcs());
}

TEST(Bench, ScaleShrinksBatch) {
  BenchConfig cfg;
  EXPECT_EQ(effective_batch(cfg), 8u);  // 128 / 16
  cfg.scale = 1e-6;
  EXPECT_EQ(effective_batch(cfg), 1u);
  cfg.scale = 1.0;
  EXPECT_EQ(effective_batch(cfg), 128u);
}

TEST(Bench, RejectsTooFewReps) {
  auto cfg = Small();
  cfg.reps = 2;
  EXPECT_THROW(run_bench(cfg), InfeasibleError);
}

TEST(Bench, MemoryLimitReportsEstimate) {
  auto cfg = Small();
  cfg.memory_limit_bytes = 1024;
  try {
    run_bench(cfg);
    FAIL();
  } catch (const InfeasibleError &e) {
    EXPECT_NE(std::string(e.what()).find("MiB"), std::string::npos);
  }
}

TEST(Bench, JsonAndCsv) {
  const auto rec = run_bench(Small());
  const std::vector<BenchRecord> recs{rec, rec};
  const auto j = nlohmann::json::parse(bench_json(recs));
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 2u);
  for (const char *key : {"kind", "K", "arcs", "batch", "frames", "reps", "median_s", "spread_s",
                          "nnz_per_s"})
    EXPECT_TRUE(j[0].contains(key)) << key;
  EXPECT_EQ(j[0]["K"], 20);
  const auto csv = bench_csv(recs);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "kind,K,arcs,batch,frames,reps,median_s,spread_s,nnz_per_s");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Bench, RandomLikelihoodsInRange) {
  const auto v = random_likelihoods(5, 40, 9, -10.0, 0.0);
  for (double x : v.values().data()) {
    EXPECT_GE(x, -10.0);
    EXPECT_LE(x, 0.0);
  }
  EXPECT_EQ(random_likelihoods(5, 40, 9).values(), v.values());
}

}  // namespace
}  // namespace sfb
