#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bigatomic/bench/config.hpp"
#include "bigatomic/bench/report.hpp"
#include "bigatomic/bench/workload.hpp"
#include "bigatomic/bench/zipf.hpp"
#include "bigatomic/big_atomic.hpp"

using namespace bigatomic;
using namespace bigatomic::bench;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const char* name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove(p);
  return p.string();
}

}  // namespace

TEST(Zipf, HarmonicSmallCases) {
  EXPECT_DOUBLE_EQ(harmonic(1, 0.99), 1.0);
  EXPECT_DOUBLE_EQ(harmonic(4, 0), 4.0);
  EXPECT_NEAR(harmonic(3, 1.0), 1 + 0.5 + 1.0 / 3, 1e-15);
}

TEST(Zipf, SingleItemAlwaysRankZero) {
  std::mt19937_64 rng(1);
  for (double z : {0.0, 0.5, 0.99}) {
    zipf_sampler s(1, z);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(s(rng), 0u);
  }
}

TEST(Zipf, ZeroExponentIsUniform) {
  std::mt19937_64 rng(2);
  zipf_sampler s(4, 0);
  std::array<int, 4> c{};
  constexpr int kDraws = 400000;
  for (int i = 0; i < kDraws; ++i) ++c[s(rng)];
  for (int x : c) EXPECT_NEAR(x / double(kDraws), 0.25, 0.005);
}

TEST(Zipf, RankOneMatchesDirectSum) {
  std::mt19937_64 rng(3);
  zipf_sampler s(1000, 0.99);
  constexpr int kDraws = 10'000'000;
  int hits = 0;
  for (int i = 0; i < kDraws; ++i) hits += s(rng) == 0;
  const double expect = 1 / harmonic(1000, 0.99);
  EXPECT_NEAR(hits / double(kDraws) / expect, 1.0, 0.01);
}

TEST(Zipf, StaysInRange) {
  std::mt19937_64 rng(4);
  zipf_sampler s(37, 0.7);
  for (int i = 0; i < 100000; ++i) ASSERT_LT(s(rng), 37u);
}

TEST(Csv, MopsArithmetic) {
  throughput_report r;
  r.impl = "seqlock";
  r.mode = "array";
  r.ops = 1'500'000'000;
  r.seconds = 10;
  EXPECT_NE(format_row(r).find(",150.000"), std::string::npos);
  EXPECT_EQ(format_row(r).substr(format_row(r).rfind(',') + 1), "150.000");
}

TEST(Csv, GoldenFile) {
  const std::string golden = slurp(BIGATOMIC_TEST_DATA "/golden_report.csv");
  ASSERT_FALSE(golden.empty());
  const auto rows = read_report(BIGATOMIC_TEST_DATA "/golden_report.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].impl, "cached-me");
  EXPECT_EQ(rows[1].z, 0.99);
  EXPECT_EQ(rows[1].seconds, 5.000123456);
  EXPECT_EQ(rows[2].ops, 7u);

  const std::string path = temp_path("bigatomic_golden_rt.csv");
  emit_report(path, rows);
  EXPECT_EQ(slurp(path), golden);
  std::filesystem::remove(path);
}

TEST(Csv, RowRoundTripsBitExactly) {
  throughput_report r;
  r.impl = "writable";
  r.mode = "array";
  r.p = 3;
  r.n = 12345;
  r.u = 17;
  r.z = 0.1 + 0.2;
  r.k = 16;
  r.seconds = 1.0 / 3;
  r.ops = 987654321;
  const std::string line = format_row(r);
  const auto back = parse_row(line);
  EXPECT_EQ(back.z, r.z);
  EXPECT_EQ(back.seconds, r.seconds);
  EXPECT_EQ(back.ops, r.ops);
  EXPECT_EQ(format_row(back), line);
}

TEST(Csv, HeaderWrittenOnce) {
  const std::string path = temp_path("bigatomic_header_once.csv");
  throughput_report r;
  r.impl = "simplock";
  r.mode = "array";
  r.seconds = 1;
  r.ops = 1000;
  emit_report(path, {r});
  emit_report(path, {r, r});
  const std::string s = slurp(path);
  std::size_t headers = 0;
  for (std::size_t at = s.find(kCsvHeader); at != std::string::npos; at = s.find(kCsvHeader, at + 1))
    ++headers;
  EXPECT_EQ(headers, 1u);
  EXPECT_EQ(read_report(path).size(), 3u);
  std::filesystem::remove(path);
}

TEST(Csv, RejectsMalformedRows) {
  EXPECT_THROW(parse_row("seqlock,array,1,2,3"), std::invalid_argument);
  EXPECT_THROW(parse_row("seqlock,array,1,2,3,0,4,1,1000000,2.000"), std::invalid_argument);
  EXPECT_THROW(emit_report("/nonexistent-dir/x.csv", {}), std::runtime_error);
}

TEST(Config, Validation) {
  bench_config c;
  EXPECT_NO_THROW(c.validate());
  c.u = 101;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.k = 17;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.z = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.p = thread_registry::max_threads();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(parse_mode("hash-chaining"), bench_mode::hash_chaining);
  EXPECT_FALSE(parse_mode("tree").has_value());
}

TEST(Workload, WorkerStreamsAreReproducibleAndDistinct) {
  auto a = worker_rng(9, 0), b = worker_rng(9, 0), c = worker_rng(9, 1);
  EXPECT_EQ(a(), b());
  EXPECT_NE(worker_rng(9, 0)(), c());
}

TEST(Workload, ReadOnlyIssuesNoCas) {
  array_workload<seq_lock<payload<4>>> w(100);
  bench_config cfg;
  cfg.u = 0;
  const zipf_sampler zipf(100, 0);
  auto rng = worker_rng(1, 0);
  op_counters c;
  for (int i = 0; i < 100000; ++i) w.op(cfg, zipf, rng, c);
  EXPECT_EQ(c.finds, 100000u);
  EXPECT_EQ(c.updates, 0u);
  EXPECT_EQ(c.cas_attempts, 0u);
}

TEST(Workload, SingleCellUpdatesToggle) {
  using cell = cached_memeff<payload<4>>;
  bench_config cfg;
  cfg.u = 100;
  const zipf_sampler zipf(1, 0);
  auto run = [&](std::uint64_t seed) {
    array_workload<cell> w(1);
    auto rng = worker_rng(seed, 0);
    op_counters c;
    std::vector<bool> states;
    for (int i = 0; i < 1000; ++i) {
      const bool before = array_workload<cell>::is_full(w.cell(0).load());
      const auto succ = c.cas_successes;
      w.op(cfg, zipf, rng, c);
      const bool after = array_workload<cell>::is_full(w.cell(0).load());
      // Alone, every attempted cas succeeds and flips the state.
      EXPECT_EQ(after != before, c.cas_successes != succ);
      states.push_back(after);
    }
    EXPECT_EQ(c.cas_attempts, c.cas_successes);
    EXPECT_EQ(c.inserts + c.erases, 1000u);
    return states;
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}

TEST(Workload, OpMixMatchesUpdatePercent) {
  for (unsigned u : {5u, 50u}) {
    array_workload<seq_lock<payload<4>>> w(1000);
    bench_config cfg;
    cfg.u = u;
    const zipf_sampler zipf(1000, 0.5);
    auto rng = worker_rng(7, 0);
    op_counters c;
    constexpr int kOps = 2'000'000;
    for (int i = 0; i < kOps; ++i) w.op(cfg, zipf, rng, c);
    EXPECT_NEAR(c.updates / double(kOps), u / 100.0, 0.005);
    EXPECT_NEAR(c.inserts / double(c.updates), 0.5, 0.005);
  }
}

TEST(Workload, HashBenchOpMix) {
  bench_config cfg;
  cfg.mode = bench_mode::hash;
  cfg.n = 1000;
  cfg.u = 20;
  cfg.seconds = 0.5;
  cfg.warmup = 0;
  const auto r = run_bench(cfg);
  ASSERT_GE(r.ops, 1'000'000u);
  const auto& c = r.counters;
  EXPECT_EQ(c.finds + c.updates, r.ops);
  EXPECT_NEAR(c.updates / double(r.ops), 0.20, 0.005);
  EXPECT_NEAR(c.inserts / double(c.updates), 0.5, 0.005);
  EXPECT_EQ(r.k, 3u);
  EXPECT_EQ(r.mode, "hash");
}

TEST(Workload, ChainingReportsItsName) {
  bench_config cfg;
  cfg.mode = bench_mode::hash_chaining;
  cfg.n = 100;
  cfg.seconds = 0.05;
  cfg.warmup = 0;
  EXPECT_EQ(run_bench(cfg).impl, "chaining");
}
