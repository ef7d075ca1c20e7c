#include <gtest/gtest.h>

#include <atomic>
#include <thread>
#include <vector>

#include "bigatomic/big_atomic.hpp"

using namespace bigatomic;

namespace {

using P4 = payload<4>;

template <class Cell>
class CellTest : public ::testing::Test {};

using Cells = ::testing::Types<simp_lock<P4>, seq_lock<P4>, indirect<P4>, cached_waitfree<P4>,
                               cached_memeff<P4>, writable<P4>>;
TYPED_TEST_SUITE(CellTest, Cells);

P4 v(std::uint64_t x) { return P4::filled(x); }

}  // namespace

TYPED_TEST(CellTest, FreshCellHoldsInitialValue) {
  TypeParam zero;
  EXPECT_EQ(zero.load(), P4{});
  TypeParam c(v(9));
  EXPECT_EQ(c.load(), v(9));
}

TYPED_TEST(CellTest, CasSucceedsOnlyOnMatch) {
  TypeParam c(v(1));
  EXPECT_TRUE(c.cas(v(1), v(2)));
  EXPECT_EQ(c.load(), v(2));
  EXPECT_FALSE(c.cas(v(1), v(3)));
  EXPECT_EQ(c.load(), v(2));
  // Partial match is a mismatch.
  P4 almost = v(2);
  almost.words[3] = 0;
  EXPECT_FALSE(c.cas(almost, v(3)));
  EXPECT_EQ(c.load(), v(2));
}

TYPED_TEST(CellTest, CasOfEqualValueSucceeds) {
  TypeParam c(v(4));
  EXPECT_TRUE(c.cas(v(4), v(4)));
  EXPECT_EQ(c.load(), v(4));
  EXPECT_TRUE(c.cas(v(4), v(5)));
  EXPECT_EQ(c.load(), v(5));
}

TYPED_TEST(CellTest, StoreThenLoad) {
  if constexpr (big_atomic_cell<TypeParam>) {
    TypeParam c;
    c.store(v(3));
    EXPECT_EQ(c.load(), v(3));
    c.store(v(3));
    EXPECT_EQ(c.load(), v(3));
    EXPECT_TRUE(c.cas(v(3), v(6)));
    c.store(v(7));
    EXPECT_EQ(c.load(), v(7));
  } else {
    GTEST_SKIP() << "load/cas only";
  }
}

TYPED_TEST(CellTest, RacingCasHasExactlyOneWinner) {
  for (int round = 0; round < 50; ++round) {
    TypeParam c(v(0));
    std::atomic<int> wins{0};
    std::atomic<bool> go{false};
    std::vector<std::thread> ts;
    for (int t = 0; t < 4; ++t)
      ts.emplace_back([&, t] {
        while (!go.load()) std::this_thread::yield();
        wins += c.cas(v(0), v(100 + t));
      });
    go.store(true);
    for (auto& t : ts) t.join();
    EXPECT_EQ(wins.load(), 1);
    EXPECT_GE(c.load().words[0], 100u);
  }
}

TYPED_TEST(CellTest, CasCounterStress) {
  TypeParam c(v(0));
  constexpr int kThreads = 4, kIncrements = 2000;
  std::vector<std::thread> ts;
  for (int t = 0; t < kThreads; ++t)
    ts.emplace_back([&] {
      for (int i = 0; i < kIncrements;) {
        const P4 cur = c.load();
        ASSERT_TRUE(cur.uniform());
        if (c.cas(cur, v(cur.words[0] + 1))) ++i;
      }
    });
  for (auto& t : ts) t.join();
  EXPECT_EQ(c.load(), v(kThreads * kIncrements));
}

TYPED_TEST(CellTest, ProgressClass) {
  const progress expect = std::is_same_v<TypeParam, simp_lock<P4>> ||
                                  std::is_same_v<TypeParam, seq_lock<P4>>
                              ? progress::blocking
                          : std::is_same_v<TypeParam, indirect<P4>> ||
                                  std::is_same_v<TypeParam, cached_memeff<P4>>
                              ? progress::lock_free
                              : progress::wait_free;
  EXPECT_EQ(TypeParam::progress_guarantee, expect);
}

TEST(SeqLock, VersionCountsWrites) {
  seq_lock<P4> c;
  constexpr int kThreads = 4, kWrites = 5000;
  std::vector<std::thread> ts;
  for (int t = 0; t < kThreads; ++t)
    ts.emplace_back([&, t] {
      for (int i = 0; i < kWrites; ++i) c.store(v(t * kWrites + i));
    });
  for (auto& t : ts) t.join();
  EXPECT_EQ(c.version(), 2u * kThreads * kWrites);
}

TEST(CachedWaitFree, QuiescentLiveNodesEqualCells) {
  using cell = cached_waitfree<P4>;
  hazard_domain::instance().drain_all();
  const auto before = node_stats<cell::node>::live_count();
  {
    std::vector<cell> cells(64);
    std::vector<std::thread> ts;
    for (int t = 0; t < 4; ++t)
      ts.emplace_back([&, t] {
        for (int i = 0; i < 5000; ++i) {
          cell& c = cells[(i * 7 + t) % cells.size()];
          c.cas(c.load(), v(i));
        }
      });
    for (auto& t : ts) t.join();
    hazard_domain::instance().drain_all();
    EXPECT_EQ(node_stats<cell::node>::live_count() - before, 64);
  }
  hazard_domain::instance().drain_all();
  EXPECT_EQ(node_stats<cell::node>::live_count(), before);
}

TEST(CachedMemEff, QuiescentInstalledNodesAtMostThreads) {
  using cell = cached_memeff<P4>;
  std::vector<cell> cells(64);
  std::vector<std::thread> ts;
  for (int t = 0; t < 4; ++t)
    ts.emplace_back([&, t] {
      for (int i = 0; i < 20000; ++i) {
        cell& c = cells[(i * 5 + t) % cells.size()];
        if (i % 3 == 0)
          c.store(v(i));
        else
          c.cas(c.load(), v(i + 1));
      }
    });
  for (auto& t : ts) t.join();
  EXPECT_LE(cell::pool::installed_count(), thread_registry::high_water());
  cell::pool::for_each([](const auto& s) {
    EXPECT_LE(s.in_use_peak(), s.size());
    if (s.reclaims() > 0) {
      EXPECT_GT(s.min_yield(), 0u);
    }
  });
}

TEST(CachedMemEff, DeamortizedPhasesReclaimAllButSurvivors) {
  using cell = cached_memeff<P4, no_hooks, true>;
  std::vector<cell> cells(16);
  std::vector<std::thread> ts;
  for (int t = 0; t < 4; ++t)
    ts.emplace_back([&, t] {
      for (int i = 0; i < 50000; ++i) {
        cell& c = cells[(i * 3 + t) % cells.size()];
        if (i & 1)
          c.store(v(i));
        else
          c.cas(c.load(), v(i + 1));
      }
    });
  for (auto& t : ts) t.join();
  const std::size_t P = thread_registry::max_threads();
  std::size_t phases = 0;
  cell::pool::for_each([&](const auto& s) {
    phases += s.reclaims();
    EXPECT_EQ(s.size(), 6 * P);
    EXPECT_GE(s.min_phase_slack(), 0);
    EXPECT_LE(s.max_phase_writes(), 3 * P);
  });
  EXPECT_GT(phases, 0u);
}

TEST(Writable, StoreWinsOverStaleCas) {
  writable<P4> c(v(1));
  c.store(v(2));
  EXPECT_FALSE(c.cas(v(1), v(3)));
  EXPECT_TRUE(c.cas(v(2), v(3)));
  EXPECT_EQ(c.load(), v(3));
}

TEST(ImplNames, RoundTrip) {
  for (impl_kind k : kAllImpls) EXPECT_EQ(parse_impl(to_string(k)), k);
  EXPECT_FALSE(parse_impl("libatomic").has_value());
}
