#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "bigatomic/big_atomic.hpp"

using namespace bigatomic;

namespace {

template <class Table>
class TableTest : public ::testing::Test {};

using Tables = ::testing::Types<cache_hash<simp_lock<hash_link>>, cache_hash<seq_lock<hash_link>>,
                                cache_hash<indirect<hash_link>>,
                                cache_hash<cached_waitfree<hash_link>>,
                                cache_hash<cached_memeff<hash_link>>,
                                cache_hash<writable<hash_link>>, chaining_hash>;
TYPED_TEST_SUITE(TableTest, Tables);

}  // namespace

TYPED_TEST(TableTest, BasicMapSemantics) {
  TypeParam t(16);
  EXPECT_FALSE(t.find(1).has_value());
  EXPECT_TRUE(t.insert(1, 10));
  EXPECT_EQ(t.find(1), 10u);
  EXPECT_FALSE(t.insert(1, 11));
  EXPECT_EQ(t.find(1), 10u);
  EXPECT_TRUE(t.erase(1));
  EXPECT_FALSE(t.erase(1));
  EXPECT_FALSE(t.find(1).has_value());
}

TYPED_TEST(TableTest, SingleBucketCollisions) {
  TypeParam t(1);
  EXPECT_EQ(t.bucket_count(), 1u);
  for (std::uint64_t k = 1; k <= 3; ++k) EXPECT_TRUE(t.insert(k, k * 10));
  for (std::uint64_t k = 1; k <= 3; ++k) EXPECT_EQ(t.find(k), k * 10);
  EXPECT_EQ(t.bucket_index(12345), 0u);
}

TYPED_TEST(TableTest, DeleteMiddleOfThree) {
  TypeParam t(1);
  for (std::uint64_t k = 1; k <= 3; ++k) t.insert(k, k);
  // Inserts push at the head, so the chain is 3, 2, 1.
  EXPECT_TRUE(t.erase(2));
  EXPECT_EQ(t.find(1), 1u);
  EXPECT_FALSE(t.find(2).has_value());
  EXPECT_EQ(t.find(3), 3u);
  EXPECT_TRUE(t.erase(3));
  EXPECT_TRUE(t.erase(1));
  EXPECT_TRUE(t.insert(2, 20));
  EXPECT_EQ(t.find(2), 20u);
}

TYPED_TEST(TableTest, ConcurrentDuplicateInsertHasOneWinner) {
  for (int round = 0; round < 20; ++round) {
    TypeParam t(4);
    std::atomic<int> wins{0};
    std::atomic<bool> go{false};
    std::vector<std::thread> ts;
    for (int i = 0; i < 4; ++i)
      ts.emplace_back([&, i] {
        while (!go.load()) std::this_thread::yield();
        wins += t.insert(99, i);
      });
    go.store(true);
    for (auto& th : ts) th.join();
    EXPECT_EQ(wins.load(), 1);
    EXPECT_TRUE(t.find(99).has_value());
  }
}

TYPED_TEST(TableTest, ConcurrentMixedOpsKeepDisjointKeys) {
  TypeParam t(64);
  std::vector<std::thread> ts;
  for (std::uint64_t w = 0; w < 4; ++w)
    ts.emplace_back([&, w] {
      // Each thread owns keys congruent to w mod 4 and checks its own view.
      for (std::uint64_t i = 0; i < 3000; ++i) {
        const std::uint64_t key = 1 + w + 4 * ((i / 3) % 50);
        if (i % 3 == 2) {
          EXPECT_TRUE(t.erase(key));
          EXPECT_FALSE(t.find(key).has_value());
        } else if (i % 3 == 0) {
          EXPECT_TRUE(t.insert(key, i));
          EXPECT_EQ(t.find(key), i);
        }
      }
    });
  for (auto& th : ts) th.join();
}

TEST(BucketIndex, ChiSquareWithinThreeSigma) {
  cache_hash<seq_lock<hash_link>> t(1024);
  std::vector<double> counts(t.bucket_count());
  std::mt19937_64 rng(5);
  constexpr std::size_t kKeys = 1'000'000;
  for (std::size_t i = 0; i < kKeys; ++i) ++counts[t.bucket_index(rng())];
  const double expected = double(kKeys) / counts.size();
  double chi2 = 0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const double dof = counts.size() - 1;
  EXPECT_LT(std::abs(chi2 - dof), 3 * std::sqrt(2 * dof)) << chi2;
}

TEST(BucketIndex, SequentialKeysSpread) {
  chaining_hash t(1024);
  std::vector<int> counts(t.bucket_count());
  for (std::uint64_t k = 0; k < 1024 * 16; ++k) ++counts[t.bucket_index(k)];
  EXPECT_LE(*std::max_element(counts.begin(), counts.end()), 40);
}
