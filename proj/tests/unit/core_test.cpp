#include <gtest/gtest.h>

#include <atomic>
#include <set>
#include <thread>
#include <vector>

#include "bigatomic/epoch.hpp"
#include "bigatomic/hazard.hpp"
#include "bigatomic/payload.hpp"
#include "bigatomic/thread_registry.hpp"

using namespace bigatomic;

TEST(Payload, FilledIsUniform) {
  auto p = payload<4>::filled(7);
  EXPECT_TRUE(p.uniform());
  p.words[2] = 8;
  EXPECT_FALSE(p.uniform());
  EXPECT_EQ(words_of<payload<4>>, 4u);
  EXPECT_EQ(sizeof(payload<16>), 128u);
}

TEST(Payload, InlineWordsRoundTrip) {
  inline_words<payload<3>> w(payload<3>::filled(5));
  EXPECT_EQ(w.read(), payload<3>::filled(5));
  w.write(payload<3>{{1, 2, 3}});
  EXPECT_EQ(w.read(), (payload<3>{{1, 2, 3}}));
}

TEST(Registry, DistinctIdsWhileLive) {
  std::vector<std::size_t> ids(8);
  std::atomic<int> arrived{0};
  std::vector<std::thread> ts;
  for (int i = 0; i < 8; ++i)
    ts.emplace_back([&, i] {
      ids[i] = thread_registry::id();
      arrived.fetch_add(1);
      while (arrived.load() < 8) std::this_thread::yield();
    });
  for (auto& t : ts) t.join();
  EXPECT_EQ(std::set<std::size_t>(ids.begin(), ids.end()).size(), 8u);
  for (auto id : ids) EXPECT_LT(id, thread_registry::max_threads());
}

TEST(Registry, IdsAreRecycled) {
  const std::size_t before = thread_registry::high_water();
  for (int i = 0; i < 200; ++i) std::thread([] { thread_registry::id(); }).join();
  // 200 sequential threads, far more than the default P, fit because each
  // releases its id at exit.
  EXPECT_LE(thread_registry::high_water(), before + 2);
}

TEST(Registry, ConfigureAfterUseThrows) {
  thread_registry::id();
  EXPECT_THROW(thread_registry::configure(thread_registry::max_threads()), std::logic_error);
}

TEST(ShardedCounter, SumsAcrossThreads) {
  sharded_counter c;
  std::vector<std::thread> ts;
  for (int i = 0; i < 4; ++i)
    ts.emplace_back([&] {
      for (int j = 0; j < 1000; ++j) c.add(1);
    });
  for (auto& t : ts) t.join();
  EXPECT_EQ(c.sum(), 4000);
}

namespace {

// Changes the protected source once, between announce and validate.
struct flip_once {
  static constexpr bool enabled = true;
  static inline std::atomic<std::uintptr_t>* src = nullptr;
  static inline std::uintptr_t flip_to = 0;
  static inline int retries = 0;
  static inline bool flipped = false;
  static void at(const char* label) {
    if (!flipped && std::string_view(label) == "hp.validate") {
      flipped = true;
      src->store(flip_to);
    }
  }
  static void steps(std::size_t) {}
  static void retry_steps(std::size_t) { ++retries; }
};

struct tracked {
  static inline int deleted = 0;
  ~tracked() { ++deleted; }
};

}  // namespace

TEST(Hazard, ProtectRetriesOnceWhenSourceChanges) {
  int a = 0, b = 0;
  std::atomic<std::uintptr_t> src{reinterpret_cast<std::uintptr_t>(&a)};
  flip_once::src = &src;
  flip_once::flip_to = reinterpret_cast<std::uintptr_t>(&b);
  hazard_guard g;
  const auto w = g.protect<flip_once>(src, [](std::uintptr_t x) {
    return reinterpret_cast<const void*>(x);
  });
  EXPECT_EQ(w, reinterpret_cast<std::uintptr_t>(&b));
  EXPECT_EQ(flip_once::retries, 1);
  bool announced = false;
  hazard_domain::instance().for_each_announced([&](const void* p) { announced |= p == &b; });
  EXPECT_TRUE(announced);
}

TEST(Hazard, RetiredAnnouncedNodeSurvivesScan) {
  auto& hp = hazard_domain::instance();
  auto* n = new tracked;
  const int before = tracked::deleted;
  {
    hazard_guard g;
    g.announce(n);
    hp.retire(n);
    hp.scan();
    EXPECT_EQ(tracked::deleted, before);
  }
  hp.scan();
  EXPECT_EQ(tracked::deleted, before + 1);
}

TEST(Hazard, GuardsExhaustSlots) {
  hazard_guard a;
  hazard_guard b;
  EXPECT_THROW(hazard_guard c, std::logic_error);
}

TEST(Hazard, BacklogBoundedByThreshold) {
  auto& hp = hazard_domain::instance();
  std::size_t peak = 0;
  for (int i = 0; i < 5000; ++i) {
    hp.retire(new tracked);
    peak = std::max(peak, hp.backlog());
  }
  EXPECT_LT(peak, hp.retire_threshold());
}

TEST(Epoch, PinnedReaderDefersFree) {
  auto& ep = epoch_domain::instance();
  const int before = tracked::deleted;
  std::atomic<bool> pinned{false}, release{false};
  std::thread reader([&] {
    epoch_guard g;
    pinned.store(true);
    while (!release.load()) std::this_thread::yield();
  });
  while (!pinned.load()) std::this_thread::yield();
  {
    epoch_guard g;
    ep.retire(new tracked);
  }
  for (int i = 0; i < 1000; ++i) {
    epoch_guard g;
    ep.try_advance();
  }
  EXPECT_EQ(tracked::deleted, before);
  release.store(true);
  reader.join();
  for (int i = 0; i < 1000; ++i) {
    epoch_guard g;
    ep.try_advance();
  }
  EXPECT_EQ(tracked::deleted, before + 1);
}
