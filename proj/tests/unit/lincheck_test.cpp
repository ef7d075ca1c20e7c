#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "bigatomic/lincheck/history.hpp"
#include "bigatomic/lincheck/runner.hpp"
#include "bigatomic/lincheck/suites.hpp"

using namespace bigatomic;
using namespace bigatomic::lincheck;

namespace bigatomic {
void PrintTo(impl_kind k, std::ostream* os) { *os << to_string(k); }
}  // namespace bigatomic

namespace {

operation op(std::size_t thread, op_kind k, std::uint64_t invoke, std::uint64_t response,
             std::uint64_t a0 = 0, std::uint64_t a1 = 0, std::uint64_t ret = 0, bool ok = false) {
  operation o;
  o.thread = thread;
  o.kind = k;
  o.arg0 = a0;
  o.arg1 = a1;
  o.ret = ret;
  o.ok = ok;
  o.invoke = invoke;
  o.response = response;
  return o;
}

// Oracle: try every permutation, keep those consistent with real time.
template <class Model>
bool brute_force(const std::vector<operation>& h, typename Model::state init) {
  std::vector<std::size_t> order(h.size());
  std::iota(order.begin(), order.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < order.size() && ok; ++i)
      for (std::size_t j = i + 1; j < order.size() && ok; ++j)
        if (h[order[j]].response < h[order[i]].invoke) ok = false;
    auto s = init;
    for (std::size_t i = 0; i < order.size() && ok; ++i) ok = Model::apply(s, h[order[i]]);
    if (ok) return true;
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

}  // namespace

TEST(Checker, SequentialHistoryPasses) {
  std::vector<operation> h = {
      op(0, op_kind::store, 0, 1, 5),
      op(0, op_kind::load, 2, 3, 0, 0, 5),
      op(1, op_kind::cas, 4, 5, 5, 6, 0, true),
      op(1, op_kind::cas, 6, 7, 5, 7, 0, false),
      op(0, op_kind::load, 8, 9, 0, 0, 6),
  };
  EXPECT_EQ(check_linearizable<register_model>(h, {0}), verdict::linearizable);
}

TEST(Checker, NeverWrittenValueFails) {
  std::vector<operation> h = {
      op(0, op_kind::store, 0, 3, 1),
      op(1, op_kind::load, 1, 2, 0, 0, 2),
  };
  EXPECT_EQ(check_linearizable<register_model>(h, {0}), verdict::not_linearizable);
}

TEST(Checker, StaleReadAfterCompletedWriteFails) {
  std::vector<operation> h = {
      op(0, op_kind::store, 0, 1, 1),
      op(1, op_kind::load, 2, 3, 0, 0, 0),
  };
  EXPECT_EQ(check_linearizable<register_model>(h, {0}), verdict::not_linearizable);
}

TEST(Checker, OverlapAllowsEitherOrder) {
  std::vector<operation> h = {
      op(0, op_kind::store, 0, 5, 1),
      op(1, op_kind::load, 1, 2, 0, 0, 0),
      op(2, op_kind::load, 3, 4, 0, 0, 1),
  };
  EXPECT_EQ(check_linearizable<register_model>(h, {0}), verdict::linearizable);
  // ...but not a new-then-old inversion between two sequential readers.
  std::swap(h[1].ret, h[2].ret);
  EXPECT_EQ(check_linearizable<register_model>(h, {0}), verdict::not_linearizable);
}

TEST(Checker, MatchesPermutationOracleOnThreeThreadHistories) {
  std::mt19937_64 rng(42);
  int agree = 0, positives = 0;
  for (int trial = 0; trial < 400; ++trial) {
    // 3 threads x 2 ops on one register, random overlap and outcomes.
    std::vector<operation> h;
    for (std::size_t t = 0; t < 3; ++t) {
      std::uint64_t clock = rng() % 4;
      for (int i = 0; i < 2; ++i) {
        const std::uint64_t inv = clock;
        const std::uint64_t res = inv + 1 + rng() % 6;
        clock = res + 1 + rng() % 2;
        switch (rng() % 3) {
          case 0: h.push_back(op(t, op_kind::load, inv * 3 + t, res * 3 + t, 0, 0, rng() % 3)); break;
          case 1: h.push_back(op(t, op_kind::store, inv * 3 + t, res * 3 + t, rng() % 3)); break;
          default:
            h.push_back(op(t, op_kind::cas, inv * 3 + t, res * 3 + t, rng() % 3, rng() % 3, 0, rng() & 1));
        }
      }
    }
    const bool expect = brute_force<register_model>(h, {0});
    const bool got = check_linearizable<register_model>(h, {0}) == verdict::linearizable;
    EXPECT_EQ(got, expect) << describe(h);
    agree += got == expect;
    positives += expect;
  }
  EXPECT_EQ(agree, 400);
  // Both verdicts must actually occur for the comparison to mean much.
  EXPECT_GT(positives, 20);
  EXPECT_LT(positives, 380);
}

TEST(Checker, MapModel) {
  std::vector<operation> h = {
      op(0, op_kind::insert, 0, 1, 7, 70, 0, true),
      op(1, op_kind::insert, 2, 3, 7, 71, 0, false),
      op(0, op_kind::find, 4, 5, 7, 0, 70, true),
      op(1, op_kind::erase, 6, 7, 7, 0, 0, true),
      op(0, op_kind::find, 8, 9, 7, 0, 0, false),
  };
  EXPECT_EQ(check_linearizable<map_model>(h, {}), verdict::linearizable);
  h[4].ok = true;
  h[4].ret = 70;
  EXPECT_EQ(check_linearizable<map_model>(h, {}), verdict::not_linearizable);
}

TEST(Checker, RefusesLongHistories) {
  std::vector<operation> h;
  for (std::uint64_t i = 0; i < kMaxCheckedOps + 1; ++i) h.push_back(op(0, op_kind::load, 2 * i, 2 * i + 1));
  EXPECT_EQ(check_linearizable<register_model>(h, {0}), verdict::refused);
  h.pop_back();
  EXPECT_EQ(check_linearizable<register_model>(h, {0}), verdict::linearizable);
}

class ImplSuites : public ::testing::TestWithParam<impl_kind> {};

TEST_P(ImplSuites, RegisterHistories) {
  const auto r = register_histories(GetParam(), 7, 100);
  for (const auto& l : r.lines) EXPECT_TRUE(l.pass) << l.name << ": " << l.detail;
}

TEST_P(ImplSuites, MapHistories) {
  const auto r = map_histories(GetParam(), 7, 60);
  for (const auto& l : r.lines) EXPECT_TRUE(l.pass) << l.name << ": " << l.detail;
}

TEST_P(ImplSuites, ForcedSchedulesAndAudits) {
  auto r = forced_schedules(GetParam());
  r.append(random_audits(GetParam(), 11, 5000));
  for (const auto& l : r.lines) EXPECT_TRUE(l.pass) << l.name << ": " << l.detail;
}

TEST_P(ImplSuites, ProgressProbes) {
  const auto r = progress_probes(GetParam());
  for (const auto& l : r.lines) EXPECT_TRUE(l.pass) << l.name << ": " << l.detail;
}

INSTANTIATE_TEST_SUITE_P(All, ImplSuites, ::testing::ValuesIn(kAllImpls),
                         [](const auto& info) {
                           std::string s = to_string(info.param);
                           std::replace(s.begin(), s.end(), '-', '_');
                           return s;
                         });

TEST(Suites, ChainingMapHistories) {
  const auto r = map_histories(impl_kind::seqlock, 3, 60, true);
  for (const auto& l : r.lines) EXPECT_TRUE(l.pass) << l.name << ": " << l.detail;
}

TEST(Suites, MutantsAreCaught) {
  const auto a = audit_mutant();
  EXPECT_TRUE(a.pass) << a.detail;
  const auto t = torn_read_mutant(2, std::chrono::seconds(1));
  EXPECT_TRUE(t.pass) << t.detail;
}

TEST(Suites, SlabOrderingTrap) {
  const auto c = slab_ordering_trap();
  EXPECT_TRUE(c.pass) << c.detail;
}
