#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bigatomic/cached_waitfree.hpp"
#include "bigatomic/lincheck/history.hpp"
#include "bigatomic/lincheck/runner.hpp"
#include "bigatomic/payload.hpp"

namespace bigatomic::lincheck {

struct audit_report {
  std::size_t steps = 0;
  std::size_t violations = 0;
  std::vector<std::string> messages;  // first few only

  void fail(std::string msg) {
    ++violations;
    if (messages.size() < 16) messages.push_back(std::move(msg));
  }
  void merge(const audit_report& o) {
    steps += o.steps;
    violations += o.violations;
    for (const auto& m : o.messages)
      if (messages.size() < 16) messages.push_back(m);
  }
};

// True if some in-flight op on cell target could move it from `from` to `to`.
inline bool explains_update(const run_state& rs, std::size_t target, std::uint64_t from,
                            std::uint64_t to) {
  for (const operation* op : rs.active) {
    if (!op || op->target != target) continue;
    if (op->kind == op_kind::cas && op->arg0 == from && op->arg1 == to) return true;
    if (op->kind == op_kind::store && op->arg0 == to) return true;
  }
  return false;
}

// Shadow of a wait-free cached cell (or the central cell of the writable
// construction). Checked after every step:
//  - the version never decreases;
//  - a new backup node arrives marked and with a value different from the
//    node it replaced, and `legal` accepts the transition;
//  - an unmarked backup implies an even version and cache == backup value;
//  - the cache changes only while the version is odd.
// Since every value change swings the backup to a node carrying the new
// value, these together keep the backup node holding the current value.
template <class Cell>
class waitfree_shadow {
 public:
  using state = typename Cell::debug_state;

  template <class Legal>
  void observe(const Cell& c, audit_report& r, Legal legal) {
    const state s = c.inspect();
    if (prev_) {
      const state& p = *prev_;
      if (s.version < p.version) r.fail("version decreased");
      if (marked_ptr::unmark(s.backup_word) != marked_ptr::unmark(p.backup_word)) {
        if (!s.marked) r.fail("new backup node installed unmarked");
        if (bitwise_equal(s.backup_value, p.backup_value)) r.fail("backup replaced by an equal value");
        if (!legal(p.backup_value, s.backup_value)) r.fail("backup change not explained by any in-flight update");
      } else if (s.marked && !p.marked) {
        r.fail("installed node re-marked");
      }
      if (!bitwise_equal(s.cache, p.cache) && (s.version & 1) == 0)
        r.fail("cache written outside the version lock");
    }
    if (!s.marked && ((s.version & 1) != 0 || !bitwise_equal(s.cache, s.backup_value)))
      r.fail("unmarked backup but cache differs from backup value");
    prev_ = s;
  }

 private:
  std::optional<state> prev_;
};

// Shadow of a memory-efficient cached cell. Tracks the abstract value and
// checks after every step:
//  - a newly installed node carries a new value explained by an in-flight
//    update, and becomes the abstract value;
//  - while the backup is a tagged null, the version is even and the cache
//    holds the abstract value;
//  - a freshly published tagged null carries the current version.
template <class Cell>
class memeff_shadow {
 public:
  void observe(const Cell& c, const run_state& rs, std::size_t target, audit_report& r) {
    const auto s = c.inspect();
    if (!init_) {
      init_ = true;
      value_ = s.backup_is_null ? s.cache : s.backup_value;
    } else if (s.backup_word != prev_word_) {
      if (!s.backup_is_null) {
        if (bitwise_equal(s.backup_value, value_))
          r.fail("installed node carries the current value");
        if (!explains_update(rs, target, decode(value_), decode(s.backup_value)))
          r.fail("installed value not explained by any in-flight update");
        value_ = s.backup_value;
      } else if (s.null_tag != s.version) {
        r.fail("tagged null published with a stale version");
      }
    }
    if (s.backup_is_null) {
      if (s.version & 1) r.fail("backup null while the version is locked");
      if (!bitwise_equal(s.cache, value_)) r.fail("backup null but cache does not hold the live value");
    } else if (!bitwise_equal(s.backup_value, value_)) {
      r.fail("installed node does not hold the live value");
    }
    prev_word_ = s.backup_word;
  }

 private:
  bool init_ = false;
  std::uintptr_t prev_word_ = 0;
  typename Cell::value_type value_{};
};

// Shadow of the writable construction. Beyond the central cell's own
// invariants, checks after every step:
//  - every change of Z bumps seq by exactly one;
//  - a change that flips Z's mark is a transfer of W's buffered value;
//    one that keeps it is a cas explained by an in-flight op;
//  - W changes only when no write is pending, and only to a value some
//    in-flight store buffers;
//  - a write is pending exactly when the marks of W and Z differ.
template <class Cell>
class writable_shadow {
 public:
  void observe(const Cell& c, const run_state& rs, std::size_t target, audit_report& r) {
    z_.observe(c.z(), r, [](const auto&, const auto&) { return true; });
    const auto s = c.inspect();
    if (init_) {
      if (marked_ptr::unmark(s.z.backup_word) != marked_ptr::unmark(prev_.z.backup_word)) {
        const auto& a = prev_.z_value;
        const auto& b = s.z_value;
        if (b.seq() != a.seq() + 1) r.fail("Z change did not bump seq by one");
        if (b.mark() != a.mark()) {
          if (!pending_) r.fail("Z mark flipped with no pending write");
          if (b.mark() != s.w_mark || !bitwise_equal(b.value, s.w_value))
            r.fail("Z mark flip is not a transfer of W");
          pending_ = false;
        } else {
          bool found = false;
          for (const operation* op : rs.active)
            if (op && op->target == target && op->kind == op_kind::cas &&
                op->arg0 == decode(a.value) && op->arg1 == decode(b.value))
              found = true;
          if (!found || bitwise_equal(a.value, b.value))
            r.fail("Z value change not explained by an in-flight cas");
        }
      }
      if (s.w_word != prev_.w_word) {
        if (pending_) r.fail("W replaced while a write was pending");
        if (s.w_mark == s.z_value.mark()) r.fail("W installed without a mark mismatch");
        if (!explains_update(rs, target, kTorn, decode(s.w_value)))
          r.fail("W value not buffered by any in-flight store");
        pending_ = true;
      }
    } else {
      pending_ = s.w_mark != s.z_value.mark();
    }
    if (pending_ != (s.w_mark != s.z_value.mark()))
      r.fail("pending write does not match the W/Z mark mismatch");
    prev_ = s;
    init_ = true;
  }

 private:
  waitfree_shadow<typename Cell::central> z_;
  typename Cell::debug_state prev_{};
  bool init_ = false;
  bool pending_ = false;
};

// Adapts the shadows to a register_scenario: one shadow per cell,
// observed after every scheduled step.
template <class Cell, class Shadow>
class scenario_auditor {
 public:
  scenario_auditor(register_scenario<Cell>& sc, std::size_t cells, audit_report& r)
      : sc_(sc), shadows_(cells), r_(r) {
    observe();
    sc.sched().on_step([this](std::size_t, const char*) {
      ++r_.steps;
      observe();
    });
  }

 private:
  void observe() {
    for (std::size_t i = 0; i < shadows_.size(); ++i) {
      if constexpr (requires(Shadow& s) { s.observe(sc_.cell(i), sc_.state(), i, r_); }) {
        shadows_[i].observe(sc_.cell(i), sc_.state(), i, r_);
      } else {
        const run_state& rs = sc_.state();
        shadows_[i].observe(sc_.cell(i), r_, [&rs, i](const auto& from, const auto& to) {
          return explains_update(rs, i, decode(from), decode(to));
        });
      }
    }
  }

  register_scenario<Cell>& sc_;
  std::vector<Shadow> shadows_;
  audit_report& r_;
};

// Random scheduled runs under the shadow until at least min_steps steps
// have been audited.
template <class Cell, class Shadow>
audit_report random_audit(std::uint64_t seed, std::size_t min_steps, const history_options& o = {3, 1, 8, 3}) {
  audit_report total;
  std::mt19937_64 rng(seed);
  while (total.steps < min_steps) {
    register_scenario<Cell> sc(o.cells, random_register_plans(rng, o, Cell::supports_store));
    audit_report r;
    scenario_auditor<Cell, Shadow> auditor(sc, o.cells, r);
    sc.start();
    if (!sc.sched().run_random(rng())) r.fail("random schedule did not terminate");
    if (sc.check() != verdict::linearizable) r.fail("history not linearizable:\n" + describe(sc.history()));
    total.merge(r);
  }
  return total;
}

}  // namespace bigatomic::lincheck
