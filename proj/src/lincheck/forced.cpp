// Forced interleavings, shadow audits and step-count budgets.

#include <algorithm>
#include <cstdio>
#include <random>
#include <string>

#include "bigatomic/lincheck/audits.hpp"
#include "bigatomic/lincheck/hooks.hpp"
#include "bigatomic/lincheck/mutants.hpp"
#include "bigatomic/lincheck/runner.hpp"
#include "bigatomic/lincheck/suites.hpp"

namespace bigatomic::lincheck {
namespace {

using cwf = cached_waitfree<probe_value, hooks>;
using cme = cached_memeff<probe_value, hooks>;
using wr = writable<probe_value, hooks>;

operation op(op_kind k, std::uint64_t a0 = 0, std::uint64_t a1 = 0) {
  operation o;
  o.kind = k;
  o.arg0 = a0;
  o.arg1 = a1;
  return o;
}
operation load() { return op(op_kind::load); }
operation store(std::uint64_t v) { return op(op_kind::store, v); }
operation cas(std::uint64_t e, std::uint64_t d) { return op(op_kind::cas, e, d); }

// A one-cell scenario with its shadow attached from the start.
template <class Cell, class Shadow>
struct forced_run {
  explicit forced_run(std::vector<std::vector<operation>> plans)
      : sc(1, std::move(plans)), auditor(sc, 1, report) {
    sc.start();
  }
  step_scheduler& s() { return sc.sched(); }
  const operation& result(std::size_t t, std::size_t i) const { return sc.plans()[t][i]; }

  // Runs thread t through its next n operations, leaving it parked at the
  // start of the following one.
  void run_ops(std::size_t t, std::size_t n) {
    auto begun = [&] {
      std::size_t c = 0;
      for (const char* l : s().trace(t)) c += std::string(l) == "op.begin";
      return c;
    };
    const std::size_t target = begun() + n + (s().parked_at(t) == "start" ? 1 : 0);
    while (begun() < target)
      if (!s().step(t)) return;
  }

  void finish_all() {
    for (std::size_t t = 0; t < s().size(); ++t) s().run_to_end(t);
  }

  check_line verdict_line(std::string name, bool expectations, std::string what) {
    finish_all();
    const verdict v = sc.check();
    const bool pass = expectations && report.violations == 0 && v == verdict::linearizable;
    std::string detail = what + (expectations ? " held" : " FAILED") +
                         "; audit violations: " + std::to_string(report.violations) + "; " +
                         to_string(v);
    for (const auto& m : report.messages) detail += "\n  " + m;
    if (v != verdict::linearizable) detail += "\n" + describe(sc.history());
    return {std::move(name), pass, std::move(detail)};
  }

  register_scenario<Cell> sc;
  audit_report report;
  scenario_auditor<Cell, Shadow> auditor;
};

template <class F>
check_line guarded(const std::string& name, F f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {name, false, std::string("schedule error: ") + e.what()};
  }
}

suite_report cwf_schedules() {
  suite_report r;
  using run = forced_run<cwf, waitfree_shadow<cwf>>;
  r.lines.push_back(guarded("forced/cached-wf/solo", [] {
    run f({{cas(0, 1), load(), cas(1, 2), load(), cas(7, 3), cas(2, 2)}});
    f.finish_all();
    const auto st = f.sc.cell(0).inspect();
    const bool ok = f.result(0, 1).ret == 1 && f.result(0, 3).ret == 2 && !f.result(0, 4).ok &&
                    f.result(0, 5).ok && !st.marked && decode(st.cache) == 2;
    return f.verdict_line("forced/cached-wf/solo", ok, "solo results and unmarked final backup");
  }));
  r.lines.push_back(guarded("forced/cached-wf/validate-race", [] {
    run f({{cas(0, 1)}, {cas(1, 2)}});
    f.s().run_until(0, "cwf.publish.unmark");
    f.s().run_until(1, "cwf.cas.install");
    f.s().step(0);  // incumbent validates its node
    f.s().run_to_end(1);
    const bool ok = f.result(1, 0).ok && f.s().passed(1, "cwf.cas.install_retry");
    return f.verdict_line("forced/cached-wf/validate-race", ok, "second install attempt succeeded");
  }));
  r.lines.push_back(guarded("forced/cached-wf/publication-skipped", [] {
    run f({{cas(0, 1)}, {cas(1, 2)}});
    f.s().run_until(0, "cwf.publish.lock");
    f.s().run_until(1, "cwf.publish.write");
    f.s().run_to_end(0);
    const auto mid = f.sc.cell(0).inspect();
    const bool skipped = !f.s().passed(0, "cwf.publish.write") && mid.marked;
    f.s().run_to_end(1);
    const auto end = f.sc.cell(0).inspect();
    const bool ok = skipped && !end.marked && decode(end.cache) == 2;
    return f.verdict_line("forced/cached-wf/publication-skipped", ok,
                          "stale publication skipped while the backup stayed marked");
  }));
  return r;
}

suite_report cme_schedules() {
  suite_report r;
  using run = forced_run<cme, memeff_shadow<cme>>;
  r.lines.push_back(guarded("forced/cached-me/solo", [] {
    run f({{cas(0, 1), load(), store(2), load(), cas(5, 6)}});
    f.finish_all();
    const auto st = f.sc.cell(0).inspect();
    const bool ok = f.result(0, 1).ret == 1 && f.result(0, 3).ret == 2 && !f.result(0, 4).ok &&
                    st.backup_is_null && st.null_tag == st.version && decode(st.cache) == 2;
    return f.verdict_line("forced/cached-me/solo", ok, "uninstalled to a tagged null with the new version");
  }));
  r.lines.push_back(guarded("forced/cached-me/second-attempt", [] {
    run f({{cas(0, 1)}, {cas(1, 2)}});
    f.s().run_until(0, "cme.seqlock.uninstall");
    f.s().run_until(1, "cme.cas.install");
    f.s().run_to_end(0);
    f.s().run_to_end(1);
    const bool ok = f.result(1, 0).ok && f.s().passed(1, "cme.cas.install_retry");
    return f.verdict_line("forced/cached-me/second-attempt", ok,
                          "install over the fresh tagged null succeeded");
  }));
  r.lines.push_back(guarded("forced/cached-me/helper-adopts", [] {
    run f({{cas(0, 1)}, {cas(1, 2)}});
    f.s().run_until(0, "cme.seqlock.uninstall");
    f.s().run_until(1, "cme.seqlock.lock");
    f.s().run_to_end(0);
    f.s().run_to_end(1);
    const auto st = f.sc.cell(0).inspect();
    const bool ok = f.s().passed(0, "cme.seqlock.adopt") && st.backup_is_null &&
                    decode(st.cache) == 2 && f.result(1, 0).ok;
    return f.verdict_line("forced/cached-me/helper-adopts", ok,
                          "displaced writer cached its successor's value");
  }));
  r.lines.push_back(guarded("forced/cached-me/load-mid-update", [] {
    run f({{cas(0, 1)}, {load()}});
    f.s().run_until(0, "cme.seqlock.lock");
    f.s().run_to_end(1);
    const bool ok = f.result(1, 0).ret == 1 && f.s().passed(1, "cme.indirect.node");
    return f.verdict_line("forced/cached-me/load-mid-update", ok, "slow-path load read the node");
  }));
  return r;
}

suite_report writable_schedules() {
  suite_report r;
  using run = forced_run<wr, writable_shadow<wr>>;
  r.lines.push_back(guarded("forced/writable/solo", [] {
    run f({{store(1), load(), cas(1, 2), load(), store(3), load(), store(3)}});
    f.finish_all();
    const auto st = f.sc.cell(0).inspect();
    const bool ok = f.result(0, 1).ret == 1 && f.result(0, 3).ret == 2 &&
                    f.result(0, 5).ret == 3 && st.w_mark == st.z_value.mark();
    return f.verdict_line("forced/writable/solo", ok, "solo results and rematched marks");
  }));
  r.lines.push_back(guarded("forced/writable/silent-store", [] {
    run f({{store(1)}, {store(2)}, {load()}});
    f.s().run_until(0, "wr.store.install");
    f.s().run_until(1, "wr.store.install");
    f.s().step(0);
    f.s().run_to_end(1);
    f.s().run_to_end(0);
    f.s().run_to_end(2);
    const bool ok = f.s().passed(1, "wr.store.install_lost") && f.result(2, 0).ret == 1;
    return f.verdict_line("forced/writable/silent-store", ok,
                          "losing store returned after the winner's transfer");
  }));
  r.lines.push_back(guarded("forced/writable/cas-fails-twice", [] {
    run f({{cas(0, 1)}, {cas(0, 2), cas(2, 0), cas(0, 3)}, {load()}});
    f.s().run_until(0, "wr.cas.z_cas");
    f.run_ops(1, 2);
    f.s().run_until(0, "wr.cas.z_cas");
    f.s().run_to_end(1);
    f.s().run_to_end(0);
    f.s().run_to_end(2);
    const bool ok = !f.result(0, 0).ok && f.s().passed(0, "wr.cas.failed_twice") &&
                    f.result(2, 0).ret == 3;
    return f.verdict_line("forced/writable/cas-fails-twice", ok, "cas failed after two attempts");
  }));
  r.lines.push_back(guarded("forced/writable/help-twice", [] {
    run f({{store(1)}, {cas(0, 2)}, {load()}});
    f.s().run_until(1, "wr.cas.z_cas");
    f.s().run_until(0, "wr.help.transfer");
    f.s().run_to_end(1);
    f.s().run_to_end(0);
    f.s().run_to_end(2);
    const auto st = f.sc.cell(0).inspect();
    const bool ok = f.result(1, 0).ok && f.s().passed(0, "wr.help.failed") &&
                    f.s().passed(0, "wr.store.help_again") && f.result(2, 0).ret == 1 &&
                    st.w_mark == st.z_value.mark();
    return f.verdict_line("forced/writable/help-twice", ok,
                          "first transfer lost to a cas, second transfer landed");
  }));
  return r;
}

}  // namespace

suite_report forced_schedules(impl_kind k) {
  switch (k) {
    case impl_kind::cached_wf: return cwf_schedules();
    case impl_kind::cached_me: {
      auto r = cme_schedules();
      r.lines.push_back(slab_ordering_trap());
      return r;
    }
    case impl_kind::writable: return writable_schedules();
    default: return {};
  }
}

suite_report random_audits(impl_kind k, std::uint64_t seed, std::size_t min_steps) {
  suite_report r;
  audit_report a;
  switch (k) {
    case impl_kind::cached_wf: a = random_audit<cwf, waitfree_shadow<cwf>>(seed, min_steps); break;
    case impl_kind::cached_me: a = random_audit<cme, memeff_shadow<cme>>(seed, min_steps); break;
    case impl_kind::writable: a = random_audit<wr, writable_shadow<wr>>(seed, min_steps); break;
    default: return r;
  }
  std::string detail = std::to_string(a.violations) + " violations over " +
                       std::to_string(a.steps) + " scheduled steps";
  for (const auto& m : a.messages) detail += "\n  " + m;
  r.add(std::string("random-audit/") + to_string(k), a.violations == 0 && a.steps >= min_steps,
        detail);
  return r;
}

check_line audit_mutant() {
  using mutant = stale_publish_waitfree<probe_value, hooks>;
  forced_run<mutant, waitfree_shadow<mutant>> f({{cas(0, 1)}, {cas(1, 2)}});
  f.s().run_until(0, "cwf.publish.lock");
  f.s().run_to_end(1);
  f.s().run_to_end(0);
  const auto v = f.report.violations;
  std::string detail = std::to_string(v) + " violations (must be > 0)";
  for (const auto& m : f.report.messages) detail += "\n  " + m;
  return {"audit/mutant-stale-publish", v > 0, detail};
}

check_line slab_ordering_trap() {
  using slab_t = node_slab<probe_value, false, hooks>;
  slab_t slab(0, 2);
  std::atomic<std::uintptr_t> backup{0};
  slab_t::node* x = nullptr;
  step_scheduler s;
  const std::size_t owner = s.spawn([&] {
    x = slab.get_free_node(encode(7));
    backup.store(reinterpret_cast<std::uintptr_t>(x));
    hooks::at("trap.installed");
    slab.reclaim();
  });
  std::uint64_t seen = 0;
  const std::size_t reader = s.spawn([&] {
    hazard_guard h;
    const std::uintptr_t p =
        h.protect<hooks>(backup, [](std::uintptr_t w) { return reinterpret_cast<const void*>(w); });
    hooks::at("trap.read");
    seen = decode(reinterpret_cast<slab_t::node*>(p)->value);
  });
  const std::size_t uninstaller = s.spawn([&] {
    hooks::at("trap.uninstall");
    std::uintptr_t w = backup.load();
    backup.compare_exchange_strong(w, 0);
    reinterpret_cast<slab_t::node*>(w)->is_installed.store(false);
  });
  try {
    s.run_until(owner, "trap.installed");
    s.run_until(owner, "cme.reclaim.scan");  // snapshot taken while installed
    s.run_until(owner, "cme.reclaim.free");  // announcement pass finds nothing
    s.run_until(reader, "trap.read");        // reader announces after the scan
    s.run_to_end(uninstaller);
    s.run_to_end(owner);
    const bool kept = !x->is_free;
    s.run_to_end(reader);
    return {"forced/cached-me/slab-ordering-trap", kept && seen == 7,
            kept ? "node uninstalled after the snapshot was kept" : "node was freed while protected"};
  } catch (const std::exception& e) {
    return {"forced/cached-me/slab-ordering-trap", false, e.what()};
  }
}

// ---------------------------------------------------------------------------
// Step budgets

namespace {

template <std::size_t K, class Cell>
std::vector<std::vector<operation>> solo_plan() {
  std::vector<operation> p{load(), cas(0, 1), load(), cas(1, 2), cas(9, 3), load()};
  if constexpr (Cell::supports_store) {
    p.push_back(store(4));
    p.push_back(store(5));
    p.push_back(load());
  }
  return {p};
}

// Max steps of any op, per payload word.
template <class Cell>
double max_ratio(const std::vector<operation>& h, std::size_t k) {
  double m = 0;
  for (const auto& o : h) m = std::max(m, static_cast<double>(o.steps) / static_cast<double>(k));
  return m;
}

template <template <class> class CellOf, std::size_t K>
double solo_ratio() {
  using C = CellOf<payload<K>>;
  register_scenario<C> sc(1, solo_plan<K, C>());
  sc.start();
  sc.sched().run_to_end(0);
  return max_ratio<C>(sc.history(), K);
}

template <template <class> class CellOf, std::size_t K>
void measure(bool contended, std::uint64_t seed, std::size_t n, double c, step_bound& out) {
  using C = CellOf<payload<K>>;
  if (!contended) {
    register_scenario<C> sc(1, solo_plan<K, C>());
    sc.start();
    sc.sched().run_to_end(0);
    for (const auto& o : sc.history()) {
      out.worst_ratio = std::max(out.worst_ratio, static_cast<double>(o.steps) / (c * K));
      ++out.ops;
    }
    return;
  }
  std::mt19937_64 rng(seed + K);
  history_options o{3, 1, 8, 3};
  for (std::size_t i = 0; i < n; ++i) {
    register_scenario<C> sc(1, random_register_plans(rng, o, C::supports_store));
    sc.start();
    sc.sched().run_random(rng());
    for (const auto& op : sc.history()) {
      out.worst_ratio = std::max(out.worst_ratio, static_cast<double>(op.steps) / (c * K));
      ++out.ops;
    }
  }
}

// C is this factor times the worst solo steps-per-word ratio at k = 1, 2.
// A contended writable cas makes two attempts, each of which may take the
// slow load path and a helping transfer on top of its own central cas: up
// to four times the central-cell work of the solo path.
constexpr double kBudgetFactor = 4;

template <template <class> class CellOf>
step_bound bounds_for(bool contended, std::uint64_t seed, std::size_t n) {
  step_bound out;
  out.c = kBudgetFactor * std::max(solo_ratio<CellOf, 1>(), solo_ratio<CellOf, 2>());
  measure<CellOf, 1>(contended, seed, n, out.c, out);
  measure<CellOf, 2>(contended, seed, n, out.c, out);
  measure<CellOf, 4>(contended, seed, n, out.c, out);
  measure<CellOf, 8>(contended, seed, n, out.c, out);
  measure<CellOf, 16>(contended, seed, n, out.c, out);
  return out;
}

template <class T> using cwf_of = cached_waitfree<T, hooks>;
template <class T> using cme_of = cached_memeff<T, hooks>;
template <class T> using wr_of = writable<T, hooks>;
template <class T> using ind_of = indirect<T, hooks>;
template <class T> using seq_of = seq_lock<T, hooks>;
template <class T> using simp_of = simp_lock<T, hooks>;

}  // namespace

step_bound step_bounds(impl_kind k, bool contended, std::uint64_t seed, std::size_t n) {
  switch (k) {
    case impl_kind::cached_wf: return bounds_for<cwf_of>(contended, seed, n);
    case impl_kind::cached_me: return bounds_for<cme_of>(contended, seed, n);
    case impl_kind::writable: return bounds_for<wr_of>(contended, seed, n);
    case impl_kind::indirect: return bounds_for<ind_of>(contended, seed, n);
    case impl_kind::seqlock: return bounds_for<seq_of>(contended, seed, n);
    case impl_kind::simplock: break;
  }
  return bounds_for<simp_of>(contended, seed, n);
}

}  // namespace bigatomic::lincheck
