#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bigatomic/big_atomic.hpp"

namespace bigatomic::lincheck {

// One named pass/fail outcome with a human-readable detail.
struct check_line {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct suite_report {
  std::vector<check_line> lines;

  bool ok() const {
    for (const auto& l : lines)
      if (!l.pass) return false;
    return true;
  }
  void add(std::string name, bool pass, std::string detail = {}) {
    lines.push_back({std::move(name), pass, std::move(detail)});
  }
  void append(const suite_report& o) { lines.insert(lines.end(), o.lines.begin(), o.lines.end()); }
};

// Randomized register histories (3 threads, 2 cells, up to 8 ops each).
suite_report register_histories(impl_kind k, std::uint64_t seed, std::size_t count);
// Randomized map histories on a CacheHash backed by k (and, with
// chaining=true, on the Chaining baseline instead).
suite_report map_histories(impl_kind k, std::uint64_t seed, std::size_t count, bool chaining = false);

// Torn-read probes at k = 2, 4, 16 words.
suite_report torn_reads(impl_kind k, std::size_t threads, std::chrono::duration<double> per_size);
// The unvalidated sequence lock must tear within the time limit.
check_line torn_read_mutant(std::size_t threads, std::chrono::duration<double> limit);

// Suspends one thread at each label of a solo operation cycle and checks
// the others' outcome against the implementation's progress class.
suite_report progress_probes(impl_kind k);
// Suspends a deleter inside its bucket update while others use the table.
check_line map_progress_probe(impl_kind k);

// Forced interleavings and random scheduled steps under the shadow audits.
// Implementations without cached state have no shadow and report nothing.
suite_report forced_schedules(impl_kind k);
suite_report random_audits(impl_kind k, std::uint64_t seed, std::size_t min_steps);
// Audits of the deliberately broken wait-free cell; pass means caught.
check_line audit_mutant();
// Reclaim must not free a node that was uninstalled after its snapshot.
check_line slab_ordering_trap();

// Step-count budgets: C calibrated on solo runs at small k, then
// enforced per operation at k = 1..16 under random 3-thread schedules
// (contended) or solo runs (uncontended).
struct step_bound {
  double c = 0;
  double worst_ratio = 0;  // max over ops of steps / (C * k)
  std::uint64_t ops = 0;
  bool within() const { return worst_ratio <= 1.0; }
};
step_bound step_bounds(impl_kind k, bool contended, std::uint64_t seed, std::size_t histories_per_k);

}  // namespace bigatomic::lincheck
