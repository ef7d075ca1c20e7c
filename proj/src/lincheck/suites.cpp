#include "bigatomic/lincheck/suites.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "bigatomic/lincheck/hooks.hpp"
#include "bigatomic/lincheck/mutants.hpp"
#include "bigatomic/lincheck/probes.hpp"
#include "bigatomic/lincheck/runner.hpp"

namespace bigatomic::lincheck {
namespace {

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

template <class Cell>
check_line register_histories_for(const char* name, std::uint64_t seed, std::size_t count) {
  std::size_t bad = 0, steps = 0;
  std::string first;
  for (std::size_t i = 0; i < count; ++i) {
    auto out = run_register_history<Cell>(seed + i);
    steps += out.steps;
    if (out.result != verdict::linearizable && bad++ == 0)
      first = fmt("seed %llu: ", static_cast<unsigned long long>(seed + i)) +
              to_string(out.result) + "\n" + describe(out.history);
  }
  return {fmt("histories/%s", name), bad == 0,
          fmt("%zu/%zu linearizable, %zu steps", count - bad, count, steps) +
              (first.empty() ? "" : "\n" + first)};
}

template <class Table>
check_line map_histories_for(const std::string& name, std::uint64_t seed, std::size_t count) {
  std::size_t bad = 0;
  std::string first;
  for (std::size_t i = 0; i < count; ++i) {
    // Alternate one and two buckets so chains of length up to 3 occur.
    history_options o{3, 1 + i % 2, 8, 3};
    auto out = run_map_history<Table>(seed + i, o);
    if (out.result != verdict::linearizable && bad++ == 0)
      first = fmt("seed %llu: ", static_cast<unsigned long long>(seed + i)) +
              to_string(out.result) + "\n" + describe(out.history);
  }
  return {"map-histories/" + name, bad == 0,
          fmt("%zu/%zu linearizable", count - bad, count) + (first.empty() ? "" : "\n" + first)};
}

}  // namespace

suite_report register_histories(impl_kind k, std::uint64_t seed, std::size_t count) {
  suite_report r;
  with_cell_type<probe_value, hooks>(k, [&]<class C>(std::type_identity<C>) {
    r.lines.push_back(register_histories_for<C>(to_string(k), seed, count));
  });
  return r;
}

suite_report map_histories(impl_kind k, std::uint64_t seed, std::size_t count, bool chaining) {
  suite_report r;
  if (chaining) {
    r.lines.push_back(map_histories_for<chaining_hash>("chaining", seed, count));
    return r;
  }
  with_cell_type<hash_link, hooks>(k, [&]<class C>(std::type_identity<C>) {
    r.lines.push_back(
        map_histories_for<cache_hash<C>>(std::string("cachehash-") + to_string(k), seed, count));
  });
  return r;
}

// ---------------------------------------------------------------------------
// Probes

suite_report torn_reads(impl_kind k, std::size_t threads, std::chrono::duration<double> per_size) {
  suite_report r;
  auto one = [&]<std::size_t K>() {
    with_cell_type<payload<K>>(k, [&]<class C>(std::type_identity<C>) {
      const auto res = torn_read_probe<C>(threads, per_size);
      r.add(fmt("torn-read/%s/k=%zu", to_string(k), K), res.violations == 0,
            fmt("%llu violations in %llu loads, %llu writes",
                static_cast<unsigned long long>(res.violations),
                static_cast<unsigned long long>(res.loads),
                static_cast<unsigned long long>(res.writes)));
    });
  };
  one.template operator()<2>();
  one.template operator()<4>();
  one.template operator()<16>();
  return r;
}

check_line torn_read_mutant(std::size_t threads, std::chrono::duration<double> limit) {
  const auto start = std::chrono::steady_clock::now();
  const auto res = torn_read_probe<unvalidated_seqlock<payload<4>>>(threads, limit, 1);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {"torn-read/mutant-seqlock/k=4", res.violations >= 1,
          fmt("%llu violations after %.3f s (must be >= 1)",
              static_cast<unsigned long long>(res.violations), secs)};
}

namespace {

// Labels at which a suspended thread holds a write lock.
bool holds_lock(impl_kind k, const std::string& label) {
  static const std::set<std::string> simplock{"simplock.locked", "simplock.read",
                                              "simplock.write", "simplock.release"};
  static const std::set<std::string> seqlock{"seqlock.write.locked", "seqlock.write.read",
                                             "seqlock.write.data", "seqlock.write.unlock"};
  if (k == impl_kind::simplock) return simplock.count(label) > 0;
  if (k == impl_kind::seqlock) return seqlock.count(label) > 0;
  return false;
}

}  // namespace

suite_report progress_probes(impl_kind k) {
  suite_report r;
  with_cell_type<probe_value, hooks>(k, [&]<class C>(std::type_identity<C>) {
    for (const std::string& label : solo_labels<C>()) {
      const auto out = progress_probe<C>(label);
      const bool expect_stall = holds_lock(k, label);
      const bool pass = out.reached && out.completed != expect_stall;
      r.add(fmt("progress/%s/%s", to_string(k), label.c_str()), pass,
            !out.reached ? std::string("label not reached")
                         : fmt("others %s after %.3f s (expected %s)",
                               out.completed ? "completed" : "stalled", out.seconds,
                               expect_stall ? "stall" : "completion"));
    }
  });
  return r;
}

check_line map_progress_probe(impl_kind k) {
  static const char* label_for[] = {"simplock.locked",      "seqlock.write.locked",
                                    "indirect.cas.install", "cwf.publish.write",
                                    "cme.seqlock.write",    "wr.cas.z_cas"};
  const char* label = label_for[static_cast<int>(k)];
  check_line line{fmt("map-progress/%s/%s", to_string(k), label), false, {}};
  with_cell_type<hash_link, hooks>(k, [&]<class C>(std::type_identity<C>) {
    using table = cache_hash<C>;
    table t(4);
    suspension gate(label);
    std::thread victim([&] {
      for (std::uint64_t key = 100; key < 164 && !gate.suspended(); ++key) {
        t.insert(key, key);
        set_thread_handler(&gate);
        t.erase(key);
        set_thread_handler(nullptr);
      }
    });
    const bool reached = gate.wait_suspended(std::chrono::milliseconds(2000));
    std::atomic<int> done{0};
    std::vector<std::thread> pool;
    const auto start = std::chrono::steady_clock::now();
    if (reached) {
      for (int w = 0; w < 2; ++w)
        pool.emplace_back([&, w] {
          std::mt19937_64 rng(w);
          for (int i = 0; i < 1000; ++i) {
            const std::uint64_t key = rng() % 16 + 1;
            switch (rng() % 3) {
              case 0: t.find(key); break;
              case 1: t.insert(key, i); break;
              default: t.erase(key);
            }
          }
          ++done;
        });
      while (done.load() < 2 && std::chrono::steady_clock::now() - start < std::chrono::seconds(1))
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    const bool completed = done.load() == 2;
    gate.release();
    for (auto& th : pool) th.join();
    victim.join();
    const bool expect_stall = C::progress_guarantee == progress::blocking;
    line.pass = reached && completed != expect_stall;
    line.detail = !reached ? std::string("label not reached")
                           : fmt("others %s (expected %s)", completed ? "completed" : "stalled",
                                 expect_stall ? "stall" : "completion");
  });
  return line;
}

}  // namespace bigatomic::lincheck
