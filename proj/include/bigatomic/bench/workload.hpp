#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <random>
#include <thread>
#include <vector>

#include "bigatomic/bench/config.hpp"
#include "bigatomic/bench/report.hpp"
#include "bigatomic/bench/zipf.hpp"
#include "bigatomic/payload.hpp"
#include "bigatomic/thread_registry.hpp"

namespace bigatomic::bench {

// Independent, reproducible stream per (seed, worker).
inline std::mt19937_64 worker_rng(std::uint64_t seed, std::size_t worker) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(worker)};
  return std::mt19937_64(seq);
}

// Spreads ranks over 64-bit keys (splitmix64 finalizer). Never 0.
inline std::uint64_t key_of(std::uint64_t rank) noexcept {
  std::uint64_t x = rank + 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x == 0 ? 1 : x;
}

// Runs p workers, each calling op(rng, counters) in a loop: a warmup whose
// ops are discarded, then a timed phase whose ops are counted.
template <class Op>
throughput_report run_workers(const bench_config& cfg, Op op) {
  enum : int { warming, measuring, stopped };
  std::atomic<int> phase{warming};
  std::vector<op_counters> counts(cfg.p);
  std::vector<std::uint64_t> ops(cfg.p, 0);
  std::vector<std::thread> pool;
  pool.reserve(cfg.p);
  for (std::size_t t = 0; t < cfg.p; ++t) {
    pool.emplace_back([&, t] {
      auto rng = worker_rng(cfg.seed, t);
      op_counters mine, discard;
      std::uint64_t done = 0;
      for (;;) {
        const int ph = phase.load(std::memory_order_relaxed);
        if (ph == stopped) break;
        op_counters& c = ph == measuring ? mine : discard;
        for (int i = 0; i < 64; ++i) op(rng, c);
        if (ph == measuring) done += 64;
      }
      counts[t] = mine;
      ops[t] = done;
    });
  }
  using clock = std::chrono::steady_clock;
  std::this_thread::sleep_for(std::chrono::duration<double>(cfg.warmup));
  const auto start = clock::now();
  phase.store(measuring);
  std::this_thread::sleep_for(std::chrono::duration<double>(cfg.seconds));
  phase.store(stopped);
  const auto end = clock::now();
  for (auto& th : pool) th.join();

  throughput_report r;
  r.impl = to_string(cfg.impl);
  r.mode = to_string(cfg.mode);
  r.p = cfg.p;
  r.n = cfg.n;
  r.u = cfg.u;
  r.z = cfg.z;
  r.k = cfg.reported_k();
  r.seconds = std::chrono::duration<double>(end - start).count();
  for (std::size_t t = 0; t < cfg.p; ++t) {
    r.ops += ops[t];
    r.counters += counts[t];
  }
  return r;
}

// Array of n big atomics, each empty or holding a full value for its
// rank. A find loads; an update loads and then either inserts (CAS
// empty -> full) or deletes (CAS full -> empty), chosen with equal odds.
template <class Cell>
class array_workload {
 public:
  using value_type = typename Cell::value_type;

  explicit array_workload(std::uint64_t n) : n_(n), slots_(std::make_unique<slot[]>(n)) {
    // Half the elements start full.
    for (std::uint64_t i = 0; i < n; i += 2) slots_[i].cell.cas(value_type{}, full(i));
  }

  static value_type full(std::uint64_t rank) noexcept { return value_type::filled((rank << 1) | 1); }
  static bool is_full(const value_type& v) noexcept { return v.words[0] & 1; }

  Cell& cell(std::uint64_t i) noexcept { return slots_[i].cell; }

  template <class Rng>
  void op(const bench_config& cfg, const zipf_sampler& zipf, Rng& rng, op_counters& c) {
    const std::uint64_t rank = zipf(rng);
    const std::uint64_t roll = rng();
    Cell& cell = slots_[rank].cell;
    if (roll % 100 >= cfg.u) {
      ++c.finds;
      sink_ ^= cell.load().words[0];
      return;
    }
    ++c.updates;
    const value_type v = cell.load();
    if ((roll >> 32) & 1) {
      ++c.inserts;
      if (is_full(v)) return;
      ++c.cas_attempts;
      c.cas_successes += cell.cas(v, full(rank));
    } else {
      ++c.erases;
      if (!is_full(v)) return;
      ++c.cas_attempts;
      c.cas_successes += cell.cas(v, value_type{});
    }
  }

 private:
  struct alignas(kCacheLine) slot {
    Cell cell;
  };
  std::uint64_t n_;
  std::unique_ptr<slot[]> slots_;
  // Keeps finds from being optimized out.
  static inline thread_local std::uint64_t sink_ = 0;
};

template <class Cell>
throughput_report run_array_bench(const bench_config& cfg) {
  array_workload<Cell> w(cfg.n);
  const zipf_sampler zipf(cfg.n, cfg.z);
  return run_workers(cfg, [&](auto& rng, op_counters& c) { w.op(cfg, zipf, rng, c); });
}

// Hash table of capacity n holding n keys: ranks range over [0, 2n) and the
// even ones are inserted up front, so about half of all finds hit. Finds
// with probability 1 - u%, otherwise insert or delete with equal odds. CAS
// counters are not tracked here.
template <class Table>
throughput_report run_hash_bench(const bench_config& cfg) {
  Table table(cfg.n);
  for (std::uint64_t r = 0; r < 2 * cfg.n; r += 2) table.insert(key_of(r), r);
  const zipf_sampler zipf(2 * cfg.n, cfg.z);
  return run_workers(cfg, [&](auto& rng, op_counters& c) {
    const std::uint64_t rank = zipf(rng);
    const std::uint64_t roll = rng();
    const std::uint64_t key = key_of(rank);
    if (roll % 100 >= cfg.u) {
      ++c.finds;
      table.find(key);
    } else if ((roll >> 32) & 1) {
      ++c.updates;
      ++c.inserts;
      table.insert(key, rank);
    } else {
      ++c.updates;
      ++c.erases;
      table.erase(key);
    }
  });
}

// Dispatches on cfg.impl, cfg.mode and cfg.k. Validates cfg first.
throughput_report run_bench(const bench_config& cfg);

}  // namespace bigatomic::bench
