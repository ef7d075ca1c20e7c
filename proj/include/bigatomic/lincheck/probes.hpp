#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "bigatomic/lincheck/hooks.hpp"
#include "bigatomic/lincheck/scheduler.hpp"
#include "bigatomic/payload.hpp"

namespace bigatomic::lincheck {

struct torn_read_result {
  std::uint64_t violations = 0;
  std::uint64_t loads = 0;
  std::uint64_t writes = 0;
};

// Writers publish payloads whose words all equal a fresh counter value;
// readers count loads whose words disagree. Half the threads (at least
// one) write, the rest read.
template <class Cell>
torn_read_result torn_read_probe(std::size_t threads, std::chrono::duration<double> duration,
                                 std::uint64_t stop_after_violations = ~0ull) {
  using V = typename Cell::value_type;
  threads = std::max<std::size_t>(threads, 2);
  const std::size_t writers = threads / 2;
  Cell cell(V::filled(0));
  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> violations{0}, loads{0}, writes{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      std::uint64_t n = 0, bad = 0;
      if (t < writers) {
        // Values from different writers never collide: the writer index
        // sits in the top byte.
        std::uint64_t next = (static_cast<std::uint64_t>(t + 1) << 56) + 1;
        while (!stop.load(std::memory_order_relaxed)) {
          const V v = V::filled(next++);
          if constexpr (Cell::supports_store)
            cell.store(v);
          else
            cell.cas(cell.load(), v);
          ++n;
        }
        writes += n;
      } else {
        while (!stop.load(std::memory_order_relaxed)) {
          if (!cell.load().uniform() && ++bad >= stop_after_violations) stop = true;
          ++n;
        }
        loads += n;
        violations += bad;
      }
    });
  }
  const auto deadline = std::chrono::steady_clock::now() + duration;
  while (!stop.load() && std::chrono::steady_clock::now() < deadline)
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  stop = true;
  for (auto& th : pool) th.join();
  return {violations.load(), loads.load(), writes.load()};
}

// Labels passed by one solo probe cycle (load, cas, store) on a fresh cell.
template <class Cell>
std::vector<std::string> solo_labels() {
  struct recorder : point_handler {
    std::set<std::string> seen;
    void on_point(const char* l) override { seen.insert(l); }
  };
  using V = typename Cell::value_type;
  recorder rec;
  Cell cell(V::filled(0));
  set_thread_handler(&rec);
  cell.load();
  cell.cas(cell.load(), V::filled(1));
  if constexpr (Cell::supports_store) cell.store(V::filled(2));
  set_thread_handler(nullptr);
  return {rec.seen.begin(), rec.seen.end()};
}

struct progress_outcome {
  std::string label;
  bool reached = false;    // the probed thread was parked at label
  bool completed = false;  // the others finished their ops in time
  double seconds = 0;
};

// Parks one thread at label in the middle of an operation, then lets
// `others` threads each run `ops` mixed loads and updates on the same cell.
template <class Cell>
progress_outcome progress_probe(const std::string& label, std::size_t others = 2,
                                std::size_t ops = 1000,
                                std::chrono::milliseconds timeout = std::chrono::milliseconds(1000)) {
  using V = typename Cell::value_type;
  Cell cell(V::filled(0));
  suspension gate(label);
  progress_outcome out{label};

  std::thread victim([&] {
    set_thread_handler(&gate);
    for (std::uint64_t i = 1; i <= 64 && !gate.suspended(); ++i) {
      cell.load();
      cell.cas(cell.load(), V::filled(i));
      if constexpr (Cell::supports_store) cell.store(V::filled(i + 1000));
    }
    set_thread_handler(nullptr);
  });
  out.reached = gate.wait_suspended(std::chrono::milliseconds(2000));
  if (!out.reached) {
    gate.release();
    victim.join();
    return out;
  }

  std::atomic<std::size_t> done{0};
  std::vector<std::thread> pool;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t t = 0; t < others; ++t) {
    pool.emplace_back([&, t] {
      std::uint64_t x = (static_cast<std::uint64_t>(t + 1) << 32);
      for (std::size_t i = 0; i < ops; ++i) {
        switch (i % 3) {
          case 0: cell.load(); break;
          case 1: cell.cas(cell.load(), V::filled(++x)); break;
          default:
            if constexpr (Cell::supports_store)
              cell.store(V::filled(++x));
            else
              cell.cas(cell.load(), V::filled(++x));
        }
      }
      ++done;
    });
  }
  while (done.load() < others && std::chrono::steady_clock::now() - start < timeout)
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  out.completed = done.load() == others;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  gate.release();
  for (auto& th : pool) th.join();
  victim.join();
  return out;
}

}  // namespace bigatomic::lincheck
