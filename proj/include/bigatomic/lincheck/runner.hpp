#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "bigatomic/hash_tables.hpp"
#include "bigatomic/lincheck/history.hpp"
#include "bigatomic/lincheck/hooks.hpp"
#include "bigatomic/lincheck/scheduler.hpp"
#include "bigatomic/payload.hpp"

namespace bigatomic::lincheck {

// Payload used by register histories: two words, so a torn load decodes
// to kTorn and fails the check.
using probe_value = payload<2>;
inline constexpr std::uint64_t kTorn = ~0ull;

template <class V = probe_value>
V encode(std::uint64_t v) noexcept {
  return V::filled(v);
}
template <std::size_t K>
std::uint64_t decode(const payload<K>& p) noexcept {
  return p.uniform() ? p.words[0] : kTorn;
}

struct history_options {
  std::size_t threads = 3;
  std::size_t cells = 2;          // registers; for maps, the table capacity
  std::size_t max_ops = 8;        // per thread
  std::uint64_t domain = 3;       // values (registers) or keys (maps) drawn from 1..domain
};

std::vector<std::vector<operation>> random_register_plans(std::mt19937_64& rng,
                                                          const history_options& o,
                                                          bool with_store);
std::vector<std::vector<operation>> random_map_plans(std::mt19937_64& rng,
                                                     const history_options& o);

// Shared bookkeeping of a scheduled run. Only the worker holding the
// scheduler's turn touches it, so plain fields suffice.
struct run_state {
  std::uint64_t clock = 0;
  std::vector<const operation*> active;  // per thread; null between ops
};

// Threads that each execute a planned op list under a step_scheduler,
// stamping invocation and response times from the shared logical clock.
template <class Exec>
class scenario_base {
 public:
  explicit scenario_base(std::vector<std::vector<operation>> plans) : plans_(std::move(plans)) {
    rs_.active.assign(plans_.size(), nullptr);
  }

  step_scheduler& sched() { return sched_; }
  const run_state& state() const { return rs_; }
  const std::vector<std::vector<operation>>& plans() const { return plans_; }

  std::vector<operation> history() const {
    std::vector<operation> h;
    for (const auto& p : plans_) h.insert(h.end(), p.begin(), p.end());
    return h;
  }

 protected:
  void start(Exec exec) {
    for (std::size_t t = 0; t < plans_.size(); ++t) {
      sched_.spawn([this, t, exec] {
        for (operation& op : plans_[t]) {
          hooks::at("op.begin");
          op.thread = t;
          op.invoke = rs_.clock++;
          rs_.active[t] = &op;
          const step_count before = thread_steps();
          exec(op);
          const step_count after = thread_steps();
          op.steps = (after.steps - before.steps) - (after.retry_steps - before.retry_steps);
          rs_.active[t] = nullptr;
          op.response = rs_.clock++;
        }
      });
    }
  }

  std::vector<std::vector<operation>> plans_;
  run_state rs_;
  // Declared last: threads are joined before the data they use dies.
  step_scheduler sched_;
};

namespace detail {
template <class Cell>
struct register_exec {
  std::vector<std::unique_ptr<Cell>>* cells;
  void operator()(operation& op) const {
    using V = typename Cell::value_type;
    Cell& c = *(*cells)[op.target];
    switch (op.kind) {
      case op_kind::load: op.ret = decode(c.load()); break;
      case op_kind::store:
        if constexpr (Cell::supports_store) c.store(encode<V>(op.arg0));
        break;
      case op_kind::cas: op.ok = c.cas(encode<V>(op.arg0), encode<V>(op.arg1)); break;
      default: break;
    }
  }
};

template <class Table>
struct map_exec {
  Table* table;
  void operator()(operation& op) const {
    switch (op.kind) {
      case op_kind::find: {
        auto r = table->find(op.arg0);
        op.ok = r.has_value();
        op.ret = r.value_or(0);
        break;
      }
      case op_kind::insert: op.ok = table->insert(op.arg0, op.arg1); break;
      case op_kind::erase: op.ok = table->erase(op.arg0); break;
      default: break;
    }
  }
};
}  // namespace detail

// Registers all starting at value 0, driven by planned threads.
template <class Cell>
class register_scenario : public scenario_base<detail::register_exec<Cell>> {
  using base = scenario_base<detail::register_exec<Cell>>;

 public:
  register_scenario(std::size_t cells, std::vector<std::vector<operation>> plans)
      : base(std::move(plans)), n_(cells) {
    for (std::size_t i = 0; i < cells; ++i) cells_.push_back(std::make_unique<Cell>(encode<typename Cell::value_type>(0)));
  }
  ~register_scenario() { this->sched_.finish(); }

  void start() { base::start(detail::register_exec<Cell>{&cells_}); }
  Cell& cell(std::size_t i) { return *cells_.at(i); }
  verdict check() const {
    return check_linearizable<register_model>(this->history(), register_model::state(n_, 0));
  }

 private:
  std::size_t n_;
  std::vector<std::unique_ptr<Cell>> cells_;
};

// An initially empty hash table driven by planned threads.
template <class Table>
class map_scenario : public scenario_base<detail::map_exec<Table>> {
  using base = scenario_base<detail::map_exec<Table>>;

 public:
  map_scenario(std::size_t capacity, std::vector<std::vector<operation>> plans)
      : base(std::move(plans)), table_(capacity) {}
  ~map_scenario() { this->sched_.finish(); }

  void start() { base::start(detail::map_exec<Table>{&table_}); }
  Table& table() { return table_; }
  verdict check() const { return check_linearizable<map_model>(this->history(), {}); }

 private:
  Table table_;
};

struct history_outcome {
  verdict result = verdict::linearizable;
  std::vector<operation> history;
  std::size_t steps = 0;
};

// One randomized register history: random plans, random interleaving.
template <class Cell>
history_outcome run_register_history(std::uint64_t seed, const history_options& o = {}) {
  std::mt19937_64 rng(seed);
  register_scenario<Cell> sc(o.cells, random_register_plans(rng, o, Cell::supports_store));
  sc.start();
  const bool completed = sc.sched().run_random(rng());
  sc.sched().finish();
  history_outcome out{completed ? sc.check() : verdict::not_linearizable, sc.history(),
                      sc.sched().total_steps()};
  return out;
}

template <class Table>
history_outcome run_map_history(std::uint64_t seed, const history_options& o = {}) {
  std::mt19937_64 rng(seed);
  map_scenario<Table> sc(o.cells, random_map_plans(rng, o));
  sc.start();
  const bool completed = sc.sched().run_random(rng());
  sc.sched().finish();
  return {completed ? sc.check() : verdict::not_linearizable, sc.history(),
          sc.sched().total_steps()};
}

}  // namespace bigatomic::lincheck
