#include "bigatomic/lincheck/runner.hpp"

namespace bigatomic::lincheck {
namespace {

std::uint64_t draw(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

}  // namespace

std::vector<std::vector<operation>> random_register_plans(std::mt19937_64& rng,
                                                          const history_options& o,
                                                          bool with_store) {
  std::vector<std::vector<operation>> plans(o.threads);
  for (std::size_t t = 0; t < o.threads; ++t) {
    const std::size_t count = draw(rng, 1, o.max_ops);
    for (std::size_t i = 0; i < count; ++i) {
      operation op;
      op.thread = t;
      op.target = draw(rng, 0, o.cells - 1);
      const std::uint64_t roll = draw(rng, 0, 99);
      if (roll < 35) {
        op.kind = op_kind::load;
      } else if (with_store && roll < 60) {
        op.kind = op_kind::store;
        op.arg0 = draw(rng, 1, o.domain);
      } else {
        // Expected values include the initial 0 so early cases can succeed.
        op.kind = op_kind::cas;
        op.arg0 = draw(rng, 0, o.domain);
        op.arg1 = draw(rng, 1, o.domain);
      }
      plans[t].push_back(op);
    }
  }
  return plans;
}

std::vector<std::vector<operation>> random_map_plans(std::mt19937_64& rng,
                                                     const history_options& o) {
  std::vector<std::vector<operation>> plans(o.threads);
  std::uint64_t next_value = 1;
  for (std::size_t t = 0; t < o.threads; ++t) {
    const std::size_t count = draw(rng, 1, o.max_ops);
    for (std::size_t i = 0; i < count; ++i) {
      operation op;
      op.thread = t;
      op.arg0 = draw(rng, 1, o.domain);
      const std::uint64_t roll = draw(rng, 0, 2);
      op.kind = roll == 0 ? op_kind::find : roll == 1 ? op_kind::insert : op_kind::erase;
      if (op.kind == op_kind::insert) op.arg1 = next_value++;
      plans[t].push_back(op);
    }
  }
  return plans;
}

}  // namespace bigatomic::lincheck
