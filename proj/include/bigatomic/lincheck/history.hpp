#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace bigatomic::lincheck {

enum class op_kind : std::uint8_t { load, store, cas, find, insert, erase };

const char* to_string(op_kind k) noexcept;

// One completed operation. Register ops use target as the cell index;
// map ops keep the key in arg0 and the value in arg1.
struct operation {
  std::size_t thread = 0;
  op_kind kind = op_kind::load;
  std::size_t target = 0;
  std::uint64_t arg0 = 0;  // store value, cas expected, map key
  std::uint64_t arg1 = 0;  // cas desired, insert value
  std::uint64_t ret = 0;   // loaded or found value
  bool ok = false;         // cas, insert, erase result; find hit
  std::uint64_t invoke = 0;
  std::uint64_t response = 0;
  std::uint64_t steps = 0;  // excluding hazard revalidation retries
};

std::string describe(const operation& op);
std::string describe(const std::vector<operation>& history);

// Sequential specification of an array of registers.
struct register_model {
  using state = std::vector<std::uint64_t>;
  static bool apply(state& s, const operation& op);
};

// Sequential specification of a map from keys to values; the state is the
// sorted list of key/value pairs flattened into one vector.
struct map_model {
  using state = std::vector<std::uint64_t>;
  static bool apply(state& s, const operation& op);
};

enum class verdict { linearizable, not_linearizable, refused };

const char* to_string(verdict v) noexcept;

inline constexpr std::size_t kMaxCheckedOps = 24;

// Searches for a total order that extends real-time order and replays
// correctly against Model from init. Depth-first over the set of already
// linearized ops, memoizing (set, state) pairs that are known dead ends.
template <class Model>
verdict check_linearizable(const std::vector<operation>& h, typename Model::state init) {
  const std::size_t n = h.size();
  if (n > kMaxCheckedOps) return verdict::refused;
  const std::uint32_t all = n == 32 ? ~0u : (1u << n) - 1;

  struct key_hash {
    std::size_t operator()(const std::pair<std::uint32_t, typename Model::state>& k) const {
      std::size_t x = k.first * 0x9E3779B97F4A7C15ull;
      for (auto w : k.second) x = (x ^ w) * 0x100000001B3ull;
      return x;
    }
  };
  std::unordered_set<std::pair<std::uint32_t, typename Model::state>, key_hash> dead;

  auto dfs = [&](auto& self, std::uint32_t done, const typename Model::state& s) -> bool {
    if (done == all) return true;
    if (dead.count({done, s})) return false;
    std::uint64_t first_response = ~0ull;
    for (std::size_t j = 0; j < n; ++j)
      if (!(done >> j & 1)) first_response = std::min(first_response, h[j].response);
    for (std::size_t i = 0; i < n; ++i) {
      if (done >> i & 1) continue;
      // i may go next only if no pending op finished before i began.
      if (h[i].invoke > first_response) continue;
      auto next = s;
      if (Model::apply(next, h[i]) && self(self, done | (1u << i), next)) return true;
    }
    dead.insert({done, s});
    return false;
  };
  return dfs(dfs, 0, init) ? verdict::linearizable : verdict::not_linearizable;
}

}  // namespace bigatomic::lincheck
