#include <array>
#include <utility>

#include "bigatomic/bench/workload.hpp"
#include "bigatomic/big_atomic.hpp"

namespace bigatomic::bench {
namespace {

template <std::size_t K>
throughput_report run_array_k(const bench_config& cfg) {
  return with_cell_type<payload<K>>(cfg.impl, [&]<class C>(std::type_identity<C>) {
    return run_array_bench<C>(cfg);
  });
}

template <std::size_t... I>
constexpr auto array_table(std::index_sequence<I...>) {
  return std::array<throughput_report (*)(const bench_config&), sizeof...(I)>{
      &run_array_k<I + 1>...};
}

}  // namespace

throughput_report run_bench(const bench_config& cfg) {
  cfg.validate();
  switch (cfg.mode) {
    case bench_mode::array: {
      static constexpr auto table = array_table(std::make_index_sequence<kMaxPayloadWords>{});
      return table[cfg.k - 1](cfg);
    }
    case bench_mode::hash:
      return with_cell_type<hash_link>(cfg.impl, [&]<class C>(std::type_identity<C>) {
        return run_hash_bench<cache_hash<C>>(cfg);
      });
    case bench_mode::hash_chaining: {
      auto r = run_hash_bench<chaining_hash>(cfg);
      r.impl = "chaining";
      return r;
    }
  }
  return {};
}

}  // namespace bigatomic::bench
