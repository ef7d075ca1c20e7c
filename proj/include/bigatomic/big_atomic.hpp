#pragma once

// Umbrella header: the six big-atomic implementations and the hash tables.

#include <optional>
#include <string_view>
#include <type_traits>

#include "bigatomic/cached_memeff.hpp"
#include "bigatomic/cached_waitfree.hpp"
#include "bigatomic/hash_tables.hpp"
#include "bigatomic/indirect.hpp"
#include "bigatomic/payload.hpp"
#include "bigatomic/seq_lock.hpp"
#include "bigatomic/simp_lock.hpp"
#include "bigatomic/writable.hpp"

namespace bigatomic {

template <class C>
concept load_cas_cell = requires(C& c, const typename C::value_type& v) {
  { c.load() } -> std::same_as<typename C::value_type>;
  { c.cas(v, v) } -> std::same_as<bool>;
  { C::progress_guarantee } -> std::convertible_to<progress>;
};

template <class C>
concept big_atomic_cell = load_cas_cell<C> && requires(C& c, const typename C::value_type& v) {
  c.store(v);
};

enum class impl_kind { simplock, seqlock, indirect, cached_wf, cached_me, writable };

}  // namespace bigatomic

namespace bigatomic {

inline constexpr impl_kind kAllImpls[] = {impl_kind::simplock, impl_kind::seqlock,
                                          impl_kind::indirect, impl_kind::cached_wf,
                                          impl_kind::cached_me, impl_kind::writable};

constexpr const char* to_string(impl_kind k) noexcept {
  switch (k) {
    case impl_kind::simplock: return "simplock";
    case impl_kind::seqlock: return "seqlock";
    case impl_kind::indirect: return "indirect";
    case impl_kind::cached_wf: return "cached-wf";
    case impl_kind::cached_me: return "cached-me";
    case impl_kind::writable: return "writable";
  }
  return "?";
}

inline std::optional<impl_kind> parse_impl(std::string_view s) noexcept {
  for (impl_kind k : kAllImpls)
    if (s == to_string(k)) return k;
  return std::nullopt;
}

// Calls f(std::type_identity<Cell>{}) with the cell type implementing k
// over values V.
template <class V, class Hooks = no_hooks, class F>
decltype(auto) with_cell_type(impl_kind k, F&& f) {
  switch (k) {
    case impl_kind::simplock: return f(std::type_identity<simp_lock<V, Hooks>>{});
    case impl_kind::seqlock: return f(std::type_identity<seq_lock<V, Hooks>>{});
    case impl_kind::indirect: return f(std::type_identity<indirect<V, Hooks>>{});
    case impl_kind::cached_wf: return f(std::type_identity<cached_waitfree<V, Hooks>>{});
    case impl_kind::cached_me: return f(std::type_identity<cached_memeff<V, Hooks>>{});
    case impl_kind::writable: break;
  }
  return f(std::type_identity<writable<V, Hooks>>{});
}

}  // namespace bigatomic
