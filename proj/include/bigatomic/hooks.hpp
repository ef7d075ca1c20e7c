#pragma once

#include <concepts>
#include <cstddef>

namespace bigatomic {

// Instrumentation policy threaded through every implementation.
//
// at(label) is invoked immediately before each labeled shared-memory step;
// steps(n) accounts for n additional word accesses (payload copies), and
// retry_steps(n) for steps spent in hazard-pointer revalidation retries.
// The verification harness supplies a policy that can park threads at
// labels; the default compiles away.
template <class H>
concept instrumentation = requires(const char* label, std::size_t n) {
  { H::enabled } -> std::convertible_to<bool>;
  H::at(label);
  H::steps(n);
  H::retry_steps(n);
};

struct no_hooks {
  static constexpr bool enabled = false;
  static constexpr void at(const char*) noexcept {}
  static constexpr void steps(std::size_t) noexcept {}
  static constexpr void retry_steps(std::size_t) noexcept {}
};

}  // namespace bigatomic
