#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace bigatomic::lincheck {

// Receives every schedule point reached by the threads it is installed on.
class point_handler {
 public:
  virtual ~point_handler() = default;
  virtual void on_point(const char* label) = 0;
};

// Installs h for the calling thread (nullptr to detach).
void set_thread_handler(point_handler* h) noexcept;
point_handler* thread_handler() noexcept;

// Per-thread step accounting, maintained in every thread that runs
// instrumented code.
struct step_count {
  std::uint64_t steps = 0;
  std::uint64_t retry_steps = 0;
};
step_count thread_steps() noexcept;
void reset_thread_steps() noexcept;

// Instrumentation policy for verification builds: every labeled step is
// counted and forwarded to the thread's handler, which may park the
// thread.
struct hooks {
  static constexpr bool enabled = true;
  static void at(const char* label) noexcept;
  static void steps(std::size_t n) noexcept;
  static void retry_steps(std::size_t n) noexcept;
};

}  // namespace bigatomic::lincheck
