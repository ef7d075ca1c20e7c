#include "bigatomic/lincheck/hooks.hpp"

namespace bigatomic::lincheck {
namespace {

thread_local point_handler* tl_handler = nullptr;
thread_local step_count tl_steps;

}  // namespace

void set_thread_handler(point_handler* h) noexcept { tl_handler = h; }
point_handler* thread_handler() noexcept { return tl_handler; }

step_count thread_steps() noexcept { return tl_steps; }
void reset_thread_steps() noexcept { tl_steps = {}; }

void hooks::at(const char* label) noexcept {
  ++tl_steps.steps;
  if (tl_handler) tl_handler->on_point(label);
}

void hooks::steps(std::size_t n) noexcept { tl_steps.steps += n; }

void hooks::retry_steps(std::size_t n) noexcept { tl_steps.retry_steps += n; }

}  // namespace bigatomic::lincheck
