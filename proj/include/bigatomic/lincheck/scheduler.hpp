#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "bigatomic/lincheck/hooks.hpp"

namespace bigatomic::lincheck {

// Cooperative scheduler over real threads. Every worker parks at each
// schedule point it reaches and runs only when granted a step, so exactly
// one worker executes at a time and the interleaving is chosen by the
// controller. A step is the code between two consecutive points.
class step_scheduler {
 public:
  using audit_fn = std::function<void(std::size_t thread, const char* label)>;

  step_scheduler();
  ~step_scheduler();
  step_scheduler(const step_scheduler&) = delete;
  step_scheduler& operator=(const step_scheduler&) = delete;

  // Starts a worker parked at "start"; returns its index.
  std::size_t spawn(std::function<void()> body);

  // Called after every step with the label the thread was released from.
  void on_step(audit_fn f) { audit_ = std::move(f); }

  // Runs thread i to its next point or to completion. Returns false once
  // the thread has finished.
  bool step(std::size_t i);
  // Steps thread i until it parks at label. Throws if it finishes first or
  // exceeds max_steps.
  void run_until(std::size_t i, const std::string& label, std::size_t max_steps = 100000);
  void run_to_end(std::size_t i, std::size_t max_steps = 1000000);
  // Uniformly random interleaving of the unfinished threads. Returns false
  // if max_steps ran out first.
  bool run_random(std::uint64_t seed, std::size_t max_steps = 1000000);
  // Releases every parked thread to run freely and joins them.
  void finish();

  bool finished(std::size_t i) const;
  bool all_finished() const;
  std::string parked_at(std::size_t i) const;
  // Labels thread i has parked at, in order.
  std::vector<const char*> trace(std::size_t i) const;
  bool passed(std::size_t i, const std::string& label) const;
  std::size_t size() const { return workers_.size(); }
  std::size_t total_steps() const { return total_steps_; }

 private:
  struct worker;
  class handler;

  void park(worker& w, const char* label);
  void rethrow_failures();

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<worker>> workers_;
  audit_fn audit_;
  std::size_t total_steps_ = 0;
  bool free_run_ = false;
};

// Parks the first thread (with this handler installed) that reaches a
// chosen label until released. Everything else runs freely.
class suspension : public point_handler {
 public:
  explicit suspension(std::string label) : label_(std::move(label)) {}
  ~suspension() override { release(); }

  void on_point(const char* label) override;

  bool wait_suspended(std::chrono::milliseconds timeout);
  bool suspended() const;
  void release();

 private:
  std::string label_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool parked_ = false;
  bool released_ = false;
};

}  // namespace bigatomic::lincheck
