#include "bigatomic/lincheck/scheduler.hpp"

#include <random>
#include <stdexcept>

namespace bigatomic::lincheck {

struct step_scheduler::worker {
  std::thread thread;
  std::unique_ptr<handler> hook;
  const char* label = "start";
  std::uint64_t arrivals = 0;  // points reached so far
  std::vector<const char*> trace;
  bool granted = false;
  bool done = false;
  std::exception_ptr error;
};

class step_scheduler::handler : public point_handler {
 public:
  handler(step_scheduler& s, worker& w) : s_(s), w_(w) {}
  void on_point(const char* label) override { s_.park(w_, label); }

 private:
  step_scheduler& s_;
  worker& w_;
};

step_scheduler::step_scheduler() = default;
step_scheduler::~step_scheduler() { finish(); }

std::size_t step_scheduler::spawn(std::function<void()> body) {
  auto w = std::make_unique<worker>();
  worker& ref = *w;
  ref.hook = std::make_unique<handler>(*this, ref);
  {
    std::lock_guard lk(mu_);
    workers_.push_back(std::move(w));
  }
  ref.thread = std::thread([this, &ref, body = std::move(body)] {
    set_thread_handler(ref.hook.get());
    reset_thread_steps();
    park(ref, "start");
    try {
      body();
    } catch (...) {
      ref.error = std::current_exception();
    }
    set_thread_handler(nullptr);
    std::lock_guard lk(mu_);
    ref.done = true;
    cv_.notify_all();
  });
  // Wait until the new worker is parked so spawn order is deterministic.
  std::unique_lock lk(mu_);
  cv_.wait(lk, [&] { return ref.arrivals > 0; });
  return workers_.size() - 1;
}

void step_scheduler::park(worker& w, const char* label) {
  std::unique_lock lk(mu_);
  if (free_run_) return;
  w.label = label;
  w.trace.push_back(label);
  ++w.arrivals;
  cv_.notify_all();
  cv_.wait(lk, [&] { return w.granted || free_run_; });
  w.granted = false;
}

bool step_scheduler::step(std::size_t i) {
  worker& w = *workers_.at(i);
  const char* from;
  {
    std::unique_lock lk(mu_);
    if (w.done) return false;
    from = w.label;
    const std::uint64_t seen = w.arrivals;
    w.granted = true;
    cv_.notify_all();
    cv_.wait(lk, [&] { return w.done || w.arrivals != seen; });
    ++total_steps_;
  }
  if (audit_) audit_(i, from);
  if (w.done && w.error) rethrow_failures();
  return !w.done;
}

void step_scheduler::run_until(std::size_t i, const std::string& label, std::size_t max_steps) {
  for (std::size_t n = 0; n < max_steps; ++n) {
    if (!step(i))
      throw std::logic_error("thread " + std::to_string(i) + " finished before reaching " + label);
    if (parked_at(i) == label) return;
  }
  throw std::logic_error("thread " + std::to_string(i) + " did not reach " + label);
}

void step_scheduler::run_to_end(std::size_t i, std::size_t max_steps) {
  for (std::size_t n = 0; n < max_steps; ++n)
    if (!step(i)) return;
  throw std::logic_error("thread " + std::to_string(i) + " exceeded its step limit");
}

bool step_scheduler::run_random(std::uint64_t seed, std::size_t max_steps) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> live;
  for (std::size_t n = 0; n < max_steps; ++n) {
    live.clear();
    for (std::size_t i = 0; i < workers_.size(); ++i)
      if (!finished(i)) live.push_back(i);
    if (live.empty()) return true;
    step(live[std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng)]);
  }
  return all_finished();
}

void step_scheduler::finish() {
  {
    std::lock_guard lk(mu_);
    free_run_ = true;
    cv_.notify_all();
  }
  for (auto& w : workers_)
    if (w->thread.joinable()) w->thread.join();
}

bool step_scheduler::finished(std::size_t i) const {
  std::lock_guard lk(mu_);
  return workers_.at(i)->done;
}

bool step_scheduler::all_finished() const {
  std::lock_guard lk(mu_);
  for (auto& w : workers_)
    if (!w->done) return false;
  return true;
}

std::string step_scheduler::parked_at(std::size_t i) const {
  std::lock_guard lk(mu_);
  const worker& w = *workers_.at(i);
  return w.done ? std::string("done") : std::string(w.label);
}

std::vector<const char*> step_scheduler::trace(std::size_t i) const {
  std::lock_guard lk(mu_);
  return workers_.at(i)->trace;
}

bool step_scheduler::passed(std::size_t i, const std::string& label) const {
  std::lock_guard lk(mu_);
  for (const char* l : workers_.at(i)->trace)
    if (label == l) return true;
  return false;
}

void step_scheduler::rethrow_failures() {
  for (auto& w : workers_)
    if (w->error) {
      auto e = w->error;
      w->error = nullptr;
      std::rethrow_exception(e);
    }
}

void suspension::on_point(const char* label) {
  std::unique_lock lk(mu_);
  if (parked_ || released_ || label_ != label) return;
  parked_ = true;
  cv_.notify_all();
  cv_.wait(lk, [&] { return released_; });
}

bool suspension::wait_suspended(std::chrono::milliseconds timeout) {
  std::unique_lock lk(mu_);
  return cv_.wait_for(lk, timeout, [&] { return parked_; });
}

bool suspension::suspended() const {
  std::lock_guard lk(mu_);
  return parked_ && !released_;
}

void suspension::release() {
  std::lock_guard lk(mu_);
  released_ = true;
  cv_.notify_all();
}

}  // namespace bigatomic::lincheck
