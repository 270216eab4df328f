#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <string_view>

namespace sketchls {

// Task taxonomy for the per-run timing breakdown. Every timed region of the
// solver is attributed to exactly one of these keys; anything not covered by
// a named region ends up in `other`.
enum class Task : int {
  sketch_build = 0,
  sketch_apply,
  interp_solve,
  model_build,
  trs,
  eval,
  geometry,
  other,
};

inline constexpr int kNumTasks = 8;

inline constexpr std::array<std::string_view, kNumTasks> kTaskNames{
    "sketch_build", "sketch_apply", "interp_solve", "model_build",
    "trs",          "eval",         "geometry",     "other"};

// Cumulative wall-clock seconds per task.
class TaskTimers {
 public:
  void add(Task task, double seconds) {
    seconds_[static_cast<int>(task)] += seconds;
  }
  double seconds(Task task) const { return seconds_[static_cast<int>(task)]; }
  double total() const {
    double t = 0.0;
    for (double s : seconds_) t += s;
    return t;
  }
  TaskTimers& operator+=(const TaskTimers& rhs) {
    for (int i = 0; i < kNumTasks; ++i) seconds_[i] += rhs.seconds_[i];
    return *this;
  }

 private:
  std::array<double, kNumTasks> seconds_{};
};

// Adds the lifetime of the scope to one timer slot. A null target disables
// timing so instrumented code paths can also be called bare.
class ScopedTimer {
 public:
  ScopedTimer(TaskTimers* timers, Task task)
      : timers_(timers), task_(task),
        start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    if (timers_ != nullptr) {
      const auto elapsed = std::chrono::steady_clock::now() - start_;
      timers_->add(task_, std::chrono::duration<double>(elapsed).count());
    }
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  TaskTimers* timers_;
  Task task_;
  std::chrono::steady_clock::time_point start_;
};

// Arithmetic-operation counters for the sketch application kernels. Scalings
// (multiplication by a fixed per-operator factor) and sign flips are tracked
// separately from general multiplies so that the structured operators can
// demonstrate their multiply-free gather/accumulate form.
struct OpCounts {
  std::uint64_t multiplies = 0;
  std::uint64_t additions = 0;
  std::uint64_t gathers = 0;
  std::uint64_t scalings = 0;
  std::uint64_t sign_flips = 0;

  OpCounts& operator+=(const OpCounts& rhs) {
    multiplies += rhs.multiplies;
    additions += rhs.additions;
    gathers += rhs.gathers;
    scalings += rhs.scalings;
    sign_flips += rhs.sign_flips;
    return *this;
  }
};

}  // namespace sketchls
