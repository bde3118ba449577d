/* Copyright 2026 The MLPerf Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef RTBENCH_CLOCK_H_
#define RTBENCH_CLOCK_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <thread>
#include <vector>

namespace rtbench {

// Nanoseconds on the clock's own monotonic timeline.
using TimeNs = int64_t;

// A run's single source of time. Completions from simulated SUTs are
// scheduled through CallAt so the same engine code runs against wall time
// and against a deterministic discrete-event timeline.
class Clock {
 public:
  using Callback = std::function<void()>;

  virtual ~Clock() = default;

  virtual TimeNs NowNs() = 0;

  // Returns no earlier than `t`.
  virtual void SleepUntil(TimeNs t) = 0;

  // Runs `fn` at (or after) time `t`. Callbacks run on the clock's timer
  // context, never on the caller's stack.
  virtual void CallAt(TimeNs t, Callback fn) = 0;

  // Blocks until `pred` holds. Anything that may change the outcome of
  // `pred` from another thread must call Notify() afterwards.
  virtual void AwaitCondition(const std::function<bool()>& pred) = 0;

  virtual void Notify() = 0;

  virtual bool IsSimulated() const = 0;
};

class ClockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// steady_clock based. Owns one timer thread, started on first CallAt.
class RealClock final : public Clock {
 public:
  RealClock();
  ~RealClock() override;
  RealClock(const RealClock&) = delete;
  RealClock& operator=(const RealClock&) = delete;

  TimeNs NowNs() override;
  void SleepUntil(TimeNs t) override;
  void CallAt(TimeNs t, Callback fn) override;
  void AwaitCondition(const std::function<bool()>& pred) override;
  void Notify() override;
  bool IsSimulated() const override { return false; }

  // Final stretch of SleepUntil is spent spinning for issue precision.
  static constexpr TimeNs kSpinWindowNs = 300'000;

 private:
  struct Timer {
    TimeNs when;
    uint64_t seq;
    Callback fn;
    bool operator>(const Timer& o) const {
      return when != o.when ? when > o.when : seq > o.seq;
    }
  };

  void TimerLoop();

  const std::chrono::steady_clock::time_point origin_;

  std::mutex wait_mutex_;
  std::condition_variable wait_cv_;

  std::mutex timer_mutex_;
  std::condition_variable timer_cv_;
  std::priority_queue<Timer, std::vector<Timer>, std::greater<>> timers_;
  uint64_t timer_seq_ = 0;
  bool stopping_ = false;
  std::thread timer_thread_;
};

// Discrete-event clock. Time only moves when the owner sleeps or waits;
// pending callbacks fire in (time, insertion) order. Single-threaded use.
class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(TimeNs start = 0) : now_(start) {}

  TimeNs NowNs() override { return now_; }
  void SleepUntil(TimeNs t) override;
  void CallAt(TimeNs t, Callback fn) override;
  // Throws ClockError when `pred` is false and no event is pending.
  void AwaitCondition(const std::function<bool()>& pred) override;
  void Notify() override {}
  bool IsSimulated() const override { return true; }

  size_t pending() const { return events_.size(); }

 private:
  struct Event {
    TimeNs when;
    uint64_t seq;
    Callback fn;
    bool operator>(const Event& o) const {
      return when != o.when ? when > o.when : seq > o.seq;
    }
  };

  void RunNext();

  TimeNs now_;
  uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
};

}  // namespace rtbench

#endif  // RTBENCH_CLOCK_H_
