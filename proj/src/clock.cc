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

#include "rtbench/clock.h"

#include <utility>

namespace rtbench {

RealClock::RealClock() : origin_(std::chrono::steady_clock::now()) {}

RealClock::~RealClock() {
  {
    std::lock_guard<std::mutex> lock(timer_mutex_);
    stopping_ = true;
  }
  timer_cv_.notify_all();
  if (timer_thread_.joinable()) timer_thread_.join();
}

TimeNs RealClock::NowNs() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now() - origin_)
      .count();
}

void RealClock::SleepUntil(TimeNs t) {
  TimeNs now = NowNs();
  if (t - now > kSpinWindowNs) {
    std::this_thread::sleep_until(origin_ +
                                  std::chrono::nanoseconds(t - kSpinWindowNs));
  }
  while (NowNs() < t) {
    std::this_thread::yield();
  }
}

void RealClock::CallAt(TimeNs t, Callback fn) {
  {
    std::lock_guard<std::mutex> lock(timer_mutex_);
    if (!timer_thread_.joinable()) {
      timer_thread_ = std::thread(&RealClock::TimerLoop, this);
    }
    timers_.push(Timer{t, timer_seq_++, std::move(fn)});
  }
  timer_cv_.notify_one();
}

void RealClock::TimerLoop() {
  std::unique_lock<std::mutex> lock(timer_mutex_);
  while (true) {
    if (stopping_) return;
    if (timers_.empty()) {
      timer_cv_.wait(lock);
      continue;
    }
    TimeNs due = timers_.top().when;
    if (NowNs() < due) {
      timer_cv_.wait_until(lock, origin_ + std::chrono::nanoseconds(due));
      continue;
    }
    Callback fn = std::move(const_cast<Timer&>(timers_.top()).fn);
    timers_.pop();
    lock.unlock();
    fn();
    lock.lock();
  }
}

void RealClock::AwaitCondition(const std::function<bool()>& pred) {
  std::unique_lock<std::mutex> lock(wait_mutex_);
  wait_cv_.wait(lock, pred);
}

void RealClock::Notify() {
  { std::lock_guard<std::mutex> lock(wait_mutex_); }
  wait_cv_.notify_all();
}

void SimulatedClock::SleepUntil(TimeNs t) {
  while (!events_.empty() && events_.top().when <= t) {
    RunNext();
  }
  if (t > now_) now_ = t;
}

void SimulatedClock::CallAt(TimeNs t, Callback fn) {
  events_.push(Event{t < now_ ? now_ : t, seq_++, std::move(fn)});
}

void SimulatedClock::AwaitCondition(const std::function<bool()>& pred) {
  while (!pred()) {
    if (events_.empty()) {
      throw ClockError("simulated clock: waiting on a condition with no pending events");
    }
    RunNext();
  }
}

void SimulatedClock::RunNext() {
  Callback fn = std::move(const_cast<Event&>(events_.top()).fn);
  now_ = events_.top().when;
  events_.pop();
  fn();
}

}  // namespace rtbench
