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

#include "rtbench/engine.h"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rtbench/digest.h"

namespace rtbench {

ScheduleStream::ScheduleStream(uint64_t seed, uint32_t store_size,
                               uint32_t samples_per_query)
    : rng_(seed), store_size_(store_size), samples_per_query_(samples_per_query) {
  if (store_size == 0) throw std::invalid_argument("store_size must be >= 1");
  if (samples_per_query == 0) {
    throw std::invalid_argument("samples_per_query must be >= 1");
  }
}

std::vector<uint32_t> ScheduleStream::Next() {
  std::vector<uint32_t> indices(samples_per_query_);
  for (auto& index : indices) {
    index = static_cast<uint32_t>(rng_.Next() % store_size_);
  }
  return indices;
}

Schedule GenerateSchedule(uint64_t seed, uint32_t store_size, uint64_t n_queries,
                          uint32_t samples_per_query) {
  ScheduleStream stream(seed, store_size, samples_per_query);
  Schedule out;
  out.reserve(n_queries);
  for (uint64_t i = 0; i < n_queries; ++i) out.push_back(stream.Next());
  return out;
}

Schedule AccuracySchedule(uint32_t store_size, uint32_t samples_per_query) {
  if (store_size == 0 || samples_per_query == 0) {
    throw std::invalid_argument("store_size and samples_per_query must be >= 1");
  }
  uint64_t n = (static_cast<uint64_t>(store_size) + samples_per_query - 1) /
               samples_per_query;
  Schedule out(n, std::vector<uint32_t>(samples_per_query));
  uint64_t next = 0;
  for (auto& query : out) {
    for (auto& index : query) index = static_cast<uint32_t>(next++ % store_size);
  }
  return out;
}

namespace {

constexpr int64_t kNsPerSecond = 1'000'000'000;

bool IsWholeRate(double rate_hz) {
  return rate_hz >= 1 && rate_hz <= 1e9 && std::floor(rate_hz) == rate_hz;
}

}  // namespace

int64_t ConstantStreamOffsetNs(uint64_t i, double rate_hz) {
  if (!(rate_hz > 0)) throw std::invalid_argument("rate must be > 0");
  if (IsWholeRate(rate_hz)) {
    // Exact round-half-up of i * 1e9 / R.
    __int128 r = static_cast<__int128>(rate_hz);
    __int128 num = static_cast<__int128>(i) * kNsPerSecond * 2 + r;
    return static_cast<int64_t>(num / (2 * r));
  }
  return static_cast<int64_t>(
      std::llroundl(static_cast<long double>(i) * kNsPerSecond / rate_hz));
}

uint64_t ConstantStreamQueryCount(int64_t min_duration_ns,
                                  uint64_t min_query_count, double rate_hz) {
  if (!(rate_hz > 0)) throw std::invalid_argument("rate must be > 0");
  uint64_t by_duration = 0;
  if (min_duration_ns > 0) {
    if (IsWholeRate(rate_hz)) {
      __int128 prod = static_cast<__int128>(min_duration_ns) *
                      static_cast<__int128>(rate_hz);
      by_duration = static_cast<uint64_t>((prod + kNsPerSecond - 1) / kNsPerSecond);
    } else {
      by_duration = static_cast<uint64_t>(std::ceil(
          static_cast<long double>(min_duration_ns) * rate_hz / kNsPerSecond));
    }
  }
  return std::max(by_duration, min_query_count);
}

namespace {

// Thread-safe store for completions, stamped on arrival.
class Recorder final : public CompletionSink {
 public:
  Recorder(Clock& clock, int64_t origin, bool retain_all,
           std::function<bool(uint64_t)> retain)
      : clock_(clock),
        origin_(origin),
        retain_all_(retain_all),
        retain_(std::move(retain)) {}

  void Expect(uint64_t query_id) {
    std::lock_guard<std::mutex> lock(mu_);
    if (query_id != slots_.size()) throw std::logic_error("query ids must be dense");
    slots_.emplace_back();
  }

  void Complete(uint64_t query_id, std::vector<uint8_t> response) override {
    const int64_t now = clock_.NowNs() - origin_;
    Completion c;
    c.query_id = query_id;
    c.completion_ns = now;
    c.response_digest = Digest(response);
    if (retain_all_ || (retain_ && retain_(query_id))) {
      c.response_bytes = std::move(response);
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (query_id >= slots_.size()) {
        SetFailureLocked("completion for unknown query " + std::to_string(query_id));
      } else if (slots_[query_id]) {
        SetFailureLocked("duplicate completion for query " + std::to_string(query_id));
      } else {
        slots_[query_id] = std::move(c);
        ++completed_;
      }
    }
    clock_.Notify();
  }

  void Fail(std::string message) override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      SetFailureLocked(std::move(message));
    }
    clock_.Notify();
  }

  bool IsComplete(uint64_t query_id) {
    std::lock_guard<std::mutex> lock(mu_);
    return query_id < slots_.size() && slots_[query_id].has_value();
  }

  bool AllComplete() {
    std::lock_guard<std::mutex> lock(mu_);
    return completed_ == slots_.size();
  }

  std::optional<std::string> failure() {
    std::lock_guard<std::mutex> lock(mu_);
    return failure_;
  }

  std::vector<std::optional<Completion>> Take() {
    std::lock_guard<std::mutex> lock(mu_);
    return slots_;
  }

 private:
  void SetFailureLocked(std::string message) {
    if (!failure_) failure_ = std::move(message);
  }

  Clock& clock_;
  const int64_t origin_;
  const bool retain_all_;
  const std::function<bool(uint64_t)> retain_;

  std::mutex mu_;
  std::vector<std::optional<Completion>> slots_;
  uint64_t completed_ = 0;
  std::optional<std::string> failure_;
};

class RunningGuard {
 public:
  explicit RunningGuard(std::atomic<bool>& flag) : flag_(flag) {
    if (flag_.exchange(true)) {
      throw std::logic_error("ScenarioEngine is already running");
    }
  }
  ~RunningGuard() { flag_ = false; }

 private:
  std::atomic<bool>& flag_;
};

enum class Discipline { kClosedLoop, kOpenLoop };

}  // namespace

RunLog ScenarioEngine::Run(SystemUnderTest& sut, const RunSettings& settings,
                           const BenchmarkProfile& profile,
                           const RunOptions& options) {
  if (settings.mode == Mode::kAccuracy) {
    return RunAccuracy(sut, settings, profile, options);
  }
  if (settings.scenario == Scenario::kConstantStream) {
    return RunConstantStream(sut, settings, profile, options);
  }
  return RunSingleStream(sut, settings, profile, options);
}

namespace {

RunLog Execute(Clock& clock, SystemUnderTest& sut, const RunSettings& settings,
               const BenchmarkProfile& profile, const RunOptions& options,
               Discipline discipline) {
  auto violations = Validate(profile, settings);
  if (!violations.empty()) {
    throw ConfigError(violations.front().field, violations.front().message);
  }
  const uint32_t spq = profile.inputs_per_query;
  const bool accuracy = settings.mode == Mode::kAccuracy;

  std::optional<Schedule> explicit_schedule = options.schedule;
  if (accuracy && !explicit_schedule) {
    explicit_schedule = AccuracySchedule(settings.store_size, spq);
  }
  if (explicit_schedule) {
    for (const auto& q : *explicit_schedule) {
      if (q.size() != spq) {
        throw std::invalid_argument("schedule entry has " + std::to_string(q.size()) +
                                    " samples, profile wants " + std::to_string(spq));
      }
      for (uint32_t i : q) {
        if (i >= settings.store_size) {
          throw std::invalid_argument("schedule index " + std::to_string(i) +
                                      " outside the sample store");
        }
      }
    }
  }

  std::optional<double> rate;
  if (discipline == Discipline::kOpenLoop) {
    rate = EffectiveRateHz(profile, settings);
  }

  RunLog log;
  log.profile_name = profile.name;
  log.settings = settings;

  auto store = std::make_shared<SampleStore>(settings.seed, settings.store_size,
                                             settings.sample_bytes);
  ScheduleStream stream(settings.seed, settings.store_size, spq);
  std::vector<Query> queries;
  std::shared_ptr<Recorder> recorder;
  int64_t t0 = 0;

  auto fail = [&](const std::string& what) {
    if (!log.failure) log.failure = what;
  };

  try {
    SutSession session;
    session.info = SutRunInfo{settings.mode, settings.scenario, settings.seed,
                              settings.store_size, settings.sample_bytes, spq};
    session.clock = &clock;
    session.store = store;
    std::vector<uint32_t> all(settings.store_size);
    std::iota(all.begin(), all.end(), 0u);

    auto next_indices = [&](uint64_t i) {
      return explicit_schedule ? (*explicit_schedule)[i] : stream.Next();
    };
    auto issue = [&](uint64_t i, std::optional<int64_t> scheduled) {
      Query q;
      q.query_id = i;
      q.sample_indices = next_indices(i);
      q.scheduled_ns = scheduled;
      recorder->Expect(i);
      q.issue_ns = clock.NowNs() - t0;
      queries.push_back(q);
      sut.IssueQuery(i, queries.back().sample_indices);
    };

    // Recorder must exist before Configure hands it to the SUT; its origin
    // is the clock reading right after loading.
    struct LazySink final : CompletionSink {
      std::shared_ptr<Recorder> target;
      void Complete(uint64_t id, std::vector<uint8_t> r) override {
        target->Complete(id, std::move(r));
      }
      void Fail(std::string m) override { target->Fail(std::move(m)); }
    };
    auto sink = std::make_shared<LazySink>();
    session.sink = sink;

    sut.Configure(session);
    sut.LoadSamples(all);

    t0 = clock.NowNs();
    recorder = std::make_shared<Recorder>(clock, t0, accuracy, options.retain_response);
    sink->target = recorder;

    if (discipline == Discipline::kClosedLoop) {
      for (uint64_t i = 0;; ++i) {
        if (explicit_schedule) {
          if (i >= explicit_schedule->size()) break;
        } else if (i >= settings.min_query_count &&
                   clock.NowNs() - t0 >= settings.min_duration_ns) {
          break;
        }
        issue(i, std::nullopt);
        clock.AwaitCondition([&] {
          return recorder->IsComplete(i) || recorder->failure().has_value();
        });
        if (auto f = recorder->failure()) {
          fail(*f);
          break;
        }
      }
    } else {
      const uint64_t n =
          explicit_schedule
              ? explicit_schedule->size()
              : ConstantStreamQueryCount(settings.min_duration_ns,
                                         settings.min_query_count, *rate);
      for (uint64_t i = 0; i < n; ++i) {
        const int64_t offset = ConstantStreamOffsetNs(i, *rate);
        clock.SleepUntil(t0 + offset);
        if (auto f = recorder->failure()) {
          fail(*f);
          break;
        }
        issue(i, offset);
      }
    }
    if (!log.failure) {
      sut.Flush();
      clock.AwaitCondition(
          [&] { return recorder->AllComplete() || recorder->failure().has_value(); });
      if (auto f = recorder->failure()) fail(*f);
    }
    if (!log.failure) sut.UnloadSamples();
  } catch (const SutError& e) {
    fail(e.what());
  } catch (const ClockError& e) {
    fail(e.what());
  } catch (const SampleError& e) {
    fail(e.what());
  }

  std::vector<std::optional<Completion>> completions;
  if (recorder) completions = recorder->Take();
  log.trace.reserve(queries.size());
  int64_t last = 0;
  for (size_t i = 0; i < queries.size(); ++i) {
    TraceEntry e{std::move(queries[i]),
                 i < completions.size() ? completions[i] : std::nullopt};
    if (e.completion) last = std::max(last, e.completion->completion_ns);
    log.trace.push_back(std::move(e));
  }
  log.wall_start_ns = 0;
  log.wall_end_ns = log.failure ? std::max(last, clock.NowNs() - t0) : last;
  log.overrun_count = CountOverruns(log.trace);
  return log;
}

}  // namespace

RunLog ScenarioEngine::RunSingleStream(SystemUnderTest& sut, RunSettings settings,
                                       const BenchmarkProfile& profile,
                                       const RunOptions& options) {
  RunningGuard guard(running_);
  settings.scenario = Scenario::kSingleStream;
  settings.mode = Mode::kPerformance;
  return Execute(clock_, sut, settings, profile, options, Discipline::kClosedLoop);
}

RunLog ScenarioEngine::RunConstantStream(SystemUnderTest& sut, RunSettings settings,
                                         const BenchmarkProfile& profile,
                                         const RunOptions& options) {
  RunningGuard guard(running_);
  settings.scenario = Scenario::kConstantStream;
  settings.mode = Mode::kPerformance;
  return Execute(clock_, sut, settings, profile, options, Discipline::kOpenLoop);
}

RunLog ScenarioEngine::RunAccuracy(SystemUnderTest& sut, RunSettings settings,
                                   const BenchmarkProfile& profile,
                                   const RunOptions& options) {
  RunningGuard guard(running_);
  settings.mode = Mode::kAccuracy;
  return Execute(clock_, sut, settings, profile, options, Discipline::kClosedLoop);
}

}  // namespace rtbench
