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

#include "rtbench/simulated_sut.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace rtbench {

std::vector<std::string> ConfigViolations(const SimulatedSutConfig& c) {
  std::vector<std::string> out;
  const auto& p = c.params;
  switch (c.distribution) {
    case LatencyDistribution::kFixed:
      if (p.size() != 1) out.push_back("fixed takes one parameter");
      else if (p[0] < 0) out.push_back("fixed latency must be >= 0");
      break;
    case LatencyDistribution::kUniform:
      if (p.size() != 2) out.push_back("uniform takes lo and hi");
      else if (!(p[0] >= 0 && p[0] <= p[1])) out.push_back("uniform needs 0 <= lo <= hi");
      break;
    case LatencyDistribution::kLognormal:
      if (p.size() != 2) out.push_back("lognormal takes mu and sigma");
      else if (!(p[1] >= 0)) out.push_back("lognormal sigma must be >= 0");
      break;
    case LatencyDistribution::kBimodal:
      if (p.size() != 3) {
        out.push_back("bimodal takes two latencies and a weight");
      } else {
        if (p[0] < 0 || p[1] < 0) out.push_back("bimodal latencies must be >= 0");
        if (!(p[2] > 0 && p[2] < 1)) out.push_back("bimodal weight must be in (0, 1)");
      }
      break;
  }
  if (!(c.cache_speedup > 0 && c.cache_speedup <= 1)) {
    out.push_back("cache_speedup must be in (0, 1]");
  }
  return out;
}

int64_t SimulateLatency(const SimulatedSutConfig& c, SplitMix64& rng) {
  const auto& p = c.params;
  switch (c.distribution) {
    case LatencyDistribution::kFixed:
      return std::llround(p[0]);
    case LatencyDistribution::kUniform:
      return std::llround(p[0] + (p[1] - p[0]) * rng.NextUnit());
    case LatencyDistribution::kLognormal: {
      // Box-Muller, cosine branch only.
      double u1 = rng.NextUnit();
      double u2 = rng.NextUnit();
      double z = std::sqrt(-2.0 * std::log1p(-u1)) *
                 std::cos(2.0 * std::numbers::pi * u2);
      return std::llround(std::exp(p[0] + p[1] * z));
    }
    case LatencyDistribution::kBimodal:
      return std::llround(rng.NextUnit() < p[2] ? p[0] : p[1]);
  }
  return 0;
}

int64_t ParseDurationNs(std::string_view text) {
  static const std::pair<std::string_view, double> kUnits[] = {
      {"ns", 1.0}, {"us", 1e3}, {"ms", 1e6}, {"s", 1e9}};
  double scale = 1.0;
  for (const auto& [suffix, factor] : kUnits) {
    if (text.size() > suffix.size() && text.ends_with(suffix)) {
      text.remove_suffix(suffix.size());
      scale = factor;
      break;
    }
  }
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !(value >= 0)) {
    throw std::invalid_argument("bad duration '" + std::string(text) + "'");
  }
  return std::llround(value * scale);
}

namespace {

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double ParseNumber(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

SimulatedSutConfig ParseSimSpec(std::string_view spec) {
  auto parts = Split(spec, ':');
  SimulatedSutConfig c;
  c.params.clear();
  const std::string_view dist = parts[0];
  size_t n_params = 0;
  bool durations = true;
  if (dist == "fixed") {
    c.distribution = LatencyDistribution::kFixed;
    n_params = 1;
  } else if (dist == "uniform") {
    c.distribution = LatencyDistribution::kUniform;
    n_params = 2;
  } else if (dist == "lognormal") {
    c.distribution = LatencyDistribution::kLognormal;
    n_params = 2;
    durations = false;
  } else if (dist == "bimodal") {
    c.distribution = LatencyDistribution::kBimodal;
    n_params = 3;
  } else {
    throw std::invalid_argument("unknown latency distribution '" +
                                std::string(dist) + "'");
  }
  if (parts.size() < 1 + n_params) {
    throw std::invalid_argument(std::string(dist) + " needs " +
                                std::to_string(n_params) + " parameter(s)");
  }
  for (size_t i = 0; i < n_params; ++i) {
    std::string_view p = parts[1 + i];
    bool is_weight = c.distribution == LatencyDistribution::kBimodal && i == 2;
    c.params.push_back(durations && !is_weight
                           ? static_cast<double>(ParseDurationNs(p))
                           : ParseNumber(p));
  }
  for (size_t i = 1 + n_params; i < parts.size(); ++i) {
    std::string_view opt = parts[i];
    if (opt == "echo") {
      c.echo_responses = true;
    } else if (opt.starts_with("seed=")) {
      opt.remove_prefix(5);
      auto [ptr, ec] = std::from_chars(opt.data(), opt.data() + opt.size(), c.seed);
      if (opt.empty() || ec != std::errc() || ptr != opt.data() + opt.size()) {
        throw std::invalid_argument("bad seed option");
      }
    } else if (opt.starts_with("cache=")) {
      opt.remove_prefix(6);
      auto at = opt.find('@');
      if (at == std::string_view::npos) {
        throw std::invalid_argument("cache option is cache=<speedup>@<window>");
      }
      c.cache_speedup = ParseNumber(opt.substr(0, at));
      c.cache_window = static_cast<uint32_t>(ParseNumber(opt.substr(at + 1)));
    } else {
      throw std::invalid_argument("unknown sim option '" + std::string(opt) + "'");
    }
  }
  auto violations = ConfigViolations(c);
  if (!violations.empty()) throw std::invalid_argument(violations.front());
  return c;
}

struct SimulatedSut::Shared {
  std::mutex mu;
  SutSession session;
  std::vector<bool> loaded;
  bool any_loaded = false;
  uint64_t outstanding = 0;
};

SimulatedSut::SimulatedSut(SimulatedSutConfig config, std::string name)
    : config_(std::move(config)),
      name_(name.empty() ? "simulated" : std::move(name)),
      rng_(config_.seed),
      shared_(std::make_shared<Shared>()) {
  auto violations = ConfigViolations(config_);
  if (!violations.empty()) throw std::invalid_argument(violations.front());
}

SimulatedSut::~SimulatedSut() = default;

void SimulatedSut::Configure(SutSession session) {
  std::lock_guard<std::mutex> lock(shared_->mu);
  if (!session.clock || !session.sink || !session.store) {
    throw SutError("simulated SUT needs a clock, a sink and a sample store");
  }
  shared_->session = std::move(session);
  shared_->loaded.assign(shared_->session.info.store_size, false);
  shared_->any_loaded = false;
  recent_.clear();
}

void SimulatedSut::LoadSamples(std::span<const uint32_t> indices) {
  std::shared_ptr<SampleStore> store;
  {
    std::lock_guard<std::mutex> lock(shared_->mu);
    if (!shared_->session.store) throw SutError("load_samples before configure");
    store = shared_->session.store;
  }
  try {
    store->Load(indices);
  } catch (const SampleError& e) {
    throw SutError(e.what());
  }
  std::lock_guard<std::mutex> lock(shared_->mu);
  for (uint32_t i : indices) shared_->loaded[i] = true;
  shared_->any_loaded = true;
}

void SimulatedSut::UnloadSamples() {
  std::lock_guard<std::mutex> lock(shared_->mu);
  std::fill(shared_->loaded.begin(), shared_->loaded.end(), false);
  shared_->any_loaded = false;
  if (shared_->session.store) shared_->session.store->Unload();
}

bool SimulatedSut::CacheHit(std::span<const uint32_t> indices) const {
  for (const auto& previous : recent_) {
    for (uint32_t i : indices) {
      if (std::find(previous.begin(), previous.end(), i) != previous.end()) {
        return true;
      }
    }
  }
  return false;
}

void SimulatedSut::IssueQuery(uint64_t query_id,
                              std::span<const uint32_t> sample_indices) {
  Clock* clock = nullptr;
  {
    std::lock_guard<std::mutex> lock(shared_->mu);
    if (!shared_->any_loaded) throw SutError("issue before load_samples");
    for (uint32_t i : sample_indices) {
      if (i >= shared_->loaded.size() || !shared_->loaded[i]) {
        throw SutError("query " + std::to_string(query_id) +
                       " references unloaded sample " + std::to_string(i));
      }
    }
    ++shared_->outstanding;
    clock = shared_->session.clock;
  }

  int64_t latency = SimulateLatency(config_, rng_);
  if (config_.cache_window > 0) {
    if (CacheHit(sample_indices)) {
      latency = std::llround(static_cast<double>(latency) * config_.cache_speedup);
    }
    recent_.emplace_back(sample_indices.begin(), sample_indices.end());
    if (recent_.size() > config_.cache_window) recent_.pop_front();
  }

  std::vector<uint32_t> indices(sample_indices.begin(), sample_indices.end());
  const bool echo = config_.echo_responses;
  clock->CallAt(clock->NowNs() + latency,
                [shared = shared_, query_id, indices = std::move(indices), echo] {
    std::shared_ptr<CompletionSink> sink;
    std::shared_ptr<SampleStore> store;
    Clock* clk;
    {
      std::lock_guard<std::mutex> lock(shared->mu);
      sink = shared->session.sink;
      store = shared->session.store;
      clk = shared->session.clock;
    }
    std::vector<uint8_t> response;
    try {
      for (uint32_t i : indices) {
        auto sample = store->Sample(i);
        size_t take = echo ? sample.size() : std::min<size_t>(8, sample.size());
        response.insert(response.end(), sample.begin(), sample.begin() + take);
      }
      sink->Complete(query_id, std::move(response));
    } catch (const std::exception& e) {
      sink->Fail(e.what());
    }
    {
      std::lock_guard<std::mutex> lock(shared->mu);
      --shared->outstanding;
    }
    clk->Notify();
  });
}

void SimulatedSut::Flush() {
  Clock* clock;
  {
    std::lock_guard<std::mutex> lock(shared_->mu);
    clock = shared_->session.clock;
  }
  if (!clock) return;
  auto shared = shared_;
  clock->AwaitCondition([shared] {
    std::lock_guard<std::mutex> lock(shared->mu);
    return shared->outstanding == 0;
  });
}

}  // namespace rtbench
