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

#include "rtbench/profiles.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rtbench/latency_stats.h"

namespace rtbench {

std::string_view ToString(Scenario s) {
  return s == Scenario::kSingleStream ? "single_stream" : "constant_stream";
}

std::string_view ToString(Mode m) {
  return m == Mode::kPerformance ? "performance" : "accuracy";
}

std::optional<Scenario> ParseScenario(std::string_view s) {
  if (s == "single_stream") return Scenario::kSingleStream;
  if (s == "constant_stream") return Scenario::kConstantStream;
  return std::nullopt;
}

std::optional<Mode> ParseMode(std::string_view s) {
  if (s == "performance") return Mode::kPerformance;
  if (s == "accuracy") return Mode::kAccuracy;
  return std::nullopt;
}

const std::vector<BenchmarkProfile>& BuiltinProfiles() {
  static const std::vector<BenchmarkProfile> kProfiles = {
      {.name = "bevformer_tiny",
       .inputs_per_query = 6,
       .input_width_px = 800,
       .input_height_px = 450,
       .tail_percentile = 0.999,
       .accuracy_constraint = 0.99,
       .constant_stream_hz = 12.0,
       .sae_level_note = ">=3",
       .reference_metric = std::nullopt,
       .metric_name = "mAP"},
      {.name = "deeplabv3plus",
       .inputs_per_query = 1,
       .input_width_px = 3840,
       .input_height_px = 2160,
       .tail_percentile = 0.999,
       .accuracy_constraint = 0.999,
       .constant_stream_hz = 15.0,
       .sae_level_note = "<=3",
       .reference_metric = std::nullopt,
       .metric_name = "mIoU"},
      {.name = "ssd_resnet50",
       .inputs_per_query = 1,
       .input_width_px = 3840,
       .input_height_px = 2160,
       .tail_percentile = 0.999,
       .accuracy_constraint = 0.999,
       .constant_stream_hz = 15.0,
       .sae_level_note = "<3",
       // Best SSD variant trained on the Cognata data.
       .reference_metric = 0.7141,
       .metric_name = "mAP"},
  };
  return kProfiles;
}

std::optional<BenchmarkProfile> FindProfile(std::string_view name) {
  static const std::map<std::string_view, std::string_view> kAliases = {
      {"bevformer", "bevformer_tiny"},
      {"ssd", "ssd_resnet50"},
      {"deeplab", "deeplabv3plus"},
      {"deeplabv3+", "deeplabv3plus"},
  };
  if (auto it = kAliases.find(name); it != kAliases.end()) name = it->second;
  for (const auto& p : BuiltinProfiles()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

std::optional<double> EffectiveRateHz(const BenchmarkProfile& profile,
                                      const RunSettings& settings) {
  if (settings.rate_override_hz) return settings.rate_override_hz;
  return profile.constant_stream_hz;
}

namespace {

std::string_view Trim(std::string_view s) {
  const char* ws = " \t\r";
  size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseUnsigned(const std::string& key, std::string_view v) {
  int base = 10;
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    v.remove_prefix(2);
    base = 16;
  }
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an unsigned integer, got '" +
                               std::string(v) + "'");
  }
  return out;
}

int64_t ParseSigned(const std::string& key, std::string_view v) {
  int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

double ParseReal(const std::string& key, std::string_view v) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() ||
      !std::isfinite(out)) {
    throw ConfigError(key, "expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

}  // namespace

RunSettings DefaultSettings(const BenchmarkProfile& profile,
                            const SettingsDefaults& defaults) {
  RunSettings s;
  s.profile = profile.name;
  s.min_duration_ns = defaults.min_duration_ns;
  s.min_query_count = MinQueryCount(profile.tail_percentile, defaults.confidence);
  s.sample_bytes = static_cast<uint64_t>(profile.input_width_px) *
                   profile.input_height_px * 3;
  if (s.sample_bytes == 0) s.sample_bytes = 1;
  return s;
}

RunSettings ParseSettings(std::string_view text,
                          const SettingsDefaults& defaults) {
  static const std::set<std::string> kKeys = {
      "scenario",         "mode",        "seed",    "min_duration_ns",
      "min_query_count",  "store_size",  "sample_bytes",
      "rate_override_hz", "profile",     "sut_endpoint"};

  std::map<std::string, std::string> values;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) +
                                ": expected key = value");
    }
    std::string key(Trim(line.substr(0, eq)));
    std::string value(Trim(line.substr(eq + 1)));
    if (!kKeys.count(key)) throw ConfigError(key, "unknown key");
    if (values.count(key)) throw ConfigError(key, "duplicate key");
    values[key] = value;
  }

  RunSettings s;
  std::optional<BenchmarkProfile> profile;
  if (auto it = values.find("profile"); it != values.end() || !defaults.profile.empty()) {
    const std::string& name = it != values.end() ? it->second : defaults.profile;
    profile = FindProfile(name);
    if (!profile) throw ConfigError("profile", "unknown profile '" + name + "'");
    s = DefaultSettings(*profile, defaults);
  } else {
    s.min_duration_ns = defaults.min_duration_ns;
    s.min_query_count = MinQueryCount(0.999, defaults.confidence);
    s.sample_bytes = 1024;
  }

  for (const auto& [key, value] : values) {
    if (key == "profile") continue;
    if (key == "scenario") {
      auto sc = ParseScenario(value);
      if (!sc) throw ConfigError(key, "expected single_stream or constant_stream");
      s.scenario = *sc;
    } else if (key == "mode") {
      auto m = ParseMode(value);
      if (!m) throw ConfigError(key, "expected performance or accuracy");
      s.mode = *m;
    } else if (key == "seed") {
      s.seed = ParseUnsigned<uint64_t>(key, value);
    } else if (key == "min_duration_ns") {
      s.min_duration_ns = ParseSigned(key, value);
      if (s.min_duration_ns < 0) throw ConfigError(key, "must be >= 0");
    } else if (key == "min_query_count") {
      s.min_query_count = ParseUnsigned<uint64_t>(key, value);
      if (s.min_query_count < 1) throw ConfigError(key, "must be >= 1");
    } else if (key == "store_size") {
      s.store_size = ParseUnsigned<uint32_t>(key, value);
      if (s.store_size < 1) throw ConfigError(key, "must be >= 1");
    } else if (key == "sample_bytes") {
      s.sample_bytes = ParseUnsigned<uint64_t>(key, value);
      if (s.sample_bytes < 1) throw ConfigError(key, "must be >= 1");
    } else if (key == "rate_override_hz") {
      double r = ParseReal(key, value);
      if (r <= 0) throw ConfigError(key, "must be > 0");
      s.rate_override_hz = r;
    } else if (key == "sut_endpoint") {
      if (value.empty()) throw ConfigError(key, "must not be empty");
      s.sut_endpoint = value;
    }
  }

  if (s.scenario == Scenario::kConstantStream) {
    std::optional<double> rate =
        profile ? EffectiveRateHz(*profile, s) : s.rate_override_hz;
    if (!rate) {
      throw ConfigError("constant_stream_hz",
                        "constant_stream needs a rate from the profile or "
                        "rate_override_hz");
    }
  }
  return s;
}

RunSettings LoadSettings(const std::string& path,
                         const SettingsDefaults& defaults) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open settings file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseSettings(buf.str(), defaults);
}

std::vector<Violation> Validate(const BenchmarkProfile& profile,
                                const RunSettings& settings) {
  std::vector<Violation> out;
  auto add = [&](std::string field, std::string msg) {
    out.push_back({std::move(field), std::move(msg)});
  };

  if (profile.name.empty()) add("name", "profile name is empty");
  if (!(profile.tail_percentile > 0 && profile.tail_percentile < 1)) {
    add("tail_percentile", "must be in (0, 1)");
  }
  if (!(profile.accuracy_constraint > 0 && profile.accuracy_constraint <= 1)) {
    add("accuracy_constraint", "must be in (0, 1]");
  }
  if (profile.inputs_per_query < 1) add("inputs_per_query", "must be >= 1");
  if (profile.constant_stream_hz && !(*profile.constant_stream_hz > 0)) {
    add("constant_stream_hz", "must be > 0");
  }
  if (profile.reference_metric && !(*profile.reference_metric >= 0)) {
    add("reference_metric", "must be >= 0");
  }

  if (!settings.profile.empty()) {
    auto named = FindProfile(settings.profile);
    std::string resolved = named ? named->name : settings.profile;
    if (resolved != profile.name) {
      add("profile", "settings name '" + settings.profile +
                         "' but running profile '" + profile.name + "'");
    }
  }
  if (settings.min_query_count < 1) add("min_query_count", "must be >= 1");
  if (settings.min_duration_ns < 0) add("min_duration_ns", "must be >= 0");
  if (settings.store_size < 1) add("store_size", "must be >= 1");
  if (settings.sample_bytes < 1) add("sample_bytes", "must be >= 1");
  if (settings.rate_override_hz && !(*settings.rate_override_hz > 0)) {
    add("rate_override_hz", "must be > 0");
  }
  if (settings.scenario == Scenario::kConstantStream &&
      !EffectiveRateHz(profile, settings)) {
    add("constant_stream_hz", "constant_stream needs a rate");
  }
  if (settings.sut_endpoint.empty()) add("sut_endpoint", "must not be empty");
  // Both land verbatim in comma separated log headers.
  if (settings.sut_endpoint.find_first_of(",\n") != std::string::npos) {
    add("sut_endpoint", "must not contain ',' or newlines");
  }
  if (profile.name.find_first_of(",\n") != std::string::npos) {
    add("name", "must not contain ',' or newlines");
  }
  return out;
}

}  // namespace rtbench
