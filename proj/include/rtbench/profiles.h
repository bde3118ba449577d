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

#ifndef RTBENCH_PROFILES_H_
#define RTBENCH_PROFILES_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rtbench {

enum class Scenario { kSingleStream, kConstantStream };
enum class Mode { kPerformance, kAccuracy };

std::string_view ToString(Scenario s);
std::string_view ToString(Mode m);
std::optional<Scenario> ParseScenario(std::string_view s);
std::optional<Mode> ParseMode(std::string_view s);

struct BenchmarkProfile {
  std::string name;
  uint32_t inputs_per_query = 1;
  uint32_t input_width_px = 0;
  uint32_t input_height_px = 0;
  double tail_percentile = 0.999;
  // Fraction of the FP32 reference metric a submission must reach.
  double accuracy_constraint = 0.999;
  std::optional<double> constant_stream_hz;
  std::string sae_level_note;
  std::optional<double> reference_metric;
  std::string metric_name;

  bool operator==(const BenchmarkProfile&) const = default;
};

// bevformer_tiny, deeplabv3plus, ssd_resnet50 (sorted by name).
const std::vector<BenchmarkProfile>& BuiltinProfiles();

// Accepts full names and the short aliases "bevformer", "ssd", "deeplab".
std::optional<BenchmarkProfile> FindProfile(std::string_view name);

inline constexpr int64_t kDeskMinDurationNs = 60'000'000'000;
inline constexpr int64_t kSubmissionMinDurationNs = 600'000'000'000;
inline constexpr double kDefaultConfidence = 0.99;
inline constexpr uint32_t kDefaultStoreSize = 8;
inline constexpr const char* kDefaultSutEndpoint = "sim:fixed:10ms";

struct RunSettings {
  std::string profile;
  Scenario scenario = Scenario::kSingleStream;
  Mode mode = Mode::kPerformance;
  uint64_t seed = 0;
  int64_t min_duration_ns = kDeskMinDurationNs;
  uint64_t min_query_count = 1;
  uint32_t store_size = kDefaultStoreSize;
  uint64_t sample_bytes = 1;
  std::optional<double> rate_override_hz;
  std::string sut_endpoint = kDefaultSutEndpoint;

  bool operator==(const RunSettings&) const = default;
};

// Override first, then the profile's fixed rate.
std::optional<double> EffectiveRateHz(const BenchmarkProfile& profile,
                                      const RunSettings& settings);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message),
        key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct SettingsDefaults {
  int64_t min_duration_ns = kDeskMinDurationNs;
  double confidence = kDefaultConfidence;
  // Profile assumed when the text has no `profile` key.
  std::string profile;
};

// Flat `key = value` text, `#` starts a comment. Unknown keys, malformed
// values and a constant stream run without any rate throw ConfigError
// naming the offending key. Absent keys take defaults derived from the
// named profile (min_query_count from the sample-size planner, sample_bytes
// from the profile resolution).
RunSettings ParseSettings(std::string_view text,
                          const SettingsDefaults& defaults = {});
RunSettings LoadSettings(const std::string& path,
                         const SettingsDefaults& defaults = {});

// Fills min_query_count and sample_bytes from the profile.
RunSettings DefaultSettings(const BenchmarkProfile& profile,
                            const SettingsDefaults& defaults = {});

struct Violation {
  std::string field;
  std::string message;
};

std::vector<Violation> Validate(const BenchmarkProfile& profile,
                                const RunSettings& settings);

}  // namespace rtbench

#endif  // RTBENCH_PROFILES_H_
