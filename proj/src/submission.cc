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

#include "rtbench/submission.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rtbench/compliance.h"
#include "rtbench/metrics.h"

namespace rtbench {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// `key = value` lines restricted to `keys`; every key at most once.
std::map<std::string, std::string> ParseKeyValues(std::string_view text,
                                                  const std::set<std::string>& keys,
                                                  const char* what) {
  std::map<std::string, std::string> out;
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
    auto where = std::string(what) + " line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw BundleError(where + ": expected key = value");
    std::string key(Trim(line.substr(0, eq)));
    if (!keys.count(key)) throw BundleError(where + ": unknown key '" + key + "'");
    if (out.count(key)) throw BundleError(where + ": duplicate key '" + key + "'");
    out[key] = std::string(Trim(line.substr(eq + 1)));
  }
  return out;
}

const std::string& Require(const std::map<std::string, std::string>& values,
                           const std::string& key, const char* what) {
  auto it = values.find(key);
  if (it == values.end()) {
    throw BundleError(std::string(what) + ": missing key '" + key + "'");
  }
  return it->second;
}

double ToDouble(const std::string& s, const char* what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw BundleError(std::string(what) + ": bad number '" + s + "'");
  }
  return v;
}

uint64_t ToU64(const std::string& s, const char* what) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw BundleError(std::string(what) + ": bad integer '" + s + "'");
  }
  return v;
}

bool ToBool(const std::string& s, const char* what) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw BundleError(std::string(what) + ": bad boolean '" + s + "'");
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError("missing bundle component " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw BundleError("cannot write " + path.string());
}

const char* Bool(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string FormatAccuracyResult(const AccuracyResult& r) {
  std::string out;
  out += "metric = " + r.metric + "\n";
  out += "value = " + FormatDouble(r.value) + "\n";
  out += "profile = " + r.profile + "\n";
  out += "seed = " + std::to_string(r.seed) + "\n";
  if (r.reference) out += "reference = " + FormatDouble(*r.reference) + "\n";
  return out;
}

AccuracyResult ParseAccuracyResult(std::string_view text) {
  constexpr const char* kWhat = "accuracy.txt";
  auto v = ParseKeyValues(text, {"metric", "value", "profile", "seed", "reference"},
                          kWhat);
  AccuracyResult r;
  r.metric = Require(v, "metric", kWhat);
  r.value = ToDouble(Require(v, "value", kWhat), kWhat);
  r.profile = Require(v, "profile", kWhat);
  r.seed = ToU64(Require(v, "seed", kWhat), kWhat);
  if (auto it = v.find("reference"); it != v.end()) {
    r.reference = ToDouble(it->second, kWhat);
  }
  return r;
}

std::string FormatDescriptor(const SutDescriptor& sut) {
  std::string out;
  out += "name = " + sut.name + "\n";
  out += "category = " + std::string(ToString(sut.category)) + "\n";
  out += std::string("functional_safety = ") + Bool(sut.functional_safety) + "\n";
  out += std::string("publicly_available = ") + Bool(sut.publicly_available) + "\n";
  out += std::string("auditable_closed = ") + Bool(sut.auditable_closed) + "\n";
  return out;
}

SutDescriptor ParseDescriptor(std::string_view text) {
  constexpr const char* kWhat = "system.txt";
  auto v = ParseKeyValues(text,
                          {"name", "category", "functional_safety",
                           "publicly_available", "auditable_closed"},
                          kWhat);
  SutDescriptor d;
  d.name = Require(v, "name", kWhat);
  auto category = ParseCategory(Require(v, "category", kWhat));
  if (!category) throw BundleError("system.txt: unknown category");
  d.category = *category;
  d.functional_safety = ToBool(Require(v, "functional_safety", kWhat), kWhat);
  d.publicly_available = ToBool(Require(v, "publicly_available", kWhat), kWhat);
  d.auditable_closed = ToBool(Require(v, "auditable_closed", kWhat), kWhat);
  return d;
}

std::string FormatVerdicts(std::span<const ComplianceVerdict> verdicts) {
  std::string out;
  for (const auto& v : verdicts) {
    out += FormatRecord(VerdictRecord{v});
    out += '\n';
  }
  return out;
}

SubmissionBundle LoadBundle(const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  if (!fs::is_directory(dir)) throw BundleError("not a directory: " + directory);
  SubmissionBundle b;
  try {
    b.performance_log = ParseLog(ReadFile(dir / kPerformanceLogFile));
  } catch (const LogFormatError& e) {
    throw BundleError(std::string(kPerformanceLogFile) + ": " + e.what());
  }
  b.accuracy = ParseAccuracyResult(ReadFile(dir / kAccuracyFile));
  b.system = ParseDescriptor(ReadFile(dir / kSystemFile));
  try {
    b.compliance = ParseVerdictLines(ReadFile(dir / kComplianceFile));
  } catch (const LogFormatError& e) {
    throw BundleError(std::string(kComplianceFile) + ": " + e.what());
  }
  return b;
}

void WriteBundle(const std::string& directory, const SubmissionBundle& bundle) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw BundleError("cannot create " + directory + ": " + ec.message());
  WriteFile(dir / kPerformanceLogFile, WriteLog(bundle.performance_log));
  WriteFile(dir / kAccuracyFile, FormatAccuracyResult(bundle.accuracy));
  WriteFile(dir / kSystemFile, FormatDescriptor(bundle.system));
  WriteFile(dir / kComplianceFile, FormatVerdicts(bundle.compliance));
}

bool SubmissionReport::valid() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(),
                     [](const SubmissionCheck& c) { return c.passed; });
}

std::vector<std::string> SubmissionReport::FailedChecks() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c.name);
  }
  return out;
}

std::optional<int64_t> SubmissionReport::p999_ns() const {
  if (!summary) return std::nullopt;
  return summary->p999_ns;
}

std::optional<uint64_t> SubmissionReport::overruns() const {
  if (!summary || scenario != Scenario::kConstantStream) return std::nullopt;
  return summary->overrun_count;
}

SubmissionReport ValidateSubmission(const SubmissionBundle& bundle,
                                    const BenchmarkProfile& profile) {
  SubmissionReport report;
  report.profile = profile.name;
  report.system_name = bundle.system.name;
  report.category = bundle.system.category;
  auto add = [&](std::string_view name, bool passed, std::string detail) {
    report.checks.push_back({std::string(name), passed, std::move(detail)});
  };

  const HeaderRecord* header = nullptr;
  bool has_failure = false;
  for (const auto& r : bundle.performance_log) {
    if (!header) header = std::get_if<HeaderRecord>(&r);
    if (std::holds_alternative<FailureRecord>(r)) has_failure = true;
  }
  if (header) report.scenario = header->settings.scenario;

  // log
  std::optional<RunSummary> recomputed;
  {
    auto embedded = EmbeddedSummary(bundle.performance_log);
    std::string detail;
    if (!header) {
      detail = "no header record";
    } else if (has_failure) {
      detail = "run recorded a SUT failure";
    } else if (!embedded) {
      detail = "no summary record";
    } else {
      try {
        recomputed = RecomputeSummary(bundle.performance_log);
        if (!(*recomputed == *embedded)) detail = "embedded summary does not match the trace";
      } catch (const StatsError& e) {
        detail = e.what();
      }
    }
    if (detail.empty()) report.summary = recomputed;
    add(kCheckLog, detail.empty(), detail.empty() ? "summary recomputed" : detail);
  }

  // duration, query_count
  if (header && recomputed) {
    ValidityReport validity = CheckValidity(*recomputed, header->settings);
    add(kCheckDuration, validity.duration_ok,
        std::to_string(recomputed->duration_ns) + " ns run, " +
            std::to_string(header->settings.min_duration_ns) + " ns required");
    add(kCheckQueryCount, validity.query_count_ok,
        std::to_string(recomputed->count) + " queries, " +
            std::to_string(header->settings.min_query_count) + " required");
  } else {
    add(kCheckDuration, false, "no usable trace");
    add(kCheckQueryCount, false, "no usable trace");
  }

  // accuracy_gate
  {
    std::optional<double> reference = profile.reference_metric;
    if (!reference) reference = bundle.accuracy.reference;
    if (bundle.accuracy.metric != profile.metric_name) {
      add(kCheckAccuracyGate, false,
          "metric '" + bundle.accuracy.metric + "' but profile uses '" +
              profile.metric_name + "'");
    } else if (!reference || !(*reference > 0)) {
      add(kCheckAccuracyGate, false, "no reference metric for " + profile.name);
    } else {
      GateResult g =
          AccuracyGate(bundle.accuracy.value, *reference, profile.accuracy_constraint);
      add(kCheckAccuracyGate, g.passed,
          "measured " + FormatDouble(g.measured) + (g.passed ? " >= " : " < ") +
              "threshold " + FormatDouble(g.threshold) + " (" +
              FormatDouble(g.constraint) + " x " + FormatDouble(g.reference) + ")");
    }
  }

  // compliance
  {
    std::vector<std::string> problems;
    for (std::string_view name : {kDeterminismTest, kCachingTest, kAccuracyInPerfTest}) {
      auto it = std::find_if(bundle.compliance.begin(), bundle.compliance.end(),
                             [&](const ComplianceVerdict& v) { return v.test_name == name; });
      if (it == bundle.compliance.end()) {
        problems.push_back(std::string(name) + " missing");
      } else if (!it->passed) {
        problems.push_back(std::string(name) + " failed");
      }
    }
    for (const auto& v : bundle.compliance) {
      auto again = RecomputeVerdict(v);
      if (!again) {
        problems.push_back(v.test_name + " not recomputable");
      } else if (*again != v.passed) {
        problems.push_back(v.test_name + " evidence contradicts verdict");
      }
    }
    std::string detail;
    for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
    add(kCheckCompliance, problems.empty(), problems.empty() ? "all passed" : detail);
  }

  // category
  {
    auto violations = CategoryViolations(bundle.system);
    std::string detail;
    for (const auto& v : violations) detail += (detail.empty() ? "" : "; ") + v;
    add(kCheckCategory, violations.empty(),
        violations.empty() ? std::string(ToString(bundle.system.category)) : detail);
  }

  // lineage
  {
    std::vector<std::string> problems;
    if (!header) {
      problems.push_back("no header record");
    } else {
      auto named = FindProfile(header->profile);
      const std::string log_profile = named ? named->name : header->profile;
      if (log_profile != profile.name) {
        problems.push_back("log profile '" + header->profile + "'");
      }
      if (header->settings.mode != Mode::kPerformance) {
        problems.push_back("log is not a performance run");
      }
      if (bundle.accuracy.seed != header->settings.seed) {
        problems.push_back("accuracy seed " + std::to_string(bundle.accuracy.seed) +
                           " vs log seed " + std::to_string(header->settings.seed));
      }
    }
    auto named = FindProfile(bundle.accuracy.profile);
    if ((named ? named->name : bundle.accuracy.profile) != profile.name) {
      problems.push_back("accuracy profile '" + bundle.accuracy.profile + "'");
    }
    std::string detail;
    for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
    add(kCheckLineage, problems.empty(), problems.empty() ? "consistent" : detail);
  }
  return report;
}

std::string RenderReport(std::span<const SubmissionReport> reports) {
  std::vector<std::string> profiles;
  for (const auto& p : BuiltinProfiles()) profiles.push_back(p.name);
  std::set<std::string> extra;
  for (const auto& r : reports) {
    if (std::find(profiles.begin(), profiles.end(), r.profile) == profiles.end()) {
      extra.insert(r.profile);
    }
  }
  profiles.insert(profiles.end(), extra.begin(), extra.end());

  struct Cell {
    uint64_t valid = 0;
    std::optional<int64_t> best_p999;
    std::set<std::string> categories;
  };
  std::map<std::pair<std::string, int>, Cell> cells;
  for (const auto& r : reports) {
    if (!r.valid()) continue;
    Cell& c = cells[{r.profile, static_cast<int>(r.scenario)}];
    ++c.valid;
    if (auto p = r.p999_ns(); p && (!c.best_p999 || *p < *c.best_p999)) {
      c.best_p999 = *p;
    }
    c.categories.insert(std::string(ToString(r.category)));
  }

  char line[256];
  std::string out;
  std::snprintf(line, sizeof(line), "%-16s %-16s %6s %14s  %s\n", "profile",
                "scenario", "valid", "best_p999_ms", "category");
  out += line;
  for (const auto& profile : profiles) {
    for (Scenario s : {Scenario::kSingleStream, Scenario::kConstantStream}) {
      auto it = cells.find({profile, static_cast<int>(s)});
      const Cell empty;
      const Cell& c = it == cells.end() ? empty : it->second;
      std::string best = "-";
      if (c.best_p999) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", *c.best_p999 / 1e6);
        best = buf;
      }
      std::string categories;
      for (const auto& cat : c.categories) {
        categories += (categories.empty() ? "" : "+") + cat;
      }
      if (categories.empty()) categories = "-";
      std::snprintf(line, sizeof(line), "%-16s %-16s %6llu %14s  %s\n",
                    profile.c_str(), std::string(ToString(s)).c_str(),
                    static_cast<unsigned long long>(c.valid), best.c_str(),
                    categories.c_str());
      out += line;
    }
  }
  return out;
}

}  // namespace rtbench
