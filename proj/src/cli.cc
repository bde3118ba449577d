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

#include "rtbench/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "rtbench/clock.h"
#include "rtbench/compliance.h"
#include "rtbench/engine.h"
#include "rtbench/latency_stats.h"
#include "rtbench/metrics.h"
#include "rtbench/profiles.h"
#include "rtbench/remote_sut.h"
#include "rtbench/run_log.h"
#include "rtbench/simulated_sut.h"
#include "rtbench/socket.h"
#include "rtbench/submission.h"

namespace rtbench {

namespace {

constexpr std::string_view kSimPrefix = "sim:";
constexpr std::string_view kTcpPrefix = "tcp:";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options shared by `run` and `compliance`.
struct RunFlags {
  std::string profile;
  std::string settings_path;
  std::string mode;
  std::string scenario;
  std::string sut;
  std::optional<uint64_t> seed;
  std::string min_duration;
  std::optional<uint64_t> min_query_count;
  std::optional<uint32_t> store_size;
  std::optional<uint64_t> sample_bytes;
  std::optional<double> rate;
  bool submission = false;
  bool simulated_clock = false;
};

void AddRunFlags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--profile", f.profile, "Benchmark profile (see list-profiles)");
  cmd->add_option("--settings", f.settings_path, "Settings file (key = value)");
  cmd->add_option("--mode", f.mode, "performance or accuracy");
  cmd->add_option("--scenario", f.scenario, "single_stream or constant_stream");
  cmd->add_option("--sut", f.sut, "SUT endpoint: sim:<dist>:<params> or tcp:<host>:<port>");
  cmd->add_option("--seed", f.seed, "Schedule and sample store seed");
  cmd->add_option("--min-duration", f.min_duration, "Minimum run length, e.g. 60s");
  cmd->add_option("--min-query-count", f.min_query_count, "Minimum query count");
  cmd->add_option("--store-size", f.store_size, "Samples in the sample store");
  cmd->add_option("--sample-bytes", f.sample_bytes, "Bytes per synthetic sample");
  cmd->add_option("--rate", f.rate, "Constant Stream rate override in Hz");
  cmd->add_flag("--submission", f.submission, "Use the 600 s submission minimum duration");
  cmd->add_flag("--simulated-clock", f.simulated_clock,
                "Discrete-event clock (sim: endpoints only)");
}

BenchmarkProfile ResolveProfile(const std::string& name) {
  auto p = FindProfile(name);
  if (!p) throw ConfigError("profile", "unknown profile '" + name + "'");
  return *p;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw UsageError("cannot write '" + path + "'");
}

// Settings file first, then explicit flags on top.
std::pair<BenchmarkProfile, RunSettings> ResolveRun(const RunFlags& f) {
  SettingsDefaults defaults;
  if (f.submission) defaults.min_duration_ns = kSubmissionMinDurationNs;

  RunSettings s;
  std::optional<BenchmarkProfile> profile;
  if (!f.profile.empty()) profile = ResolveProfile(f.profile);
  if (!f.settings_path.empty()) {
    if (profile) defaults.profile = profile->name;
    s = ParseSettings(ReadText(f.settings_path), defaults);
    if (!s.profile.empty()) {
      auto named = ResolveProfile(s.profile);
      if (profile && named.name != profile->name) {
        throw ConfigError("profile", "--profile " + profile->name +
                                         " but the settings file names " + named.name);
      }
      profile = named;
    }
  } else if (profile) {
    s = DefaultSettings(*profile, defaults);
  }
  if (!profile) throw ConfigError("profile", "no profile given");
  s.profile = profile->name;

  if (!f.mode.empty()) {
    auto m = ParseMode(f.mode);
    if (!m) throw ConfigError("mode", "expected performance or accuracy");
    s.mode = *m;
  }
  if (!f.scenario.empty()) {
    auto sc = ParseScenario(f.scenario);
    if (!sc) throw ConfigError("scenario", "expected single_stream or constant_stream");
    s.scenario = *sc;
  }
  if (!f.sut.empty()) s.sut_endpoint = f.sut;
  if (f.seed) s.seed = *f.seed;
  if (!f.min_duration.empty()) {
    try {
      s.min_duration_ns = ParseDurationNs(f.min_duration);
    } catch (const std::exception& e) {
      throw ConfigError("min_duration_ns", e.what());
    }
  }
  if (f.min_query_count) s.min_query_count = *f.min_query_count;
  if (f.store_size) s.store_size = *f.store_size;
  if (f.sample_bytes) s.sample_bytes = *f.sample_bytes;
  if (f.rate) s.rate_override_hz = *f.rate;

  auto violations = Validate(*profile, s);
  if (!violations.empty()) {
    throw ConfigError(violations.front().field, violations.front().message);
  }
  if (f.simulated_clock && s.sut_endpoint.rfind(kSimPrefix, 0) != 0) {
    throw ConfigError("sut_endpoint", "--simulated-clock needs a sim: endpoint");
  }
  return {*profile, s};
}

std::unique_ptr<Clock> MakeClock(bool simulated) {
  if (simulated) return std::make_unique<SimulatedClock>();
  return std::make_unique<RealClock>();
}

std::string FormatSummary(const RunSummary& s) {
  std::ostringstream o;
  o << "queries        " << s.count << "\n"
    << "min_ns         " << s.min_ns << "\n"
    << "mean_ns        " << s.mean_ns << "\n"
    << "p50_ns         " << s.p50_ns << "\n"
    << "p90_ns         " << s.p90_ns << "\n"
    << "p99_ns         " << s.p99_ns << "\n"
    << "p999_ns        " << s.p999_ns << "\n"
    << "max_ns         " << s.max_ns << "\n"
    << "overruns       " << s.overrun_count << "\n"
    << "duration_ns    " << s.duration_ns << "\n"
    << "queries_per_s  " << FormatDouble(s.completed_per_second) << "\n";
  return o.str();
}

int CmdListProfiles(std::ostream& out) {
  out << FormatProfileTable();
  return kExitOk;
}

int CmdRun(const RunFlags& f, const std::string& out_path, std::ostream& out,
           std::ostream& err) {
  auto [profile, settings] = ResolveRun(f);
  auto sut = MakeSut(settings.sut_endpoint);
  auto clock = MakeClock(f.simulated_clock);
  ScenarioEngine engine(*clock);
  RunLog log = engine.Run(*sut, settings, profile);

  std::optional<RunSummary> summary;
  if (!log.failure) summary = Summarize(log);
  const std::string text = WriteLog(RecordsFromRun(log, summary));
  if (out_path.empty()) {
    out << text;
  } else {
    WriteText(out_path, text);
  }
  if (log.failure) {
    err << "rtbench: run failed: " << *log.failure << "\n";
    return kExitInvalid;
  }
  std::ostream& human = out_path.empty() ? err : out;
  human << FormatSummary(*summary);
  ValidityReport validity = CheckValidity(*summary, log.settings);
  for (const auto& m : validity.messages) err << "rtbench: " << m << "\n";
  return validity.ok() ? kExitOk : kExitInvalid;
}

int CmdCompliance(const RunFlags& f, const std::string& test,
                  std::optional<uint64_t> queries, double ratio_threshold,
                  double sample_fraction, const std::string& out_path,
                  std::ostream& out, std::ostream& err) {
  auto [profile, settings] = ResolveRun(f);
  const bool all = test == "all";
  const std::map<std::string, std::string_view> known = {
      {"determinism", kDeterminismTest},
      {"caching", kCachingTest},
      {"accuracy_in_perf", kAccuracyInPerfTest}};
  if (!all && !known.count(test)) {
    throw UsageError("unknown test '" + test +
                     "'; expected determinism, caching, accuracy_in_perf or all");
  }
  const uint64_t n = queries.value_or(kDefaultComplianceQueries);
  std::vector<ComplianceVerdict> verdicts;
  if (all || test == "determinism") {
    verdicts.push_back(TestDeterminism(settings, profile, n));
  }
  if (all || test == "caching") {
    auto sut = MakeSut(settings.sut_endpoint);
    auto clock = MakeClock(f.simulated_clock);
    ScenarioEngine engine(*clock);
    verdicts.push_back(TestCaching(engine, *sut, settings, profile, ratio_threshold, n));
  }
  if (all || test == "accuracy_in_perf") {
    auto sut = MakeSut(settings.sut_endpoint);
    auto clock = MakeClock(f.simulated_clock);
    ScenarioEngine engine(*clock);
    verdicts.push_back(
        TestAccuracyInPerf(engine, *sut, settings, profile, sample_fraction));
  }
  const std::string text = FormatVerdicts(verdicts);
  if (out_path.empty()) {
    out << text;
  } else {
    WriteText(out_path, text);
  }
  bool ok = true;
  for (const auto& v : verdicts) {
    err << v.test_name << ": " << (v.passed ? "PASS" : "FAIL")
        << " (harness-defined test)\n";
    ok = ok && v.passed;
  }
  return ok ? kExitOk : kExitInvalid;
}

int CmdAccuracy(const std::string& profile_name, const std::string& gt_path,
                const std::string& pred_path, std::optional<uint32_t> num_classes,
                double iou_threshold, uint64_t seed, std::optional<double> reference,
                const std::string& out_path, std::ostream& out, std::ostream& err) {
  const BenchmarkProfile profile = ResolveProfile(profile_name);
  std::ifstream gt(gt_path), pred(pred_path);
  if (!gt) throw UsageError("cannot open '" + gt_path + "'");
  if (!pred) throw UsageError("cannot open '" + pred_path + "'");

  AccuracyResult result;
  result.metric = profile.metric_name;
  result.profile = profile.name;
  result.seed = seed;
  result.reference = reference;
  if (profile.metric_name == "mIoU") {
    if (!num_classes) throw UsageError("--num-classes is required for " + profile.name);
    auto truth = ReadMasks(gt);
    auto predicted = ReadMasks(pred);
    std::vector<SegmentationMask> t, p;
    for (const auto& r : truth) {
      auto it = std::find_if(predicted.begin(), predicted.end(),
                             [&](const MaskRecord& m) { return m.frame_id == r.frame_id; });
      if (it == predicted.end()) {
        throw MetricsError("no prediction for frame '" + r.frame_id + "'");
      }
      t.push_back(r.mask);
      p.push_back(it->mask);
    }
    if (predicted.size() != truth.size()) {
      throw MetricsError("predictions for frames absent from the ground truth");
    }
    result.value = MeanIou(p, t, *num_classes);
  } else {
    result.value = MeanAveragePrecision(ReadDetections(gt, pred), iou_threshold);
  }

  const std::string text = FormatAccuracyResult(result);
  if (out_path.empty()) {
    out << text;
  } else {
    WriteText(out_path, text);
  }
  auto ref = profile.reference_metric ? profile.reference_metric : reference;
  if (ref) {
    GateResult g = AccuracyGate(result.value, *ref, profile.accuracy_constraint);
    err << profile.metric_name << " " << FormatDouble(g.measured)
        << (g.passed ? " passes" : " fails") << " the accuracy gate (threshold "
        << FormatDouble(g.threshold) << ")\n";
  }
  return kExitOk;
}

SubmissionReport ValidateDir(const std::string& dir, const std::string& profile_flag,
                             std::ostream& out) {
  SubmissionBundle bundle = LoadBundle(dir);
  std::string name = profile_flag;
  if (name.empty()) {
    for (const auto& r : bundle.performance_log) {
      if (auto* h = std::get_if<HeaderRecord>(&r)) name = h->profile;
    }
  }
  SubmissionReport report = ValidateSubmission(bundle, ResolveProfile(name));
  out << dir << ": " << report.profile << " " << ToString(report.scenario) << " "
      << report.system_name << "\n";
  for (const auto& c : report.checks) {
    out << "  " << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail
        << "\n";
  }
  if (report.valid()) {
    out << "  VALID score p999_ns=" << *report.p999_ns();
    if (auto o = report.overruns()) out << " overruns=" << *o;
    out << "\n";
  } else {
    std::string failed;
    for (const auto& n : report.FailedChecks()) failed += (failed.empty() ? "" : ", ") + n;
    out << "  INVALID: " << failed << "\n";
  }
  return report;
}

int CmdValidate(const std::vector<std::string>& bundles, const std::string& profile,
                std::ostream& out) {
  bool ok = true;
  for (const auto& dir : bundles) ok = ValidateDir(dir, profile, out).valid() && ok;
  return ok ? kExitOk : kExitInvalid;
}

int CmdReport(const std::vector<std::string>& bundles, const std::string& out_path,
              std::ostream& out, std::ostream& err) {
  std::vector<SubmissionReport> reports;
  std::ostringstream details;
  for (const auto& dir : bundles) reports.push_back(ValidateDir(dir, "", details));
  err << details.str();
  const std::string text = RenderReport(reports);
  if (out_path.empty()) {
    out << text;
  } else {
    WriteText(out_path, text);
  }
  return kExitOk;
}

int CmdServeStub(const std::string& spec, const std::string& listen, std::ostream& out) {
  std::string_view s = spec;
  if (s.rfind(kSimPrefix, 0) == 0) s.remove_prefix(kSimPrefix.size());
  StubServer server(ParseSimSpec(s), ParseTcpAddress(listen));
  out << "listening on " << ParseTcpAddress(listen).host << ":" << server.port()
      << std::endl;
  server.Serve();
  return kExitOk;
}

int CmdConformance(const std::string& endpoint, std::ostream& out) {
  auto checks = CheckConformance(ParseTcpAddress(endpoint));
  bool ok = true;
  for (const auto& c : checks) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) out << ": " << c.detail;
    out << "\n";
    ok = ok && c.passed;
  }
  return ok ? kExitOk : kExitInvalid;
}

}  // namespace

std::unique_ptr<SystemUnderTest> MakeSut(std::string_view endpoint) {
  try {
    if (endpoint.rfind(kSimPrefix, 0) == 0) {
      auto config = ParseSimSpec(endpoint.substr(kSimPrefix.size()));
      return std::make_unique<SimulatedSut>(config, std::string(endpoint));
    }
    if (endpoint.rfind(kTcpPrefix, 0) == 0) {
      return std::make_unique<RemoteSut>(ParseTcpAddress(endpoint),
                                         std::string(endpoint));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("sut_endpoint", e.what());
  }
  throw ConfigError("sut_endpoint", "expected sim:<dist>:<params> or tcp:<host>:<port>, got '" +
                                        std::string(endpoint) + "'");
}

std::string FormatProfileTable() {
  char line[256];
  std::string out;
  std::snprintf(line, sizeof(line), "%-16s %6s %11s %6s %10s %7s %6s %9s %s\n",
                "profile", "inputs", "resolution", "tail", "constraint", "rate_hz",
                "metric", "reference", "sae_level");
  out += line;
  for (const auto& p : BuiltinProfiles()) {
    const std::string res =
        std::to_string(p.input_width_px) + "x" + std::to_string(p.input_height_px);
    std::snprintf(line, sizeof(line), "%-16s %6u %11s %6s %10s %7s %6s %9s %s\n",
                  p.name.c_str(), static_cast<unsigned>(p.inputs_per_query),
                  res.c_str(), FormatDouble(p.tail_percentile).c_str(),
                  FormatDouble(p.accuracy_constraint).c_str(),
                  p.constant_stream_hz ? FormatDouble(*p.constant_stream_hz).c_str() : "-",
                  p.metric_name.c_str(),
                  p.reference_metric ? FormatDouble(*p.reference_metric).c_str() : "-",
                  p.sae_level_note.c_str());
    out += line;
  }
  return out;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Latency and accuracy benchmark harness for automotive inference",
               "rtbench"};
  app.require_subcommand(1);

  app.add_subcommand("list-profiles", "Print the built-in benchmark profiles");

  RunFlags run_flags;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run one scenario and write the run log");
  AddRunFlags(run, run_flags);
  run->add_option("--out", run_out, "Log path (default: standard output)");

  RunFlags comp_flags;
  std::string comp_out, comp_test = "all";
  std::optional<uint64_t> comp_queries;
  double ratio_threshold = kDefaultRatioThreshold;
  double sample_fraction = kDefaultSampleFraction;
  auto* comp = app.add_subcommand("compliance", "Run the harness-defined compliance tests");
  AddRunFlags(comp, comp_flags);
  comp->add_option("--test", comp_test, "determinism, caching, accuracy_in_perf or all");
  comp->add_option("--queries", comp_queries, "Queries per determinism/caching run");
  comp->add_option("--ratio-threshold", ratio_threshold, "Caching test threshold");
  comp->add_option("--sample-fraction", sample_fraction,
                   "Fraction of queries retained for accuracy_in_perf");
  comp->add_option("--out", comp_out, "Verdict path (default: standard output)");

  std::string acc_profile, acc_gt, acc_pred, acc_out;
  std::optional<uint32_t> acc_classes;
  std::optional<double> acc_reference;
  double acc_iou = kDefaultIouThreshold;
  uint64_t acc_seed = 0;
  auto* acc = app.add_subcommand("accuracy", "Score predictions and write accuracy.txt");
  acc->add_option("--profile", acc_profile, "Benchmark profile")->required();
  acc->add_option("--ground-truth", acc_gt, "Ground truth file")->required();
  acc->add_option("--predictions", acc_pred, "Prediction file")->required();
  acc->add_option("--num-classes", acc_classes, "Segmentation class count");
  acc->add_option("--iou-threshold", acc_iou, "Detection match threshold");
  acc->add_option("--seed", acc_seed, "Seed of the matching performance run");
  acc->add_option("--reference", acc_reference,
                  "FP32 reference metric when the profile has none");
  acc->add_option("--out", acc_out, "Output path (default: standard output)");

  std::vector<std::string> val_bundles;
  std::string val_profile;
  auto* val = app.add_subcommand("validate", "Validate submission bundles");
  val->add_option("--bundle", val_bundles, "Bundle directory")->required();
  val->add_option("--profile", val_profile, "Override the profile named in the log");

  std::vector<std::string> rep_bundles;
  std::string rep_out;
  auto* rep = app.add_subcommand("report", "Summarize submission bundles as a table");
  rep->add_option("--bundle", rep_bundles, "Bundle directory")->required();
  rep->add_option("--out", rep_out, "Output path (default: standard output)");

  std::string stub_sut = "sim:fixed:10ms", stub_listen = "127.0.0.1:0";
  auto* stub = app.add_subcommand("serve-stub", "Serve a simulated SUT over TCP");
  stub->add_option("--sut", stub_sut, "sim:<dist>:<params>");
  stub->add_option("--listen", stub_listen, "host:port (port 0 picks one)");

  std::string conf_sut;
  auto* conf = app.add_subcommand("conformance", "Check a remote SUT against the wire protocol");
  conf->add_option("--sut", conf_sut, "tcp:<host>:<port>")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand("list-profiles")) return CmdListProfiles(out);
    if (run->parsed()) return CmdRun(run_flags, run_out, out, err);
    if (comp->parsed()) {
      return CmdCompliance(comp_flags, comp_test, comp_queries, ratio_threshold,
                           sample_fraction, comp_out, out, err);
    }
    if (acc->parsed()) {
      return CmdAccuracy(acc_profile, acc_gt, acc_pred, acc_classes, acc_iou, acc_seed,
                         acc_reference, acc_out, out, err);
    }
    if (val->parsed()) return CmdValidate(val_bundles, val_profile, out);
    if (rep->parsed()) return CmdReport(rep_bundles, rep_out, out, err);
    if (stub->parsed()) return CmdServeStub(stub_sut, stub_listen, out);
    if (conf->parsed()) return CmdConformance(conf_sut, out);
  } catch (const ConfigError& e) {
    err << "rtbench: config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "rtbench: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BundleError& e) {
    err << "rtbench: bundle error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const MetricsError& e) {
    err << "rtbench: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ComplianceError& e) {
    err << "rtbench: compliance: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "rtbench: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitUsage;
}

}  // namespace rtbench
