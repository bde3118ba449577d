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

#include "rtbench/run_log.h"

#include <algorithm>
#include <charconv>
#include <map>

#include "rtbench/digest.h"

namespace rtbench {

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

template <typename T>
std::string Num(T v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string Sanitize(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

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

class FieldParser {
 public:
  explicit FieldParser(int line) : line_(line) {}

  template <typename T>
  T Int(std::string_view s, const char* name) const {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      Fail(std::string("bad ") + name + " '" + std::string(s) + "'");
    }
    return v;
  }

  double Real(std::string_view s, const char* name) const {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      Fail(std::string("bad ") + name + " '" + std::string(s) + "'");
    }
    return v;
  }

  [[noreturn]] void Fail(const std::string& message) const {
    throw LogFormatError(line_, message);
  }

 private:
  int line_;
};

void AppendField(std::string& out, std::string_view field) {
  out += ',';
  out += field;
}

}  // namespace

std::string FormatRecord(const LogRecord& record) {
  std::string out;
  std::visit(
      [&out](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, HeaderRecord>) {
          const auto& s = r.settings;
          out = "H";
          AppendField(out, Num(r.version));
          AppendField(out, r.profile);
          AppendField(out, ToString(s.scenario));
          AppendField(out, ToString(s.mode));
          AppendField(out, Num(s.seed));
          AppendField(out, Num(s.min_duration_ns));
          AppendField(out, Num(s.min_query_count));
          AppendField(out, Num(s.store_size));
          AppendField(out, Num(s.sample_bytes));
          AppendField(out, s.rate_override_hz ? FormatDouble(*s.rate_override_hz) : "");
          AppendField(out, s.sut_endpoint);
        } else if constexpr (std::is_same_v<T, IssueRecord>) {
          out = "I";
          AppendField(out, Num(r.query_id));
          AppendField(out, r.scheduled_ns ? Num(*r.scheduled_ns) : "");
          AppendField(out, Num(r.issue_ns));
          std::string indices;
          for (size_t i = 0; i < r.sample_indices.size(); ++i) {
            if (i) indices += ';';
            indices += Num(r.sample_indices[i]);
          }
          AppendField(out, indices);
        } else if constexpr (std::is_same_v<T, CompleteRecord>) {
          out = "C";
          AppendField(out, Num(r.query_id));
          AppendField(out, Num(r.completion_ns));
          AppendField(out, DigestToHex(r.response_digest));
        } else if constexpr (std::is_same_v<T, SummaryRecord>) {
          const auto& s = r.summary;
          out = "S";
          for (auto v : {s.count}) AppendField(out, Num(v));
          for (auto v : {s.min_ns, s.mean_ns, s.max_ns, s.p50_ns, s.p90_ns, s.p99_ns,
                         s.p999_ns}) {
            AppendField(out, Num(v));
          }
          AppendField(out, Num(s.overrun_count));
          AppendField(out, Num(s.duration_ns));
          AppendField(out, FormatDouble(s.completed_per_second));
        } else if constexpr (std::is_same_v<T, VerdictRecord>) {
          out = "V";
          AppendField(out, r.verdict.test_name);
          AppendField(out, r.verdict.passed ? "1" : "0");
          std::string evidence;
          for (const auto& [k, v] : r.verdict.evidence) {
            if (!evidence.empty()) evidence += ';';
            evidence += k + "=" + FormatDouble(v);
          }
          AppendField(out, evidence);
        } else if constexpr (std::is_same_v<T, FailureRecord>) {
          out = "F," + Sanitize(r.message);
        }
      },
      record);
  return out;
}

std::string WriteLog(std::span<const LogRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += FormatRecord(r);
    out += '\n';
  }
  return out;
}

namespace {

// Calls fn(line, line_number) for every non-empty line; strips '\r'.
template <typename Fn>
void ForEachLine(std::string_view text, Fn fn) {
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos
                                                       : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line, line_no);
  }
}

LogRecord ParseRecord(std::string_view line, int line_no) {
  FieldParser p(line_no);
  if (line.size() < 2 || line[1] != ',') p.Fail("malformed record");
  const char tag = line[0];
  if (tag == 'F') {
    return FailureRecord{std::string(line.substr(2))};
  }
  auto f = Split(line, ',');
  auto want = [&](size_t n) {
    if (f.size() != n) {
      p.Fail(std::string("'") + tag + "' record has " + std::to_string(f.size()) +
             " fields, expected " + std::to_string(n));
    }
  };

  switch (tag) {
    case 'H': {
      if (f.size() >= 2) {
        int version = p.Int<int>(f[1], "version");
        if (version != kLogFormatVersion) {
          p.Fail("unsupported log format version " + std::to_string(version));
        }
      }
      want(12);
      HeaderRecord h;
      h.profile = std::string(f[2]);
      h.settings.profile = h.profile;
      auto scenario = ParseScenario(f[3]);
      if (!scenario) p.Fail("bad scenario");
      h.settings.scenario = *scenario;
      auto mode = ParseMode(f[4]);
      if (!mode) p.Fail("bad mode");
      h.settings.mode = *mode;
      h.settings.seed = p.Int<uint64_t>(f[5], "seed");
      h.settings.min_duration_ns = p.Int<int64_t>(f[6], "min_duration_ns");
      h.settings.min_query_count = p.Int<uint64_t>(f[7], "min_query_count");
      h.settings.store_size = p.Int<uint32_t>(f[8], "store_size");
      h.settings.sample_bytes = p.Int<uint64_t>(f[9], "sample_bytes");
      if (!f[10].empty()) h.settings.rate_override_hz = p.Real(f[10], "rate");
      h.settings.sut_endpoint = std::string(f[11]);
      return h;
    }
    case 'I': {
      want(5);
      IssueRecord r;
      r.query_id = p.Int<uint64_t>(f[1], "query_id");
      if (!f[2].empty()) r.scheduled_ns = p.Int<int64_t>(f[2], "scheduled_ns");
      r.issue_ns = p.Int<int64_t>(f[3], "issue_ns");
      if (!f[4].empty()) {
        for (auto idx : Split(f[4], ';')) {
          r.sample_indices.push_back(p.Int<uint32_t>(idx, "sample index"));
        }
      }
      return r;
    }
    case 'C': {
      want(4);
      CompleteRecord r;
      r.query_id = p.Int<uint64_t>(f[1], "query_id");
      r.completion_ns = p.Int<int64_t>(f[2], "completion_ns");
      auto digest = DigestFromHex(f[3]);
      if (!digest) p.Fail("bad digest '" + std::string(f[3]) + "'");
      r.response_digest = *digest;
      return r;
    }
    case 'S': {
      want(12);
      RunSummary s;
      s.count = p.Int<uint64_t>(f[1], "count");
      s.min_ns = p.Int<int64_t>(f[2], "min_ns");
      s.mean_ns = p.Int<int64_t>(f[3], "mean_ns");
      s.max_ns = p.Int<int64_t>(f[4], "max_ns");
      s.p50_ns = p.Int<int64_t>(f[5], "p50_ns");
      s.p90_ns = p.Int<int64_t>(f[6], "p90_ns");
      s.p99_ns = p.Int<int64_t>(f[7], "p99_ns");
      s.p999_ns = p.Int<int64_t>(f[8], "p999_ns");
      s.overrun_count = p.Int<uint64_t>(f[9], "overrun_count");
      s.duration_ns = p.Int<int64_t>(f[10], "duration_ns");
      s.completed_per_second = p.Real(f[11], "completed_per_second");
      return SummaryRecord{s};
    }
    case 'V': {
      want(4);
      ComplianceVerdict v;
      v.test_name = std::string(f[1]);
      if (f[2] != "0" && f[2] != "1") p.Fail("verdict must be 0 or 1");
      v.passed = f[2] == "1";
      if (!f[3].empty()) {
        for (auto kv : Split(f[3], ';')) {
          auto eq = kv.find('=');
          if (eq == std::string_view::npos || eq == 0) p.Fail("bad evidence entry");
          v.evidence[std::string(kv.substr(0, eq))] =
              p.Real(kv.substr(eq + 1), "evidence value");
        }
      }
      return VerdictRecord{std::move(v)};
    }
    default:
      p.Fail(std::string("unknown record tag '") + tag + "'");
  }
}

}  // namespace

std::vector<LogRecord> ParseLog(std::string_view text) {
  std::vector<LogRecord> out;
  bool seen_summary = false;
  ForEachLine(text, [&](std::string_view line, int line_no) {
    const char tag = line[0];
    if (out.empty() && tag != 'H') {
      throw LogFormatError(line_no, "log must start with a header record");
    }
    if (!out.empty() && tag == 'H') {
      throw LogFormatError(line_no, "duplicate header record");
    }
    if (seen_summary && (tag == 'I' || tag == 'C' || tag == 'S')) {
      throw LogFormatError(line_no, "record after the summary");
    }
    out.push_back(ParseRecord(line, line_no));
    if (tag == 'S') seen_summary = true;
  });
  if (out.empty()) throw LogFormatError(0, "empty log");
  return out;
}

std::vector<ComplianceVerdict> ParseVerdictLines(std::string_view text) {
  std::vector<ComplianceVerdict> out;
  ForEachLine(text, [&](std::string_view line, int line_no) {
    auto record = ParseRecord(line, line_no);
    auto* v = std::get_if<VerdictRecord>(&record);
    if (!v) throw LogFormatError(line_no, "expected a verdict record");
    out.push_back(std::move(v->verdict));
  });
  return out;
}

std::vector<LogRecord> RecordsFromRun(const RunLog& log,
                                      const std::optional<RunSummary>& summary) {
  std::vector<LogRecord> out;
  out.reserve(2 * log.trace.size() + 2);
  HeaderRecord h;
  h.profile = log.profile_name;
  h.settings = log.settings;
  h.settings.profile = log.profile_name;
  out.push_back(std::move(h));
  for (const auto& e : log.trace) {
    out.push_back(IssueRecord{e.query.query_id, e.query.scheduled_ns,
                              e.query.issue_ns, e.query.sample_indices});
    if (e.completion) {
      out.push_back(CompleteRecord{e.completion->query_id,
                                   e.completion->completion_ns,
                                   e.completion->response_digest});
    }
  }
  if (log.failure) out.push_back(FailureRecord{*log.failure});
  if (summary) out.push_back(SummaryRecord{*summary});
  return out;
}

RunLog RunLogFromRecords(std::span<const LogRecord> records) {
  RunLog log;
  std::map<uint64_t, CompleteRecord> completions;
  for (const auto& record : records) {
    if (auto* h = std::get_if<HeaderRecord>(&record)) {
      log.profile_name = h->profile;
      log.settings = h->settings;
      log.settings.profile = h->profile;
    } else if (auto* i = std::get_if<IssueRecord>(&record)) {
      Query q;
      q.query_id = i->query_id;
      q.scheduled_ns = i->scheduled_ns;
      q.issue_ns = i->issue_ns;
      q.sample_indices = i->sample_indices;
      log.trace.push_back(TraceEntry{std::move(q), std::nullopt});
    } else if (auto* c = std::get_if<CompleteRecord>(&record)) {
      completions[c->query_id] = *c;
    } else if (auto* f = std::get_if<FailureRecord>(&record)) {
      log.failure = f->message;
    }
  }
  std::sort(log.trace.begin(), log.trace.end(),
            [](const TraceEntry& a, const TraceEntry& b) {
              return a.query.query_id < b.query.query_id;
            });
  int64_t last = 0;
  for (auto& e : log.trace) {
    auto it = completions.find(e.query.query_id);
    if (it == completions.end()) continue;
    Completion c;
    c.query_id = it->second.query_id;
    c.completion_ns = it->second.completion_ns;
    c.response_digest = it->second.response_digest;
    last = std::max(last, c.completion_ns);
    e.completion = std::move(c);
  }
  log.wall_start_ns = 0;
  log.wall_end_ns = last;
  log.overrun_count = CountOverruns(log.trace);
  return log;
}

RunSummary RecomputeSummary(std::span<const LogRecord> records) {
  return Summarize(RunLogFromRecords(records));
}

std::optional<RunSummary> EmbeddedSummary(std::span<const LogRecord> records) {
  for (const auto& r : records) {
    if (auto* s = std::get_if<SummaryRecord>(&r)) return s->summary;
  }
  return std::nullopt;
}

std::vector<ComplianceVerdict> Verdicts(std::span<const LogRecord> records) {
  std::vector<ComplianceVerdict> out;
  for (const auto& r : records) {
    if (auto* v = std::get_if<VerdictRecord>(&r)) out.push_back(v->verdict);
  }
  return out;
}

}  // namespace rtbench
