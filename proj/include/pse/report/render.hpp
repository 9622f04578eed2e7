// pse/report/render.hpp

// Copyright 2026 The pse-eval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PSE_REPORT_RENDER_HPP_
#define PSE_REPORT_RENDER_HPP_

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "pse/error.hpp"
#include "pse/report/summary.hpp"

namespace pse::report {

enum class Format { kCsv, kJson, kMarkdown };

inline Format ParseFormat(std::string_view s) {
  if (s == "csv") return Format::kCsv;
  if (s == "json") return Format::kJson;
  if (s == "markdown" || s == "md") return Format::kMarkdown;
  Fail(ErrorKind::kConfiguration, "unknown report format '" + std::string(s) + "'");
}

namespace detail {

inline std::string Fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string Full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string CsvField(const std::string &s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
// line breaks.
inline std::vector<std::vector<std::string>> ParseCsv(const std::string &text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) Fail(ErrorKind::kFormat, "csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline double ParseDouble(const std::string &s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    Fail(ErrorKind::kFormat, "csv: bad number '" + s + "'");
  }
}

inline std::string IntervalNote(IntervalKind kind) {
  return kind == IntervalKind::kSpread1p96
             ? "± = 1.96 × sample standard deviation (spread_1p96)"
             : "± = 95% confidence interval of the mean, Student t (mean_ci_t)";
}

}  // namespace detail

inline void SortStats(std::vector<SummaryStat> &stats) {
  std::sort(stats.begin(), stats.end(), [](const SummaryStat &a, const SummaryStat &b) {
    return std::tie(a.condition, a.metric) < std::tie(b.condition, b.metric);
  });
}

inline constexpr std::string_view kCsvHeader =
    "condition,metric,n,mean,stddev,interval_half_width,interval_kind,flag";

inline std::string RenderCsv(std::vector<SummaryStat> stats) {
  SortStats(stats);
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto &s : stats) {
    out += detail::CsvField(s.condition) + ',' + std::string(metrics::MetricName(s.metric)) +
           ',' + std::to_string(s.n) + ',' + detail::Full(s.mean) + ',' +
           detail::Full(s.stddev) + ',' + detail::Full(s.interval_half_width) + ',' +
           std::string(IntervalKindName(s.interval_kind)) + ',' +
           std::string(StatFlagName(s.flag)) + '\n';
  }
  return out;
}

inline nlohmann::json StatToJson(const SummaryStat &s) {
  nlohmann::json j;
  j["condition"] = s.condition;
  j["metric"] = std::string(metrics::MetricName(s.metric));
  j["n"] = s.n;
  j["mean"] = s.mean;
  j["stddev"] = s.stddev;
  j["interval_half_width"] = s.interval_half_width;
  j["interval_kind"] = std::string(IntervalKindName(s.interval_kind));
  j["flag"] = std::string(StatFlagName(s.flag));
  return j;
}

/// {"metadata": {...}, "stats": [...]}, keys sorted, two-space indent.
inline std::string RenderJson(std::vector<SummaryStat> stats) {
  SortStats(stats);
  nlohmann::json doc;
  nlohmann::json arr = nlohmann::json::array();
  std::set<std::string> kinds;
  for (const auto &s : stats) {
    arr.push_back(StatToJson(s));
    kinds.insert(std::string(IntervalKindName(s.interval_kind)));
  }
  doc["stats"] = arr;
  doc["metadata"]["interval_kinds"] = kinds;
  doc["metadata"]["note"] =
      "spread_1p96 half-widths describe per-utterance spread, not uncertainty of the mean";
  return doc.dump(2) + "\n";
}

/// Markdown pipe table: one row per condition, metric columns in fixed
/// order (SDRI, SDR, eSTOI, PESQ, SECS, UTMOS, WER), only metrics present
/// in `stats`. Cells read "mean±half_width" at three decimals; WER is a
/// bare percentage. Absent cells are "-".
inline std::string RenderMarkdown(std::vector<SummaryStat> stats) {
  SortStats(stats);
  std::set<Metric> present;
  std::map<std::string, std::map<Metric, const SummaryStat *>> rows;
  std::set<IntervalKind> kinds;
  for (const auto &s : stats) {
    present.insert(s.metric);
    rows[s.condition][s.metric] = &s;
    if (s.flag != StatFlag::kCorpusWeighted) kinds.insert(s.interval_kind);
  }
  std::string out = "| Condition |";
  std::string rule = "|---|";
  for (Metric m : present) {
    out += " " + std::string(metrics::MetricLabel(m)) + " |";
    rule += "---:|";
  }
  out += "\n" + rule + "\n";
  for (const auto &[condition, cells] : rows) {
    out += "| " + condition + " |";
    for (Metric m : present) {
      const auto it = cells.find(m);
      if (it == cells.end()) {
        out += " - |";
      } else if (it->second->flag == StatFlag::kCorpusWeighted) {
        out += " " + detail::Fixed3(it->second->mean) + " |";
      } else {
        out += " " + detail::Fixed3(it->second->mean) + "±" +
               detail::Fixed3(it->second->interval_half_width) + " |";
      }
    }
    out += "\n";
  }
  for (IntervalKind k : kinds) out += "\n" + detail::IntervalNote(k) + "\n";
  return out;
}

inline std::string Render(const std::vector<SummaryStat> &stats, Format format) {
  switch (format) {
    case Format::kCsv: return RenderCsv(stats);
    case Format::kJson: return RenderJson(stats);
    case Format::kMarkdown: return RenderMarkdown(stats);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Readers for the machine formats, so stats files can be re-rendered.

inline SummaryStat StatFromJson(const nlohmann::json &j) {
  try {
    SummaryStat s;
    s.condition = j.at("condition").get<std::string>();
    s.metric = metrics::ParseMetric(j.at("metric").get<std::string>());
    s.n = j.at("n").get<std::int64_t>();
    s.mean = j.at("mean").get<double>();
    s.stddev = j.at("stddev").get<double>();
    s.interval_half_width = j.at("interval_half_width").get<double>();
    s.interval_kind = ParseIntervalKind(j.at("interval_kind").get<std::string>());
    s.flag = ParseStatFlag(j.at("flag").get<std::string>());
    return s;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, std::string("bad stats record: ") + e.what());
  }
}

inline std::vector<SummaryStat> ParseStatsJson(const std::string &text) {
  std::vector<SummaryStat> out;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto &j : doc.at("stats")) out.push_back(StatFromJson(j));
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, std::string("bad stats document: ") + e.what());
  }
  return out;
}

inline std::vector<SummaryStat> ParseStatsCsv(const std::string &text) {
  const auto rows = detail::ParseCsv(text);
  if (rows.empty()) Fail(ErrorKind::kFormat, "csv: missing header");
  std::vector<SummaryStat> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto &f = rows[r];
    if (f.size() != 8)
      Fail(ErrorKind::kFormat, "csv: row " + std::to_string(r) + " has " +
                                   std::to_string(f.size()) + " fields, expected 8");
    SummaryStat s;
    s.condition = f[0];
    s.metric = metrics::ParseMetric(f[1]);
    s.n = static_cast<std::int64_t>(detail::ParseDouble(f[2]));
    s.mean = detail::ParseDouble(f[3]);
    s.stddev = detail::ParseDouble(f[4]);
    s.interval_half_width = detail::ParseDouble(f[5]);
    s.interval_kind = ParseIntervalKind(f[6]);
    s.flag = ParseStatFlag(f[7]);
    out.push_back(s);
  }
  return out;
}

}  // namespace pse::report

#endif  // PSE_REPORT_RENDER_HPP_
