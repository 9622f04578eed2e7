// pse/metrics/record.hpp

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

#ifndef PSE_METRICS_RECORD_HPP_
#define PSE_METRICS_RECORD_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "pse/error.hpp"

namespace pse::metrics {

/// Closed metric set. Declaration order is the report column order: the
/// enhancement block first, then the TTS block.
enum class Metric { kSdri, kSdr, kEstoi, kPesq, kSecs, kMos, kWer };

inline constexpr std::array<Metric, 7> kAllMetrics = {
    Metric::kSdri, Metric::kSdr, Metric::kEstoi, Metric::kPesq,
    Metric::kSecs, Metric::kMos, Metric::kWer};

inline std::string_view MetricName(Metric m) {
  switch (m) {
    case Metric::kSdri: return "sdri";
    case Metric::kSdr: return "sdr";
    case Metric::kEstoi: return "estoi";
    case Metric::kPesq: return "pesq";
    case Metric::kSecs: return "secs";
    case Metric::kMos: return "mos";
    case Metric::kWer: return "wer";
  }
  return "";
}

/// Column heading used in rendered tables.
inline std::string_view MetricLabel(Metric m) {
  switch (m) {
    case Metric::kSdri: return "SDRI";
    case Metric::kSdr: return "SDR";
    case Metric::kEstoi: return "eSTOI";
    case Metric::kPesq: return "PESQ";
    case Metric::kSecs: return "SECS";
    case Metric::kMos: return "UTMOS";
    case Metric::kWer: return "WER (%)";
  }
  return "";
}

inline Metric ParseMetric(std::string_view name) {
  for (Metric m : kAllMetrics)
    if (MetricName(m) == name) return m;
  Fail(ErrorKind::kFormat, "unknown metric name '" + std::string(name) + "'");
}

/// Edit counts behind a per-utterance WER, kept so corpus WER can be
/// error-weighted rather than a mean of rates.
struct WerCounts {
  std::int64_t edits = 0;
  std::int64_t reference_words = 0;
  friend bool operator==(const WerCounts &, const WerCounts &) = default;
};

struct MetricRecord {
  std::string utterance_id;
  Metric metric = Metric::kSdr;
  double value = 0.0;
  std::string condition;
  std::optional<WerCounts> wer_counts;

  friend bool operator==(const MetricRecord &, const MetricRecord &) = default;
};

inline MetricRecord MakeRecord(std::string utterance_id, Metric metric, double value,
                               std::string condition) {
  if (!std::isfinite(value))
    Fail(ErrorKind::kValidation, "non-finite " + std::string(MetricName(metric)) +
                                     " value for " + utterance_id);
  return MetricRecord{std::move(utterance_id), metric, value, std::move(condition), {}};
}

/// Canonical order: condition, utterance, metric column order.
inline void SortRecords(std::vector<MetricRecord> &records) {
  std::sort(records.begin(), records.end(), [](const MetricRecord &a, const MetricRecord &b) {
    return std::tie(a.condition, a.utterance_id, a.metric) <
           std::tie(b.condition, b.utterance_id, b.metric);
  });
}

inline nlohmann::json ToJson(const MetricRecord &r) {
  nlohmann::json j;
  j["utterance_id"] = r.utterance_id;
  j["metric"] = std::string(MetricName(r.metric));
  j["value"] = r.value;
  j["condition"] = r.condition;
  if (r.wer_counts) {
    j["edits"] = r.wer_counts->edits;
    j["reference_words"] = r.wer_counts->reference_words;
  }
  return j;
}

inline MetricRecord MetricRecordFromJson(const nlohmann::json &j) {
  try {
    MetricRecord r = MakeRecord(j.at("utterance_id").get<std::string>(),
                                ParseMetric(j.at("metric").get<std::string>()),
                                j.at("value").get<double>(),
                                j.value("condition", std::string()));
    if (j.contains("edits"))
      r.wer_counts = WerCounts{j.at("edits").get<std::int64_t>(),
                               j.at("reference_words").get<std::int64_t>()};
    return r;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, std::string("bad metric record: ") + e.what());
  }
}

/// JSON lines, one record per line.
inline std::string SerializeRecords(const std::vector<MetricRecord> &records) {
  std::string out;
  for (const auto &r : records) {
    out += ToJson(r).dump();
    out += '\n';
  }
  return out;
}

inline void WriteRecords(const std::vector<MetricRecord> &records,
                         const std::filesystem::path &path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path.string());
  out << SerializeRecords(records);
  if (!out) Fail(ErrorKind::kIo, "write failed: " + path.string());
}

/// Accepts JSON lines or a single JSON array of records.
inline std::vector<MetricRecord> ReadRecords(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), {});
  std::vector<MetricRecord> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return out;
  try {
    if (text[first] == '[') {
      for (const auto &j : nlohmann::json::parse(text)) out.push_back(MetricRecordFromJson(j));
      return out;
    }
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out.push_back(MetricRecordFromJson(nlohmann::json::parse(line)));
    }
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace pse::metrics

#endif  // PSE_METRICS_RECORD_HPP_
