// pse/report/summary.hpp

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

#ifndef PSE_REPORT_SUMMARY_HPP_
#define PSE_REPORT_SUMMARY_HPP_

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "pse/error.hpp"
#include "pse/metrics/record.hpp"

namespace pse::report {

using metrics::Metric;
using metrics::MetricRecord;

/// What the "±" in a report means.
///   kSpread1p96: 1.96 x sample stddev (population spread; the default, and
///                what the published ± magnitudes correspond to)
///   kMeanCiT:    t(0.975, n-1) x stddev / sqrt(n), a 95% CI of the mean
enum class IntervalKind { kSpread1p96, kMeanCiT };

inline std::string_view IntervalKindName(IntervalKind k) {
  return k == IntervalKind::kSpread1p96 ? "spread_1p96" : "mean_ci_t";
}

inline IntervalKind ParseIntervalKind(std::string_view s) {
  if (s == "spread_1p96") return IntervalKind::kSpread1p96;
  if (s == "mean_ci_t") return IntervalKind::kMeanCiT;
  Fail(ErrorKind::kConfiguration, "unknown interval kind '" + std::string(s) +
                                      "' (expected spread_1p96 or mean_ci_t)");
}

enum class StatFlag {
  kNone,
  kSingleSample,    // n == 1: stddev undefined, reported as 0 with zero width
  kCorpusWeighted,  // WER: one corpus-level figure, no interval
};

inline std::string_view StatFlagName(StatFlag f) {
  switch (f) {
    case StatFlag::kNone: return "";
    case StatFlag::kSingleSample: return "single_sample";
    case StatFlag::kCorpusWeighted: return "corpus_weighted";
  }
  return "";
}

inline StatFlag ParseStatFlag(std::string_view s) {
  if (s.empty()) return StatFlag::kNone;
  if (s == "single_sample") return StatFlag::kSingleSample;
  if (s == "corpus_weighted") return StatFlag::kCorpusWeighted;
  Fail(ErrorKind::kFormat, "unknown stat flag '" + std::string(s) + "'");
}

/// How WER groups are reduced. kCorpus (default) sums edits over reference
/// words; kMeanOfRates averages per-utterance rates and gets an interval
/// like any other metric. Both are in percent.
enum class WerWeighting { kCorpus, kMeanOfRates };

struct SummaryStat {
  std::string condition;
  Metric metric = Metric::kSdr;
  std::int64_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation
  double interval_half_width = 0.0;
  IntervalKind interval_kind = IntervalKind::kSpread1p96;
  StatFlag flag = StatFlag::kNone;

  friend bool operator==(const SummaryStat &, const SummaryStat &) = default;
};

/// Mean and sample variance by two passes over the values with the usual
/// correction term for the residual sum. Values are summed in sorted order
/// so the result does not depend on input order.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // n - 1 denominator; 0 when n == 1
};

inline Moments ComputeMoments(std::vector<double> values) {
  if (values.empty()) Fail(ErrorKind::kInvalidArgument, "moments of an empty group");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0, residual = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
    residual += d;
  }
  Moments m;
  m.mean = mean;
  if (values.size() > 1) m.variance = std::max(0.0, (ss - residual * residual / n) / (n - 1.0));
  return m;
}

/// Two-sided 95% Student-t critical value with `df` degrees of freedom.
inline double StudentT975(double df) {
  return boost::math::quantile(boost::math::students_t_distribution<double>(df), 0.975);
}

/// Projects a '/'-separated condition label onto the selected key positions
/// (e.g. "XTTS-6min/M/real" with keys {0, 1} -> "XTTS-6min/M"). An empty
/// selection keeps the whole label.
inline std::string ProjectCondition(const std::string &condition,
                                    const std::vector<std::size_t> &keys) {
  if (keys.empty()) return condition;
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t slash = condition.find('/', start);
    parts.push_back(condition.substr(start, slash - start));
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  std::string out;
  for (std::size_t k : keys) {
    if (k >= parts.size())
      Fail(ErrorKind::kInvalidArgument, "condition '" + condition + "' has no key " +
                                            std::to_string(k));
    if (!out.empty()) out += '/';
    out += parts[k];
  }
  return out;
}

/// Per (condition, metric) aggregates in canonical order (condition
/// lexicographic, then metric column order). WER groups report the
/// error-weighted corpus WER in percent with no interval.
inline std::vector<SummaryStat> Summarize(const std::vector<MetricRecord> &records,
                                          const std::vector<std::size_t> &group_keys = {},
                                          IntervalKind kind = IntervalKind::kSpread1p96,
                                          WerWeighting wer = WerWeighting::kCorpus) {
  std::map<std::pair<std::string, Metric>, std::vector<const MetricRecord *>> groups;
  for (const auto &r : records) groups[{ProjectCondition(r.condition, group_keys), r.metric}]
                                    .push_back(&r);

  std::vector<SummaryStat> out;
  for (const auto &[key, members] : groups) {
    SummaryStat s;
    s.condition = key.first;
    s.metric = key.second;
    s.n = static_cast<std::int64_t>(members.size());
    s.interval_kind = kind;
    if (s.metric == Metric::kWer && wer == WerWeighting::kCorpus) {
      std::int64_t edits = 0, words = 0;
      for (const MetricRecord *r : members) {
        if (!r->wer_counts)
          Fail(ErrorKind::kValidation, "wer record for " + r->utterance_id +
                                           " lacks edit counts; corpus WER needs them");
        edits += r->wer_counts->edits;
        words += r->wer_counts->reference_words;
      }
      if (words == 0) Fail(ErrorKind::kValidation, "wer group " + s.condition + " has no words");
      s.mean = 100.0 * static_cast<double>(edits) / static_cast<double>(words);
      s.flag = StatFlag::kCorpusWeighted;
      out.push_back(s);
      continue;
    }
    std::vector<double> values;
    values.reserve(members.size());
    const double unit = s.metric == Metric::kWer ? 100.0 : 1.0;
    for (const MetricRecord *r : members) values.push_back(unit * r->value);
    const Moments m = ComputeMoments(std::move(values));
    s.mean = m.mean;
    if (s.n == 1) {
      s.flag = StatFlag::kSingleSample;
    } else {
      s.stddev = std::sqrt(m.variance);
      s.interval_half_width =
          kind == IntervalKind::kSpread1p96
              ? 1.96 * s.stddev
              : StudentT975(static_cast<double>(s.n - 1)) * s.stddev /
                    std::sqrt(static_cast<double>(s.n));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace pse::report

#endif  // PSE_REPORT_SUMMARY_HPP_
