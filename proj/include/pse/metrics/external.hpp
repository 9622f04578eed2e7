// pse/metrics/external.hpp

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

#ifndef PSE_METRICS_EXTERNAL_HPP_
#define PSE_METRICS_EXTERNAL_HPP_

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pse/error.hpp"
#include "pse/metrics/record.hpp"

namespace pse::metrics {

// External-metric adapter contract: the adapter is run as
//   <adapter> <pairs.tsv>
// where each line of pairs.tsv is "reference_path<TAB>estimate_path". It must
// print exactly one decimal score per input line, in order, on stdout, and
// exit 0. Anything else aborts the batch.

enum class ExternalMetricKind { kPesq, kMos };

struct ScoreRange {
  double low, high;
};

inline ScoreRange ValidRange(ExternalMetricKind kind) {
  return kind == ExternalMetricKind::kPesq ? ScoreRange{-0.5, 4.64} : ScoreRange{1.0, 5.0};
}

inline Metric ToMetric(ExternalMetricKind kind) {
  return kind == ExternalMetricKind::kPesq ? Metric::kPesq : Metric::kMos;
}

namespace detail {

inline std::string ShellQuote(const std::string &s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

// Private scratch directory per invocation so concurrent batches never share
// files. Removed on scope exit.
class ScratchDir {
 public:
  ScratchDir() {
    static std::atomic<unsigned long> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("pse-adapter-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) +
             "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir &) = delete;
  ScratchDir &operator=(const ScratchDir &) = delete;
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline bool ParseScore(std::string line, double &out) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
    line.pop_back();
  std::size_t b = line.find_first_not_of(" \t");
  if (b == std::string::npos) return false;
  const char *first = line.data() + b;
  const char *last = line.data() + line.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace detail

/// Scores a batch of (reference, estimate) file pairs through the adapter.
inline std::vector<double> RunExternalMetric(
    ExternalMetricKind kind, const std::filesystem::path &adapter,
    const std::vector<std::pair<std::filesystem::path, std::filesystem::path>> &pairs) {
  const std::string name = kind == ExternalMetricKind::kPesq ? "pesq" : "mos";
  if (adapter.empty())
    Fail(ErrorKind::kConfiguration, name + " adapter is not configured");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(adapter, ec) ||
      ::access(adapter.c_str(), X_OK) != 0)
    Fail(ErrorKind::kConfiguration,
         name + " adapter '" + adapter.string() + "' is missing or not executable");
  if (pairs.empty()) return {};

  detail::ScratchDir scratch;
  const auto manifest = scratch.path() / "pairs.tsv";
  {
    std::ofstream out(manifest);
    for (const auto &[ref, est] : pairs) out << ref.string() << '\t' << est.string() << '\n';
    if (!out) Fail(ErrorKind::kIo, "cannot write adapter manifest " + manifest.string());
  }

  const std::string cmd =
      detail::ShellQuote(adapter.string()) + " " + detail::ShellQuote(manifest.string());
  FILE *pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) Fail(ErrorKind::kIo, "cannot launch " + name + " adapter");
  std::string output;
  char chunk[4096];
  std::size_t got;
  while ((got = std::fread(chunk, 1, sizeof chunk, pipe)) > 0) output.append(chunk, got);
  const int status = ::pclose(pipe);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0)
    Fail(ErrorKind::kProtocol, name + " adapter exited with non-zero status");

  std::vector<double> scores;
  std::size_t start = 0;
  while (start < output.size()) {
    std::size_t end = output.find('\n', start);
    if (end == std::string::npos) end = output.size();
    std::string line = output.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    double v;
    if (!detail::ParseScore(line, v))
      Fail(ErrorKind::kProtocol, name + " adapter printed unparseable score '" + line + "'");
    scores.push_back(v);
  }
  if (scores.size() != pairs.size())
    Fail(ErrorKind::kProtocol, name + " adapter printed " + std::to_string(scores.size()) +
                                   " scores for " + std::to_string(pairs.size()) + " pairs");
  const ScoreRange range = ValidRange(kind);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!(scores[i] >= range.low && scores[i] <= range.high))
      Fail(ErrorKind::kValidation, name + " score " + std::to_string(scores[i]) + " for " +
                                       pairs[i].second.string() + " outside [" +
                                       std::to_string(range.low) + ", " +
                                       std::to_string(range.high) + "]");
  }
  return scores;
}

/// Single-pair convenience wrapper returning a ready record.
inline MetricRecord ExternalMetric(ExternalMetricKind kind, const std::filesystem::path &adapter,
                                   const std::filesystem::path &reference,
                                   const std::filesystem::path &estimate,
                                   std::string utterance_id, std::string condition = {}) {
  const auto scores = RunExternalMetric(kind, adapter, {{reference, estimate}});
  return MakeRecord(std::move(utterance_id), ToMetric(kind), scores.front(),
                    std::move(condition));
}

}  // namespace pse::metrics

#endif  // PSE_METRICS_EXTERNAL_HPP_
