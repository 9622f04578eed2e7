// pse/cli/config.hpp

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

#ifndef PSE_CLI_CONFIG_HPP_
#define PSE_CLI_CONFIG_HPP_

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <system_error>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pse/audio/wav.hpp"
#include "pse/error.hpp"
#include "pse/report/summary.hpp"

namespace pse::cli {

/// Run configuration. The file is INI with flat sections; section names are
/// for grouping only and every key must be unique across the file, so a
/// command-line flag of the same name can override it.
///
///   [paths]
///   audio_root = corpus
///   manifest = out/manifest.json
///   output_dir = out
///   [run]
///   master_seed = 20240917
///   parallelism = 8
struct RunConfig {
  std::filesystem::path audio_root;
  std::filesystem::path manifest;
  std::uint64_t master_seed = 0;
  report::IntervalKind interval_kind = report::IntervalKind::kSpread1p96;
  std::filesystem::path pesq_adapter;  // empty: not configured
  std::filesystem::path mos_adapter;
  std::filesystem::path output_dir = ".";
  int parallelism = 1;
  audio::WavEncoding mix_encoding = audio::WavEncoding::kPcm16;
};

inline const std::set<std::string> &ConfigKeys() {
  static const std::set<std::string> keys = {
      "audio_root", "manifest",    "master_seed", "interval_kind", "pesq_adapter",
      "mos_adapter", "output_dir", "parallelism", "mix_encoding"};
  return keys;
}

namespace detail {

template <typename Int>
Int ParseInt(const std::string &key, const std::string &value) {
  Int out{};
  const char *end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end)
    Fail(ErrorKind::kConfiguration, key + ": not an integer: '" + value + "'");
  return out;
}

}  // namespace detail

/// Applies one key; unknown keys and malformed values are configuration
/// errors.
inline void SetKey(RunConfig &cfg, const std::string &key, const std::string &value) {
  if (key == "audio_root") {
    cfg.audio_root = value;
  } else if (key == "manifest") {
    cfg.manifest = value;
  } else if (key == "master_seed") {
    cfg.master_seed = detail::ParseInt<std::uint64_t>(key, value);
  } else if (key == "interval_kind") {
    try {
      cfg.interval_kind = report::ParseIntervalKind(value);
    } catch (const Error &e) {
      Fail(ErrorKind::kConfiguration, e.what());
    }
  } else if (key == "pesq_adapter") {
    cfg.pesq_adapter = value;
  } else if (key == "mos_adapter") {
    cfg.mos_adapter = value;
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "parallelism") {
    cfg.parallelism = detail::ParseInt<int>(key, value);
    if (cfg.parallelism < 1) Fail(ErrorKind::kConfiguration, "parallelism must be >= 1");
  } else if (key == "mix_encoding") {
    if (value == "pcm16") cfg.mix_encoding = audio::WavEncoding::kPcm16;
    else if (value == "float32") cfg.mix_encoding = audio::WavEncoding::kFloat32;
    else Fail(ErrorKind::kConfiguration, "mix_encoding must be pcm16 or float32");
  } else {
    Fail(ErrorKind::kConfiguration, "unknown config key '" + key + "'");
  }
}

/// Flattens the INI sections into key -> value, rejecting duplicates.
inline std::map<std::string, std::string> ReadConfigFile(const std::filesystem::path &path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error &e) {
    Fail(ErrorKind::kConfiguration, e.what());
  }
  std::map<std::string, std::string> flat;
  auto put = [&](const std::string &key, const std::string &value) {
    if (!flat.emplace(key, value).second)
      Fail(ErrorKind::kConfiguration, path.string() + ": key '" + key + "' set twice");
  };
  for (const auto &[name, node] : tree) {
    if (node.empty()) {
      put(name, node.data());
      continue;
    }
    for (const auto &[key, leaf] : node) put(key, leaf.data());
  }
  return flat;
}

/// File values first, then overrides (typically command-line flags).
inline RunConfig LoadConfig(const std::optional<std::filesystem::path> &file,
                            const std::map<std::string, std::string> &overrides = {}) {
  RunConfig cfg;
  if (file) {
    if (!std::filesystem::exists(*file))
      Fail(ErrorKind::kConfiguration, "config file " + file->string() + " does not exist");
    for (const auto &[k, v] : ReadConfigFile(*file)) SetKey(cfg, k, v);
  }
  for (const auto &[k, v] : overrides) SetKey(cfg, k, v);
  return cfg;
}

}  // namespace pse::cli

#endif  // PSE_CLI_CONFIG_HPP_
