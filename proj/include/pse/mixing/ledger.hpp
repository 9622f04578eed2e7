// pse/mixing/ledger.hpp

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

#ifndef PSE_MIXING_LEDGER_HPP_
#define PSE_MIXING_LEDGER_HPP_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pse/error.hpp"
#include "pse/mixing/mixture.hpp"

namespace pse::mixing {

// Provenance ledger: one JSON object per line, keys sorted. realized_gain
// and joint_scale are null until the mixture has been synthesized.

inline nlohmann::json ToJson(const MixtureSpec &s) {
  nlohmann::json j;
  j["mixture_id"] = s.mixture_id;
  j["speaker_id"] = s.speaker_id;
  j["split"] = s.split;
  j["clean_id"] = s.clean_id;
  j["clean_path"] = s.clean_path;
  j["noise_id"] = s.noise_id;
  j["noise_path"] = s.noise_path;
  j["snr_db"] = s.snr_db;
  j["seed"] = s.seed;
  j["output_path"] = s.output_path;
  j["reference_path"] = s.reference_path;
  j["realized_gain"] = s.realized_gain ? nlohmann::json(*s.realized_gain) : nlohmann::json();
  j["joint_scale"] = s.joint_scale ? nlohmann::json(*s.joint_scale) : nlohmann::json();
  return j;
}

inline MixtureSpec MixtureSpecFromJson(const nlohmann::json &j) {
  try {
    MixtureSpec s;
    s.mixture_id = j.at("mixture_id").get<std::string>();
    s.speaker_id = j.at("speaker_id").get<std::string>();
    s.split = j.at("split").get<std::string>();
    s.clean_id = j.at("clean_id").get<std::string>();
    s.clean_path = j.at("clean_path").get<std::string>();
    s.noise_id = j.at("noise_id").get<std::string>();
    s.noise_path = j.at("noise_path").get<std::string>();
    s.snr_db = j.at("snr_db").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.output_path = j.at("output_path").get<std::string>();
    s.reference_path = j.at("reference_path").get<std::string>();
    if (j.contains("realized_gain") && !j["realized_gain"].is_null())
      s.realized_gain = j["realized_gain"].get<double>();
    if (j.contains("joint_scale") && !j["joint_scale"].is_null())
      s.joint_scale = j["joint_scale"].get<double>();
    return s;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, std::string("bad ledger record: ") + e.what());
  }
}

inline std::string SerializeLedger(const std::vector<MixtureSpec> &specs) {
  std::string out;
  for (const auto &s : specs) {
    out += ToJson(s).dump();
    out += '\n';
  }
  return out;
}

inline void WriteLedger(const std::vector<MixtureSpec> &specs,
                        const std::filesystem::path &path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write ledger " + path.string());
  out << SerializeLedger(specs);
  if (!out) Fail(ErrorKind::kIo, "write failed: " + path.string());
}

inline std::vector<MixtureSpec> ReadLedger(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open ledger " + path.string());
  std::vector<MixtureSpec> specs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
      throw Error(ErrorKind::kFormat, path.string() + ":" + std::to_string(line_no) + ": " +
                                          e.what());
    }
    specs.push_back(MixtureSpecFromJson(j));
  }
  return specs;
}

}  // namespace pse::mixing

#endif  // PSE_MIXING_LEDGER_HPP_
