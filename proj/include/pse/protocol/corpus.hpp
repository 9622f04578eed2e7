// pse/protocol/corpus.hpp

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

#ifndef PSE_PROTOCOL_CORPUS_HPP_
#define PSE_PROTOCOL_CORPUS_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pse/audio/wav.hpp"
#include "pse/error.hpp"
#include "pse/protocol/manifest.hpp"

namespace pse::protocol {

struct CorpusSpeaker {
  std::string speaker_id;
  SpeakerKind kind = SpeakerKind::kReal;
  Gender gender = Gender::kMale;
  std::vector<UtteranceRef> utterances;
};

/// Everything the manifest builder needs to know about the source audio.
struct CorpusIndex {
  std::vector<CorpusSpeaker> speakers;
  std::vector<NoiseRef> noises;
};

inline nlohmann::json ToJson(const CorpusIndex &c) {
  nlohmann::json j;
  j["speakers"] = nlohmann::json::array();
  for (const auto &s : c.speakers)
    j["speakers"].push_back({{"speaker_id", s.speaker_id},
                             {"kind", std::string(ToString(s.kind))},
                             {"gender", std::string(ToString(s.gender))},
                             {"utterances", ToJson(s.utterances)}});
  j["noises"] = nlohmann::json::array();
  for (const auto &n : c.noises) j["noises"].push_back({{"noise_id", n.noise_id}, {"path", n.path}});
  return j;
}

inline CorpusIndex CorpusIndexFromJson(const nlohmann::json &j) {
  try {
    CorpusIndex c;
    for (const auto &s : j.at("speakers"))
      c.speakers.push_back({s.at("speaker_id").get<std::string>(),
                            ParseSpeakerKind(s.at("kind").get<std::string>()),
                            ParseGender(s.at("gender").get<std::string>()),
                            UtterancesFromJson(s.at("utterances"))});
    for (const auto &n : j.at("noises"))
      c.noises.push_back({n.at("noise_id").get<std::string>(), n.at("path").get<std::string>()});
    return c;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, std::string("bad corpus index: ") + e.what());
  }
}

inline CorpusIndex ReadCorpusIndex(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open corpus index " + path.string());
  try {
    return CorpusIndexFromJson(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
}

namespace detail {

inline std::vector<std::filesystem::path> SortedWavs(const std::filesystem::path &dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto &e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".wav") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string ReadText(const std::filesystem::path &wav) {
  for (const char *suffix : {".normalized.txt", ".txt"}) {
    auto p = wav;
    p.replace_extension(suffix);
    std::ifstream in(p);
    if (in) {
      std::string text((std::istreambuf_iterator<char>(in)), {});
      while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
      return text;
    }
  }
  return {};
}

}  // namespace detail

/// Builds an index from a directory tree:
///   <root>/speakers.json        {"<speaker_id>": {"kind": "real", "gender": "f"}, ...}
///   <root>/<speaker_id>/**.wav  utterances; text from <stem>.normalized.txt or <stem>.txt
///   <root>/noise/**.wav         noise pool, id = file stem
/// Paths in the result are relative to <root>.
inline CorpusIndex ScanCorpus(const std::filesystem::path &root) {
  std::ifstream meta_in(root / "speakers.json");
  if (!meta_in) Fail(ErrorKind::kIo, "missing " + (root / "speakers.json").string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorKind::kFormat, "speakers.json: " + std::string(e.what()));
  }
  CorpusIndex index;
  for (const auto &[id, info] : meta.items()) {
    CorpusSpeaker s{id, ParseSpeakerKind(info.at("kind").get<std::string>()),
                    ParseGender(info.at("gender").get<std::string>()), {}};
    for (const auto &wav : detail::SortedWavs(root / id)) {
      const auto wav_info = audio::ReadWavInfo(wav);
      s.utterances.push_back({wav.stem().string(),
                              std::filesystem::relative(wav, root).generic_string(),
                              wav_info.duration_seconds(), detail::ReadText(wav)});
    }
    index.speakers.push_back(std::move(s));
  }
  for (const auto &wav : detail::SortedWavs(root / "noise"))
    index.noises.push_back({wav.stem().string(), std::filesystem::relative(wav, root).generic_string()});
  return index;
}

}  // namespace pse::protocol

#endif  // PSE_PROTOCOL_CORPUS_HPP_
