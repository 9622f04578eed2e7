// pse/protocol/manifest.hpp

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

#ifndef PSE_PROTOCOL_MANIFEST_HPP_
#define PSE_PROTOCOL_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pse/error.hpp"

namespace pse::protocol {

/// Fixed shape of a challenge run.
struct Rules {
  static constexpr int kSchemaVersion = 1;
  static constexpr std::size_t kSpeakersPerKind = 10;
  static constexpr std::size_t kSpeakersPerKindAndGender = 5;
  static constexpr std::size_t kSpeakers = 2 * kSpeakersPerKind;
  static constexpr std::size_t kNoisePool = 88;
  static constexpr std::size_t kNoisesPerSpeaker = 5;
  static constexpr std::size_t kTtsEval = 50;
  static constexpr std::size_t kPseTest = 9;
  static constexpr std::size_t kSourceUtterances = 1 + kTtsEval + kPseTest;  // 60
  static constexpr std::size_t kAugmentCore = 40;
  static constexpr std::size_t kAugmentExtra = 180;
  static constexpr std::size_t kValidationSixMin = 10;
  static constexpr std::size_t kValidationThirtyMin = 30;
  static constexpr double kEnrollmentMinSeconds = 3.0;
  static constexpr double kEnrollmentMaxSeconds = 14.0;
  static constexpr double kSourceMinSeconds = 3.0;
  static constexpr double kSourceMaxSeconds = 16.0;
};

enum class SpeakerKind { kReal, kVirtual };
enum class Gender { kMale, kFemale };

inline std::string_view ToString(SpeakerKind k) { return k == SpeakerKind::kReal ? "real" : "virtual"; }
inline std::string_view ToString(Gender g) { return g == Gender::kMale ? "m" : "f"; }

inline SpeakerKind ParseSpeakerKind(std::string_view s) {
  if (s == "real") return SpeakerKind::kReal;
  if (s == "virtual") return SpeakerKind::kVirtual;
  Fail(ErrorKind::kFormat, "speaker kind must be real or virtual, got '" + std::string(s) + "'");
}

inline Gender ParseGender(std::string_view s) {
  if (s == "m") return Gender::kMale;
  if (s == "f") return Gender::kFemale;
  Fail(ErrorKind::kFormat, "gender must be m or f, got '" + std::string(s) + "'");
}

struct UtteranceRef {
  std::string utterance_id;
  std::string path;  // relative to audio_root
  double duration_s = 0.0;
  std::string text;
  friend bool operator==(const UtteranceRef &, const UtteranceRef &) = default;
};

struct NoiseRef {
  std::string noise_id;
  std::string path;
  friend bool operator==(const NoiseRef &, const NoiseRef &) = default;
};

/// Real and virtual speakers share this layout; only `kind` differs.
struct SpeakerEntry {
  std::string speaker_id;
  SpeakerKind kind = SpeakerKind::kReal;
  Gender gender = Gender::kMale;
  std::vector<UtteranceRef> enrollment;  // exactly one when valid
  std::vector<UtteranceRef> tts_eval;
  std::vector<UtteranceRef> pse_test;
  std::vector<std::string> noise_ids;
  // Planned locations of synthetic audio written by a TTS adapter.
  std::vector<UtteranceRef> augment_core;
  std::vector<UtteranceRef> augment_extra;
  std::vector<UtteranceRef> validation_six_min;
  std::vector<UtteranceRef> validation_thirty_min;
  friend bool operator==(const SpeakerEntry &, const SpeakerEntry &) = default;
};

struct ChallengeManifest {
  int schema_version = Rules::kSchemaVersion;
  std::uint64_t master_seed = 0;
  std::string audio_root;
  std::vector<NoiseRef> noise_pool;
  std::vector<SpeakerEntry> speakers;
  friend bool operator==(const ChallengeManifest &, const ChallengeManifest &) = default;

  const SpeakerEntry *FindSpeaker(std::string_view id) const {
    for (const auto &s : speakers)
      if (s.speaker_id == id) return &s;
    return nullptr;
  }
  const NoiseRef *FindNoise(std::string_view id) const {
    for (const auto &n : noise_pool)
      if (n.noise_id == id) return &n;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json ToJson(const UtteranceRef &u) {
  return {{"utterance_id", u.utterance_id}, {"path", u.path},
          {"duration_s", u.duration_s}, {"text", u.text}};
}

inline UtteranceRef UtteranceFromJson(const nlohmann::json &j) {
  return UtteranceRef{j.at("utterance_id").get<std::string>(), j.at("path").get<std::string>(),
                      j.value("duration_s", 0.0), j.value("text", std::string())};
}

inline nlohmann::json ToJson(const std::vector<UtteranceRef> &v) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &u : v) arr.push_back(ToJson(u));
  return arr;
}

inline std::vector<UtteranceRef> UtterancesFromJson(const nlohmann::json &j) {
  std::vector<UtteranceRef> out;
  for (const auto &u : j) out.push_back(UtteranceFromJson(u));
  return out;
}

inline nlohmann::json ToJson(const ChallengeManifest &m) {
  nlohmann::json j;
  j["schema_version"] = m.schema_version;
  j["master_seed"] = m.master_seed;
  j["audio_root"] = m.audio_root;
  j["noise_pool"] = nlohmann::json::array();
  for (const auto &n : m.noise_pool)
    j["noise_pool"].push_back({{"noise_id", n.noise_id}, {"path", n.path}});
  j["speakers"] = nlohmann::json::array();
  for (const auto &s : m.speakers) {
    nlohmann::json e;
    e["speaker_id"] = s.speaker_id;
    e["kind"] = std::string(ToString(s.kind));
    e["gender"] = std::string(ToString(s.gender));
    e["enrollment"] = ToJson(s.enrollment);
    e["tts_eval"] = ToJson(s.tts_eval);
    e["pse_test"] = ToJson(s.pse_test);
    e["noise_ids"] = s.noise_ids;
    e["augment_core"] = ToJson(s.augment_core);
    e["augment_extra"] = ToJson(s.augment_extra);
    e["validation_six_min"] = ToJson(s.validation_six_min);
    e["validation_thirty_min"] = ToJson(s.validation_thirty_min);
    j["speakers"].push_back(e);
  }
  return j;
}

inline ChallengeManifest ManifestFromJson(const nlohmann::json &j) {
  try {
    ChallengeManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.audio_root = j.value("audio_root", std::string());
    for (const auto &n : j.at("noise_pool"))
      m.noise_pool.push_back({n.at("noise_id").get<std::string>(), n.at("path").get<std::string>()});
    for (const auto &e : j.at("speakers")) {
      SpeakerEntry s;
      s.speaker_id = e.at("speaker_id").get<std::string>();
      s.kind = ParseSpeakerKind(e.at("kind").get<std::string>());
      s.gender = ParseGender(e.at("gender").get<std::string>());
      s.enrollment = UtterancesFromJson(e.at("enrollment"));
      s.tts_eval = UtterancesFromJson(e.at("tts_eval"));
      s.pse_test = UtterancesFromJson(e.at("pse_test"));
      s.noise_ids = e.at("noise_ids").get<std::vector<std::string>>();
      s.augment_core = UtterancesFromJson(e.value("augment_core", nlohmann::json::array()));
      s.augment_extra = UtterancesFromJson(e.value("augment_extra", nlohmann::json::array()));
      s.validation_six_min =
          UtterancesFromJson(e.value("validation_six_min", nlohmann::json::array()));
      s.validation_thirty_min =
          UtterancesFromJson(e.value("validation_thirty_min", nlohmann::json::array()));
      m.speakers.push_back(std::move(s));
    }
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, std::string("bad manifest: ") + e.what());
  }
}

inline std::string SerializeManifest(const ChallengeManifest &m) {
  return ToJson(m).dump(2) + "\n";
}

inline void WriteManifest(const ChallengeManifest &m, const std::filesystem::path &path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write manifest " + path.string());
  out << SerializeManifest(m);
}

inline ChallengeManifest ReadManifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open manifest " + path.string());
  try {
    return ManifestFromJson(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
}

}  // namespace pse::protocol

#endif  // PSE_PROTOCOL_MANIFEST_HPP_
