// pse/protocol/build.hpp

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

#ifndef PSE_PROTOCOL_BUILD_HPP_
#define PSE_PROTOCOL_BUILD_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pse/error.hpp"
#include "pse/mixing/mixture.hpp"
#include "pse/mixing/rng.hpp"
#include "pse/protocol/corpus.hpp"
#include "pse/protocol/manifest.hpp"

namespace pse::protocol {

namespace detail {

inline bool InRange(double v, double lo, double hi) { return v >= lo && v <= hi; }

inline std::string Seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

inline std::vector<UtteranceRef> SyntheticRefs(const std::string &speaker, const char *stem,
                                               std::size_t count) {
  std::vector<UtteranceRef> out;
  for (std::size_t i = 0; i < count; ++i) {
    char id[64];
    std::snprintf(id, sizeof id, "%s_%s_%03zu", speaker.c_str(), stem, i);
    out.push_back({id, "augment/" + speaker + "/" + id + ".wav", 0.0, ""});
  }
  return out;
}

}  // namespace detail

/// Seeded 1 / 50 / 9 split per speaker plus noise assignment.
///
/// Only utterances of 3-16 s qualify; the enrollment utterance is drawn from
/// the qualifying ones that are at most 14 s long, and the remaining
/// qualifying utterances are shuffled and cut into 50 TTS-evaluation and 9
/// enhancement-test utterances. Augmentation and validation entries are
/// planned paths under augment/<speaker>/ for the TTS adapter to fill.
/// Speakers with too few qualifying utterances fail the whole build with one
/// diagnostic per speaker plus one per out-of-range file.
inline ChallengeManifest BuildManifest(const CorpusIndex &index, std::uint64_t master_seed,
                                       std::string audio_root = {}) {
  std::vector<Diagnostic> problems;
  ChallengeManifest m;
  m.master_seed = master_seed;
  m.audio_root = std::move(audio_root);
  m.noise_pool = index.noises;
  std::sort(m.noise_pool.begin(), m.noise_pool.end(),
            [](const NoiseRef &a, const NoiseRef &b) { return a.noise_id < b.noise_id; });

  std::vector<CorpusSpeaker> speakers = index.speakers;
  std::sort(speakers.begin(), speakers.end(),
            [](const CorpusSpeaker &a, const CorpusSpeaker &b) { return a.speaker_id < b.speaker_id; });

  for (const auto &cs : speakers) {
    std::vector<UtteranceRef> qualifying;
    std::vector<Diagnostic> rejected;
    for (const auto &u : cs.utterances) {
      if (detail::InRange(u.duration_s, Rules::kSourceMinSeconds, Rules::kSourceMaxSeconds)) {
        qualifying.push_back(u);
      } else {
        rejected.push_back({"duration_out_of_range",
                            u.utterance_id + " lasts " + detail::Seconds(u.duration_s) +
                                " s, outside [3, 16] s",
                            {{"speaker_id", cs.speaker_id},
                             {"utterance_id", u.utterance_id},
                             {"path", u.path}}});
      }
    }
    std::sort(qualifying.begin(), qualifying.end(),
              [](const UtteranceRef &a, const UtteranceRef &b) { return a.utterance_id < b.utterance_id; });

    std::vector<std::size_t> enrollable;
    for (std::size_t i = 0; i < qualifying.size(); ++i)
      if (qualifying[i].duration_s <= Rules::kEnrollmentMaxSeconds) enrollable.push_back(i);

    if (qualifying.size() < Rules::kSourceUtterances || enrollable.empty()) {
      problems.push_back(
          {"insufficient_utterances",
           cs.speaker_id + " has " + std::to_string(qualifying.size()) +
               " qualifying utterances (need " + std::to_string(Rules::kSourceUtterances) +
               (enrollable.empty() ? ", and one of at most 14 s for enrollment)" : ")"),
           {{"speaker_id", cs.speaker_id}}});
      problems.insert(problems.end(), rejected.begin(), rejected.end());
      continue;
    }

    mixing::CounterRng rng(master_seed, mixing::RngKey{cs.speaker_id, "", "split"});
    const std::size_t enroll_idx = enrollable[rng.Below(enrollable.size())];
    SpeakerEntry e;
    e.speaker_id = cs.speaker_id;
    e.kind = cs.kind;
    e.gender = cs.gender;
    e.enrollment.push_back(qualifying[enroll_idx]);
    std::vector<UtteranceRef> rest;
    for (std::size_t i = 0; i < qualifying.size(); ++i)
      if (i != enroll_idx) rest.push_back(qualifying[i]);
    for (std::size_t i = 0; i + 1 < rest.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.Below(rest.size() - i));
      std::swap(rest[i], rest[j]);
    }
    auto by_id = [](const UtteranceRef &a, const UtteranceRef &b) {
      return a.utterance_id < b.utterance_id;
    };
    e.tts_eval.assign(rest.begin(), rest.begin() + Rules::kTtsEval);
    e.pse_test.assign(rest.begin() + Rules::kTtsEval,
                      rest.begin() + Rules::kTtsEval + Rules::kPseTest);
    std::sort(e.tts_eval.begin(), e.tts_eval.end(), by_id);
    std::sort(e.pse_test.begin(), e.pse_test.end(), by_id);
    e.augment_core = detail::SyntheticRefs(cs.speaker_id, "core", Rules::kAugmentCore);
    e.augment_extra = detail::SyntheticRefs(cs.speaker_id, "extra", Rules::kAugmentExtra);
    e.validation_six_min = detail::SyntheticRefs(cs.speaker_id, "val6", Rules::kValidationSixMin);
    e.validation_thirty_min =
        detail::SyntheticRefs(cs.speaker_id, "val30", Rules::kValidationThirtyMin);
    m.speakers.push_back(std::move(e));
  }
  if (!problems.empty())
    throw Error(ErrorKind::kValidation,
                "corpus cannot supply the required utterance splits", std::move(problems));

  std::vector<std::string> speaker_ids, pool_ids;
  for (const auto &s : m.speakers) speaker_ids.push_back(s.speaker_id);
  for (const auto &n : m.noise_pool) pool_ids.push_back(n.noise_id);
  auto assignment =
      mixing::AssignNoises(speaker_ids, pool_ids, Rules::kNoisesPerSpeaker, master_seed);
  for (auto &s : m.speakers) s.noise_ids = assignment.at(s.speaker_id);
  return m;
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string code;
  std::string speaker_id;
  std::string utterance_id;
  std::string message;
  friend bool operator==(const Violation &, const Violation &) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

/// Checks every manifest invariant and lists each violation; never throws
/// for data problems.
inline ValidationReport ValidateManifest(const ChallengeManifest &m) {
  ValidationReport report;
  auto add = [&](std::string code, std::string speaker, std::string utt, std::string msg) {
    report.violations.push_back({std::move(code), std::move(speaker), std::move(utt), std::move(msg)});
  };
  auto count_check = [&](const std::string &speaker, const char *what, std::size_t got,
                         std::size_t want) {
    if (got != want)
      add(std::string(what) + "_count", speaker, "",
          std::string(what) + " has " + std::to_string(got) + " entries, expected " +
              std::to_string(want));
  };

  if (m.schema_version != Rules::kSchemaVersion)
    add("schema_version", "", "", "unsupported schema version " + std::to_string(m.schema_version));

  std::set<std::string> pool;
  for (const auto &n : m.noise_pool)
    if (!pool.insert(n.noise_id).second)
      add("duplicate_noise", "", "", "noise id " + n.noise_id + " listed twice");
  if (m.noise_pool.size() != Rules::kNoisePool)
    add("noise_pool_size", "", "", "noise pool has " + std::to_string(m.noise_pool.size()) +
                                       " ids, expected " + std::to_string(Rules::kNoisePool));

  if (m.speakers.size() != Rules::kSpeakers)
    add("speaker_count", "", "", std::to_string(m.speakers.size()) + " speakers, expected " +
                                     std::to_string(Rules::kSpeakers));
  std::map<std::pair<SpeakerKind, Gender>, std::size_t> cells;
  std::set<std::string> speaker_ids;
  for (const auto &s : m.speakers) {
    ++cells[{s.kind, s.gender}];
    if (!speaker_ids.insert(s.speaker_id).second)
      add("duplicate_speaker", s.speaker_id, "", "speaker listed twice");
  }
  for (SpeakerKind k : {SpeakerKind::kReal, SpeakerKind::kVirtual}) {
    for (Gender g : {Gender::kMale, Gender::kFemale}) {
      const std::size_t got = cells[{k, g}];
      if (got != Rules::kSpeakersPerKindAndGender)
        add("speaker_balance", "", "",
            std::to_string(got) + " " + std::string(ToString(k)) + "/" +
                std::string(ToString(g)) + " speakers, expected " +
                std::to_string(Rules::kSpeakersPerKindAndGender));
    }
  }

  for (const auto &s : m.speakers) {
    const std::string &sid = s.speaker_id;
    count_check(sid, "enrollment", s.enrollment.size(), 1);
    count_check(sid, "tts_eval", s.tts_eval.size(), Rules::kTtsEval);
    count_check(sid, "pse_test", s.pse_test.size(), Rules::kPseTest);
    count_check(sid, "noise_ids", s.noise_ids.size(), Rules::kNoisesPerSpeaker);
    count_check(sid, "augment_core", s.augment_core.size(), Rules::kAugmentCore);
    count_check(sid, "augment_extra", s.augment_extra.size(), Rules::kAugmentExtra);
    count_check(sid, "validation_six_min", s.validation_six_min.size(), Rules::kValidationSixMin);
    count_check(sid, "validation_thirty_min", s.validation_thirty_min.size(),
                Rules::kValidationThirtyMin);

    for (const auto &u : s.enrollment)
      if (!detail::InRange(u.duration_s, Rules::kEnrollmentMinSeconds, Rules::kEnrollmentMaxSeconds))
        add("enrollment_duration", sid, u.utterance_id,
            "enrollment lasts " + detail::Seconds(u.duration_s) + " s, outside [3, 14] s");

    std::set<std::string> seen;
    for (const auto *split : {&s.enrollment, &s.tts_eval, &s.pse_test}) {
      for (const auto &u : *split) {
        if (!detail::InRange(u.duration_s, Rules::kSourceMinSeconds, Rules::kSourceMaxSeconds))
          add("source_duration", sid, u.utterance_id,
              "utterance lasts " + detail::Seconds(u.duration_s) + " s, outside [3, 16] s");
        if (!seen.insert(u.utterance_id).second)
          add("split_overlap", sid, u.utterance_id, "utterance appears in more than one split slot");
      }
    }
    for (const auto &u : s.tts_eval)
      if (u.text.find_first_not_of(" \t\r\n") == std::string::npos)
        add("missing_text", sid, u.utterance_id, "TTS evaluation utterance has no text");

    std::set<std::string> noises;
    for (const auto &n : s.noise_ids) {
      if (!noises.insert(n).second) add("duplicate_speaker_noise", sid, "", "noise " + n + " assigned twice");
      if (!pool.count(n)) add("unknown_noise", sid, "", "noise " + n + " is not in the pool");
    }
  }
  return report;
}

}  // namespace pse::protocol

#endif  // PSE_PROTOCOL_BUILD_HPP_
