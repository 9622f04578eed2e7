// pse/protocol/planning.hpp

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

#ifndef PSE_PROTOCOL_PLANNING_HPP_
#define PSE_PROTOCOL_PLANNING_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pse/error.hpp"
#include "pse/mixing/mixture.hpp"
#include "pse/mixing/rng.hpp"
#include "pse/protocol/build.hpp"
#include "pse/protocol/manifest.hpp"

namespace pse::protocol {

using mixing::MixtureSpec;

enum class FinetuneRegime { kSixMin, kThirtyMin };

inline std::string_view ToString(FinetuneRegime r) {
  return r == FinetuneRegime::kSixMin ? "six_min" : "thirty_min";
}

inline FinetuneRegime ParseRegime(std::string_view s) {
  if (s == "six_min") return FinetuneRegime::kSixMin;
  if (s == "thirty_min") return FinetuneRegime::kThirtyMin;
  Fail(ErrorKind::kConfiguration, "regime must be six_min or thirty_min, got '" +
                                      std::string(s) + "'");
}

inline std::string MixtureId(const std::string &clean_id, const std::string &noise_id) {
  return clean_id + "__" + noise_id;
}

namespace detail {

inline void RequireValid(const ChallengeManifest &m, const char *who) {
  const ValidationReport report = ValidateManifest(m);
  if (report.valid()) return;
  std::vector<Diagnostic> diags;
  for (const auto &v : report.violations)
    diags.push_back({v.code, v.message, {{"speaker_id", v.speaker_id}, {"utterance_id", v.utterance_id}}});
  throw Error(ErrorKind::kValidation, std::string(who) + ": manifest is not valid", std::move(diags));
}

inline MixtureSpec PlanOne(const ChallengeManifest &m, const SpeakerEntry &s,
                           const UtteranceRef &clean, const std::string &noise_id,
                           const std::string &split, const std::string &dir, double snr_db) {
  MixtureSpec spec;
  spec.mixture_id = MixtureId(clean.utterance_id, noise_id);
  spec.speaker_id = s.speaker_id;
  spec.split = split;
  spec.clean_id = clean.utterance_id;
  spec.clean_path = clean.path;
  spec.noise_id = noise_id;
  spec.noise_path = m.FindNoise(noise_id)->path;
  spec.snr_db = snr_db;
  spec.seed = mixing::KeyHash(m.master_seed, {s.speaker_id, spec.mixture_id, split + "_mix"});
  spec.output_path = dir + "/" + s.speaker_id + "/" + spec.mixture_id + ".wav";
  spec.reference_path = dir + "/" + s.speaker_id + "/" + spec.mixture_id + ".clean.wav";
  return spec;
}

}  // namespace detail

/// Enhancement test set: per speaker, every test utterance crossed with every
/// assigned noise (9 x 5 = 45), each at an SNR drawn from {-2.5, 0, 2.5} dB.
inline std::vector<MixtureSpec> PlanPseTestset(const ChallengeManifest &m) {
  detail::RequireValid(m, "plan_pse_testset");
  const auto policy = mixing::PseTestSnrPolicy();
  std::vector<MixtureSpec> specs;
  for (const auto &s : m.speakers) {
    for (const auto &u : s.pse_test) {
      for (const auto &noise : s.noise_ids) {
        const std::string id = MixtureId(u.utterance_id, noise);
        const double snr =
            mixing::DrawSnr(policy, {s.speaker_id, id, "pse_test_snr"}, m.master_seed);
        specs.push_back(detail::PlanOne(m, s, u, noise, "pse_test", "pse_test", snr));
      }
    }
  }
  return specs;
}

struct FinetunePlan {
  std::vector<MixtureSpec> training;
  std::vector<MixtureSpec> validation;

  /// Training then validation, the order the ledger is written in.
  std::vector<MixtureSpec> all() const {
    std::vector<MixtureSpec> out = training;
    out.insert(out.end(), validation.begin(), validation.end());
    return out;
  }
};

/// Lists synthetic augmentation files the regime needs that are absent
/// under `audio_root`.
inline std::vector<Diagnostic> MissingAugmentationAudio(const ChallengeManifest &m,
                                                        FinetuneRegime regime,
                                                        const std::filesystem::path &audio_root) {
  std::vector<Diagnostic> missing;
  for (const auto &s : m.speakers) {
    std::vector<const std::vector<UtteranceRef> *> sets = {&s.augment_core};
    if (regime == FinetuneRegime::kThirtyMin) {
      sets.push_back(&s.augment_extra);
      sets.push_back(&s.validation_thirty_min);
    } else {
      sets.push_back(&s.validation_six_min);
    }
    for (const auto *set : sets)
      for (const auto &u : *set)
        if (!std::filesystem::exists(audio_root / u.path))
          missing.push_back({"missing_augmentation_audio", "no audio at " + u.path,
                             {{"speaker_id", s.speaker_id}, {"utterance_id", u.utterance_id}}});
  }
  return missing;
}

/// Fine-tuning ledger. Training targets are the 40 core synthetic utterances
/// (six_min) or those plus the 180 extra ones (thirty_min); validation uses
/// 10 or 30 held-out synthetic utterances. Each target gets one of the
/// speaker's noises and an SNR drawn uniformly from [-5, 5] dB. When
/// `audio_root` is non-empty, missing synthetic audio fails the plan.
inline FinetunePlan PlanFinetuneSet(const ChallengeManifest &m, FinetuneRegime regime,
                                    const std::filesystem::path &audio_root = {}) {
  detail::RequireValid(m, "plan_finetune_set");
  if (!audio_root.empty()) {
    auto missing = MissingAugmentationAudio(m, regime, audio_root);
    if (!missing.empty())
      throw Error(ErrorKind::kValidation, "augmentation audio is missing", std::move(missing));
  }
  const auto policy = mixing::FinetuneSnrPolicy();
  const std::string dir = "finetune/" + std::string(ToString(regime));
  FinetunePlan plan;
  auto plan_set = [&](const SpeakerEntry &s, const std::vector<UtteranceRef> &refs,
                      const std::string &split, std::vector<MixtureSpec> &out) {
    for (const auto &u : refs) {
      mixing::CounterRng pick(m.master_seed, {s.speaker_id, u.utterance_id, "finetune_noise"});
      const std::string &noise = s.noise_ids[pick.Below(s.noise_ids.size())];
      const double snr =
          mixing::DrawSnr(policy, {s.speaker_id, u.utterance_id, "finetune_snr"}, m.master_seed);
      out.push_back(detail::PlanOne(m, s, u, noise, split, dir, snr));
    }
  };
  for (const auto &s : m.speakers) {
    plan_set(s, s.augment_core, "train", plan.training);
    if (regime == FinetuneRegime::kThirtyMin) {
      plan_set(s, s.augment_extra, "train", plan.training);
      plan_set(s, s.validation_thirty_min, "validation", plan.validation);
    } else {
      plan_set(s, s.validation_six_min, "validation", plan.validation);
    }
  }
  return plan;
}

}  // namespace pse::protocol

#endif  // PSE_PROTOCOL_PLANNING_HPP_
