// pse/protocol/evaluation.hpp

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

#ifndef PSE_PROTOCOL_EVALUATION_HPP_
#define PSE_PROTOCOL_EVALUATION_HPP_

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pse/audio/wav.hpp"
#include "pse/error.hpp"
#include "pse/metrics/embedding.hpp"
#include "pse/metrics/estoi.hpp"
#include "pse/metrics/external.hpp"
#include "pse/metrics/record.hpp"
#include "pse/metrics/sdr.hpp"
#include "pse/metrics/text.hpp"
#include "pse/mixing/mixture.hpp"
#include "pse/protocol/manifest.hpp"
#include "pse/util/parallel.hpp"

namespace pse::protocol {

using metrics::Metric;
using metrics::MetricRecord;

/// Largest enhanced-vs-reference length difference reconciled by trimming
/// (10 ms at 16 kHz). Anything larger is treated as misalignment.
inline constexpr std::size_t kMaxTrimSamples = 160;

inline std::string ConditionLabel(const std::string &label, const SpeakerEntry &s) {
  return label.empty() ? std::string(ToString(s.kind)) : label + "/" + std::string(ToString(s.kind));
}

/// Submission path for one test mixture: <root>/<speaker_id>/<mixture_id>.wav
inline std::filesystem::path EnhancedPath(const std::filesystem::path &root,
                                          const mixing::MixtureSpec &spec) {
  return root / spec.speaker_id / (spec.mixture_id + ".wav");
}

struct PseEvalOptions {
  std::string label;                    // e.g. "XTTS-6min/M"; speaker kind is appended
  std::filesystem::path mixtures_root;  // where the ledger's output/reference paths live
  std::filesystem::path enhanced_root;
  std::filesystem::path pesq_adapter;   // empty: no PESQ column
  int parallelism = 1;
};

/// SDR, SDRI and eSTOI (plus PESQ when an adapter is configured) for every
/// test mixture in the ledger. Submissions must be 16 kHz WAV; enhanced,
/// noisy and reference signals are trimmed to the shortest when they differ
/// by at most 160 samples. Either every planned mixture is scored or the
/// call fails with one diagnostic per missing or misaligned submission.
inline std::vector<MetricRecord> RunPseEval(const ChallengeManifest &manifest,
                                            const std::vector<mixing::MixtureSpec> &ledger,
                                            const PseEvalOptions &opt) {
  std::vector<const mixing::MixtureSpec *> jobs;
  for (const auto &s : ledger)
    if (s.split == "pse_test") jobs.push_back(&s);

  std::vector<Diagnostic> gaps;
  for (const auto *s : jobs) {
    auto where = [&](std::map<std::string, std::string> extra = {}) {
      extra["speaker_id"] = s->speaker_id;
      extra["mixture_id"] = s->mixture_id;
      return extra;
    };
    if (manifest.FindSpeaker(s->speaker_id) == nullptr) {
      gaps.push_back({"unknown_speaker", "ledger speaker not in manifest", where()});
      continue;
    }
    const auto path = EnhancedPath(opt.enhanced_root, *s);
    if (!std::filesystem::exists(path)) {
      gaps.push_back({"missing_submission", "no enhanced file at " + path.string(),
                      where({{"path", path.string()}})});
      continue;
    }
    try {
      const auto enhanced = audio::ReadWavInfo(path);
      const auto reference = audio::ReadWavInfo(opt.mixtures_root / s->reference_path);
      if (enhanced.sample_rate_hz != audio::kEvalSampleRateHz) {
        gaps.push_back({"wrong_sample_rate",
                        "enhanced file is " + std::to_string(enhanced.sample_rate_hz) +
                            " Hz, submissions must be 16000 Hz",
                        where({{"path", path.string()}})});
        continue;
      }
      const std::size_t diff = enhanced.frames > reference.frames ? enhanced.frames - reference.frames
                                                                  : reference.frames - enhanced.frames;
      if (diff > kMaxTrimSamples)
        gaps.push_back({"length_mismatch",
                        "enhanced has " + std::to_string(enhanced.frames) + " samples, reference " +
                            std::to_string(reference.frames) + " (tolerance 160)",
                        where({{"path", path.string()}})});
    } catch (const Error &e) {
      gaps.push_back({"unreadable_submission", e.what(), where({{"path", path.string()}})});
    }
  }
  if (!gaps.empty()) {
    std::string what = std::to_string(gaps.size()) + " of " + std::to_string(jobs.size()) +
                       " test mixtures lack a usable submission";
    throw Error(ErrorKind::kCoverage, std::move(what), std::move(gaps));
  }

  const bool with_pesq = !opt.pesq_adapter.empty();
  const std::size_t per_job = with_pesq ? 4 : 3;
  std::vector<MetricRecord> records(jobs.size() * per_job);
  util::ParallelFor(jobs.size(), opt.parallelism, [&](std::size_t i) {
    const auto &s = *jobs[i];
    const std::string condition = ConditionLabel(opt.label, *manifest.FindSpeaker(s.speaker_id));
    const auto reference = audio::ReadWav(opt.mixtures_root / s.reference_path);
    const auto noisy = audio::ReadWav(opt.mixtures_root / s.output_path);
    const auto enhanced = audio::ReadWav(EnhancedPath(opt.enhanced_root, s));
    if (enhanced.sample_rate_hz() != reference.sample_rate_hz())
      Fail(ErrorKind::kAlignment, s.mixture_id + ": reference is not at 16 kHz");
    const std::size_t n = std::min({reference.size(), noisy.size(), enhanced.size()});
    const auto ref = reference.head(n), in = noisy.head(n), out = enhanced.head(n);
    records[i * per_job + 0] = metrics::MakeRecord(s.mixture_id, Metric::kSdri,
                                                   metrics::Sdri(ref, in, out), condition);
    records[i * per_job + 1] =
        metrics::MakeRecord(s.mixture_id, Metric::kSdr, metrics::Sdr(ref, out), condition);
    records[i * per_job + 2] =
        metrics::MakeRecord(s.mixture_id, Metric::kEstoi, metrics::Estoi(ref, out), condition);
  });

  if (with_pesq) {
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> pairs;
    for (const auto *s : jobs)
      pairs.emplace_back(opt.mixtures_root / s->reference_path, EnhancedPath(opt.enhanced_root, *s));
    const auto scores =
        metrics::RunExternalMetric(metrics::ExternalMetricKind::kPesq, opt.pesq_adapter, pairs);
    for (std::size_t i = 0; i < jobs.size(); ++i)
      records[i * per_job + 3] = metrics::MakeRecord(
          jobs[i]->mixture_id, Metric::kPesq, scores[i],
          ConditionLabel(opt.label, *manifest.FindSpeaker(jobs[i]->speaker_id)));
  }
  metrics::SortRecords(records);
  return records;
}

// ---------------------------------------------------------------------------

struct TtsEvalInputs {
  std::string label;  // e.g. "XTTS"; speaker kind is appended
  metrics::TranscriptSet hypotheses;
  std::vector<metrics::EmbeddingVector> generated;  // keyed by TTS-eval utterance id
  std::vector<metrics::EmbeddingVector> reference;  // keyed by enrollment utterance id
  std::optional<std::vector<MetricRecord>> mos;     // absent: no UTMOS column
};

/// Per generated utterance: SECS against the speaker's enrollment centroid
/// and WER of the ASR hypothesis against the utterance text, plus merged MOS
/// records when supplied. Every one of the 50 utterances per speaker must be
/// covered; gaps are reported per speaker and utterance.
inline std::vector<MetricRecord> RunTtsEval(const ChallengeManifest &manifest,
                                            const TtsEvalInputs &in) {
  std::map<std::string, const metrics::EmbeddingVector *> generated, reference;
  std::set<std::size_t> dims;
  for (const auto &v : in.generated) {
    generated[v.utterance_id] = &v;
    dims.insert(v.dim());
  }
  for (const auto &v : in.reference) {
    reference[v.utterance_id] = &v;
    dims.insert(v.dim());
  }
  if (dims.size() > 1)
    Fail(ErrorKind::kDimensionMismatch, "generated and reference embeddings disagree on dimension");
  std::map<std::string, const MetricRecord *> mos;
  if (in.mos)
    for (const auto &r : *in.mos)
      if (r.metric == Metric::kMos) mos[r.utterance_id] = &r;

  std::vector<Diagnostic> gaps;
  auto gap = [&](const char *code, const SpeakerEntry &s, const std::string &utt) {
    gaps.push_back({code, std::string(code) + " for " + utt,
                    {{"speaker_id", s.speaker_id}, {"utterance_id", utt}}});
  };
  for (const auto &s : manifest.speakers) {
    bool have_ref = false;
    for (const auto &e : s.enrollment) have_ref = have_ref || reference.count(e.utterance_id);
    if (!have_ref)
      gap("missing_reference_embedding", s,
          s.enrollment.empty() ? std::string() : s.enrollment.front().utterance_id);
    for (const auto &u : s.tts_eval) {
      if (!in.hypotheses.count(u.utterance_id)) gap("missing_hypothesis", s, u.utterance_id);
      if (!generated.count(u.utterance_id)) gap("missing_generated_embedding", s, u.utterance_id);
      if (in.mos && !mos.count(u.utterance_id)) gap("missing_mos", s, u.utterance_id);
    }
  }
  if (!gaps.empty()) {
    std::string what = std::to_string(gaps.size()) + " TTS evaluation inputs are missing";
    throw Error(ErrorKind::kCoverage, std::move(what), std::move(gaps));
  }

  std::vector<MetricRecord> records;
  for (const auto &s : manifest.speakers) {
    const std::string condition = ConditionLabel(in.label, s);
    std::vector<metrics::EmbeddingVector> refs, gens;
    for (const auto &e : s.enrollment)
      if (reference.count(e.utterance_id)) refs.push_back(*reference.at(e.utterance_id));
    for (const auto &u : s.tts_eval) gens.push_back(*generated.at(u.utterance_id));
    for (auto &r : metrics::SpeakerSecs(gens, refs, condition)) records.push_back(std::move(r));

    for (const auto &u : s.tts_eval) {
      const auto ref_tokens = metrics::NormalizeText(u.text);
      if (ref_tokens.empty())
        Fail(ErrorKind::kValidation, u.utterance_id + ": reference text normalizes to nothing");
      const auto counts = metrics::Align(ref_tokens, metrics::NormalizeText(in.hypotheses.at(u.utterance_id)));
      auto rec = metrics::MakeRecord(u.utterance_id, Metric::kWer, counts.rate(), condition);
      rec.wer_counts = metrics::WerCounts{counts.edits(), counts.reference_length};
      records.push_back(std::move(rec));
      if (in.mos)
        records.push_back(metrics::MakeRecord(u.utterance_id, Metric::kMos,
                                              mos.at(u.utterance_id)->value, condition));
    }
  }
  metrics::SortRecords(records);
  return records;
}

}  // namespace pse::protocol

#endif  // PSE_PROTOCOL_EVALUATION_HPP_
