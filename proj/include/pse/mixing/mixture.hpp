// pse/mixing/mixture.hpp

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

#ifndef PSE_MIXING_MIXTURE_HPP_
#define PSE_MIXING_MIXTURE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pse/audio/buffer.hpp"
#include "pse/audio/power.hpp"
#include "pse/error.hpp"
#include "pse/mixing/rng.hpp"

namespace pse::mixing {

using audio::AudioBuffer;

// ---------------------------------------------------------------------------
// SNR policies

class SnrPolicy {
 public:
  enum class Kind { kDiscreteSet, kUniformRange };

  static SnrPolicy Discrete(std::vector<double> values) {
    if (values.empty()) Fail(ErrorKind::kInvalidArgument, "discrete SNR set is empty");
    for (double v : values)
      if (!std::isfinite(v)) Fail(ErrorKind::kInvalidArgument, "non-finite SNR in set");
    SnrPolicy p;
    p.kind_ = Kind::kDiscreteSet;
    p.values_ = std::move(values);
    return p;
  }

  static SnrPolicy Uniform(double low, double high) {
    if (!(low <= high) || !std::isfinite(low) || !std::isfinite(high))
      Fail(ErrorKind::kInvalidArgument, "SNR range needs finite low <= high");
    SnrPolicy p;
    p.kind_ = Kind::kUniformRange;
    p.low_ = low;
    p.high_ = high;
    return p;
  }

  Kind kind() const { return kind_; }
  const std::vector<double> &values() const { return values_; }
  double low() const { return low_; }
  double high() const { return high_; }

 private:
  SnrPolicy() = default;
  Kind kind_ = Kind::kDiscreteSet;
  std::vector<double> values_;
  double low_ = 0.0, high_ = 0.0;
};

/// Test-set SNRs (dB).
inline SnrPolicy PseTestSnrPolicy() { return SnrPolicy::Discrete({-2.5, 0.0, 2.5}); }
/// Fine-tuning input SNR range (dB).
inline SnrPolicy FinetuneSnrPolicy() { return SnrPolicy::Uniform(-5.0, 5.0); }

inline double DrawSnr(const SnrPolicy &policy, const RngKey &key, std::uint64_t master_seed) {
  CounterRng rng(master_seed, key);
  if (policy.kind() == SnrPolicy::Kind::kDiscreteSet)
    return policy.values()[rng.Below(policy.values().size())];
  return policy.low() + (policy.high() - policy.low()) * rng.NextUnit();
}

// ---------------------------------------------------------------------------
// Gain solving

/// SNR of a (clean, noise component) pair: speech-gated clean power over
/// full-buffer noise mean square.
inline double MeasureSnrDb(const AudioBuffer &clean, const AudioBuffer &noise) {
  return 10.0 * std::log10(audio::ActivePower(clean) / audio::MeanSquare(noise));
}

/// Noise gain g such that MeasureSnrDb(clean, g * noise) == snr_db.
inline double SolveGain(const AudioBuffer &clean, const AudioBuffer &noise, double snr_db) {
  audio::RequireSameRate(clean, noise, "solve_gain");
  if (!std::isfinite(snr_db)) Fail(ErrorKind::kInvalidArgument, "non-finite target SNR");
  if (clean.empty() || noise.empty())
    Fail(ErrorKind::kDegenerateInput, "solve_gain: empty input");
  const double p_clean = audio::ActivePower(clean);
  const double p_noise = audio::MeanSquare(noise);
  if (p_clean <= 0.0) Fail(ErrorKind::kDegenerateInput, "solve_gain: clean signal is silent");
  if (p_noise <= 0.0) Fail(ErrorKind::kDegenerateInput, "solve_gain: noise signal is silent");
  return std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));
}

// ---------------------------------------------------------------------------
// Mixture synthesis

/// One mixing job and, once synthesized, its realized gain. The tuple
/// (clean_id, noise_id, snr_db, seed) determines the output samples.
struct MixtureSpec {
  std::string mixture_id;
  std::string speaker_id;
  std::string split;  // pse_test | train | validation
  std::string clean_id;
  std::string clean_path;  // relative to audio_root
  std::string noise_id;
  std::string noise_path;  // relative to audio_root
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  std::string output_path;     // noisy mixture, relative to the output root
  std::string reference_path;  // clean reference stored alongside
  std::optional<double> realized_gain;
  std::optional<double> joint_scale;

  friend bool operator==(const MixtureSpec &, const MixtureSpec &) = default;
};

inline constexpr double kPeakLimit = 0.999;

struct MixtureResult {
  AudioBuffer mixture;
  AudioBuffer reference;  // clean, scaled by the same joint factor
  double realized_gain;
  double joint_scale;  // 1 unless peak normalization kicked in
};

/// Noise cropped or cyclically tiled to `length` samples from a start offset
/// drawn from `seed`. Longer noise is cropped without wrapping.
inline AudioBuffer NoiseSegment(const AudioBuffer &noise, std::size_t length,
                                std::uint64_t seed) {
  if (noise.empty()) Fail(ErrorKind::kDegenerateInput, "noise buffer is empty");
  CounterRng rng(seed);
  const std::size_t n = noise.size();
  std::vector<double> out(length);
  if (n >= length) {
    const std::size_t offset = rng.Below(n - length + 1);
    for (std::size_t i = 0; i < length; ++i) out[i] = noise[offset + i];
  } else {
    const std::size_t offset = rng.Below(n);
    for (std::size_t i = 0; i < length; ++i) out[i] = noise[(offset + i) % n];
  }
  return AudioBuffer(std::move(out), noise.sample_rate_hz());
}

/// clean + g * noise_segment, output length = clean length. When either the
/// mixture or the clean reference would exceed 0.999 in magnitude, both are
/// scaled together by 0.999 / peak so their relative scaling (and therefore
/// SDR and eSTOI) is untouched.
inline MixtureResult SynthesizeMixture(const MixtureSpec &spec, const AudioBuffer &clean,
                                       const AudioBuffer &noise) {
  audio::RequireSameRate(clean, noise, "synthesize_mixture");
  if (clean.empty()) Fail(ErrorKind::kDegenerateInput, "clean utterance is empty");
  const AudioBuffer segment = NoiseSegment(noise, clean.size(), spec.seed);
  const double gain = SolveGain(clean, segment, spec.snr_db);

  std::vector<double> mix(clean.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    mix[i] = clean[i] + gain * segment[i];
    peak = std::max({peak, std::abs(mix[i]), std::abs(clean[i])});
  }
  double scale = 1.0;
  if (peak > kPeakLimit) scale = kPeakLimit / peak;
  if (scale == 1.0)
    return {AudioBuffer(std::move(mix), clean.sample_rate_hz()), clean, gain, 1.0};
  for (double &v : mix) v *= scale;
  return {AudioBuffer(std::move(mix), clean.sample_rate_hz()), clean.scaled(scale), gain,
          scale};
}

// ---------------------------------------------------------------------------
// Noise assignment

/// Per speaker, `per_speaker` distinct noise ids drawn without replacement
/// from the pool. The pool is sorted first, so the result depends only on
/// its contents and the seed.
inline std::map<std::string, std::vector<std::string>> AssignNoises(
    const std::vector<std::string> &speakers, std::vector<std::string> pool,
    std::size_t per_speaker, std::uint64_t master_seed) {
  std::sort(pool.begin(), pool.end());
  if (std::adjacent_find(pool.begin(), pool.end()) != pool.end())
    Fail(ErrorKind::kInvalidArgument, "noise pool contains duplicate ids");
  if (pool.size() < per_speaker)
    Fail(ErrorKind::kInvalidArgument, "noise pool has " + std::to_string(pool.size()) +
                                          " ids, need " + std::to_string(per_speaker));
  std::map<std::string, std::vector<std::string>> out;
  for (const std::string &speaker : speakers) {
    CounterRng rng(master_seed, RngKey{speaker, "", "noise_assignment"});
    std::vector<std::string> deck = pool;
    for (std::size_t i = 0; i < per_speaker; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.Below(deck.size() - i));
      std::swap(deck[i], deck[j]);
    }
    deck.resize(per_speaker);
    out[speaker] = std::move(deck);
  }
  return out;
}

}  // namespace pse::mixing

#endif  // PSE_MIXING_MIXTURE_HPP_
