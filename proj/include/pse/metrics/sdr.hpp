// pse/metrics/sdr.hpp

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

#ifndef PSE_METRICS_SDR_HPP_
#define PSE_METRICS_SDR_HPP_

#include <algorithm>
#include <cmath>

#include "pse/audio/buffer.hpp"
#include "pse/error.hpp"

namespace pse::metrics {

inline constexpr double kSdrCapDb = 100.0;

/// Plain energy-ratio SDR, 10 log10(sum s^2 / sum (s_hat - s)^2), clamped to
/// [-100, 100] dB. This is the quantity the fine-tuning loss negates, not the
/// BSS-Eval variant with a distortion filter. No implicit trimming: lengths
/// must already agree.
inline double Sdr(const audio::AudioBuffer &reference, const audio::AudioBuffer &estimate) {
  audio::RequireSameLength(reference, estimate, "sdr");
  double signal = 0.0, error = 0.0;
  const auto s = reference.samples();
  const auto e = estimate.samples();
  for (std::size_t i = 0; i < s.size(); ++i) {
    signal += s[i] * s[i];
    const double d = e[i] - s[i];
    error += d * d;
  }
  if (signal <= 0.0) Fail(ErrorKind::kDegenerateInput, "sdr: reference is silent");
  if (error == 0.0) return kSdrCapDb;
  return std::clamp(10.0 * std::log10(signal / error), -kSdrCapDb, kSdrCapDb);
}

/// SDR(reference, enhanced) - SDR(reference, noisy_input).
inline double Sdri(const audio::AudioBuffer &reference, const audio::AudioBuffer &noisy_input,
                   const audio::AudioBuffer &enhanced) {
  return Sdr(reference, enhanced) - Sdr(reference, noisy_input);
}

}  // namespace pse::metrics

#endif  // PSE_METRICS_SDR_HPP_
