// pse/audio/resample.hpp

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

#ifndef PSE_AUDIO_RESAMPLE_HPP_
#define PSE_AUDIO_RESAMPLE_HPP_

#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <vector>

#include "pse/audio/buffer.hpp"
#include "pse/error.hpp"

namespace pse::audio {

/// Stopband rejection of the general-purpose resampler. The Kaiser length
/// formula undershoots by a fraction of a dB at small ratios, so the design
/// target sits above the 60 dB the resampler must guarantee.
inline constexpr double kDefaultRejectionDb = 65.0;

/// Rejection used inside eSTOI so its 10 kHz front end matches the
/// Octave-style resampler of the reference implementation.
inline constexpr double kEstoiRejectionDb = 60.0;

/// Kaiser-windowed sinc low-pass for rational conversion by up/down
/// (already reduced by their gcd). Cutoff sits at the lower Nyquist with a
/// transition band one tenth of the cutoff wide. Taps are normalized to unit
/// DC gain and then multiplied by `up` to undo the zero stuffing.
inline std::vector<double> DesignResampleFilter(int up, int down, double rejection_db) {
  const double cutoff = 1.0 / (2.0 * std::max(up, down));
  const double roll_off = cutoff / 10.0;
  const long half = static_cast<long>(std::ceil((rejection_db - 8.0) / (28.714 * roll_off)));

  double beta = 0.0;
  if (rejection_db > 50.0)
    beta = 0.1102 * (rejection_db - 8.7);
  else if (rejection_db >= 21.0)
    beta = 0.5842 * std::pow(rejection_db - 21.0, 0.4) + 0.07886 * (rejection_db - 21.0);

  const long taps = 2 * half + 1;
  std::vector<double> h(static_cast<std::size_t>(taps));
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  double sum = 0.0;
  for (long n = 0; n < taps; ++n) {
    const double t = static_cast<double>(n - half);
    const double arg = 2.0 * cutoff * t;
    const double sinc =
        t == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
    const double r = 2.0 * static_cast<double>(n) / static_cast<double>(taps - 1) - 1.0;
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / i0_beta;
    h[static_cast<std::size_t>(n)] = window * 2.0 * up * cutoff * sinc;
    sum += h[static_cast<std::size_t>(n)];
  }
  for (double &v : h) v = v / sum * up;
  return h;
}

/// Polyphase rational resampling with a zero-phase (centered) filter.
/// Output length is ceil(n * target / source). Equal rates return the input
/// unchanged.
inline AudioBuffer Resample(const AudioBuffer &buf, int target_hz,
                            double rejection_db = kDefaultRejectionDb) {
  if (target_hz <= 0)
    Fail(ErrorKind::kInvalidArgument,
         "resample target rate must be positive, got " + std::to_string(target_hz));
  const int source_hz = buf.sample_rate_hz();
  if (source_hz == target_hz) return buf;

  const int g = std::gcd(source_hz, target_hz);
  const long up = target_hz / g;
  const long down = source_hz / g;
  const std::vector<double> h =
      DesignResampleFilter(static_cast<int>(up), static_cast<int>(down), rejection_db);
  const long half = static_cast<long>(h.size() - 1) / 2;
  const long taps = static_cast<long>(h.size());

  const long n_in = static_cast<long>(buf.size());
  const long n_out = (n_in * up + down - 1) / down;
  const auto x = buf.samples();
  std::vector<double> y(static_cast<std::size_t>(n_out), 0.0);
  for (long n = 0; n < n_out; ++n) {
    // y[n] = sum_k x[k] h[n*down + half - k*up] over taps inside the filter
    const long t = n * down + half;
    long k_lo = t - (taps - 1) <= 0 ? 0 : (t - (taps - 1) + up - 1) / up;
    long k_hi = std::min(t / up, n_in - 1);
    double acc = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) acc += x[static_cast<std::size_t>(k)] *
                                               h[static_cast<std::size_t>(t - k * up)];
    y[static_cast<std::size_t>(n)] = acc;
  }
  return AudioBuffer(std::move(y), target_hz);
}

}  // namespace pse::audio

#endif  // PSE_AUDIO_RESAMPLE_HPP_
