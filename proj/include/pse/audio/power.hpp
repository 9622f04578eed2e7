// pse/audio/power.hpp

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

#ifndef PSE_AUDIO_POWER_HPP_
#define PSE_AUDIO_POWER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pse/audio/buffer.hpp"
#include "pse/error.hpp"

namespace pse::audio {

struct PowerStats {
  double rms = 0.0;
  double peak = 0.0;
  double active_power = 0.0;  // mean square over frames that pass the silence gate
};

/// Silence gate shared with eSTOI's convention: frames more than this far
/// below the loudest frame are not "speech".
inline constexpr double kActiveGateDb = 40.0;
inline constexpr double kActiveFrameSeconds = 0.032;

inline double MeanSquare(const AudioBuffer &buf) {
  if (buf.empty()) Fail(ErrorKind::kDegenerateInput, "mean square of empty buffer");
  double acc = 0.0;
  for (double x : buf.samples()) acc += x * x;
  return acc / static_cast<double>(buf.size());
}

/// Mean square restricted to 32 ms frames (50% hop) whose energy lies within
/// 40 dB of the loudest frame. Frames tile the buffer; when the hop grid
/// misses the tail a final frame is anchored to the end. Buffers shorter
/// than one frame form a single frame.
inline double ActivePower(const AudioBuffer &buf) {
  if (buf.empty()) Fail(ErrorKind::kDegenerateInput, "active power of empty buffer");
  const auto x = buf.samples();
  const std::size_t n = x.size();
  std::size_t frame = static_cast<std::size_t>(
      std::lround(kActiveFrameSeconds * buf.sample_rate_hz()));
  frame = std::clamp<std::size_t>(frame, 2, n);
  const std::size_t hop = std::max<std::size_t>(1, frame / 2);

  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + frame <= n; s += hop) starts.push_back(s);
  if (starts.back() + frame < n) starts.push_back(n - frame);

  std::vector<double> energy(starts.size());
  double loudest = 0.0;
  for (std::size_t f = 0; f < starts.size(); ++f) {
    double acc = 0.0;
    for (std::size_t i = starts[f]; i < starts[f] + frame; ++i) acc += x[i] * x[i];
    energy[f] = acc;
    loudest = std::max(loudest, acc);
  }
  if (loudest == 0.0) return 0.0;

  const double floor = loudest * std::pow(10.0, -kActiveGateDb / 10.0);
  double total = 0.0;
  std::size_t count = 0;
  for (double e : energy) {
    if (e >= floor) {
      total += e;
      count += frame;
    }
  }
  return total / static_cast<double>(count);
}

inline PowerStats MeasurePower(const AudioBuffer &buf) {
  if (buf.empty()) Fail(ErrorKind::kDegenerateInput, "cannot measure power of empty buffer");
  PowerStats stats;
  for (double x : buf.samples()) stats.peak = std::max(stats.peak, std::abs(x));
  stats.rms = std::sqrt(MeanSquare(buf));
  stats.active_power = ActivePower(buf);
  return stats;
}

}  // namespace pse::audio

#endif  // PSE_AUDIO_POWER_HPP_
