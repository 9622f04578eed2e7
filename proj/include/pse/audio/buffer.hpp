// pse/audio/buffer.hpp

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

#ifndef PSE_AUDIO_BUFFER_HPP_
#define PSE_AUDIO_BUFFER_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pse/error.hpp"

namespace pse::audio {

/// Evaluation rate every ingested signal is brought to.
inline constexpr int kEvalSampleRateHz = 16000;

/// Mono sample sequence plus its rate. Immutable once built: the constructor
/// rejects non-positive rates and non-finite samples, so every AudioBuffer
/// in flight is valid.
class AudioBuffer {
 public:
  AudioBuffer(std::vector<double> samples, int sample_rate_hz)
      : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
    if (sample_rate_hz_ <= 0)
      Fail(ErrorKind::kInvalidArgument,
           "sample rate must be positive, got " + std::to_string(sample_rate_hz_));
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (!std::isfinite(samples_[i]))
        Fail(ErrorKind::kInvalidArgument,
             "non-finite sample at index " + std::to_string(i));
    }
  }

  std::span<const double> samples() const noexcept { return samples_; }
  int sample_rate_hz() const noexcept { return sample_rate_hz_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double operator[](std::size_t i) const { return samples_[i]; }

  double duration_seconds() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }

  AudioBuffer scaled(double gain) const {
    std::vector<double> out(samples_);
    for (double &x : out) x *= gain;
    return AudioBuffer(std::move(out), sample_rate_hz_);
  }

  /// First `n` samples (n <= size()).
  AudioBuffer head(std::size_t n) const {
    if (n > samples_.size())
      Fail(ErrorKind::kInvalidArgument, "head() past end of buffer");
    return AudioBuffer(std::vector<double>(samples_.begin(), samples_.begin() + n),
                       sample_rate_hz_);
  }

  friend bool operator==(const AudioBuffer &, const AudioBuffer &) = default;

 private:
  std::vector<double> samples_;
  int sample_rate_hz_;
};

inline void RequireSameRate(const AudioBuffer &a, const AudioBuffer &b,
                            const char *what) {
  if (a.sample_rate_hz() != b.sample_rate_hz())
    Fail(ErrorKind::kAlignment,
         std::string(what) + ": sample rates differ (" +
             std::to_string(a.sample_rate_hz()) + " vs " +
             std::to_string(b.sample_rate_hz()) + ")");
}

inline void RequireSameLength(const AudioBuffer &a, const AudioBuffer &b,
                              const char *what) {
  RequireSameRate(a, b, what);
  if (a.size() != b.size())
    Fail(ErrorKind::kAlignment,
         std::string(what) + ": lengths differ (" + std::to_string(a.size()) +
             " vs " + std::to_string(b.size()) + ")");
}

}  // namespace pse::audio

#endif  // PSE_AUDIO_BUFFER_HPP_
