// pse/metrics/estoi.hpp

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

#ifndef PSE_METRICS_ESTOI_HPP_
#define PSE_METRICS_ESTOI_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "pse/audio/buffer.hpp"
#include "pse/audio/resample.hpp"
#include "pse/error.hpp"

namespace pse::metrics {

/// eSTOI constants. They are frozen: scores are only comparable across
/// systems when every system is scored with the same values, so the struct
/// exists to name them and is validated rather than tuned.
struct EstoiConfig {
  int internal_rate_hz = 10000;
  int frame_len = 256;
  int hop = 128;
  int fft_size = 512;
  int num_bands = 15;
  double lowest_band_cf_hz = 150.0;
  int segment_frames = 30;
  double silence_gate_db = 40.0;
};

namespace detail {

inline void ValidateConfig(const EstoiConfig &cfg) {
  const bool pow2 = cfg.fft_size > 0 && (cfg.fft_size & (cfg.fft_size - 1)) == 0;
  if (cfg.frame_len != 2 * cfg.hop || cfg.fft_size < cfg.frame_len || !pow2 ||
      cfg.num_bands < 1 || cfg.segment_frames < 1 || cfg.internal_rate_hz <= 0)
    Fail(ErrorKind::kInvalidArgument, "inconsistent eSTOI configuration");
}

// In-place iterative radix-2 FFT; size must be a power of two.
inline void Fft(std::vector<std::complex<double>> &a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

// Matlab-style hanning(n): the n interior points of an (n+2)-point Hann.
inline std::vector<double> Hanning(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    w[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1) / (n + 1));
  return w;
}

struct BandEdges {
  std::size_t lo, hi;  // FFT bin range [lo, hi)
};

// One-third octave bands: edges at cf * 2^(-1/6), cf * 2^(1/6), each snapped
// to the nearest FFT bin (first bin on ties).
inline std::vector<BandEdges> ThirdOctaveBands(const EstoiConfig &cfg) {
  const std::size_t bins = static_cast<std::size_t>(cfg.fft_size / 2 + 1);
  auto nearest = [&](double freq) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < bins; ++b) {
      const double f = static_cast<double>(b) * cfg.internal_rate_hz / cfg.fft_size;
      const double d = (f - freq) * (f - freq);
      if (d < best_d) {
        best_d = d;
        best = b;
      }
    }
    return best;
  };
  std::vector<BandEdges> bands;
  for (int k = 0; k < cfg.num_bands; ++k) {
    const double low = cfg.lowest_band_cf_hz * std::pow(2.0, (2.0 * k - 1.0) / 6.0);
    const double high = cfg.lowest_band_cf_hz * std::pow(2.0, (2.0 * k + 1.0) / 6.0);
    bands.push_back({nearest(low), nearest(high)});
  }
  return bands;
}

// Frame starts used by both the silence gate and the STFT: 0, hop, ... while
// start < n - frame_len.
inline std::vector<std::size_t> FrameStarts(std::size_t n, int frame_len, int hop) {
  std::vector<std::size_t> starts;
  const std::size_t len = static_cast<std::size_t>(frame_len);
  for (std::size_t s = 0; s + len < n; s += static_cast<std::size_t>(hop)) starts.push_back(s);
  return starts;
}

// Drops frames of `ref` (and the same frames of `est`) more than gate_db below
// the loudest reference frame, then overlap-adds the surviving windowed frames
// back into two shorter signals.
inline void RemoveSilentFrames(std::vector<double> &ref, std::vector<double> &est,
                               const EstoiConfig &cfg) {
  const auto w = Hanning(cfg.frame_len);
  const auto starts = FrameStarts(ref.size(), cfg.frame_len, cfg.hop);
  const std::size_t len = static_cast<std::size_t>(cfg.frame_len);
  const std::size_t hop = static_cast<std::size_t>(cfg.hop);
  const double eps = std::numeric_limits<double>::epsilon();

  std::vector<double> energy_db(starts.size());
  double loudest = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < starts.size(); ++f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double v = w[i] * ref[starts[f] + i];
      acc += v * v;
    }
    energy_db[f] = 20.0 * std::log10(std::sqrt(acc) + eps);
    loudest = std::max(loudest, energy_db[f]);
  }

  std::vector<std::size_t> kept;
  for (std::size_t f = 0; f < starts.size(); ++f)
    if (loudest - cfg.silence_gate_db - energy_db[f] < 0.0) kept.push_back(starts[f]);

  const std::size_t out_len = kept.empty() ? 0 : (kept.size() - 1) * hop + len;
  std::vector<double> ref_out(out_len, 0.0), est_out(out_len, 0.0);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    for (std::size_t i = 0; i < len; ++i) {
      ref_out[k * hop + i] += w[i] * ref[kept[k] + i];
      est_out[k * hop + i] += w[i] * est[kept[k] + i];
    }
  }
  ref.swap(ref_out);
  est.swap(est_out);
}

// bands x frames matrix (row-major by band) of one-third-octave magnitudes.
inline std::vector<std::vector<double>> BandEnvelopes(const std::vector<double> &x,
                                                      const EstoiConfig &cfg,
                                                      const std::vector<BandEdges> &bands) {
  const auto w = Hanning(cfg.frame_len);
  const auto starts = FrameStarts(x.size(), cfg.frame_len, cfg.hop);
  std::vector<std::vector<double>> env(bands.size(), std::vector<double>(starts.size()));
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(cfg.fft_size));
  std::vector<double> power(static_cast<std::size_t>(cfg.fft_size / 2 + 1));
  for (std::size_t f = 0; f < starts.size(); ++f) {
    std::fill(buf.begin(), buf.end(), std::complex<double>());
    for (std::size_t i = 0; i < w.size(); ++i) buf[i] = w[i] * x[starts[f] + i];
    Fft(buf);
    for (std::size_t b = 0; b < power.size(); ++b) power[b] = std::norm(buf[b]);
    for (std::size_t k = 0; k < bands.size(); ++k) {
      double acc = 0.0;
      for (std::size_t b = bands[k].lo; b < bands[k].hi; ++b) acc += power[b];
      env[k][f] = std::sqrt(acc);
    }
  }
  return env;
}

// Row (band across time) then column (frame across bands) mean-and-norm
// normalization of one J x N segment, stored row-major. Zero-variance
// vectors normalize to zero.
inline void RowColumnNormalize(std::vector<double> &seg, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double *row = seg.data() + r * cols;
    double mean = 0.0;
    for (std::size_t c = 0; c < cols; ++c) mean += row[c];
    mean /= static_cast<double>(cols);
    double norm = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      row[c] -= mean;
      norm += row[c] * row[c];
    }
    norm = std::sqrt(norm);
    for (std::size_t c = 0; c < cols; ++c) row[c] = norm > 0.0 ? row[c] / norm : 0.0;
  }
  for (std::size_t c = 0; c < cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < rows; ++r) mean += seg[r * cols + c];
    mean /= static_cast<double>(rows);
    double norm = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      seg[r * cols + c] -= mean;
      norm += seg[r * cols + c] * seg[r * cols + c];
    }
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < rows; ++r)
      seg[r * cols + c] = norm > 0.0 ? seg[r * cols + c] / norm : 0.0;
  }
}

}  // namespace detail

/// Extended short-time objective intelligibility of `estimate` against
/// `reference`. Both are resampled to 10 kHz, reference-driven silent frames
/// are removed from both, and the score is the mean over all 30-frame
/// segments of the correlation between the row/column normalized
/// one-third-octave envelopes. Result lies in [-1, 1].
inline double Estoi(const audio::AudioBuffer &reference, const audio::AudioBuffer &estimate,
                    const EstoiConfig &cfg = {}) {
  detail::ValidateConfig(cfg);
  audio::RequireSameLength(reference, estimate, "estoi");

  auto to_internal = [&](const audio::AudioBuffer &b) {
    const auto r = audio::Resample(b, cfg.internal_rate_hz, audio::kEstoiRejectionDb);
    return std::vector<double>(r.samples().begin(), r.samples().end());
  };
  std::vector<double> ref = to_internal(reference);
  std::vector<double> est = to_internal(estimate);

  detail::RemoveSilentFrames(ref, est, cfg);

  const auto bands = detail::ThirdOctaveBands(cfg);
  const auto ref_env = detail::BandEnvelopes(ref, cfg, bands);
  const auto est_env = detail::BandEnvelopes(est, cfg, bands);
  const std::size_t frames = ref_env.empty() ? 0 : ref_env[0].size();
  const std::size_t seg_len = static_cast<std::size_t>(cfg.segment_frames);
  if (frames < seg_len)
    Fail(ErrorKind::kInsufficientSignal,
         "estoi: " + std::to_string(frames) + " STFT frames after silence removal, need " +
             std::to_string(seg_len));

  const std::size_t rows = bands.size();
  std::vector<double> x(rows * seg_len), y(rows * seg_len);
  double total = 0.0;
  const std::size_t segments = frames - seg_len + 1;
  for (std::size_t m = 0; m < segments; ++m) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < seg_len; ++c) {
        x[r * seg_len + c] = ref_env[r][m + c];
        y[r * seg_len + c] = est_env[r][m + c];
      }
    }
    detail::RowColumnNormalize(x, rows, seg_len);
    detail::RowColumnNormalize(y, rows, seg_len);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    total += acc / static_cast<double>(seg_len);
  }
  return std::clamp(total / static_cast<double>(segments), -1.0, 1.0);
}

}  // namespace pse::metrics

#endif  // PSE_METRICS_ESTOI_HPP_
