// pse/audio/wav.hpp

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

#ifndef PSE_AUDIO_WAV_HPP_
#define PSE_AUDIO_WAV_HPP_

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "pse/audio/buffer.hpp"
#include "pse/error.hpp"

namespace pse::audio {

enum class WavEncoding { kPcm16, kFloat32 };

struct WavInfo {
  int sample_rate_hz = 0;
  int channels = 0;
  WavEncoding encoding = WavEncoding::kPcm16;
  std::size_t frames = 0;

  double duration_seconds() const {
    return sample_rate_hz > 0 ? static_cast<double>(frames) / sample_rate_hz : 0.0;
  }
};

namespace detail {

inline constexpr std::uint16_t kFormatPcm = 0x0001;
inline constexpr std::uint16_t kFormatFloat = 0x0003;
inline constexpr std::uint16_t kFormatExtensible = 0xFFFE;

inline std::uint16_t LoadU16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline std::uint32_t LoadU32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}
inline void StoreU16(std::vector<unsigned char> &out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}
inline void StoreU32(std::vector<unsigned char> &out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<unsigned char>((v >> s) & 0xFF));
}
inline void StoreTag(std::vector<unsigned char> &out, const char *tag) {
  out.insert(out.end(), tag, tag + 4);
}

inline std::vector<unsigned char> ReadAllBytes(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

struct ParsedWav {
  WavInfo info;
  const unsigned char *data = nullptr;
};

// Walks the RIFF chunk list; `bytes` must outlive the result.
inline ParsedWav ParseWav(const std::vector<unsigned char> &bytes,
                          const std::string &name) {
  auto bad = [&](const std::string &why) -> void {
    Fail(ErrorKind::kFormat, name + ": " + why);
  };
  if (bytes.size() < 12) bad("truncated RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    bad("not a RIFF/WAVE file");

  ParsedWav parsed;
  bool have_fmt = false;
  std::uint16_t format = 0, bits = 0, block_align = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    const std::uint32_t size = LoadU32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) bad("truncated fmt chunk");
      const unsigned char *f = bytes.data() + body;
      format = LoadU16(f);
      parsed.info.channels = LoadU16(f + 2);
      parsed.info.sample_rate_hz = static_cast<int>(LoadU32(f + 4));
      block_align = LoadU16(f + 12);
      bits = LoadU16(f + 14);
      if (format == kFormatExtensible) {
        if (size < 40) bad("truncated WAVE_FORMAT_EXTENSIBLE fmt chunk");
        format = LoadU16(f + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) bad("data chunk before fmt chunk");
      if (body + size > bytes.size()) bad("truncated data chunk");
      if (format == kFormatPcm && bits == 16) {
        parsed.info.encoding = WavEncoding::kPcm16;
      } else if (format == kFormatFloat && bits == 32) {
        parsed.info.encoding = WavEncoding::kFloat32;
      } else {
        Fail(ErrorKind::kUnsupportedCodec,
             name + ": only PCM16 and IEEE float32 are supported (format tag " +
                 std::to_string(format) + ", " + std::to_string(bits) + " bits)");
      }
      if (parsed.info.channels < 1 || parsed.info.channels > 2)
        Fail(ErrorKind::kUnsupportedCodec,
             name + ": " + std::to_string(parsed.info.channels) +
                 " channels (only mono and stereo are accepted)");
      if (parsed.info.sample_rate_hz <= 0) bad("non-positive sample rate");
      const std::size_t frame_bytes =
          static_cast<std::size_t>(parsed.info.channels) * (bits / 8);
      if (block_align != frame_bytes) bad("block_align inconsistent with fmt");
      parsed.info.frames = size / frame_bytes;
      parsed.data = bytes.data() + body;
      return parsed;
    }
    pos = body + size + (size & 1u);
  }
  bad(have_fmt ? "missing data chunk" : "missing fmt chunk");
  return parsed;  // unreachable
}

}  // namespace detail

/// Format and length without decoding samples.
inline WavInfo ReadWavInfo(const std::filesystem::path &path) {
  const auto bytes = detail::ReadAllBytes(path);
  return detail::ParseWav(bytes, path.string()).info;
}

/// Reads PCM16 or float32 RIFF/WAVE. PCM16 is scaled by 1/32768; stereo is
/// downmixed by channel mean.
inline AudioBuffer ReadWav(const std::filesystem::path &path) {
  const auto bytes = detail::ReadAllBytes(path);
  const detail::ParsedWav parsed = detail::ParseWav(bytes, path.string());
  const WavInfo &info = parsed.info;
  std::vector<double> out(info.frames);
  const unsigned char *p = parsed.data;
  const int ch = info.channels;
  for (std::size_t i = 0; i < info.frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < ch; ++c) {
      double v;
      if (info.encoding == WavEncoding::kPcm16) {
        v = static_cast<std::int16_t>(detail::LoadU16(p)) / 32768.0;
        p += 2;
      } else {
        v = std::bit_cast<float>(detail::LoadU32(p));
        p += 4;
        if (!std::isfinite(v))
          Fail(ErrorKind::kFormat, path.string() + ": non-finite float sample at frame " +
                                       std::to_string(i));
      }
      acc += v;
    }
    out[i] = ch == 1 ? acc : acc / ch;
  }
  return AudioBuffer(std::move(out), info.sample_rate_hz);
}

/// Encodes a mono buffer. PCM16 refuses samples outside [-1, 1] rather than
/// clipping them.
inline std::vector<unsigned char> EncodeWav(const AudioBuffer &buf, WavEncoding encoding) {
  const std::uint16_t bytes_per_sample = encoding == WavEncoding::kPcm16 ? 2 : 4;
  const std::uint32_t data_size = static_cast<std::uint32_t>(buf.size() * bytes_per_sample);
  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  detail::StoreTag(out, "RIFF");
  detail::StoreU32(out, 36 + data_size);
  detail::StoreTag(out, "WAVE");
  detail::StoreTag(out, "fmt ");
  detail::StoreU32(out, 16);
  detail::StoreU16(out, encoding == WavEncoding::kPcm16 ? detail::kFormatPcm
                                                        : detail::kFormatFloat);
  detail::StoreU16(out, 1);
  detail::StoreU32(out, static_cast<std::uint32_t>(buf.sample_rate_hz()));
  detail::StoreU32(out, static_cast<std::uint32_t>(buf.sample_rate_hz()) * bytes_per_sample);
  detail::StoreU16(out, bytes_per_sample);
  detail::StoreU16(out, static_cast<std::uint16_t>(bytes_per_sample * 8));
  detail::StoreTag(out, "data");
  detail::StoreU32(out, data_size);
  const auto samples = buf.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = samples[i];
    if (encoding == WavEncoding::kPcm16) {
      if (x < -1.0 || x > 1.0)
        Fail(ErrorKind::kClipping, "sample " + std::to_string(i) + " = " +
                                       std::to_string(x) + " outside [-1, 1] for pcm16");
      long q = std::lround(x * 32768.0);
      if (q > 32767) q = 32767;
      detail::StoreU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      detail::StoreU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
    }
  }
  return out;
}

inline void WriteWav(const AudioBuffer &buf, const std::filesystem::path &path,
                     WavEncoding encoding) {
  const auto bytes = EncodeWav(buf, encoding);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace pse::audio

#endif  // PSE_AUDIO_WAV_HPP_
