// tests/unit/audio_test.cpp

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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <vector>

#include "common/synthetic.hpp"
#include "pse/audio/buffer.hpp"
#include "pse/audio/power.hpp"
#include "pse/audio/wav.hpp"
#include "pse/error.hpp"

using pse::Error;
using pse::ErrorKind;
using pse::audio::AudioBuffer;
using pse::audio::WavEncoding;
using pse::testing::TempDir;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Hand-assembled RIFF so the reader is tested against bytes it did not write.
std::vector<unsigned char> RawWav(std::uint16_t format, std::uint16_t channels, int rate,
                                  std::uint16_t bits, const std::vector<unsigned char> &data) {
  std::vector<unsigned char> out;
  auto u16 = [&](std::uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back(v >> 8);
  };
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
  };
  auto tag = [&](const char *t) { out.insert(out.end(), t, t + 4); };
  tag("RIFF");
  u32(static_cast<std::uint32_t>(36 + data.size()));
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(format);
  u16(channels);
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * channels * bits / 8));
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(bits);
  tag("data");
  u32(static_cast<std::uint32_t>(data.size()));
  out.insert(out.end(), data.begin(), data.end());
  return out;
}

void Dump(const std::filesystem::path &p, const std::vector<unsigned char> &bytes) {
  std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char *>(bytes.data()),
                                           static_cast<std::streamsize>(bytes.size()));
}

std::vector<unsigned char> Pcm16Samples(const std::vector<std::int16_t> &v) {
  std::vector<unsigned char> out;
  for (std::int16_t s : v) {
    const auto u = static_cast<std::uint16_t>(s);
    out.push_back(u & 0xff);
    out.push_back(u >> 8);
  }
  return out;
}

std::vector<unsigned char> Float32Samples(const std::vector<float> &v) {
  std::vector<unsigned char> out(v.size() * 4);
  std::memcpy(out.data(), v.data(), out.size());
  return out;
}

ErrorKind KindOf(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("AudioBuffer enforces its invariants") {
  CHECK_THROWS_AS(AudioBuffer({0.0}, 0), Error);
  CHECK_THROWS_AS(AudioBuffer({0.0}, -16000), Error);
  CHECK_THROWS_AS(AudioBuffer({0.0, std::nan("")}, 16000), Error);
  CHECK_THROWS_AS(AudioBuffer({INFINITY}, 16000), Error);
  const AudioBuffer b({0.1, -0.2, 0.3}, 16000);
  CHECK(b.size() == 3);
  CHECK(b.head(2).size() == 2);
  CHECK(b.scaled(2.0)[2] == 0.6);
  CHECK_THAT(AudioBuffer(std::vector<double>(8000), 16000).duration_seconds(), WithinAbs(0.5, 0));
}

TEST_CASE("read_wav scales PCM16 exactly") {
  TempDir dir;
  Dump(dir / "c.wav", RawWav(1, 1, 16000, 16, Pcm16Samples(std::vector<std::int16_t>(16000, 16384))));
  const auto b = pse::audio::ReadWav(dir / "c.wav");
  REQUIRE(b.size() == 16000);
  CHECK(b.sample_rate_hz() == 16000);
  for (double v : b.samples()) REQUIRE(v == 0.5);
}

TEST_CASE("read_wav downmixes stereo by channel mean") {
  TempDir dir;
  std::vector<float> frames;
  for (int i = 0; i < 100; ++i) {
    frames.push_back(0.2f);
    frames.push_back(0.6f);
  }
  Dump(dir / "s.wav", RawWav(3, 2, 8000, 32, Float32Samples(frames)));
  const auto b = pse::audio::ReadWav(dir / "s.wav");
  REQUIRE(b.size() == 100);
  const double expect = (static_cast<double>(0.2f) + static_cast<double>(0.6f)) / 2;
  for (double v : b.samples()) REQUIRE_THAT(v, WithinAbs(expect, 1e-15));
  CHECK_THAT(expect, WithinAbs(0.4, 1e-7));
}

TEST_CASE("read_wav rejects malformed and unsupported files") {
  TempDir dir;
  auto good = RawWav(1, 1, 16000, 16, Pcm16Samples({1, 2, 3, 4}));

  SECTION("truncated header") {
    Dump(dir / "t.wav", std::vector<unsigned char>(good.begin(), good.begin() + 20));
    CHECK(KindOf([&] { pse::audio::ReadWav(dir / "t.wav"); }) == ErrorKind::kFormat);
  }
  SECTION("not RIFF") {
    auto bad = good;
    bad[0] = 'X';
    Dump(dir / "r.wav", bad);
    CHECK(KindOf([&] { pse::audio::ReadWav(dir / "r.wav"); }) == ErrorKind::kFormat);
  }
  SECTION("A-law codec") {
    Dump(dir / "a.wav", RawWav(6, 1, 8000, 8, {1, 2, 3}));
    CHECK(KindOf([&] { pse::audio::ReadWav(dir / "a.wav"); }) == ErrorKind::kUnsupportedCodec);
  }
  SECTION("24-bit PCM") {
    Dump(dir / "p.wav", RawWav(1, 1, 8000, 24, {1, 2, 3}));
    CHECK(KindOf([&] { pse::audio::ReadWav(dir / "p.wav"); }) == ErrorKind::kUnsupportedCodec);
  }
  SECTION("more than two channels") {
    Dump(dir / "m.wav", RawWav(1, 3, 8000, 16, Pcm16Samples({1, 2, 3})));
    CHECK(KindOf([&] { pse::audio::ReadWav(dir / "m.wav"); }) == ErrorKind::kUnsupportedCodec);
  }
  SECTION("missing file") {
    CHECK(KindOf([&] { pse::audio::ReadWav(dir / "none.wav"); }) == ErrorKind::kIo);
  }
}

TEST_CASE("write_wav round trips") {
  TempDir dir;
  const auto x = pse::testing::SpeechLike(7, 0.5, 16000);

  SECTION("float32 is exact for float-representable samples") {
    std::vector<double> v;
    for (double s : x.samples()) v.push_back(static_cast<float>(s));
    const AudioBuffer f(std::move(v), 16000);
    pse::audio::WriteWav(f, dir / "f.wav", WavEncoding::kFloat32);
    CHECK(pse::audio::ReadWav(dir / "f.wav") == f);
    const auto info = pse::audio::ReadWavInfo(dir / "f.wav");
    CHECK(info.encoding == WavEncoding::kFloat32);
    CHECK(info.frames == f.size());
  }
  SECTION("pcm16 within one quantization step") {
    pse::audio::WriteWav(x, dir / "p.wav", WavEncoding::kPcm16);
    const auto y = pse::audio::ReadWav(dir / "p.wav");
    REQUIRE(y.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(std::abs(y[i] - x[i]) <= 1.0 / 32768);
  }
  SECTION("pcm16 full scale") {
    const AudioBuffer edge({-1.0, 1.0, 0.0}, 16000);
    pse::audio::WriteWav(edge, dir / "e.wav", WavEncoding::kPcm16);
    const auto y = pse::audio::ReadWav(dir / "e.wav");
    CHECK(y[0] == -1.0);
    CHECK(y[1] == 32767.0 / 32768.0);
  }
  SECTION("pcm16 refuses to clip") {
    const AudioBuffer loud({0.5, 1.0001}, 16000);
    CHECK(KindOf([&] { pse::audio::WriteWav(loud, dir / "l.wav", WavEncoding::kPcm16); }) ==
          ErrorKind::kClipping);
    CHECK_FALSE(std::filesystem::exists(dir / "l.wav"));
  }
}

TEST_CASE("measure_power examples") {
  const auto c = pse::audio::MeasurePower(AudioBuffer(std::vector<double>(16000, 0.5), 16000));
  CHECK_THAT(c.rms, WithinAbs(0.5, 1e-15));
  CHECK(c.peak == 0.5);
  CHECK_THAT(c.active_power, WithinAbs(0.25, 1e-15));

  const auto z = pse::audio::MeasurePower(AudioBuffer(std::vector<double>(1000, 0.0), 16000));
  CHECK(z.rms == 0.0);
  CHECK(z.peak == 0.0);
  CHECK(z.active_power == 0.0);

  std::vector<double> sine(16000);
  for (std::size_t i = 0; i < sine.size(); ++i)
    sine[i] = std::sin(2 * std::numbers::pi * 440.0 * static_cast<double>(i) / 16000);
  CHECK_THAT(pse::audio::MeasurePower(AudioBuffer(sine, 16000)).rms,
             WithinAbs(std::sqrt(0.5), 1e-3));

  CHECK_THROWS_AS(pse::audio::MeasurePower(AudioBuffer({}, 16000)), Error);
}

TEST_CASE("active power ignores long silences") {
  std::vector<double> v(32000, 0.0);
  for (std::size_t i = 0; i < 8000; ++i) v[i] = i % 2 ? 0.5 : -0.5;
  const auto p = pse::audio::MeasurePower(AudioBuffer(v, 16000));
  CHECK_THAT(p.active_power, WithinRel(0.25, 0.05));
  CHECK_THAT(p.rms * p.rms, WithinRel(0.0625, 1e-12));
}

TEST_CASE("measure_power is scale-equivariant") {
  const auto x = pse::testing::SpeechLike(3, 1.0);
  const auto a = pse::audio::MeasurePower(x);
  for (double g : {0.01, 0.5, -2.0, 3.7}) {
    const auto b = pse::audio::MeasurePower(x.scaled(g));
    CHECK_THAT(b.rms, WithinRel(std::abs(g) * a.rms, 1e-12));
    CHECK_THAT(b.peak, WithinRel(std::abs(g) * a.peak, 1e-12));
    CHECK_THAT(b.active_power, WithinRel(g * g * a.active_power, 1e-12));
  }
}

TEST_CASE("buffers must agree before pairing") {
  const AudioBuffer a({0.0, 0.1}, 16000), b({0.0, 0.1}, 8000), c({0.0}, 16000);
  CHECK(KindOf([&] { pse::audio::RequireSameRate(a, b, "t"); }) == ErrorKind::kAlignment);
  CHECK(KindOf([&] { pse::audio::RequireSameLength(a, c, "t"); }) == ErrorKind::kAlignment);
}
