// tests/unit/estoi_test.cpp

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
#include <fstream>
#include <string>

#include "common/synthetic.hpp"
#include "json.hpp"
#include "pse/audio/resample.hpp"
#include "pse/audio/wav.hpp"
#include "pse/metrics/estoi.hpp"

using pse::audio::AudioBuffer;
using pse::metrics::Estoi;
using Catch::Matchers::WithinAbs;

TEST_CASE("estoi of a signal with itself is one") {
  for (int k = 0; k < 5; ++k) {
    const auto x = pse::testing::SpeechLike(k, 2.0 + 0.3 * k);
    CHECK_THAT(Estoi(x, x), WithinAbs(1.0, 1e-6));
  }
}

TEST_CASE("estoi of independent white noise is near zero") {
  double sum = 0;
  for (int k = 0; k < 20; ++k) {
    const auto x = pse::testing::SpeechLike(k, 2.0);
    sum += Estoi(x, pse::testing::WhiteNoise(1000 + k, x.size()));
  }
  CHECK(std::abs(sum / 20) < 0.1);
}

TEST_CASE("estoi is bounded and scale invariant") {
  const auto x = pse::testing::SpeechLike(9, 2.5);
  const auto n = pse::testing::WhiteNoise(9, x.size(), 16000, 0.05);
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] + n[i];
  const AudioBuffer y(std::move(v), 16000);
  const double base = Estoi(x, y);
  CHECK(base > -1.0);
  CHECK(base < 1.0);
  CHECK_THAT(Estoi(x.scaled(3.0), y.scaled(3.0)), WithinAbs(base, 1e-6));
  CHECK_THAT(Estoi(x.scaled(0.01), y.scaled(0.01)), WithinAbs(base, 1e-6));
}

TEST_CASE("estoi accepts any input rate") {
  const auto x = pse::testing::SpeechLike(2, 2.0, 10000);
  CHECK_THAT(Estoi(x, x), WithinAbs(1.0, 1e-6));
  const auto x24 = pse::testing::SpeechLike(2, 2.0, 24000);
  CHECK_THAT(Estoi(x24, x24), WithinAbs(1.0, 1e-6));
}

TEST_CASE("estoi errors") {
  const auto x = pse::testing::SpeechLike(2, 2.0);
  CHECK_THROWS_AS(Estoi(x, x.head(x.size() - 1)), pse::Error);
  try {
    const auto tiny = pse::testing::SpeechLike(2, 0.2);
    Estoi(tiny, tiny);
    FAIL("short input should not score");
  } catch (const pse::Error &e) {
    CHECK(e.kind() == pse::ErrorKind::kInsufficientSignal);
  }
}

TEST_CASE("third-octave bands match the reference layout") {
  const auto bands = pse::metrics::detail::ThirdOctaveBands(pse::metrics::EstoiConfig{});
  REQUIRE(bands.size() == 15);
  // 150 Hz centre: edges 150 * 2^(-1/6) = 133.6 Hz -> bin 7, 150 * 2^(1/6) = 168.4 Hz -> bin 9
  CHECK(bands.front().lo == 7);
  CHECK(bands.front().hi == 9);
  for (std::size_t i = 1; i < bands.size(); ++i) CHECK(bands[i].lo == bands[i - 1].hi);
  CHECK(bands.back().hi <= 257);
}

TEST_CASE("estoi agrees with the committed reference fixtures") {
  std::ifstream in(std::string(PSE_FIXTURE_DIR) + "/estoi/expected.json");
  REQUIRE(in);
  const auto expected = nlohmann::json::parse(in);
  REQUIRE(expected.size() == 10);
  for (const auto &[name, want] : expected.items()) {
    const std::string base = std::string(PSE_FIXTURE_DIR) + "/estoi/" + name;
    const auto clean = pse::audio::ReadWav(base + ".clean.wav");
    const auto degraded = pse::audio::ReadWav(base + ".degraded.wav");
    INFO(name);
    CHECK_THAT(Estoi(clean, degraded), WithinAbs(want.get<double>(), 1e-3));
  }
}
