// tests/unit/embedding_test.cpp

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
#include <random>
#include <vector>

#include "common/synthetic.hpp"
#include "pse/metrics/embedding.hpp"

using namespace pse::metrics;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> Random(std::mt19937_64 &rng, std::size_t dim) {
  std::normal_distribution<double> g;
  std::vector<double> v(dim);
  for (double &x : v) x = g(rng);
  return v;
}

// Centroid direction from the plain sum (no averaging, no renormalization)
// and cosine in long double.
long double OracleSecs(const std::vector<double> &g, const std::vector<std::vector<double>> &refs) {
  std::vector<long double> sum(g.size(), 0.0L);
  for (const auto &r : refs)
    for (std::size_t i = 0; i < g.size(); ++i) sum[i] += r[i];
  long double dot = 0, gg = 0, ss = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    dot += g[i] * sum[i];
    gg += static_cast<long double>(g[i]) * g[i];
    ss += sum[i] * sum[i];
  }
  return dot / (std::sqrt(gg) * std::sqrt(ss));
}

}  // namespace

TEST_CASE("secs analytic cases are exact") {
  const std::vector<double> a = {0.3, -1.2, 2.5, 0.01};
  std::vector<double> neg(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) neg[i] = -a[i];
  CHECK(Secs(a, a) == 1.0);
  CHECK(Secs(a, neg) == -1.0);
  CHECK(Secs(std::vector<double>{1, 1, 0}, std::vector<double>{1, -1, 5}) == 0.0);
}

TEST_CASE("secs symmetry, scale and sign") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const auto a = Random(rng, 192), b = Random(rng, 192);
    const double base = Secs(a, b);
    CHECK(base >= -1.0);
    CHECK(base <= 1.0);
    CHECK(Secs(b, a) == base);
    for (double c : {1e-6, 0.5, 3.0, 1e6}) {
      std::vector<double> ca(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) ca[i] = c * a[i];
      CHECK_THAT(Secs(ca, b), WithinAbs(base, 1e-12));
    }
    std::vector<double> na(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) na[i] = -a[i];
    CHECK(Secs(na, b) == -base);
  }
}

TEST_CASE("secs stays within bounds for near-parallel vectors") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 1000; ++k) {
    auto a = Random(rng, 256);
    auto b = a;
    b[k % 256] *= 1.0 + 1e-15;
    const double s = Secs(a, b);
    CHECK(s <= 1.0);
    CHECK(s > 0.999999);
  }
}

TEST_CASE("secs errors") {
  CHECK_THROWS_AS(Secs(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), pse::Error);
  CHECK_THROWS_AS(Secs(std::vector<double>{0, 0}, std::vector<double>{1, 2}), pse::Error);
  CHECK_THROWS_AS(SpeakerCentroid({}), pse::Error);
}

TEST_CASE("speaker_secs") {
  std::mt19937_64 rng(3);
  const EmbeddingVector ref{"enroll", Random(rng, 16)};
  const EmbeddingVector gen{"g1", Random(rng, 16)};
  auto single = SpeakerSecs({gen}, {ref}, "XTTS/real");
  REQUIRE(single.size() == 1);
  CHECK_THAT(single[0].value, WithinAbs(Secs(gen, ref), 1e-15));
  CHECK(single[0].metric == Metric::kSecs);
  CHECK(single[0].condition == "XTTS/real");

  const EmbeddingVector aligned{"g2", ref.values};
  CHECK_THAT(SpeakerSecs({aligned}, {ref})[0].value, WithinAbs(1.0, 1e-15));

  std::vector<EmbeddingVector> refs;
  std::vector<std::vector<double>> raw;
  for (int i = 0; i < 4; ++i) {
    raw.push_back(Random(rng, 16));
    refs.push_back({"r" + std::to_string(i), raw.back()});
  }
  for (int k = 0; k < 50; ++k) {
    const EmbeddingVector g{"g", Random(rng, 16)};
    CHECK_THAT(SpeakerSecs({g}, refs)[0].value,
               WithinAbs(static_cast<double>(OracleSecs(g.values, raw)), 1e-12));
  }
}

TEST_CASE("EMB1 binary layout and round trip") {
  const std::vector<EmbeddingVector> v = {{"ab", {1.0, -2.0, 0.5}}, {"", {0.25, 0.0, 3.0}}};
  const auto bytes = EncodeEmbeddingsBinary(v);
  const std::vector<unsigned char> head = {'E', 'M', 'B', '1', 3, 0, 0, 0, 2, 0, 0, 0,
                                           2, 0, 0, 0, 'a', 'b', 0, 0, 0x80, 0x3f};
  REQUIRE(bytes.size() == 12 + (4 + 2 + 12) + (4 + 0 + 12));
  CHECK(std::vector<unsigned char>(bytes.begin(), bytes.begin() + head.size()) == head);
  CHECK(DecodeEmbeddingsBinary(bytes, "mem") == v);

  pse::testing::TempDir dir;
  WriteEmbeddingsBinary(v, dir / "e.emb");
  CHECK(ReadEmbeddings(dir / "e.emb") == v);

  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(DecodeEmbeddingsBinary(truncated, "t"), pse::Error);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(DecodeEmbeddingsBinary(trailing, "t"), pse::Error);
  CHECK_THROWS_AS(EncodeEmbeddingsBinary({{"a", {1.0}}, {"b", {1.0, 2.0}}}), pse::Error);
}

TEST_CASE("embedding JSON reader") {
  pse::testing::TempDir dir;
  std::ofstream(dir / "e.json") << R"({"u1": [1, 2.5, -3], "u2": [0, 0, 1e-3]})";
  const auto v = ReadEmbeddings(dir / "e.json");
  REQUIRE(v.size() == 2);
  CHECK(v[0] == EmbeddingVector{"u1", {1, 2.5, -3}});
  std::ofstream(dir / "bad.json") << R"({"u1": [1, 2], "u2": [1]})";
  CHECK_THROWS_AS(ReadEmbeddings(dir / "bad.json"), pse::Error);
  std::ofstream(dir / "empty.json") << R"({"u1": []})";
  CHECK_THROWS_AS(ReadEmbeddings(dir / "empty.json"), pse::Error);
}
