// pse/metrics/embedding.hpp

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

#ifndef PSE_METRICS_EMBEDDING_HPP_
#define PSE_METRICS_EMBEDDING_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pse/error.hpp"
#include "pse/metrics/record.hpp"

namespace pse::metrics {

struct EmbeddingVector {
  std::string utterance_id;
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  friend bool operator==(const EmbeddingVector &, const EmbeddingVector &) = default;
};

namespace detail {

inline void CheckEmbedding(const EmbeddingVector &v) {
  if (v.values.empty())
    Fail(ErrorKind::kInvalidArgument, "embedding '" + v.utterance_id + "' has dim 0");
  for (double x : v.values)
    if (!std::isfinite(x))
      Fail(ErrorKind::kInvalidArgument, "embedding '" + v.utterance_id + "' is not finite");
}

}  // namespace detail

/// Speaker-embedding cosine similarity <a, b> / (|a| |b|), clamped to
/// [-1, 1]. Higher means more similar.
inline double Secs(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    Fail(ErrorKind::kDimensionMismatch, "secs: dimensions differ (" +
                                            std::to_string(a.size()) + " vs " +
                                            std::to_string(b.size()) + ")");
  if (a.empty()) Fail(ErrorKind::kInvalidArgument, "secs: empty vectors");
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) Fail(ErrorKind::kDegenerateInput, "secs: zero vector");
  // sqrt(aa * bb) rather than sqrt(aa) * sqrt(bb) keeps secs(a, a) == 1 exactly
  return std::clamp(dot / std::sqrt(aa * bb), -1.0, 1.0);
}

inline double Secs(const EmbeddingVector &a, const EmbeddingVector &b) {
  return Secs(std::span<const double>(a.values), std::span<const double>(b.values));
}

/// Arithmetic mean of the reference vectors, renormalized to unit length.
inline std::vector<double> SpeakerCentroid(const std::vector<EmbeddingVector> &reference) {
  if (reference.empty()) Fail(ErrorKind::kInvalidArgument, "speaker centroid: no references");
  const std::size_t dim = reference.front().dim();
  std::vector<double> c(dim, 0.0);
  for (const auto &r : reference) {
    detail::CheckEmbedding(r);
    if (r.dim() != dim)
      Fail(ErrorKind::kDimensionMismatch, "reference embeddings disagree on dimension");
    for (std::size_t i = 0; i < dim; ++i) c[i] += r.values[i];
  }
  double norm = 0.0;
  for (double &v : c) {
    v /= static_cast<double>(reference.size());
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) Fail(ErrorKind::kDegenerateInput, "reference centroid is the zero vector");
  for (double &v : c) v /= norm;
  return c;
}

/// One SECS record per generated utterance, scored against the speaker's
/// renormalized reference centroid.
inline std::vector<MetricRecord> SpeakerSecs(const std::vector<EmbeddingVector> &generated,
                                             const std::vector<EmbeddingVector> &reference,
                                             const std::string &condition = {}) {
  const auto centroid = SpeakerCentroid(reference);
  std::vector<MetricRecord> out;
  out.reserve(generated.size());
  for (const auto &g : generated) {
    detail::CheckEmbedding(g);
    out.push_back(MakeRecord(g.utterance_id, Metric::kSecs,
                             Secs(std::span<const double>(g.values), centroid), condition));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Embedding files. JSON: {utterance_id: [floats]}. Binary ("EMB1"):
//   magic "EMB1" | u32 dim | u32 count |
//   count x (u32 id length | id bytes | dim x f32), all little-endian.

inline constexpr char kEmbeddingMagic[4] = {'E', 'M', 'B', '1'};

inline std::vector<unsigned char> EncodeEmbeddingsBinary(
    const std::vector<EmbeddingVector> &vectors) {
  const std::uint32_t dim = vectors.empty() ? 0 : static_cast<std::uint32_t>(vectors[0].dim());
  std::vector<unsigned char> out(kEmbeddingMagic, kEmbeddingMagic + 4);
  auto put32 = [&](std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out.push_back(static_cast<unsigned char>((v >> s) & 0xFF));
  };
  put32(dim);
  put32(static_cast<std::uint32_t>(vectors.size()));
  for (const auto &v : vectors) {
    if (v.dim() != dim)
      Fail(ErrorKind::kDimensionMismatch, "embedding '" + v.utterance_id + "' has dim " +
                                              std::to_string(v.dim()) + ", expected " +
                                              std::to_string(dim));
    put32(static_cast<std::uint32_t>(v.utterance_id.size()));
    out.insert(out.end(), v.utterance_id.begin(), v.utterance_id.end());
    for (double x : v.values) put32(std::bit_cast<std::uint32_t>(static_cast<float>(x)));
  }
  return out;
}

inline std::vector<EmbeddingVector> DecodeEmbeddingsBinary(
    const std::vector<unsigned char> &bytes, const std::string &name) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > bytes.size()) Fail(ErrorKind::kFormat, name + ": truncated embedding file");
  };
  auto get32 = [&] {
    need(4);
    const std::uint32_t v = static_cast<std::uint32_t>(bytes[pos]) |
                            (static_cast<std::uint32_t>(bytes[pos + 1]) << 8) |
                            (static_cast<std::uint32_t>(bytes[pos + 2]) << 16) |
                            (static_cast<std::uint32_t>(bytes[pos + 3]) << 24);
    pos += 4;
    return v;
  };
  need(4);
  if (std::memcmp(bytes.data(), kEmbeddingMagic, 4) != 0)
    Fail(ErrorKind::kFormat, name + ": missing EMB1 magic");
  pos = 4;
  const std::uint32_t dim = get32();
  const std::uint32_t count = get32();
  if (count > 0 && dim == 0) Fail(ErrorKind::kFormat, name + ": dim 0");
  std::vector<EmbeddingVector> out;
  out.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    EmbeddingVector v;
    const std::uint32_t len = get32();
    need(len);
    v.utterance_id.assign(reinterpret_cast<const char *>(bytes.data() + pos), len);
    pos += len;
    v.values.resize(dim);
    for (std::uint32_t i = 0; i < dim; ++i) v.values[i] = std::bit_cast<float>(get32());
    detail::CheckEmbedding(v);
    out.push_back(std::move(v));
  }
  if (pos != bytes.size()) Fail(ErrorKind::kFormat, name + ": trailing bytes after records");
  return out;
}

inline std::vector<EmbeddingVector> ParseEmbeddingsJson(const std::string &text,
                                                       const std::string &name) {
  std::vector<EmbeddingVector> out;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) Fail(ErrorKind::kFormat, name + ": expected a JSON object");
    for (const auto &[id, arr] : j.items()) {
      EmbeddingVector v{id, arr.get<std::vector<double>>()};
      detail::CheckEmbedding(v);
      if (!out.empty() && v.dim() != out.front().dim())
        Fail(ErrorKind::kDimensionMismatch, name + ": embedding '" + id + "' has dim " +
                                                std::to_string(v.dim()) + ", expected " +
                                                std::to_string(out.front().dim()));
      out.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, name + ": " + e.what());
  }
  return out;
}

/// Reads either format, detected by the EMB1 magic.
inline std::vector<EmbeddingVector> ReadEmbeddings(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open embeddings " + path.string());
  std::vector<unsigned char> bytes(std::istreambuf_iterator<char>(in), {});
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kEmbeddingMagic, 4) == 0)
    return DecodeEmbeddingsBinary(bytes, path.string());
  return ParseEmbeddingsJson(std::string(bytes.begin(), bytes.end()), path.string());
}

inline void WriteEmbeddingsBinary(const std::vector<EmbeddingVector> &vectors,
                                  const std::filesystem::path &path) {
  const auto bytes = EncodeEmbeddingsBinary(vectors);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace pse::metrics

#endif  // PSE_METRICS_EMBEDDING_HPP_
