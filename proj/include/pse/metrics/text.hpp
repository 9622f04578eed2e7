// pse/metrics/text.hpp

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

#ifndef PSE_METRICS_TEXT_HPP_
#define PSE_METRICS_TEXT_HPP_

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pse/error.hpp"

namespace pse::metrics {

using Tokens = std::vector<std::string>;

namespace detail {

inline bool IsApostrophe(UChar32 c) {
  return c == U'\'' || c == 0x2019 || c == 0x02BC;  // ' and typographic variants
}

}  // namespace detail

/// Lowercases (full Unicode case folding after NFKC), strips punctuation
/// except apostrophes between two letters/digits, and splits on whitespace
/// and dashes. Number words are left alone.
inline Tokens NormalizeText(std::string_view raw) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) Fail(ErrorKind::kConfiguration, "ICU NFKC normalizer unavailable");
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  text = nfkc->normalize(text, status);
  if (U_FAILURE(status)) Fail(ErrorKind::kFormat, "text normalization failed");
  text.foldCase();

  std::vector<UChar32> cps;
  for (int32_t i = 0; i < text.length();) {
    const UChar32 c = text.char32At(i);
    cps.push_back(c);
    i += U16_LENGTH(c);
  }

  Tokens tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  auto append = [&](UChar32 c) {
    icu::UnicodeString one(c);
    one.toUTF8String(current);
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const UChar32 c = cps[i];
    if (u_isUWhiteSpace(c)) {
      flush();
    } else if (detail::IsApostrophe(c)) {
      const bool inner = i > 0 && i + 1 < cps.size() && u_isalnum(cps[i - 1]) &&
                         u_isalnum(cps[i + 1]);
      if (inner) append(U'\'');
    } else if (u_hasBinaryProperty(c, UCHAR_DASH)) {
      flush();  // "well-known" -> [well, known]
    } else if (u_ispunct(c) || (U_GET_GC_MASK(c) & U_GC_S_MASK) != 0) {
      // other punctuation and symbols vanish without splitting ("e.g." -> "eg")
    } else {
      append(c);
    }
  }
  flush();
  return tokens;
}

struct EditCounts {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t reference_length = 0;

  std::int64_t edits() const { return substitutions + deletions + insertions; }
  double rate() const {
    return static_cast<double>(edits()) / static_cast<double>(reference_length);
  }
};

/// Unit-cost Levenshtein alignment by dynamic programming. The backtrace
/// prefers substitution (or match), then deletion, then insertion when
/// several moves reach the same cost; that choice shapes the S/D/I split but
/// never the total.
inline EditCounts Align(const Tokens &reference, const Tokens &hypothesis) {
  const std::size_t n = reference.size(), m = hypothesis.size();
  std::vector<std::int64_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::int64_t & { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<std::int64_t>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::int64_t diag = at(i - 1, j - 1) + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditCounts counts;
  counts.reference_length = static_cast<std::int64_t>(n);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = reference[i - 1] == hypothesis[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++counts.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++counts.deletions;
      --i;
    } else {
      ++counts.insertions;
      --j;
    }
  }
  return counts;
}

/// (S + D + I) / |reference|.
inline double Wer(const Tokens &reference, const Tokens &hypothesis) {
  if (reference.empty())
    Fail(ErrorKind::kInvalidArgument, "wer: empty reference makes the rate undefined");
  return Align(reference, hypothesis).rate();
}

/// Error-weighted corpus WER: total edits over total reference words (a
/// fraction; reports multiply by 100).
inline double CorpusWer(const std::vector<std::pair<Tokens, Tokens>> &pairs) {
  if (pairs.empty()) Fail(ErrorKind::kInvalidArgument, "corpus_wer: empty corpus");
  std::int64_t edits = 0, words = 0;
  for (const auto &[ref, hyp] : pairs) {
    if (ref.empty())
      Fail(ErrorKind::kInvalidArgument, "corpus_wer: empty reference in corpus");
    const EditCounts c = Align(ref, hyp);
    edits += c.edits();
    words += c.reference_length;
  }
  return static_cast<double>(edits) / static_cast<double>(words);
}

// ---------------------------------------------------------------------------
// Transcript sets: JSON object {utterance_id: text}.

using TranscriptSet = std::map<std::string, std::string>;

inline TranscriptSet ReadTranscripts(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open transcripts " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    if (!j.is_object()) Fail(ErrorKind::kFormat, path.string() + ": expected a JSON object");
    TranscriptSet out;
    for (const auto &[id, text] : j.items()) out[id] = text.get<std::string>();
    return out;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
}

inline void WriteTranscripts(const TranscriptSet &set, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path.string());
  out << nlohmann::json(set).dump(2) << '\n';
}

}  // namespace pse::metrics

#endif  // PSE_METRICS_TEXT_HPP_
