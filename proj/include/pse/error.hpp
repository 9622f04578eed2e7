// pse/error.hpp

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

#ifndef PSE_ERROR_HPP_
#define PSE_ERROR_HPP_

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pse {

enum class ErrorKind {
  kFormat,            // malformed file contents
  kUnsupportedCodec,  // well-formed but not an encoding we accept
  kIo,
  kClipping,
  kDegenerateInput,
  kAlignment,
  kInsufficientSignal,
  kDimensionMismatch,
  kInvalidArgument,
  kConfiguration,
  kProtocol,          // an adapter broke its output contract
  kValidation,
  kCoverage,          // missing or mismatched submissions
};

inline std::string_view ToString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kUnsupportedCodec: return "unsupported_codec";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kClipping: return "clipping";
    case ErrorKind::kDegenerateInput: return "degenerate_input";
    case ErrorKind::kAlignment: return "alignment";
    case ErrorKind::kInsufficientSignal: return "insufficient_signal";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kConfiguration: return "configuration";
    case ErrorKind::kProtocol: return "protocol";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kCoverage: return "coverage";
  }
  return "unknown";
}

/// One machine-readable problem report: a code plus identifying fields
/// (speaker_id, utterance_id, mixture_id, path, ...).
struct Diagnostic {
  std::string code;
  std::string message;
  std::map<std::string, std::string> fields;
};

/// Every failure raised by the library. Batch operations that find several
/// problems at once (coverage gaps, per-file duration violations) attach
/// them all as diagnostics instead of stopping at the first.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what,
        std::vector<Diagnostic> details = {})
      : std::runtime_error(what), kind_(kind), details_(std::move(details)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<Diagnostic> &details() const noexcept { return details_; }

 private:
  ErrorKind kind_;
  std::vector<Diagnostic> details_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, what);
}

}  // namespace pse

#endif  // PSE_ERROR_HPP_
