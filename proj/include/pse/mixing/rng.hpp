// pse/mixing/rng.hpp

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

#ifndef PSE_MIXING_RNG_HPP_
#define PSE_MIXING_RNG_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace pse::mixing {

/// Identifies one random decision. Every draw in a run is a pure function of
/// (master seed, key), so results do not depend on evaluation order or on
/// how many threads take part.
struct RngKey {
  std::string speaker_id;
  std::string utterance_id;
  std::string purpose;
};

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t Fnv1a64(std::string_view bytes,
                             std::uint64_t h = 0xCBF29CE484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Stable 64-bit hash of (master seed, key). Fields are length-prefixed so
/// ("ab", "c") and ("a", "bc") never collide structurally.
inline std::uint64_t KeyHash(std::uint64_t master_seed, const RngKey &key) {
  std::uint64_t h = Fnv1a64({}, SplitMix64(master_seed));
  for (const std::string *field : {&key.speaker_id, &key.utterance_id, &key.purpose}) {
    const std::string len = std::to_string(field->size()) + ":";
    h = Fnv1a64(len, h);
    h = Fnv1a64(*field, h);
  }
  return SplitMix64(h);
}

/// Counter-mode generator: output i is SplitMix64(key + i * golden).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t master_seed, const RngKey &key)
      : key_(KeyHash(master_seed, key)) {}

  std::uint64_t NextU64() {
    return SplitMix64(key_ ^ SplitMix64(counter_++ * 0x9E3779B97F4A7C15ull));
  }

  /// Uniform in [0, 1) with 53 random bits.
  double NextUnit() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n > 0, without modulo bias.
  std::uint64_t Below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = NextU64();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pse::mixing

#endif  // PSE_MIXING_RNG_HPP_
