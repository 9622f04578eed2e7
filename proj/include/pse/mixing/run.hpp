// pse/mixing/run.hpp

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

#ifndef PSE_MIXING_RUN_HPP_
#define PSE_MIXING_RUN_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pse/audio/resample.hpp"
#include "pse/audio/wav.hpp"
#include "pse/mixing/mixture.hpp"
#include "pse/util/parallel.hpp"

namespace pse::mixing {

/// Reads a WAV and brings it to the evaluation rate.
inline AudioBuffer LoadForEvaluation(const std::filesystem::path &path) {
  return audio::Resample(audio::ReadWav(path), audio::kEvalSampleRateHz);
}

/// Synthesizes every spec: sources are read from `audio_root`, mixtures and
/// their clean references are written under `output_root`. Returns the specs
/// with realized_gain and joint_scale filled in, in input order. Output is
/// identical for any `parallelism`.
inline std::vector<MixtureSpec> RunMixtures(std::vector<MixtureSpec> specs,
                                            const std::filesystem::path &audio_root,
                                            const std::filesystem::path &output_root,
                                            audio::WavEncoding encoding, int parallelism) {
  std::map<std::string, std::size_t> slot;
  std::vector<std::string> sources;
  for (const auto &s : specs) {
    for (const std::string *p : {&s.clean_path, &s.noise_path})
      if (slot.emplace(*p, sources.size()).second) sources.push_back(*p);
  }
  std::vector<std::optional<AudioBuffer>> loaded(sources.size());
  util::ParallelFor(sources.size(), parallelism,
                    [&](std::size_t i) { loaded[i] = LoadForEvaluation(audio_root / sources[i]); });

  for (const auto &s : specs)
    std::filesystem::create_directories((output_root / s.output_path).parent_path());

  util::ParallelFor(specs.size(), parallelism, [&](std::size_t i) {
    MixtureSpec &s = specs[i];
    const MixtureResult r =
        SynthesizeMixture(s, *loaded[slot.at(s.clean_path)], *loaded[slot.at(s.noise_path)]);
    audio::WriteWav(r.mixture, output_root / s.output_path, encoding);
    audio::WriteWav(r.reference, output_root / s.reference_path, encoding);
    s.realized_gain = r.realized_gain;
    s.joint_scale = r.joint_scale;
  });
  return specs;
}

}  // namespace pse::mixing

#endif  // PSE_MIXING_RUN_HPP_
