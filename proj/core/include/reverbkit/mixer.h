/*
Copyright 2026 The reverbkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef REVERBKIT_MIXER_H_
#define REVERBKIT_MIXER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reverbkit/pool.h"
#include "reverbkit/types.h"

namespace reverbkit {

enum class ConvolutionMethod { kAuto, kDirect, kFft };

// Full linear convolution, length a.size() + b.size() - 1.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b,
                             ConvolutionMethod method = ConvolutionMethod::kAuto);

AudioSignal convolve(const AudioSignal& dry, const ImpulseResponse& rir,
                     ConvolutionMethod method = ConvolutionMethod::kAuto);

struct MixResult {
  AudioSignal mixture;
  std::vector<AudioSignal> sources;
};

// "min" mixing: every source is truncated to the shortest one and the
// mixture is the gain-weighted sum. `sources` holds the gain-weighted,
// truncated sources, so they add up to the mixture. Samples are never
// clipped.
MixResult mix_min(std::span<const AudioSignal> sources,
                  std::span<const double> gains_db);

struct MixtureSpec {
  std::array<std::string, 2> source_paths;
  std::array<std::string, 2> rir_refs;
  std::array<double, 2> gains_db{0.0, 0.0};
  std::uint64_t seed = 0;
  std::string output_id;

  friend bool operator==(const MixtureSpec&, const MixtureSpec&) = default;
};

void validate(const MixtureSpec& spec);

struct MixtureOutputs {
  std::filesystem::path mixture;
  std::array<std::filesystem::path, 2> targets;
  nlohmann::json manifest_row;
};

// Relative source paths and RIR references resolve against `input_root`.
// Writes <out_dir>/<output_id>_mix.wav, _s1.wav and _s2.wav, where the
// targets are the truncated reverberant sources.
MixtureOutputs build_mixture(const MixtureSpec& spec,
                             const std::filesystem::path& input_root,
                             const std::filesystem::path& out_dir);

// Parses the fields written by build_mixture back into a spec.
MixtureSpec spec_from_manifest_row(const nlohmann::json& row);
nlohmann::json spec_to_json(const MixtureSpec& spec);

// Uniform index into the first `frontier_count` pool entries, fixed by
// (seed, counter).
std::size_t sample_rir(std::size_t pool_size, std::size_t frontier_count,
                       std::uint64_t seed, std::uint64_t counter);

enum class PairPolicy {
  // Two independent draws, re-drawn until distinct when the frontier allows.
  kDistinct,
  // Second draw restricted to entries from the first draw's room.
  kSameRoom,
};

// Builds `count` specs: clip pairs drawn without repetition inside a pair,
// RIRs drawn from the pool frontier. Spec i uses seed derive_seed(seed, i).
std::vector<MixtureSpec> make_mixture_specs(
    std::span<const std::string> clips, const RirPool& pool,
    std::size_t frontier_count, std::size_t count, std::uint64_t seed,
    PairPolicy policy = PairPolicy::kDistinct);

}  // namespace reverbkit

#endif  // REVERBKIT_MIXER_H_
