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

#include "reverbkit/mixer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fft.h"
#include "reverbkit/error.h"
#include "reverbkit/rng.h"
#include "reverbkit/wav.h"

namespace reverbkit {

namespace {

// Direct convolution below this many multiply-adds.
constexpr std::size_t kDirectWorkLimit = 1u << 16;

std::vector<double> convolve_direct(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += ai * b[j];
  }
  return out;
}

std::vector<double> convolve_fft(std::span<const double> a, std::span<const double> b) {
  const std::size_t out_len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  internal::RealFft fft(n);
  const auto fa = fft.forward(a);
  std::vector<std::complex<double>> spectrum(fa.begin(), fa.end());
  const auto fb = fft.forward(b);
  for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] *= fb[k];
  const auto time = fft.inverse(spectrum);
  std::vector<double> out(out_len);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = time[i] * scale;
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& root, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || root.empty() ? path : root / path;
}

}  // namespace

std::vector<double> convolve(std::span<const double> a, std::span<const double> b,
                             ConvolutionMethod method) {
  if (a.empty() || b.empty()) fail(Errc::kInvalidArgument, "cannot convolve empty signals");
  if (method == ConvolutionMethod::kAuto) {
    method = a.size() * b.size() <= kDirectWorkLimit || std::min(a.size(), b.size()) <= 32
                 ? ConvolutionMethod::kDirect
                 : ConvolutionMethod::kFft;
  }
  return method == ConvolutionMethod::kDirect ? convolve_direct(a, b) : convolve_fft(a, b);
}

AudioSignal convolve(const AudioSignal& dry, const ImpulseResponse& rir,
                     ConvolutionMethod method) {
  if (dry.sample_rate() != rir.sample_rate()) {
    fail(Errc::kSampleRateMismatch, "signal and RIR sample rates differ");
  }
  if (dry.size() == 0) fail(Errc::kInvalidArgument, "cannot convolve an empty signal");
  return AudioSignal(convolve(dry.samples(), rir.samples(), method), dry.sample_rate());
}

MixResult mix_min(std::span<const AudioSignal> sources, std::span<const double> gains_db) {
  if (sources.empty()) fail(Errc::kInvalidArgument, "mix_min needs at least one source");
  if (gains_db.size() != sources.size()) {
    fail(Errc::kInvalidArgument, "one gain per source is required");
  }
  const double rate = sources.front().sample_rate();
  std::size_t length = sources.front().size();
  for (const auto& s : sources) {
    if (s.sample_rate() != rate) fail(Errc::kSampleRateMismatch, "source sample rates differ");
    length = std::min(length, s.size());
  }
  std::vector<double> mix(length, 0.0);
  std::vector<AudioSignal> truncated;
  truncated.reserve(sources.size());
  for (std::size_t k = 0; k < sources.size(); ++k) {
    if (!std::isfinite(gains_db[k])) fail(Errc::kInvalidArgument, "gains must be finite");
    const double g = std::pow(10.0, gains_db[k] / 20.0);
    const auto x = sources[k].samples();
    std::vector<double> target(length);
    for (std::size_t i = 0; i < length; ++i) {
      target[i] = g * x[i];
      mix[i] += target[i];
    }
    truncated.emplace_back(std::move(target), rate);
  }
  return {AudioSignal(std::move(mix), rate), std::move(truncated)};
}

void validate(const MixtureSpec& spec) {
  if (spec.output_id.empty()) fail(Errc::kInvalidConfig, "mixture spec needs an output_id");
  if (spec.output_id.find('/') != std::string::npos) {
    fail(Errc::kInvalidConfig, "output_id must not contain '/'");
  }
  for (double g : spec.gains_db) {
    if (!std::isfinite(g)) fail(Errc::kInvalidConfig, "gains must be finite");
  }
}

nlohmann::json spec_to_json(const MixtureSpec& spec) {
  return {{"output_id", spec.output_id},
          {"source_paths", spec.source_paths},
          {"rir_refs", spec.rir_refs},
          {"gains_db", spec.gains_db},
          {"seed", spec.seed}};
}

MixtureSpec spec_from_manifest_row(const nlohmann::json& row) {
  try {
    MixtureSpec spec;
    spec.output_id = row.at("output_id").get<std::string>();
    spec.source_paths = row.at("source_paths").get<std::array<std::string, 2>>();
    spec.rir_refs = row.at("rir_refs").get<std::array<std::string, 2>>();
    if (row.contains("gains_db")) spec.gains_db = row["gains_db"].get<std::array<double, 2>>();
    spec.seed = row.value("seed", std::uint64_t{0});
    validate(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kInvalidConfig, std::string("bad mixture row: ") + e.what());
  }
}

MixtureOutputs build_mixture(const MixtureSpec& spec,
                             const std::filesystem::path& input_root,
                             const std::filesystem::path& out_dir) {
  validate(spec);
  std::vector<AudioSignal> reverberant;
  std::array<std::string, 2> provenance;
  std::array<std::size_t, 2> dry_lengths{};
  for (int k = 0; k < 2; ++k) {
    const AudioSignal dry = read_wav(resolve(input_root, spec.source_paths[k]));
    const ImpulseResponse rir = read_rir(resolve(input_root, spec.rir_refs[k]));
    if (dry.sample_rate() != rir.sample_rate()) {
      fail(Errc::kSampleRateMismatch, "source " + spec.source_paths[k] + " and RIR " +
                                          spec.rir_refs[k] + " sample rates differ");
    }
    dry_lengths[k] = dry.size();
    provenance[k] = std::string(provenance_name(rir.provenance()));
    reverberant.push_back(convolve(dry, rir));
  }
  const MixResult mixed = mix_min(reverberant, spec.gains_db);

  std::filesystem::create_directories(out_dir);
  MixtureOutputs out;
  out.mixture = out_dir / (spec.output_id + "_mix.wav");
  out.targets = {out_dir / (spec.output_id + "_s1.wav"), out_dir / (spec.output_id + "_s2.wav")};
  write_wav(out.mixture, mixed.mixture);
  for (int k = 0; k < 2; ++k) write_wav(out.targets[k], mixed.sources[k]);

  out.manifest_row = spec_to_json(spec);
  out.manifest_row["rir_provenance"] = provenance;
  out.manifest_row["lengths"] = {{"dry", dry_lengths},
                                 {"reverberant", {reverberant[0].size(), reverberant[1].size()}},
                                 {"mixture", mixed.mixture.size()}};
  out.manifest_row["mixture"] = out.mixture.filename().string();
  out.manifest_row["targets"] = {out.targets[0].filename().string(),
                                 out.targets[1].filename().string()};
  return out;
}

std::size_t sample_rir(std::size_t pool_size, std::size_t frontier_count,
                       std::uint64_t seed, std::uint64_t counter) {
  if (frontier_count == 0) fail(Errc::kInvalidArgument, "RIR frontier is empty");
  if (frontier_count > pool_size) {
    fail(Errc::kInvalidArgument, "frontier exceeds the pool size");
  }
  CounterRng rng(seed, counter);
  return static_cast<std::size_t>(rng.below(frontier_count));
}

std::vector<MixtureSpec> make_mixture_specs(std::span<const std::string> clips,
                                            const RirPool& pool,
                                            std::size_t frontier_count,
                                            std::size_t count, std::uint64_t seed,
                                            PairPolicy policy) {
  if (clips.size() < 2) fail(Errc::kInvalidArgument, "need at least two dry clips");
  frontier_count = std::min(frontier_count, pool.size());
  std::vector<MixtureSpec> specs;
  specs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    MixtureSpec spec;
    spec.seed = derive_seed(seed, i);
    char id[32];
    std::snprintf(id, sizeof(id), "mix_%05zu", i);
    spec.output_id = id;

    CounterRng clip_rng(spec.seed, 1u << 20);
    const std::size_t a = clip_rng.below(clips.size());
    std::size_t b = clip_rng.below(clips.size() - 1);
    if (b >= a) ++b;
    spec.source_paths = {clips[a], clips[b]};

    std::uint64_t counter = 0;
    const std::size_t first = sample_rir(pool.size(), frontier_count, spec.seed, counter++);
    std::size_t second = first;
    if (policy == PairPolicy::kSameRoom) {
      std::vector<std::size_t> same;
      for (std::size_t k = 0; k < frontier_count; ++k) {
        if (pool[k].room == pool[first].room) same.push_back(k);
      }
      second = same[sample_rir(same.size(), same.size(), spec.seed, counter++)];
    } else {
      second = sample_rir(pool.size(), frontier_count, spec.seed, counter++);
      while (frontier_count > 1 && second == first) {
        second = sample_rir(pool.size(), frontier_count, spec.seed, counter++);
      }
    }
    spec.rir_refs = {pool[first].path, pool[second].path};
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace reverbkit
