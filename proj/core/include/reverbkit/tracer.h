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

#ifndef REVERBKIT_TRACER_H_
#define REVERBKIT_TRACER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "reverbkit/types.h"

namespace reverbkit {

struct TracerConfig {
  std::size_t num_rays = 100000;
  int max_bounces = 200;
  // Rays stop once their energy drops below energy_floor x initial energy.
  double energy_floor = 1e-6;
  double receiver_radius = 0.25;
  double bin_width_s = 1e-3;
  double duration_s = 0.5;
  std::uint64_t seed = 0;
};

void validate(const TracerConfig& cfg, const Scene& scene);

TracerConfig default_tracer_config(const Scene& scene, std::uint64_t seed);

class EnergyHistogram {
 public:
  EnergyHistogram(std::vector<double> bins, double bin_width_s,
                  double sample_rate);

  const std::vector<double>& bins() const { return bins_; }
  double bin_width_s() const { return bin_width_s_; }
  double sample_rate() const { return sample_rate_; }
  double total() const;
  std::size_t bin_of(double time_s) const;

  // Multiplies every bin by `factor` (>= 0).
  EnergyHistogram scaled(double factor) const;

  friend bool operator==(const EnergyHistogram&, const EnergyHistogram&) = default;

 private:
  std::vector<double> bins_;
  double bin_width_s_;
  double sample_rate_;
};

enum class DirectPath { kInclude, kExclude };

// Stochastic specular/diffuse energy tracing from the source to a receiver
// sphere. Each ray starts with energy 1/num_rays. Arrival time of a deposit
// is (path length to the segment start + distance from the segment start to
// the receiver center) / c, which puts every direct-path deposit exactly at
// d/c. Rays are traced in fixed blocks whose histograms are summed in block
// order; output is bit-identical for any `threads`.
EnergyHistogram trace_rays(const Scene& scene, const TracerConfig& cfg,
                           DirectPath direct = DirectPath::kInclude,
                           std::size_t threads = 1);

// Pressure reconstruction: each bin's sample span is filled with seeded
// Gaussian noise, rescaled so its energy equals the bin's energy.
ImpulseResponse histogram_to_rir(const EnergyHistogram& hist, std::uint64_t seed);

// First sample of bin k: round(k * bin_width_s * sample_rate).
std::size_t bin_start_sample(const EnergyHistogram& hist, std::size_t bin);

// Histogram energy to squared-pressure factor for a receiver sphere of the
// given radius: 1 / (4 pi^2 r^2). With it the direct-path bin expectation
// r^2 / (4 d^2) maps to (1 / (4 pi d))^2.
double receiver_energy_scale(double receiver_radius);

// trace_rays without direct deposits, scaled, converted to pressure, plus a
// deterministic direct impulse of amplitude 1/(4 pi d) at delay d/c.
ImpulseResponse simulate_gas(const Scene& scene, const TracerConfig& cfg,
                             std::size_t threads = 1);

// CSV with header "bin_start_s,energy".
void write_histogram_csv(const std::filesystem::path& path,
                         const EnergyHistogram& hist);

}  // namespace reverbkit

#endif  // REVERBKIT_TRACER_H_
