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

#ifndef REVERBKIT_ISM_H_
#define REVERBKIT_ISM_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "reverbkit/types.h"

namespace reverbkit {

// Sabine inversion: uniform absorption giving `target_t60` in the scene's
// room. Fails with kUnachievableTarget when the required absorption exceeds
// 1 and kInvalidArgument for a non-positive target.
double estimate_absorption_for_t60(const Scene& scene, double target_t60);

// Sabine reverberation time for the scene's actual wall materials.
double sabine_t60(const Scene& scene);

struct ImageSource {
  Vec3 position;
  double gain = 1.0;
  int order = 0;
  // Mirror lattice index per axis; |index| reflections along that axis.
  std::array<int, 3> index{};
};

// Every image with |n_x| + |n_y| + |n_z| <= max_order, in lexicographic
// (n_x, n_y, n_z) order. Gains are products of sqrt(1 - alpha) over the
// walls each path reflects from.
std::vector<ImageSource> enumerate_images(const Scene& scene, int max_order);

inline constexpr int kDefaultFractionalDelayTaps = 81;

struct IsmConfig {
  // Negative selects default_max_order(scene, duration_s).
  int max_order = -1;
  double duration_s = 0.5;
  int fractional_delay_taps = kDefaultFractionalDelayTaps;
  // Second-order Butterworth high-pass applied to the summed response.
  // Removes the DC offset that accumulates from in-phase image arrivals.
  // 0 disables it.
  double highpass_hz = 20.0;
};

void validate(const IsmConfig& cfg);

// 1.25 x Sabine T60, floored at 0.25 s.
double default_duration(const Scene& scene);

// Smallest combined order that reaches every image whose path fits inside
// speed_of_sound * duration_s.
int default_max_order(const Scene& scene, double duration_s);

IsmConfig default_ism_config(const Scene& scene);

// Adds amplitude * h(n - delay) into `out`, where h is a Hann-windowed sinc
// with `taps` coefficients centered on the nearest sample to `delay`.
// Taps that fall outside `out` are dropped.
void add_fractional_impulse(std::span<double> out, double delay_samples,
                            double amplitude, int taps);

// In-place second-order Butterworth high-pass, zero initial state.
void highpass_in_place(std::span<double> x, double cutoff_hz, double sample_rate);

// Specular-only RIR. Images are accumulated per x-lattice plane and merged
// in plane order, so the result does not depend on `threads`.
ImpulseResponse simulate_ism(const Scene& scene, const IsmConfig& cfg,
                             std::size_t threads = 1);

}  // namespace reverbkit

#endif  // REVERBKIT_ISM_H_
