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

#ifndef REVERBKIT_METRICS_H_
#define REVERBKIT_METRICS_H_

#include <array>
#include <cstddef>
#include <span>

#include "reverbkit/types.h"

namespace reverbkit {

inline constexpr double kMetricCapDb = 120.0;
inline constexpr std::size_t kSdrFilterTaps = 512;

// s_target = (<est, ref> / |ref|^2) ref, e = est - s_target,
// SI-SDR = 10 log10(|s_target|^2 / |e|^2), clamped to +-kMetricCapDb.
double si_sdr(std::span<const double> estimate, std::span<const double> reference);
double si_sdr(const AudioSignal& estimate, const AudioSignal& reference);

// BSS-eval SDR with a time-invariant distortion filter: the estimate is
// projected onto the span of the reference delayed by 0..taps-1 samples
// (zero padded), s_target is that projection and
// SDR = 10 log10(|s_target|^2 / |est - s_target|^2), clamped to
// +-kMetricCapDb.
double sdr(std::span<const double> estimate, std::span<const double> reference,
           std::size_t taps = kSdrFilterTaps);
double sdr(const AudioSignal& estimate, const AudioSignal& reference);

struct SeparationMetrics {
  std::array<double, 2> si_sdr{};
  std::array<double, 2> sdr{};
  std::array<double, 2> si_sdri{};
  std::array<double, 2> sdri{};
  // permutation[r] is the estimate index assigned to reference r.
  std::array<std::size_t, 2> permutation{0, 1};

  double mean_si_sdri() const { return 0.5 * (si_sdri[0] + si_sdri[1]); }
  double mean_sdri() const { return 0.5 * (sdri[0] + sdri[1]); }
};

// Picks the estimate/reference assignment with the larger mean SI-SDR and
// reports values per reference under it. Improvements are relative to
// using the mixture as the estimate of each reference.
SeparationMetrics eval_pair(std::span<const AudioSignal> estimates,
                            std::span<const AudioSignal> references,
                            const AudioSignal& mixture);

}  // namespace reverbkit

#endif  // REVERBKIT_METRICS_H_
