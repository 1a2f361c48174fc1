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

#ifndef REVERBKIT_ANALYSIS_H_
#define REVERBKIT_ANALYSIS_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "reverbkit/types.h"

namespace reverbkit {

inline constexpr double kEdcFloorDb = -140.0;
inline constexpr double kDrrCapDb = 120.0;
inline constexpr double kDirectWindowS = 2.5e-3;

// Schroeder backward integration in dB, 0 dB at the first sample, floored
// at kEdcFloorDb. Fails with kZeroSignal on an all-zero input.
std::vector<double> energy_decay_curve(std::span<const double> samples);
inline std::vector<double> energy_decay_curve(const ImpulseResponse& rir) {
  return energy_decay_curve(rir.samples());
}

struct DecayFit {
  double slope_db_per_s = 0.0;
  double intercept_db = 0.0;
  std::size_t num_points = 0;
};

// Least-squares line through the EDC samples within [-25, -5] dB.
DecayFit fit_decay(std::span<const double> edc_db, double sample_rate);

// T20 extrapolated to 60 dB. Fails with kInsufficientDecay when the EDC
// offers fewer than two samples in the fit range.
double estimate_t60(const ImpulseResponse& rir);
double estimate_t60(std::span<const double> samples, double sample_rate);

// Direct window is +-2.5 ms around the largest-magnitude sample; the
// reverberant part is everything after it. Returns kDrrCapDb when the
// reverberant energy is zero.
double direct_to_reverberant_ratio(const ImpulseResponse& rir);

struct AcousticSummary {
  std::optional<double> t60;
  double drr = 0.0;
  double direct_arrival_s = 0.0;
  double total_energy = 0.0;
};

AcousticSummary summarize(const ImpulseResponse& rir);

// Magnitude STFT with a periodic Hann window. Row f is frequency bin f of
// window_len / 2 + 1, column t is frame t. FFT length equals window_len.
class Spectrogram {
 public:
  Spectrogram(std::size_t num_bins, std::size_t num_frames);

  std::size_t num_bins() const { return num_bins_; }
  std::size_t num_frames() const { return num_frames_; }
  double& at(std::size_t bin, std::size_t frame) {
    return values_[bin * num_frames_ + frame];
  }
  double at(std::size_t bin, std::size_t frame) const {
    return values_[bin * num_frames_ + frame];
  }

 private:
  std::size_t num_bins_;
  std::size_t num_frames_;
  std::vector<double> values_;
};

std::vector<double> hann_window(std::size_t length);

Spectrogram spectrogram(const AudioSignal& signal, std::size_t window_len,
                        std::size_t hop);

void write_spectrogram_csv(const std::filesystem::path& path,
                           const Spectrogram& spec);

// 8-bit grayscale. Pixel = 255 * (dB - (max_dB - range_db)) / range_db,
// clamped to [0, 255], with dB = 20 log10(magnitude) and max_dB the largest
// value in the image. Low frequencies are at the bottom row.
void write_spectrogram_png(const std::filesystem::path& path,
                           const Spectrogram& spec, double range_db = 80.0);

}  // namespace reverbkit

#endif  // REVERBKIT_ANALYSIS_H_
