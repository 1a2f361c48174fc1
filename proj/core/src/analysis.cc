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

#include "reverbkit/analysis.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include <png.h>

#include "fft.h"
#include "reverbkit/error.h"

namespace reverbkit {

namespace {
constexpr double kFitUpperDb = -5.0;
constexpr double kFitLowerDb = -25.0;
}  // namespace

std::vector<double> energy_decay_curve(std::span<const double> samples) {
  std::vector<double> tail(samples.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = samples.size(); i-- > 0;) {
    acc += samples[i] * samples[i];
    tail[i] = acc;
  }
  if (samples.empty() || acc <= 0.0) {
    fail(Errc::kZeroSignal, "energy decay curve of an all-zero signal");
  }
  const double total = acc;
  std::vector<double> edc(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    edc[i] = tail[i] > 0.0 ? std::max(kEdcFloorDb, 10.0 * std::log10(tail[i] / total))
                           : kEdcFloorDb;
  }
  // Backward sums are non-increasing; clamp rounding so the curve is too.
  edc[0] = 0.0;
  for (std::size_t i = 1; i < edc.size(); ++i) edc[i] = std::min(edc[i], edc[i - 1]);
  return edc;
}

DecayFit fit_decay(std::span<const double> edc_db, double sample_rate) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < edc_db.size(); ++i) {
    const double v = edc_db[i];
    if (v > kFitUpperDb) continue;
    if (v < kFitLowerDb) break;
    const double t = static_cast<double>(i) / sample_rate;
    sx += t;
    sy += v;
    sxx += t * t;
    sxy += t * v;
    ++n;
  }
  DecayFit fit;
  fit.num_points = n;
  if (n < 2) return fit;
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) return fit;
  fit.slope_db_per_s = (n * sxy - sx * sy) / denom;
  fit.intercept_db = (sy - fit.slope_db_per_s * sx) / n;
  return fit;
}

double estimate_t60(std::span<const double> samples, double sample_rate) {
  const std::vector<double> edc = energy_decay_curve(samples);
  if (edc.back() > kFitLowerDb) {
    fail(Errc::kInsufficientDecay, "energy decay curve never reaches -25 dB");
  }
  const DecayFit fit = fit_decay(edc, sample_rate);
  if (fit.num_points < 2 || !(fit.slope_db_per_s < 0.0)) {
    fail(Errc::kInsufficientDecay, "too few decay samples between -5 and -25 dB");
  }
  return -60.0 / fit.slope_db_per_s;
}

double estimate_t60(const ImpulseResponse& rir) {
  return estimate_t60(rir.samples(), rir.sample_rate());
}

double direct_to_reverberant_ratio(const ImpulseResponse& rir) {
  const auto h = rir.samples();
  if (rir.energy() <= 0.0) fail(Errc::kZeroSignal, "DRR of an all-zero RIR");
  std::size_t peak = 0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (std::abs(h[i]) > std::abs(h[peak])) peak = i;
  }
  const auto half = static_cast<std::size_t>(std::lround(kDirectWindowS * rir.sample_rate()));
  const std::size_t begin = peak >= half ? peak - half : 0;
  const std::size_t end = std::min(h.size(), peak + half + 1);
  double direct = 0.0, reverberant = 0.0;
  for (std::size_t i = begin; i < end; ++i) direct += h[i] * h[i];
  for (std::size_t i = end; i < h.size(); ++i) reverberant += h[i] * h[i];
  if (reverberant <= 0.0) return kDrrCapDb;
  return std::clamp(10.0 * std::log10(direct / reverberant), -kDrrCapDb, kDrrCapDb);
}

AcousticSummary summarize(const ImpulseResponse& rir) {
  AcousticSummary s;
  s.total_energy = rir.energy();
  s.drr = direct_to_reverberant_ratio(rir);
  const auto h = rir.samples();
  std::size_t peak = 0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (std::abs(h[i]) > std::abs(h[peak])) peak = i;
  }
  s.direct_arrival_s = static_cast<double>(peak) / rir.sample_rate();
  try {
    s.t60 = estimate_t60(rir);
  } catch (const Error& e) {
    if (e.code() != Errc::kInsufficientDecay) throw;
  }
  return s;
}

Spectrogram::Spectrogram(std::size_t num_bins, std::size_t num_frames)
    : num_bins_(num_bins), num_frames_(num_frames), values_(num_bins * num_frames, 0.0) {}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(length));
  }
  return w;
}

Spectrogram spectrogram(const AudioSignal& signal, std::size_t window_len,
                        std::size_t hop) {
  if (hop < 1 || window_len < hop) {
    fail(Errc::kInvalidArgument, "spectrogram needs window_len >= hop >= 1");
  }
  if (signal.size() < window_len) {
    fail(Errc::kInvalidArgument, "signal is shorter than the analysis window");
  }
  const std::size_t frames = (signal.size() - window_len) / hop + 1;
  internal::RealFft fft(window_len);
  Spectrogram spec(fft.num_bins(), frames);
  const std::vector<double> window = hann_window(window_len);
  std::vector<double> frame(window_len);
  const auto x = signal.samples();
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t n = 0; n < window_len; ++n) frame[n] = x[t * hop + n] * window[n];
    const auto bins = fft.forward(frame);
    for (std::size_t f = 0; f < bins.size(); ++f) spec.at(f, t) = std::abs(bins[f]);
  }
  return spec;
}

void write_spectrogram_csv(const std::filesystem::path& path, const Spectrogram& spec) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail(Errc::kIo, "cannot write " + path.string());
  f.precision(9);
  for (std::size_t b = 0; b < spec.num_bins(); ++b) {
    for (std::size_t t = 0; t < spec.num_frames(); ++t) {
      if (t) f << ',';
      f << spec.at(b, t);
    }
    f << '\n';
  }
}

void write_spectrogram_png(const std::filesystem::path& path, const Spectrogram& spec,
                           double range_db) {
  if (!(range_db > 0.0)) fail(Errc::kInvalidArgument, "dB range must be positive");
  const std::size_t width = spec.num_frames();
  const std::size_t height = spec.num_bins();
  std::vector<double> db(width * height);
  double max_db = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < height; ++b) {
    for (std::size_t t = 0; t < width; ++t) {
      const double v = 20.0 * std::log10(std::max(spec.at(b, t), 1e-300));
      db[b * width + t] = v;
      max_db = std::max(max_db, v);
    }
  }
  const double lo = max_db - range_db;
  std::vector<png_byte> pixels(width * height);
  for (std::size_t row = 0; row < height; ++row) {
    const std::size_t b = height - 1 - row;
    for (std::size_t t = 0; t < width; ++t) {
      const double level = 255.0 * (db[b * width + t] - lo) / range_db;
      pixels[row * width + t] = static_cast<png_byte>(std::lround(std::clamp(level, 0.0, 255.0)));
    }
  }

  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) fail(Errc::kIo, "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(Errc::kIo, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(Errc::kIo, "libpng failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t row = 0; row < height; ++row) {
    png_write_row(png, pixels.data() + row * width);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace reverbkit
