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

#include "reverbkit/ism.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "reverbkit/error.h"
#include "reverbkit/parallel.h"
#include "reverbkit/scene.h"

namespace reverbkit {

namespace {

constexpr double kSabineConstant = 0.161;

// Lattice planes folded into one accumulation buffer.
constexpr int kPlanesPerChunk = 8;

struct AxisImage {
  double position;
  double gain;
};

// Mirror image along one axis for lattice index n. Even n translate the
// source by n * L, odd n reflect it. |n| reflections split between the two
// walls of the axis.
AxisImage axis_image(int n, double length, double source, double beta_min,
                     double beta_max) {
  const double position = (n % 2 == 0) ? n * length + source : (n + 1) * length - source;
  const int magnitude = std::abs(n);
  const int hits_far = n >= 0 ? (magnitude + 1) / 2 : magnitude / 2;
  const int hits_near = magnitude - hits_far;
  const double gain = std::pow(beta_min, hits_near) * std::pow(beta_max, hits_far);
  return {position, gain};
}

std::array<double, 6> wall_betas(const Scene& scene) {
  std::array<double, 6> betas{};
  for (int w = 0; w < kNumWalls; ++w) betas[w] = scene.walls[w].reflection();
  return betas;
}

}  // namespace

double sabine_t60(const Scene& scene) {
  double absorbing_area = 0.0;
  for (int w = 0; w < kNumWalls; ++w) {
    absorbing_area += scene.walls[w].absorption * scene.wall_area(static_cast<Wall>(w));
  }
  if (absorbing_area <= 0.0) return INFINITY;
  return kSabineConstant * scene.volume() / absorbing_area;
}

double estimate_absorption_for_t60(const Scene& scene, double target_t60) {
  if (!(target_t60 > 0.0) || !std::isfinite(target_t60)) {
    fail(Errc::kInvalidArgument, "target T60 must be positive");
  }
  const double alpha = kSabineConstant * scene.volume() / (target_t60 * scene.surface_area());
  // Tolerate rounding at the alpha = 1 boundary.
  if (alpha > 1.0 + 1e-12) {
    fail(Errc::kUnachievableTarget,
         "target T60 " + std::to_string(target_t60) +
             " s needs absorption " + std::to_string(alpha) + " > 1 under Sabine");
  }
  return std::min(alpha, 1.0);
}

std::vector<ImageSource> enumerate_images(const Scene& scene, int max_order) {
  validate_scene(scene);
  if (max_order < 0) fail(Errc::kInvalidArgument, "max_order must be non-negative");
  const auto betas = wall_betas(scene);
  const Vec3& dims = scene.room_dims;
  const Vec3& src = scene.source_pos;

  std::vector<ImageSource> images;
  for (int nx = -max_order; nx <= max_order; ++nx) {
    const AxisImage ix = axis_image(nx, dims.x, src.x, betas[0], betas[1]);
    const int ry = max_order - std::abs(nx);
    for (int ny = -ry; ny <= ry; ++ny) {
      const AxisImage iy = axis_image(ny, dims.y, src.y, betas[2], betas[3]);
      const int rz = ry - std::abs(ny);
      for (int nz = -rz; nz <= rz; ++nz) {
        const AxisImage iz = axis_image(nz, dims.z, src.z, betas[4], betas[5]);
        ImageSource img;
        img.position = {ix.position, iy.position, iz.position};
        img.gain = ix.gain * iy.gain * iz.gain;
        img.order = std::abs(nx) + std::abs(ny) + std::abs(nz);
        img.index = {nx, ny, nz};
        images.push_back(img);
      }
    }
  }
  return images;
}

void validate(const IsmConfig& cfg) {
  if (!(cfg.duration_s > 0.0) || !std::isfinite(cfg.duration_s)) {
    fail(Errc::kInvalidArgument, "ISM duration must be positive");
  }
  if (!(cfg.highpass_hz >= 0.0) || !std::isfinite(cfg.highpass_hz)) {
    fail(Errc::kInvalidArgument, "high-pass cutoff must be non-negative");
  }
  if (cfg.fractional_delay_taps < 1 || cfg.fractional_delay_taps % 2 == 0) {
    fail(Errc::kInvalidArgument, "fractional delay taps must be odd and >= 1");
  }
}

double default_duration(const Scene& scene) {
  const double t60 = sabine_t60(scene);
  if (!std::isfinite(t60)) return 0.25;
  return std::max(0.25, 1.25 * t60);
}

int default_max_order(const Scene& scene, double duration_s) {
  const double reach = scene.speed_of_sound * duration_s;
  int order = 0;
  for (int axis = 0; axis < 3; ++axis) {
    order += static_cast<int>(std::floor(reach / scene.room_dims[axis])) + 1;
  }
  return order;
}

IsmConfig default_ism_config(const Scene& scene) {
  IsmConfig cfg;
  cfg.duration_s = default_duration(scene);
  cfg.max_order = default_max_order(scene, cfg.duration_s);
  return cfg;
}

void add_fractional_impulse(std::span<double> out, double delay_samples,
                            double amplitude, int taps) {
  const int half = taps / 2;
  const long center = std::lround(delay_samples);
  const long first = center - half;
  // x_k = first + k - delay. sin(pi x_k) alternates sign with k, and the
  // window cosine advances by a fixed angle per tap.
  const double x0 = static_cast<double>(first) - delay_samples;
  const double sin_pi_x0 = std::sin(kPi * x0);
  const double step = kPi / (half + 1);
  double cos_w = std::cos(step * x0);
  double sin_w = std::sin(step * x0);
  const double cos_step = std::cos(step);
  const double sin_step = std::sin(step);
  double sign = 1.0;
  for (int k = 0; k < taps; ++k) {
    const long n = first + k;
    const double x = x0 + k;
    if (n >= 0 && n < static_cast<long>(out.size())) {
      const double sinc = std::abs(x) < 1e-12 ? 1.0 : sign * sin_pi_x0 / (kPi * x);
      out[static_cast<std::size_t>(n)] += amplitude * sinc * 0.5 * (1.0 + cos_w);
    }
    sign = -sign;
    const double c = cos_w * cos_step - sin_w * sin_step;
    sin_w = sin_w * cos_step + cos_w * sin_step;
    cos_w = c;
  }
}

void highpass_in_place(std::span<double> x, double cutoff_hz, double sample_rate) {
  if (!(cutoff_hz > 0.0) || cutoff_hz >= 0.5 * sample_rate) {
    fail(Errc::kInvalidArgument, "high-pass cutoff must lie in (0, fs/2)");
  }
  const double w0 = 2.0 * kPi * cutoff_hz / sample_rate;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / std::sqrt(2.0);
  const double a0 = 1.0 + alpha;
  const double b0 = 0.5 * (1.0 + cw) / a0;
  const double b1 = -(1.0 + cw) / a0;
  const double b2 = b0;
  const double a1 = -2.0 * cw / a0;
  const double a2 = (1.0 - alpha) / a0;
  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& v : x) {
    const double y = b0 * v + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = v;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

ImpulseResponse simulate_ism(const Scene& scene, const IsmConfig& cfg,
                             std::size_t threads) {
  validate_scene(scene);
  validate(cfg);
  const double fs = scene.sample_rate;
  const double c = scene.speed_of_sound;
  const auto length = static_cast<std::size_t>(std::ceil(cfg.duration_s * fs));
  const int max_order = cfg.max_order < 0 ? default_max_order(scene, cfg.duration_s)
                                          : cfg.max_order;
  const auto betas = wall_betas(scene);
  const Vec3& dims = scene.room_dims;
  const Vec3& src = scene.source_pos;
  const Vec3& rcv = scene.receiver_pos;
  const double reach = c * cfg.duration_s;

  std::array<int, 3> axis_limit{};
  for (int axis = 0; axis < 3; ++axis) {
    axis_limit[axis] = std::min(
        max_order, static_cast<int>(std::floor(reach / dims[axis])) + 1);
  }

  const int planes = 2 * axis_limit[0] + 1;
  const int chunks = (planes + kPlanesPerChunk - 1) / kPlanesPerChunk;
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(chunks));

  auto render_plane = [&](int nx, std::vector<double>& buf) {
    const AxisImage ix = axis_image(nx, dims.x, src.x, betas[0], betas[1]);
    const double dx = ix.position - rcv.x;
    if (std::abs(dx) > reach || ix.gain == 0.0) return;
    const int ry = std::min(axis_limit[1], max_order - std::abs(nx));
    for (int ny = -ry; ny <= ry; ++ny) {
      const AxisImage iy = axis_image(ny, dims.y, src.y, betas[2], betas[3]);
      const double dy = iy.position - rcv.y;
      if (dx * dx + dy * dy > reach * reach || iy.gain == 0.0) continue;
      const int rz = std::min(axis_limit[2], max_order - std::abs(nx) - std::abs(ny));
      for (int nz = -rz; nz <= rz; ++nz) {
        const AxisImage iz = axis_image(nz, dims.z, src.z, betas[4], betas[5]);
        const double gain = ix.gain * iy.gain * iz.gain;
        if (gain == 0.0) continue;
        const double dz = iz.position - rcv.z;
        const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (d == 0.0) fail(Errc::kCoincidentPositions, "image coincides with receiver");
        const double delay = d / c * fs;
        if (delay >= static_cast<double>(length)) continue;
        add_fractional_impulse(buf, delay, gain / (4.0 * kPi * d),
                               cfg.fractional_delay_taps);
      }
    }
  };

  parallel_for(static_cast<std::size_t>(chunks), threads, [&](std::size_t chunk) {
    std::vector<double> buf(length, 0.0);
    const int begin = -axis_limit[0] + static_cast<int>(chunk) * kPlanesPerChunk;
    const int end = std::min(axis_limit[0], begin + kPlanesPerChunk - 1);
    for (int nx = begin; nx <= end; ++nx) render_plane(nx, buf);
    partial[chunk] = std::move(buf);
  });

  std::vector<double> out(length, 0.0);
  for (const auto& buf : partial) {
    for (std::size_t i = 0; i < length; ++i) out[i] += buf[i];
  }
  if (cfg.highpass_hz > 0.0) highpass_in_place(out, cfg.highpass_hz, fs);
  return ImpulseResponse(std::move(out), fs, Provenance::kIsm, scene_hash_hex(scene));
}

}  // namespace reverbkit
