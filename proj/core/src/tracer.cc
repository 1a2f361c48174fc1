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

#include "reverbkit/tracer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "reverbkit/error.h"
#include "reverbkit/ism.h"
#include "reverbkit/parallel.h"
#include "reverbkit/rng.h"
#include "reverbkit/scene.h"

namespace reverbkit {

namespace {

// Rays per accumulation block. Fixed so the summation order of the final
// histogram never depends on the worker count.
constexpr std::size_t kRaysPerBlock = 2048;

// Stream ids separating tracer draws from other consumers of a seed.
constexpr std::uint64_t kRayStreamBase = 0x7261790000000000ULL;
constexpr std::uint64_t kCarrierStream = 0x6e6f697365ULL;

Vec3 uniform_sphere(CounterRng& rng) {
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * kPi * rng.uniform();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

// Cosine-weighted direction about the inward normal of an axis-aligned wall.
Vec3 lambert(CounterRng& rng, int axis, double inward_sign) {
  const double u1 = rng.uniform();
  const double phi = 2.0 * kPi * rng.uniform();
  const double r = std::sqrt(u1);
  const double t1 = r * std::cos(phi);
  const double t2 = r * std::sin(phi);
  const double n = std::sqrt(std::max(0.0, 1.0 - u1));
  Vec3 dir;
  dir[axis] = inward_sign * n;
  dir[(axis + 1) % 3] = t1;
  dir[(axis + 2) % 3] = t2;
  return dir;
}

struct WallHit {
  double t;
  int axis;
  int wall;
};

WallHit next_wall(Vec3 origin, Vec3 dir, Vec3 dims) {
  WallHit best{std::numeric_limits<double>::infinity(), 0, 0};
  for (int axis = 0; axis < 3; ++axis) {
    if (dir[axis] > 0.0) {
      const double t = (dims[axis] - origin[axis]) / dir[axis];
      if (t < best.t) best = {t, axis, 2 * axis + 1};
    } else if (dir[axis] < 0.0) {
      const double t = -origin[axis] / dir[axis];
      if (t < best.t) best = {t, axis, 2 * axis};
    }
  }
  best.t = std::max(best.t, 0.0);
  return best;
}

// True when the segment origin + [0, length] * dir passes within `radius`
// of `center`.
bool segment_hits_sphere(Vec3 origin, Vec3 dir, double length, Vec3 center,
                         double radius) {
  const Vec3 oc = center - origin;
  const double along = std::clamp(dot(oc, dir), 0.0, length);
  const Vec3 closest = origin + along * dir;
  const Vec3 off = center - closest;
  return dot(off, off) <= radius * radius;
}

void trace_block(const Scene& scene, const TracerConfig& cfg, DirectPath direct,
                 std::size_t first_ray, std::size_t last_ray,
                 std::vector<double>& bins) {
  const double c = scene.speed_of_sound;
  const double max_length = c * cfg.duration_s;
  const double initial = 1.0 / static_cast<double>(cfg.num_rays);
  const double floor = cfg.energy_floor * initial;
  const Vec3 rcv = scene.receiver_pos;
  const double bin_length = c * cfg.bin_width_s;

  for (std::size_t ray = first_ray; ray < last_ray; ++ray) {
    CounterRng rng(cfg.seed, kRayStreamBase + ray);
    Vec3 origin = scene.source_pos;
    Vec3 dir = uniform_sphere(rng);
    double energy = initial;
    double travelled = 0.0;
    for (int bounce = 0;; ++bounce) {
      const WallHit hit = next_wall(origin, dir, scene.room_dims);
      const double seg = std::min(hit.t, max_length - travelled);
      if ((bounce > 0 || direct == DirectPath::kInclude) &&
          segment_hits_sphere(origin, dir, seg, rcv, cfg.receiver_radius)) {
        const double arrival = travelled + distance(origin, rcv);
        const auto bin = static_cast<std::size_t>(arrival / bin_length);
        if (arrival < max_length && bin < bins.size()) bins[bin] += energy;
      }
      travelled += hit.t;
      if (travelled >= max_length || bounce + 1 > cfg.max_bounces) break;

      const SurfaceMaterial& m = scene.walls[hit.wall];
      energy *= 1.0 - m.absorption;
      if (energy < floor || energy <= 0.0) break;

      origin = origin + hit.t * dir;
      // Pin the hit coordinate to the wall to keep rays inside the box.
      origin[hit.axis] = (hit.wall % 2 == 1) ? scene.room_dims[hit.axis] : 0.0;
      const double inward = (hit.wall % 2 == 1) ? -1.0 : 1.0;
      if (m.scattering > 0.0 && rng.uniform() < m.scattering) {
        dir = lambert(rng, hit.axis, inward);
      } else {
        dir[hit.axis] = -dir[hit.axis];
      }
    }
  }
}

}  // namespace

void validate(const TracerConfig& cfg, const Scene& scene) {
  if (cfg.num_rays < 1) fail(Errc::kInvalidArgument, "num_rays must be >= 1");
  if (cfg.max_bounces < 1) fail(Errc::kInvalidArgument, "max_bounces must be >= 1");
  const double min_dim = std::min({scene.room_dims.x, scene.room_dims.y, scene.room_dims.z});
  if (!(cfg.receiver_radius > 0.0 && cfg.receiver_radius < min_dim / 2.0)) {
    fail(Errc::kInvalidArgument, "receiver radius must lie in (0, min room dimension / 2)");
  }
  if (!(cfg.bin_width_s > 0.0)) fail(Errc::kInvalidArgument, "bin width must be positive");
  if (!(cfg.duration_s > 0.0)) fail(Errc::kInvalidArgument, "duration must be positive");
  if (!(cfg.energy_floor >= 0.0 && cfg.energy_floor < 1.0)) {
    fail(Errc::kInvalidArgument, "energy floor must lie in [0, 1)");
  }
}

TracerConfig default_tracer_config(const Scene& scene, std::uint64_t seed) {
  TracerConfig cfg;
  cfg.duration_s = default_duration(scene);
  cfg.seed = seed;
  return cfg;
}

EnergyHistogram::EnergyHistogram(std::vector<double> bins, double bin_width_s,
                                 double sample_rate)
    : bins_(std::move(bins)), bin_width_s_(bin_width_s), sample_rate_(sample_rate) {
  if (!(bin_width_s_ > 0.0)) fail(Errc::kInvalidArgument, "bin width must be positive");
  if (!(sample_rate_ > 0.0)) fail(Errc::kInvalidArgument, "sample rate must be positive");
  for (double b : bins_) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      fail(Errc::kInvalidArgument, "histogram bins must be finite and non-negative");
    }
  }
}

double EnergyHistogram::total() const {
  double sum = 0.0;
  for (double b : bins_) sum += b;
  return sum;
}

std::size_t EnergyHistogram::bin_of(double time_s) const {
  return static_cast<std::size_t>(time_s / bin_width_s_);
}

EnergyHistogram EnergyHistogram::scaled(double factor) const {
  std::vector<double> out(bins_);
  for (double& b : out) b *= factor;
  return EnergyHistogram(std::move(out), bin_width_s_, sample_rate_);
}

EnergyHistogram trace_rays(const Scene& scene, const TracerConfig& cfg,
                           DirectPath direct, std::size_t threads) {
  validate_scene(scene);
  validate(cfg, scene);
  if (scene.source_receiver_distance() <= cfg.receiver_radius) {
    fail(Errc::kReceiverContainsSource, "receiver sphere contains the source");
  }
  const auto num_bins =
      static_cast<std::size_t>(std::ceil(cfg.duration_s / cfg.bin_width_s - 1e-9));
  const std::size_t blocks = (cfg.num_rays + kRaysPerBlock - 1) / kRaysPerBlock;
  std::vector<std::vector<double>> partial(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    std::vector<double> bins(num_bins, 0.0);
    const std::size_t first = b * kRaysPerBlock;
    const std::size_t last = std::min(cfg.num_rays, first + kRaysPerBlock);
    trace_block(scene, cfg, direct, first, last, bins);
    partial[b] = std::move(bins);
  });
  std::vector<double> total(num_bins, 0.0);
  for (const auto& bins : partial) {
    for (std::size_t i = 0; i < num_bins; ++i) total[i] += bins[i];
  }
  return EnergyHistogram(std::move(total), cfg.bin_width_s, scene.sample_rate);
}

std::size_t bin_start_sample(const EnergyHistogram& hist, std::size_t bin) {
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(bin) * hist.bin_width_s() * hist.sample_rate()));
}

ImpulseResponse histogram_to_rir(const EnergyHistogram& hist, std::uint64_t seed) {
  const std::size_t nbins = hist.bins().size();
  const std::size_t length = std::max<std::size_t>(1, bin_start_sample(hist, nbins));
  std::vector<double> out(length, 0.0);
  for (std::size_t b = 0; b < nbins; ++b) {
    const double energy = hist.bins()[b];
    const std::size_t begin = bin_start_sample(hist, b);
    const std::size_t end = std::min(length, bin_start_sample(hist, b + 1));
    if (energy <= 0.0 || end <= begin) continue;
    CounterRng rng(seed, kCarrierStream + b);
    double carrier_energy = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = rng.normal();
      carrier_energy += out[i] * out[i];
    }
    if (carrier_energy <= 0.0) continue;
    const double scale = std::sqrt(energy / carrier_energy);
    for (std::size_t i = begin; i < end; ++i) out[i] *= scale;
  }
  return ImpulseResponse(std::move(out), hist.sample_rate(), Provenance::kGas);
}

double receiver_energy_scale(double receiver_radius) {
  return 1.0 / (4.0 * kPi * kPi * receiver_radius * receiver_radius);
}

ImpulseResponse simulate_gas(const Scene& scene, const TracerConfig& cfg,
                             std::size_t threads) {
  const EnergyHistogram reflected =
      trace_rays(scene, cfg, DirectPath::kExclude, threads)
          .scaled(receiver_energy_scale(cfg.receiver_radius));
  const ImpulseResponse tail = histogram_to_rir(reflected, cfg.seed);
  const auto length = static_cast<std::size_t>(std::ceil(cfg.duration_s * scene.sample_rate));
  std::vector<double> out(length, 0.0);
  std::copy_n(tail.samples().begin(), std::min(length, tail.size()), out.begin());
  const double d = scene.source_receiver_distance();
  add_fractional_impulse(out, d / scene.speed_of_sound * scene.sample_rate,
                         1.0 / (4.0 * kPi * d), kDefaultFractionalDelayTaps);
  return ImpulseResponse(std::move(out), scene.sample_rate, Provenance::kGas,
                         scene_hash_hex(scene));
}

void write_histogram_csv(const std::filesystem::path& path,
                         const EnergyHistogram& hist) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail(Errc::kIo, "cannot write " + path.string());
  f.precision(17);
  f << "bin_start_s,energy\n";
  for (std::size_t b = 0; b < hist.bins().size(); ++b) {
    f << static_cast<double>(b) * hist.bin_width_s() << ',' << hist.bins()[b] << '\n';
  }
}

}  // namespace reverbkit
