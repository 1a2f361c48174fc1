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

#ifndef REVERBKIT_TYPES_H_
#define REVERBKIT_TYPES_H_

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reverbkit {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDefaultSpeedOfSound = 343.0;
inline constexpr double kDefaultSampleRate = 8000.0;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int axis) const {
    return axis == 0 ? x : (axis == 1 ? y : z);
  }
  constexpr double& operator[](int axis) {
    return axis == 0 ? x : (axis == 1 ? y : z);
  }
  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend constexpr Vec3 operator*(double k, Vec3 a) {
    return {k * a.x, k * a.y, k * a.z};
  }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

// Full-band absorption and scattering coefficients of one wall.
struct SurfaceMaterial {
  double absorption = 0.0;
  double scattering = 0.0;

  // Pressure reflection magnitude sqrt(1 - absorption).
  double reflection() const { return std::sqrt(1.0 - absorption); }

  friend bool operator==(const SurfaceMaterial&, const SurfaceMaterial&) = default;
};

// Shoebox faces in the order x=0, x=L, y=0, y=W, z=0, z=H.
enum class Wall : int { kXMin = 0, kXMax, kYMin, kYMax, kZMin, kZMax };
inline constexpr int kNumWalls = 6;

struct Scene {
  Vec3 room_dims;
  Vec3 source_pos;
  Vec3 receiver_pos;
  std::array<SurfaceMaterial, kNumWalls> walls{};
  double speed_of_sound = kDefaultSpeedOfSound;
  double sample_rate = kDefaultSampleRate;

  double volume() const { return room_dims.x * room_dims.y * room_dims.z; }
  double surface_area() const {
    const Vec3& d = room_dims;
    return 2.0 * (d.x * d.y + d.x * d.z + d.y * d.z);
  }
  double wall_area(Wall wall) const;
  double source_receiver_distance() const {
    return distance(source_pos, receiver_pos);
  }
  void set_uniform_absorption(double absorption);

  friend bool operator==(const Scene&, const Scene&) = default;
};

enum class Provenance { kIsm, kGas, kExternalReal, kExternalGan };

std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view name);

// Mono sampled signal. Construction rejects non-finite samples.
class AudioSignal {
 public:
  AudioSignal(std::vector<double> samples, double sample_rate);

  std::span<const double> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double sample_rate() const { return sample_rate_; }
  double energy() const;

  friend bool operator==(const AudioSignal&, const AudioSignal&) = default;

 private:
  std::vector<double> samples_;
  double sample_rate_;
};

class ImpulseResponse {
 public:
  ImpulseResponse(std::vector<double> samples, double sample_rate,
                  Provenance provenance,
                  std::optional<std::string> scene_id = std::nullopt);

  std::span<const double> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double sample_rate() const { return sample_rate_; }
  Provenance provenance() const { return provenance_; }
  const std::optional<std::string>& scene_id() const { return scene_id_; }
  double energy() const;

  AudioSignal as_signal() const { return AudioSignal(samples_, sample_rate_); }

  friend bool operator==(const ImpulseResponse&, const ImpulseResponse&) = default;

 private:
  std::vector<double> samples_;
  double sample_rate_;
  Provenance provenance_;
  std::optional<std::string> scene_id_;
};

}  // namespace reverbkit

#endif  // REVERBKIT_TYPES_H_
