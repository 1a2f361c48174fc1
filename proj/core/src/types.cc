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

#include "reverbkit/types.h"

#include <numeric>
#include <utility>

#include "reverbkit/error.h"

namespace reverbkit {

namespace {

void check_signal(std::span<const double> samples, double sample_rate) {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    fail(Errc::kInvalidArgument, "sample rate must be positive");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      fail(Errc::kNonFiniteSample,
           "non-finite sample at index " + std::to_string(i));
    }
  }
}

double sum_of_squares(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

}  // namespace

double Scene::wall_area(Wall wall) const {
  switch (wall) {
    case Wall::kXMin:
    case Wall::kXMax:
      return room_dims.y * room_dims.z;
    case Wall::kYMin:
    case Wall::kYMax:
      return room_dims.x * room_dims.z;
    case Wall::kZMin:
    case Wall::kZMax:
      return room_dims.x * room_dims.y;
  }
  return 0.0;
}

void Scene::set_uniform_absorption(double absorption) {
  for (auto& w : walls) w.absorption = absorption;
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kIsm: return "ism";
    case Provenance::kGas: return "gas";
    case Provenance::kExternalReal: return "external-real";
    case Provenance::kExternalGan: return "external-gan";
  }
  return "unknown";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "ism") return Provenance::kIsm;
  if (name == "gas") return Provenance::kGas;
  if (name == "external-real") return Provenance::kExternalReal;
  if (name == "external-gan") return Provenance::kExternalGan;
  fail(Errc::kInvalidConfig, "unknown provenance '" + std::string(name) + "'");
}

AudioSignal::AudioSignal(std::vector<double> samples, double sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  check_signal(samples_, sample_rate_);
}

double AudioSignal::energy() const { return sum_of_squares(samples_); }

ImpulseResponse::ImpulseResponse(std::vector<double> samples, double sample_rate,
                                 Provenance provenance,
                                 std::optional<std::string> scene_id)
    : samples_(std::move(samples)),
      sample_rate_(sample_rate),
      provenance_(provenance),
      scene_id_(std::move(scene_id)) {
  if (samples_.empty()) fail(Errc::kInvalidArgument, "impulse response is empty");
  check_signal(samples_, sample_rate_);
}

double ImpulseResponse::energy() const { return sum_of_squares(samples_); }

}  // namespace reverbkit
