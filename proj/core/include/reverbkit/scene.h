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

#ifndef REVERBKIT_SCENE_H_
#define REVERBKIT_SCENE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "reverbkit/types.h"

namespace reverbkit {

// Throws Error with a distinct code per violated invariant; returns the
// scene unchanged otherwise.
const Scene& validate_scene(const Scene& scene);

Scene make_scene(Vec3 room_dims, Vec3 source, Vec3 receiver,
                 SurfaceMaterial material = {0.3, 0.0});

// Scene config documents:
//   {"room": [L, W, H], "source": [x, y, z], "receiver": [x, y, z],
//    "walls": [{"absorption": a, "scattering": s} x 6],
//    "c": 343.0, "fs": 8000.0, "id": "...", "metadata": {...}}
// "c" and "fs" are optional. "walls" may also be a single object applied
// to all six faces. A null room height must be supplied by the caller
// through `height_override`.
struct SceneConfig {
  Scene scene;
  std::string id;
  nlohmann::json metadata = nlohmann::json::object();
};

SceneConfig scene_config_from_json(const nlohmann::json& doc,
                                   std::optional<double> height_override = {});
nlohmann::json scene_to_json(const Scene& scene);
SceneConfig load_scene(const std::filesystem::path& path,
                       std::optional<double> height_override = {});

// FNV-1a over the canonical JSON serialization.
std::uint64_t scene_hash(const Scene& scene);
std::string scene_hash_hex(const Scene& scene);

}  // namespace reverbkit

#endif  // REVERBKIT_SCENE_H_
