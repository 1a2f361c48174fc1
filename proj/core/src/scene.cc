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

#include "reverbkit/scene.h"

#include <cstdio>
#include <fstream>

#include "reverbkit/error.h"

namespace reverbkit {

namespace {

const char* kAxisNames[3] = {"length", "width", "height"};

void check_inside(const Scene& scene, Vec3 p, const char* what) {
  for (int axis = 0; axis < 3; ++axis) {
    if (!(p[axis] > 0.0 && p[axis] < scene.room_dims[axis])) {
      fail(Errc::kPositionOutsideRoom,
           std::string(what) + " is outside the room along " + kAxisNames[axis]);
    }
  }
}

Vec3 vec3_from_json(const nlohmann::json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) {
    fail(Errc::kInvalidConfig, std::string("'") + key + "' must be a 3-element array");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) {
      fail(Errc::kInvalidConfig, std::string("'") + key + "' entries must be numbers");
    }
    v[i] = j[i].get<double>();
  }
  return v;
}

SurfaceMaterial material_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(Errc::kInvalidConfig, "wall entries must be objects");
  SurfaceMaterial m;
  m.absorption = j.value("absorption", 0.0);
  m.scattering = j.value("scattering", 0.0);
  return m;
}

}  // namespace

const Scene& validate_scene(const Scene& scene) {
  for (int axis = 0; axis < 3; ++axis) {
    const double d = scene.room_dims[axis];
    if (!(d > 0.0) || !std::isfinite(d)) {
      fail(Errc::kNonPositiveDimension,
           std::string("room ") + kAxisNames[axis] + " must be positive");
    }
  }
  check_inside(scene, scene.source_pos, "source");
  check_inside(scene, scene.receiver_pos, "receiver");
  if (scene.source_pos == scene.receiver_pos) {
    fail(Errc::kCoincidentPositions, "source and receiver coincide");
  }
  for (int w = 0; w < kNumWalls; ++w) {
    const SurfaceMaterial& m = scene.walls[w];
    if (!(m.absorption >= 0.0 && m.absorption <= 1.0) ||
        !(m.scattering >= 0.0 && m.scattering <= 1.0)) {
      fail(Errc::kMaterialOutOfRange,
           "wall " + std::to_string(w) + " absorption/scattering outside [0, 1]");
    }
  }
  if (!(scene.speed_of_sound > 0.0) || !std::isfinite(scene.speed_of_sound)) {
    fail(Errc::kInvalidArgument, "speed of sound must be positive");
  }
  if (!(scene.sample_rate > 0.0) || !std::isfinite(scene.sample_rate)) {
    fail(Errc::kInvalidArgument, "sample rate must be positive");
  }
  return scene;
}

Scene make_scene(Vec3 room_dims, Vec3 source, Vec3 receiver,
                 SurfaceMaterial material) {
  Scene scene;
  scene.room_dims = room_dims;
  scene.source_pos = source;
  scene.receiver_pos = receiver;
  scene.walls.fill(material);
  return scene;
}

SceneConfig scene_config_from_json(const nlohmann::json& doc,
                                   std::optional<double> height_override) {
  if (!doc.is_object()) fail(Errc::kInvalidConfig, "scene config must be an object");
  for (const char* key : {"room", "source", "receiver", "walls"}) {
    if (!doc.contains(key)) {
      fail(Errc::kInvalidConfig, std::string("scene config lacks '") + key + "'");
    }
  }
  SceneConfig cfg;
  Scene& scene = cfg.scene;

  nlohmann::json room = doc["room"];
  if (room.is_array() && room.size() == 3 && room[2].is_null()) {
    if (!height_override) {
      fail(Errc::kInvalidConfig,
           "room height is not specified in the config and must be supplied");
    }
    room[2] = *height_override;
  } else if (height_override) {
    if (room.is_array() && room.size() == 3) room[2] = *height_override;
  }
  scene.room_dims = vec3_from_json(room, "room");
  scene.source_pos = vec3_from_json(doc["source"], "source");
  scene.receiver_pos = vec3_from_json(doc["receiver"], "receiver");

  const auto& walls = doc["walls"];
  if (walls.is_object()) {
    scene.walls.fill(material_from_json(walls));
  } else if (walls.is_array() && walls.size() == kNumWalls) {
    for (int w = 0; w < kNumWalls; ++w) scene.walls[w] = material_from_json(walls[w]);
  } else {
    fail(Errc::kInvalidConfig, "'walls' must be an object or a 6-element array");
  }
  scene.speed_of_sound = doc.value("c", kDefaultSpeedOfSound);
  scene.sample_rate = doc.value("fs", kDefaultSampleRate);
  cfg.id = doc.value("id", std::string());
  if (doc.contains("metadata")) cfg.metadata = doc["metadata"];
  validate_scene(scene);
  return cfg;
}

nlohmann::json scene_to_json(const Scene& scene) {
  auto v = [](Vec3 p) { return nlohmann::json::array({p.x, p.y, p.z}); };
  nlohmann::json walls = nlohmann::json::array();
  for (const auto& m : scene.walls) {
    walls.push_back({{"absorption", m.absorption}, {"scattering", m.scattering}});
  }
  return {{"room", v(scene.room_dims)},
          {"source", v(scene.source_pos)},
          {"receiver", v(scene.receiver_pos)},
          {"walls", walls},
          {"c", scene.speed_of_sound},
          {"fs", scene.sample_rate}};
}

SceneConfig load_scene(const std::filesystem::path& path,
                       std::optional<double> height_override) {
  std::ifstream in(path);
  if (!in) fail(Errc::kMissingFile, "cannot open scene " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kInvalidConfig, path.string() + ": " + e.what());
  }
  try {
    SceneConfig cfg = scene_config_from_json(doc, height_override);
    if (cfg.id.empty()) cfg.id = path.stem().string();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kInvalidConfig, path.string() + ": " + e.what());
  }
}

std::uint64_t scene_hash(const Scene& scene) {
  const std::string canonical = scene_to_json(scene).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string scene_hash_hex(const Scene& scene) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(scene_hash(scene)));
  return buf;
}

}  // namespace reverbkit
