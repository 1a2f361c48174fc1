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

#include "reverbkit/curriculum.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "reverbkit/analysis.h"
#include "reverbkit/error.h"
#include "reverbkit/ism.h"
#include "reverbkit/parallel.h"
#include "reverbkit/rng.h"
#include "reverbkit/tracer.h"
#include "reverbkit/wav.h"

namespace reverbkit {

namespace {

constexpr std::string_view kSweepSchema = "reverbkit.sweep_plan/1";
constexpr std::string_view kScheduleSchema = "reverbkit.curriculum/1";
constexpr std::string_view kStagePlanSchema = "reverbkit.stage_plan/1";

Vec3 draw_position(CounterRng& rng, Vec3 dims) {
  Vec3 p;
  for (int axis = 0; axis < 3; ++axis) {
    p[axis] = rng.uniform(kWallClearance, dims[axis] - kWallClearance);
  }
  return p;
}

std::string rir_filename(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rir_%06zu.wav", index);
  return buf;
}

std::string_view pool_kind_name(PoolKind k) {
  switch (k) {
    case PoolKind::kAnechoic: return "anechoic";
    case PoolKind::kGenerated: return "generated";
    case PoolKind::kExternal: return "external";
  }
  return "unknown";
}

PoolKind parse_pool_kind(std::string_view s) {
  if (s == "anechoic") return PoolKind::kAnechoic;
  if (s == "generated") return PoolKind::kGenerated;
  if (s == "external") return PoolKind::kExternal;
  fail(Errc::kInvalidConfig, "unknown pool kind '" + std::string(s) + "'");
}

nlohmann::json params_to_json(const CurriculumParams& p) {
  return {{"block_size", p.block_size},
          {"period_epochs", p.period_epochs},
          {"total_epochs", p.total_epochs}};
}

CurriculumParams params_from_json(const nlohmann::json& j) {
  CurriculumParams p;
  p.block_size = j.value("block_size", p.block_size);
  p.period_epochs = j.value("period_epochs", p.period_epochs);
  p.total_epochs = j.value("total_epochs", p.total_epochs);
  return p;
}

void validate_params(const CurriculumParams& p) {
  if (p.block_size == 0 || p.period_epochs == 0 || p.total_epochs == 0) {
    fail(Errc::kInvalidArgument, "curriculum block size, period and epochs must be positive");
  }
}

}  // namespace

std::string_view generator_name(Generator g) { return g == Generator::kIsm ? "ism" : "gas"; }

Generator parse_generator(std::string_view name) {
  if (name == "ism") return Generator::kIsm;
  if (name == "gas") return Generator::kGas;
  fail(Errc::kInvalidConfig, "unknown generator '" + std::string(name) + "'");
}

SweepPlan build_sweep_plan(std::span<const SceneConfig> rooms, double step,
                           std::size_t rirs_per_step, Generator generator,
                           std::uint64_t seed) {
  if (!(step > 0.0 && step <= 1.0)) fail(Errc::kInvalidArgument, "step must lie in (0, 1]");
  if (rirs_per_step == 0) fail(Errc::kInvalidArgument, "rirs_per_step must be positive");
  if (rooms.empty()) fail(Errc::kInvalidArgument, "a sweep needs at least one room");
  const double steps = 1.0 / step;
  const auto num_steps = static_cast<std::size_t>(std::llround(steps));
  if (std::abs(static_cast<double>(num_steps) * step - 1.0) > 1e-9) {
    fail(Errc::kInvalidArgument, "step must divide 1");
  }
  for (const auto& room : rooms) {
    for (int axis = 0; axis < 3; ++axis) {
      if (room.scene.room_dims[axis] <= 2.0 * kWallClearance) {
        fail(Errc::kInvalidArgument, "room '" + room.id + "' is too small for wall clearance");
      }
    }
  }

  SweepPlan plan;
  plan.rooms.assign(rooms.begin(), rooms.end());
  plan.rirs_per_step = rirs_per_step;
  plan.generator = generator;
  plan.seed = seed;
  for (std::size_t k = 1; k <= num_steps; ++k) {
    plan.absorption_steps.push_back(k == num_steps ? 1.0 : static_cast<double>(k) * step);
  }
  plan.entries.reserve(num_steps * rirs_per_step);
  for (std::size_t k = 0; k < num_steps; ++k) {
    for (std::size_t j = 0; j < rirs_per_step; ++j) {
      SweepEntry e;
      e.index = plan.entries.size();
      e.absorption = plan.absorption_steps[k];
      e.room_index = e.index % rooms.size();
      e.seed = derive_seed(seed, e.index);
      const Vec3 dims = rooms[e.room_index].scene.room_dims;
      CounterRng rng(e.seed, 0);
      e.source = draw_position(rng, dims);
      do {
        e.receiver = draw_position(rng, dims);
      } while (distance(e.source, e.receiver) < kMinSourceReceiverDistance);
      plan.entries.push_back(e);
    }
  }
  return plan;
}

Scene entry_scene(const SweepPlan& plan, const SweepEntry& entry) {
  Scene scene = plan.rooms.at(entry.room_index).scene;
  scene.source_pos = entry.source;
  scene.receiver_pos = entry.receiver;
  scene.set_uniform_absorption(entry.absorption);
  return scene;
}

ImpulseResponse generate_entry(const SweepPlan& plan, const SweepEntry& entry,
                               std::size_t threads) {
  const Scene scene = entry_scene(plan, entry);
  if (plan.generator == Generator::kIsm) {
    return simulate_ism(scene, default_ism_config(scene), threads);
  }
  return simulate_gas(scene, default_tracer_config(scene, entry.seed), threads);
}

nlohmann::json sweep_plan_to_json(const SweepPlan& plan) {
  nlohmann::json rooms = nlohmann::json::array();
  for (const auto& r : plan.rooms) {
    nlohmann::json j = scene_to_json(r.scene);
    j["id"] = r.id;
    if (!r.metadata.empty()) j["metadata"] = r.metadata;
    rooms.push_back(std::move(j));
  }
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : plan.entries) {
    entries.push_back({{"index", e.index},
                       {"absorption", e.absorption},
                       {"room", e.room_index},
                       {"source", {e.source.x, e.source.y, e.source.z}},
                       {"receiver", {e.receiver.x, e.receiver.y, e.receiver.z}},
                       {"seed", e.seed}});
  }
  return {{"schema", kSweepSchema},
          {"generator", generator_name(plan.generator)},
          {"seed", plan.seed},
          {"rirs_per_step", plan.rirs_per_step},
          {"absorption_steps", plan.absorption_steps},
          {"rooms", rooms},
          {"entries", entries}};
}

SweepPlan sweep_plan_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("schema", std::string()) != kSweepSchema) {
      fail(Errc::kInvalidConfig, "not a " + std::string(kSweepSchema) + " document");
    }
    SweepPlan plan;
    plan.generator = parse_generator(doc.at("generator").get<std::string>());
    plan.seed = doc.at("seed").get<std::uint64_t>();
    plan.rirs_per_step = doc.at("rirs_per_step").get<std::size_t>();
    plan.absorption_steps = doc.at("absorption_steps").get<std::vector<double>>();
    for (const auto& r : doc.at("rooms")) plan.rooms.push_back(scene_config_from_json(r));
    for (const auto& j : doc.at("entries")) {
      SweepEntry e;
      e.index = j.at("index").get<std::size_t>();
      e.absorption = j.at("absorption").get<double>();
      e.room_index = j.at("room").get<std::size_t>();
      const auto s = j.at("source").get<std::array<double, 3>>();
      const auto r = j.at("receiver").get<std::array<double, 3>>();
      e.source = {s[0], s[1], s[2]};
      e.receiver = {r[0], r[1], r[2]};
      e.seed = j.at("seed").get<std::uint64_t>();
      if (e.room_index >= plan.rooms.size()) {
        fail(Errc::kInvalidConfig, "sweep entry references an unknown room");
      }
      plan.entries.push_back(e);
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kInvalidConfig, std::string("bad sweep plan: ") + e.what());
  }
}

RirPool execute_sweep(const SweepPlan& plan, const std::filesystem::path& out_dir,
                      std::size_t threads) {
  std::filesystem::create_directories(out_dir);
  RirPool pool(plan.entries.size());
  // Parallel over entries; each entry traces single-threaded.
  parallel_for(plan.entries.size(), threads, [&](std::size_t i) {
    const SweepEntry& entry = plan.entries[i];
    const ImpulseResponse rir = generate_entry(plan, entry, 1);
    const Scene scene = entry_scene(plan, entry);
    const std::string name = rir_filename(entry.index);
    const std::string& room_id = plan.rooms[entry.room_index].id;
    write_rir(out_dir / name, rir,
              {{"absorption", entry.absorption},
               {"scattering", scene.walls[0].scattering},
               {"scene_hash", scene_hash_hex(scene)},
               {"scene", scene_to_json(scene)},
               {"room", room_id},
               {"sweep_index", entry.index},
               {"seed", entry.seed},
               {"sabine_t60", sabine_t60(scene)}});
    pool[i] = PoolEntry{name, 0.0, rir.provenance(), entry.index, room_id};
  });
  return pool;
}

RirPool order_by_t60(RirPool pool) {
  std::stable_sort(pool.begin(), pool.end(), [](const PoolEntry& a, const PoolEntry& b) {
    if (a.t60 != b.t60) return a.t60 < b.t60;
    return a.path < b.path;
  });
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i].rank = i;
  return pool;
}

SortedPool sort_pool_by_t60(const RirPool& candidates, const std::filesystem::path& root,
                            std::size_t threads) {
  std::vector<std::optional<double>> t60(candidates.size());
  std::vector<std::string> reasons(candidates.size());
  std::vector<Provenance> provenance(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t i) {
    const std::filesystem::path p(candidates[i].path);
    try {
      const ImpulseResponse rir = read_rir(p.is_absolute() ? p : root / p,
                                           candidates[i].provenance);
      provenance[i] = rir.provenance();
      t60[i] = estimate_t60(rir);
    } catch (const Error& e) {
      reasons[i] = std::string(errc_name(e.code())) + ": " + e.what();
    }
  });
  SortedPool out;
  RirPool annotated;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!t60[i]) {
      out.quarantine.push_back({candidates[i].path, reasons[i]});
      continue;
    }
    PoolEntry e = candidates[i];
    e.t60 = *t60[i];
    e.provenance = provenance[i];
    annotated.push_back(std::move(e));
  }
  out.pool = order_by_t60(std::move(annotated));
  return out;
}

CurriculumSchedule::CurriculumSchedule(RirPool pool, CurriculumParams params)
    : pool_(std::move(pool)), params_(params) {
  validate_params(params_);
  for (std::size_t i = 1; i < pool_.size(); ++i) {
    if (pool_[i].t60 < pool_[i - 1].t60) {
      fail(Errc::kInvalidArgument, "curriculum pool must be sorted by ascending T60");
    }
  }
}

std::size_t frontier(std::size_t pool_size, const CurriculumParams& params,
                     std::size_t epoch) {
  validate_params(params);
  if (epoch < 1 || epoch > params.total_epochs) {
    fail(Errc::kInvalidArgument, "epoch " + std::to_string(epoch) + " outside [1, " +
                                     std::to_string(params.total_epochs) + "]");
  }
  const std::size_t blocks = 1 + (epoch - 1) / params.period_epochs;
  return std::min(pool_size, params.block_size * blocks);
}

std::size_t frontier(const CurriculumSchedule& schedule, std::size_t epoch) {
  return frontier(schedule.pool().size(), schedule.params(), epoch);
}

nlohmann::json schedule_to_json(const CurriculumSchedule& schedule,
                                const std::string& pool_index_path) {
  nlohmann::json j = params_to_json(schedule.params());
  j["schema"] = kScheduleSchema;
  j["pool_index"] = pool_index_path;
  j["pool_size"] = schedule.pool().size();
  return j;
}

std::vector<std::size_t> t60_histogram(const RirPool& pool, double bin_width_s) {
  if (!(bin_width_s > 0.0)) fail(Errc::kInvalidArgument, "bin width must be positive");
  std::vector<std::size_t> counts;
  for (const PoolEntry& e : pool) {
    if (!(e.t60 >= 0.0) || !std::isfinite(e.t60)) {
      fail(Errc::kInvalidArgument, "pool entry " + e.path + " has no valid T60");
    }
    const auto bin = static_cast<std::size_t>(std::floor(e.t60 / bin_width_s));
    if (bin >= counts.size()) counts.resize(bin + 1, 0);
    ++counts[bin];
  }
  return counts;
}

StagePlan build_stage_plan(std::vector<StageSpec> stages) {
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const StageSpec& s = stages[i];
    if (s.name.empty()) fail(Errc::kInvalidConfig, "stage names must be non-empty");
    if (!position.emplace(s.name, i).second) {
      fail(Errc::kInvalidConfig, "duplicate stage name '" + s.name + "'");
    }
  }
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const StageSpec& s = stages[i];
    if (s.pretrained_from) {
      const auto it = position.find(*s.pretrained_from);
      if (it == position.end() || it->second >= i) {
        fail(Errc::kCyclicStage, "stage '" + s.name + "' must be pretrained from an earlier "
                                 "stage, not '" + *s.pretrained_from + "'");
      }
    }
    if (s.pool_kind != PoolKind::kAnechoic) {
      if (s.pool_path.empty() || !std::filesystem::is_directory(s.pool_path)) {
        fail(Errc::kMissingFile,
             "stage '" + s.name + "' pool directory '" + s.pool_path + "' does not exist");
      }
    }
    if (s.curriculum) validate_params(*s.curriculum);
  }
  return StagePlan{std::move(stages)};
}

std::vector<StageSpec> chained_stages(
    const std::string& generated_name, const std::string& generated_dir,
    std::span<const std::pair<std::string, std::string>> external_pools,
    std::optional<CurriculumParams> curriculum) {
  std::vector<StageSpec> stages;
  stages.push_back({"anechoic-pretrain", PoolKind::kAnechoic, "", std::nullopt, std::nullopt});
  stages.push_back({generated_name, PoolKind::kGenerated, generated_dir,
                    stages.back().name, curriculum});
  for (const auto& [name, dir] : external_pools) {
    stages.push_back({name, PoolKind::kExternal, dir, stages.back().name, std::nullopt});
  }
  return stages;
}

nlohmann::json stage_plan_to_json(const StagePlan& plan) {
  nlohmann::json stages = nlohmann::json::array();
  for (const StageSpec& s : plan.stages) {
    nlohmann::json j = {{"name", s.name},
                        {"pool", {{"kind", pool_kind_name(s.pool_kind)}, {"path", s.pool_path}}},
                        {"pretrained_from", nullptr},
                        {"curriculum", nullptr}};
    if (s.pretrained_from) j["pretrained_from"] = *s.pretrained_from;
    if (s.curriculum) j["curriculum"] = params_to_json(*s.curriculum);
    stages.push_back(std::move(j));
  }
  return {{"schema", kStagePlanSchema}, {"stages", stages}};
}

std::vector<StageSpec> stage_specs_from_json(const nlohmann::json& doc) {
  try {
    std::vector<StageSpec> stages;
    for (const auto& j : doc.at("stages")) {
      StageSpec s;
      s.name = j.at("name").get<std::string>();
      const auto& pool = j.at("pool");
      s.pool_kind = parse_pool_kind(pool.at("kind").get<std::string>());
      s.pool_path = pool.value("path", std::string());
      if (j.contains("pretrained_from") && !j["pretrained_from"].is_null()) {
        s.pretrained_from = j["pretrained_from"].get<std::string>();
      }
      if (j.contains("curriculum") && !j["curriculum"].is_null()) {
        s.curriculum = params_from_json(j["curriculum"]);
      }
      stages.push_back(std::move(s));
    }
    return stages;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kInvalidConfig, std::string("bad stage plan: ") + e.what());
  }
}

}  // namespace reverbkit
