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

#ifndef REVERBKIT_CURRICULUM_H_
#define REVERBKIT_CURRICULUM_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "reverbkit/pool.h"
#include "reverbkit/scene.h"
#include "reverbkit/types.h"

namespace reverbkit {

enum class Generator { kIsm, kGas };

std::string_view generator_name(Generator g);
Generator parse_generator(std::string_view name);

inline constexpr double kWallClearance = 0.5;
inline constexpr double kMinSourceReceiverDistance = 0.5;

struct SweepEntry {
  std::size_t index = 0;
  double absorption = 0.0;
  std::size_t room_index = 0;
  Vec3 source;
  Vec3 receiver;
  std::uint64_t seed = 0;

  friend bool operator==(const SweepEntry&, const SweepEntry&) = default;
};

struct SweepPlan {
  std::vector<SceneConfig> rooms;
  std::vector<double> absorption_steps;
  std::size_t rirs_per_step = 0;
  Generator generator = Generator::kGas;
  std::uint64_t seed = 0;
  // Step-major: entries [k * rirs_per_step, (k + 1) * rirs_per_step) use
  // absorption_steps[k]. Rooms cycle with the global entry index.
  std::vector<SweepEntry> entries;
};

// Absorption grid step, 2 step, ..., 1.0 (zero excluded). Positions are
// uniform inside each room with kWallClearance to every wall and at least
// kMinSourceReceiverDistance apart. Fails when step does not divide 1
// within 1e-9.
SweepPlan build_sweep_plan(std::span<const SceneConfig> rooms, double step,
                           std::size_t rirs_per_step, Generator generator,
                           std::uint64_t seed);

// Scene of one entry: room template with uniform entry absorption; the
// template's scattering is kept.
Scene entry_scene(const SweepPlan& plan, const SweepEntry& entry);

ImpulseResponse generate_entry(const SweepPlan& plan, const SweepEntry& entry,
                               std::size_t threads = 1);

nlohmann::json sweep_plan_to_json(const SweepPlan& plan);
SweepPlan sweep_plan_from_json(const nlohmann::json& doc);

// Writes rir_<index>.wav and sidecars into out_dir and returns the unsorted
// pool (t60 annotations left at zero). Entries run in parallel; every file
// depends only on its entry.
RirPool execute_sweep(const SweepPlan& plan, const std::filesystem::path& out_dir,
                      std::size_t threads = 1);

struct QuarantinedRir {
  std::string path;
  std::string reason;
};

struct SortedPool {
  RirPool pool;
  std::vector<QuarantinedRir> quarantine;
};

// Stable ascending order by t60, ties by path; ranks rewritten 0..n-1.
RirPool order_by_t60(RirPool pool);

// Reads every candidate (paths relative to `root`), annotates T60, and
// orders the pool. RIRs whose T60 cannot be measured are quarantined.
SortedPool sort_pool_by_t60(const RirPool& candidates,
                            const std::filesystem::path& root,
                            std::size_t threads = 1);

struct CurriculumParams {
  std::size_t block_size = 400;
  std::size_t period_epochs = 2;
  std::size_t total_epochs = 200;

  friend bool operator==(const CurriculumParams&, const CurriculumParams&) = default;
};

class CurriculumSchedule {
 public:
  // Fails unless the pool is non-decreasing in t60 and params are positive.
  CurriculumSchedule(RirPool pool, CurriculumParams params = {});

  const RirPool& pool() const { return pool_; }
  const CurriculumParams& params() const { return params_; }

 private:
  RirPool pool_;
  CurriculumParams params_;
};

// min(pool size, block_size * (1 + (epoch - 1) / period_epochs)).
std::size_t frontier(std::size_t pool_size, const CurriculumParams& params,
                     std::size_t epoch);
std::size_t frontier(const CurriculumSchedule& schedule, std::size_t epoch);

nlohmann::json schedule_to_json(const CurriculumSchedule& schedule,
                                const std::string& pool_index_path);

// counts[k] covers [k * bin_width_s, (k + 1) * bin_width_s).
std::vector<std::size_t> t60_histogram(const RirPool& pool, double bin_width_s);

enum class PoolKind { kAnechoic, kGenerated, kExternal };

struct StageSpec {
  std::string name;
  PoolKind pool_kind = PoolKind::kGenerated;
  // Directory of WAVs; unused for the anechoic stage.
  std::string pool_path;
  std::optional<std::string> pretrained_from;
  std::optional<CurriculumParams> curriculum;
};

struct StagePlan {
  std::vector<StageSpec> stages;
};

// Fails with kCyclicStage when pretrained_from names the stage itself, a
// later stage or no stage, kInvalidConfig on duplicate names, and
// kMissingFile when a non-anechoic pool directory does not exist.
StagePlan build_stage_plan(std::vector<StageSpec> stages);

// Anechoic pre-training, then the generated pool, then each external pool,
// every stage fine-tuned from its predecessor. `curriculum` applies to the
// generated stage only.
std::vector<StageSpec> chained_stages(
    const std::string& generated_name, const std::string& generated_dir,
    std::span<const std::pair<std::string, std::string>> external_pools,
    std::optional<CurriculumParams> curriculum = std::nullopt);

nlohmann::json stage_plan_to_json(const StagePlan& plan);
std::vector<StageSpec> stage_specs_from_json(const nlohmann::json& doc);

}  // namespace reverbkit

#endif  // REVERBKIT_CURRICULUM_H_
