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

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "reverbkit/analysis.h"
#include "reverbkit/curriculum.h"
#include "reverbkit/error.h"
#include "reverbkit/ism.h"
#include "reverbkit/metrics.h"
#include "reverbkit/mixer.h"
#include "reverbkit/parallel.h"
#include "reverbkit/pool.h"
#include "reverbkit/scene.h"
#include "reverbkit/tracer.h"
#include "reverbkit/wav.h"

#ifndef REVERBKIT_VERSION_STRING
#define REVERBKIT_VERSION_STRING "0.0.0"
#endif

namespace reverbkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> args;
  int verbosity = 0;
  std::size_t threads = 1;
  std::string subcommand;
  const CLI::App* app = nullptr;

  void log(const std::string& msg) const {
    if (verbosity > 0) err << "[reverbkit] " << msg << '\n';
  }
};

// One flag's effective value for the run record.
json option_value(const CLI::Option& opt) {
  if (opt.get_expected_max() == 0) return opt.count();
  std::vector<std::string> values = opt.results();
  if (values.empty()) {
    if (opt.get_default_str().empty()) return nullptr;
    values = {opt.get_default_str()};
  }
  if (opt.get_expected_max() <= 1 && values.size() == 1) return values.front();
  return values;
}

json options_json(const CLI::App& app) {
  json j = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name == "--help" || name == "-h") continue;
    std::string key = opt->get_lnames().empty() ? name : opt->get_lnames().front();
    if (key.empty() && !opt->get_snames().empty()) key = opt->get_snames().front();
    if (key.empty()) key = name;
    if (key == "help") continue;
    j[key] = option_value(*opt);
  }
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(Errc::kIo, "cannot write " + path.string());
  f << text;
  if (!f) fail(Errc::kIo, "write failed for " + path.string());
}

void write_jsonl(const fs::path& path, const std::vector<json>& rows) {
  std::string text;
  for (const auto& r : rows) text += r.dump() + "\n";
  write_text(path, text);
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::kMissingFile, "cannot open " + path.string());
  std::vector<json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      fail(Errc::kInvalidConfig,
           path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::kMissingFile, "cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    fail(Errc::kInvalidConfig, path.string() + ": " + e.what());
  }
}

// Record path for a file output: foo.wav -> foo.run.json.
fs::path record_beside(const fs::path& output) {
  fs::path p = output;
  return p.replace_extension(".run.json");
}

void write_record(const Context& ctx, const fs::path& path,
                  std::optional<std::uint64_t> seed) {
  json rec;
  rec["tool"] = "reverbkit";
  rec["version"] = REVERBKIT_VERSION_STRING;
  rec["subcommand"] = ctx.subcommand;
  rec["argv"] = ctx.args;
  rec["config"] = options_json(*ctx.app);
  rec["seed"] = seed ? json(*seed) : json(nullptr);
  rec["threads"] = ctx.threads;
  write_text(path, rec.dump(2) + "\n");
  ctx.log("run record " + path.string());
}

fs::path resolve_record(const std::string& flag, const fs::path& fallback) {
  return flag.empty() ? fallback : fs::path(flag);
}

// Files given directly, plus every `extension` file inside given
// directories, in sorted order per directory.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs,
                                    const std::string& extension) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == extension) {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      fail(Errc::kMissingFile, "no such file or directory: " + in);
    }
  }
  return files;
}

std::optional<double> opt_value(const CLI::Option* opt, double value) {
  if (opt->count() == 0) return std::nullopt;
  return value;
}

SceneConfig load_room(const fs::path& path, std::optional<double> height) {
  SceneConfig cfg = load_scene(path, height);
  if (cfg.id.empty()) cfg.id = path.stem().string();
  return cfg;
}

// ---------------------------------------------------------------- gen-rir

struct GenRirArgs {
  std::string method = "ism";
  std::string scene;
  std::string out;
  std::string histogram_csv;
  std::string record;
  double height = 0.0;
  double t60 = 0.0;
  double absorption = 0.0;
  double scattering = 0.0;
  double duration = 0.0;
  int max_order = -1;
  double highpass = 20.0;
  std::size_t rays = 100000;
  int max_bounces = 200;
  double receiver_radius = 0.25;
  double bin_width = 1e-3;
  double energy_floor = 1e-6;
  std::uint64_t seed = 0;
  CLI::Option* height_opt = nullptr;
  CLI::Option* t60_opt = nullptr;
  CLI::Option* absorption_opt = nullptr;
  CLI::Option* scattering_opt = nullptr;
  CLI::Option* duration_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

void run_gen_rir(const Context& ctx, const GenRirArgs& a) {
  SceneConfig cfg = load_room(a.scene, opt_value(a.height_opt, a.height));
  Scene& scene = cfg.scene;
  json meta;
  meta["method"] = a.method;
  meta["room"] = cfg.id;
  if (a.t60_opt->count() > 0) {
    const double alpha = estimate_absorption_for_t60(scene, a.t60);
    scene.set_uniform_absorption(alpha);
    meta["t60_target"] = a.t60;
    meta["absorption"] = alpha;
  } else if (a.absorption_opt->count() > 0) {
    scene.set_uniform_absorption(a.absorption);
    meta["absorption"] = a.absorption;
  }
  if (a.scattering_opt->count() > 0) {
    for (auto& w : scene.walls) w.scattering = a.scattering;
  }
  validate_scene(scene);
  meta["scene"] = scene_to_json(scene);
  meta["scene_hash"] = scene_hash_hex(scene);
  meta["sabine_t60"] = sabine_t60(scene);

  const double duration =
      a.duration_opt->count() > 0 ? a.duration : default_duration(scene);
  std::optional<std::uint64_t> seed;
  if (a.method == "ism") {
    IsmConfig ic;
    ic.duration_s = duration;
    ic.max_order = a.max_order;
    ic.highpass_hz = a.highpass;
    const ImpulseResponse rir = simulate_ism(scene, ic, ctx.threads);
    meta["max_order"] = ic.max_order < 0 ? default_max_order(scene, duration) : ic.max_order;
    meta["highpass_hz"] = ic.highpass_hz;
    write_rir(a.out, rir, meta);
  } else {
    if (a.seed_opt->count() == 0) {
      fail(Errc::kInvalidConfig, "--seed is required for --method gas");
    }
    seed = a.seed;
    TracerConfig tc;
    tc.num_rays = a.rays;
    tc.max_bounces = a.max_bounces;
    tc.receiver_radius = a.receiver_radius;
    tc.bin_width_s = a.bin_width;
    tc.energy_floor = a.energy_floor;
    tc.duration_s = duration;
    tc.seed = a.seed;
    const ImpulseResponse rir = simulate_gas(scene, tc, ctx.threads);
    meta["seed"] = a.seed;
    meta["num_rays"] = a.rays;
    write_rir(a.out, rir, meta);
    if (!a.histogram_csv.empty()) {
      write_histogram_csv(a.histogram_csv, trace_rays(scene, tc, DirectPath::kInclude,
                                                      ctx.threads));
    }
  }
  ctx.log("wrote " + a.out);
  write_record(ctx, resolve_record(a.record, record_beside(a.out)), seed);
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
  std::vector<std::string> rooms;
  std::string plan;
  std::string out;
  std::string record;
  std::string generator = "gas";
  double step = 0.01;
  std::size_t per_step = 400;
  double height = 0.0;
  std::uint64_t seed = 0;
  CLI::Option* height_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

void run_sweep(const Context& ctx, const SweepArgs& a) {
  const fs::path out(a.out);
  SweepPlan plan;
  if (!a.plan.empty()) {
    plan = sweep_plan_from_json(read_json(a.plan));
  } else {
    if (a.rooms.empty()) fail(Errc::kInvalidConfig, "either --rooms or --plan is required");
    if (a.seed_opt->count() == 0) fail(Errc::kInvalidConfig, "--seed is required");
    std::vector<SceneConfig> rooms;
    for (const auto& p : expand_inputs(a.rooms, ".json")) {
      rooms.push_back(load_room(p, opt_value(a.height_opt, a.height)));
    }
    plan = build_sweep_plan(rooms, a.step, a.per_step, parse_generator(a.generator),
                            a.seed);
  }
  fs::create_directories(out);
  write_text(out / "plan.json", sweep_plan_to_json(plan).dump(2) + "\n");
  ctx.log("executing " + std::to_string(plan.entries.size()) + " sweep entries");
  const RirPool pool = execute_sweep(plan, out, ctx.threads);
  write_pool_index(out / "pool.unsorted.jsonl", pool);
  write_record(ctx, resolve_record(a.record, out / "sweep.run.json"), plan.seed);
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::string record;
};

void run_analyze(const Context& ctx, const AnalyzeArgs& a) {
  const std::vector<fs::path> files = expand_inputs(a.inputs, ".wav");
  std::vector<json> rows(files.size());
  parallel_for(files.size(), ctx.threads, [&](std::size_t i) {
    const ImpulseResponse rir = read_rir(files[i]);
    const AcousticSummary s = summarize(rir);
    json row;
    row["path"] = files[i].string();
    row["provenance"] = provenance_name(rir.provenance());
    row["t60"] = s.t60 ? json(*s.t60) : json(nullptr);
    row["drr"] = s.drr;
    row["direct_arrival_s"] = s.direct_arrival_s;
    row["energy"] = s.total_energy;
    rows[i] = std::move(row);
  });
  for (const auto& r : rows) ctx.out << r.dump() << '\n';
  fs::path record = "analyze.run.json";
  if (!a.out.empty()) {
    write_jsonl(a.out, rows);
    record = record_beside(a.out);
  }
  write_record(ctx, resolve_record(a.record, record), std::nullopt);
}

// -------------------------------------------------------------- sort-pool

struct SortPoolArgs {
  std::string index;
  std::string dir;
  std::string out;
  std::string record;
};

void run_sort_pool(const Context& ctx, const SortPoolArgs& a) {
  RirPool candidates;
  fs::path root;
  if (!a.index.empty()) {
    candidates = read_pool_index(a.index);
    root = fs::path(a.index).parent_path();
  } else if (!a.dir.empty()) {
    root = a.dir;
    for (const auto& p : expand_inputs({a.dir}, ".wav")) {
      PoolEntry e;
      e.path = p.filename().string();
      e.provenance = Provenance::kExternalReal;
      if (auto side = read_sidecar(p)) {
        if (side->contains("provenance")) {
          e.provenance = parse_provenance((*side)["provenance"].get<std::string>());
        }
        e.room = side->value("room", std::string());
      }
      candidates.push_back(std::move(e));
    }
  } else {
    fail(Errc::kInvalidConfig, "either --index or --dir is required");
  }
  const SortedPool sorted = sort_pool_by_t60(candidates, root, ctx.threads);
  // Paths in the sorted index stay relative to the index's own directory.
  const fs::path out(a.out);
  RirPool pool = sorted.pool;
  const fs::path out_dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  for (auto& e : pool) {
    e.path = fs::relative(fs::absolute(root / e.path), fs::absolute(out_dir)).generic_string();
  }
  fs::create_directories(out_dir);
  write_pool_index(out, pool);
  std::vector<json> q;
  for (const auto& x : sorted.quarantine) q.push_back({{"path", x.path}, {"reason", x.reason}});
  fs::path qpath = out;
  qpath.replace_extension(".quarantine.jsonl");
  write_jsonl(qpath, q);
  ctx.out << json{{"sorted", pool.size()}, {"quarantined", q.size()}}.dump() << '\n';
  write_record(ctx, resolve_record(a.record, record_beside(out)), std::nullopt);
}

// --------------------------------------------------------------- hist-t60

struct HistArgs {
  std::string pool;
  std::string out;
  std::string record;
  double bin_width = 0.05;
};

void run_hist_t60(const Context& ctx, const HistArgs& a) {
  const RirPool pool = read_pool_index(a.pool);
  const std::vector<std::size_t> counts = t60_histogram(pool, a.bin_width);
  std::ostringstream csv;
  csv.precision(10);
  csv << "bin_start_s,bin_end_s,count\n";
  for (std::size_t k = 0; k < counts.size(); ++k) {
    csv << k * a.bin_width << ',' << (k + 1) * a.bin_width << ',' << counts[k] << '\n';
  }
  fs::path record = "hist-t60.run.json";
  if (a.out.empty()) {
    ctx.out << csv.str();
  } else {
    write_text(a.out, csv.str());
    record = record_beside(a.out);
  }
  write_record(ctx, resolve_record(a.record, record), std::nullopt);
}

// -------------------------------------------------------------------- mix

struct MixArgs {
  std::string specs;
  std::string clips;
  std::string pool;
  std::string out;
  std::string input_root = ".";
  std::string record;
  std::size_t count = 0;
  std::size_t frontier = 0;
  std::size_t epoch = 0;
  std::size_t block = 400;
  std::size_t period = 2;
  std::size_t epochs = 200;
  bool same_room = false;
  std::vector<double> gains_db;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
};

void run_mix(const Context& ctx, const MixArgs& a) {
  std::vector<MixtureSpec> specs;
  std::vector<json> groups;
  std::optional<std::uint64_t> seed;
  if (!a.specs.empty()) {
    for (const auto& row : read_jsonl(a.specs)) {
      specs.push_back(spec_from_manifest_row(row));
      groups.push_back(row.contains("group") ? row["group"] : json(nullptr));
    }
  } else {
    if (a.clips.empty() || a.pool.empty()) {
      fail(Errc::kInvalidConfig, "either --specs or both --clips and --pool are required");
    }
    if (a.seed_opt->count() == 0) fail(Errc::kInvalidConfig, "--seed is required");
    if (a.count == 0) fail(Errc::kInvalidConfig, "--count must be positive");
    seed = a.seed;
    std::vector<std::string> clips;
    for (const auto& p : expand_inputs({a.clips}, ".wav")) clips.push_back(p.generic_string());
    RirPool pool = read_pool_index(a.pool);
    const fs::path pool_dir = fs::path(a.pool).parent_path();
    std::map<std::string, std::string> room_of;
    for (auto& e : pool) {
      e.path = (pool_dir / e.path).generic_string();
      room_of[e.path] = e.room;
    }
    std::size_t frontier_count = pool.size();
    if (a.frontier > 0) {
      frontier_count = a.frontier;
    } else if (a.epoch > 0) {
      frontier_count = frontier(pool.size(), {a.block, a.period, a.epochs}, a.epoch);
    }
    specs = make_mixture_specs(clips, pool, frontier_count, a.count, a.seed,
                               a.same_room ? PairPolicy::kSameRoom : PairPolicy::kDistinct);
    for (auto& s : specs) {
      if (a.gains_db.size() == 2) s.gains_db = {a.gains_db[0], a.gains_db[1]};
      groups.push_back(room_of[s.rir_refs[0]]);
    }
  }
  std::vector<json> rows(specs.size());
  parallel_for(specs.size(), ctx.threads, [&](std::size_t i) {
    MixtureOutputs o = build_mixture(specs[i], a.input_root, a.out);
    if (!groups[i].is_null()) o.manifest_row["group"] = groups[i];
    rows[i] = std::move(o.manifest_row);
  });
  write_jsonl(fs::path(a.out) / "manifest.jsonl", rows);
  ctx.log("built " + std::to_string(rows.size()) + " mixtures");
  write_record(ctx, resolve_record(a.record, fs::path(a.out) / "mix.run.json"), seed);
}

// ------------------------------------------------------------- curriculum

struct CurriculumArgs {
  std::string pool;
  std::string out;
  std::string record;
  std::size_t block = 400;
  std::size_t period = 2;
  std::size_t epochs = 200;
};

void run_curriculum(const Context& ctx, const CurriculumArgs& a) {
  const CurriculumSchedule schedule(read_pool_index(a.pool), {a.block, a.period, a.epochs});
  json doc = schedule_to_json(schedule, a.pool);
  json table = json::array();
  std::ostringstream csv;
  csv << "epoch,available,max_t60\n";
  for (std::size_t e = 1; e <= a.epochs; ++e) {
    const std::size_t n = frontier(schedule, e);
    const double max_t60 = n > 0 ? schedule.pool()[n - 1].t60 : 0.0;
    table.push_back({{"epoch", e}, {"available", n}, {"max_t60", max_t60}});
    csv << e << ',' << n << ',' << max_t60 << '\n';
  }
  doc["frontier"] = std::move(table);
  fs::path record = "curriculum.run.json";
  if (!a.out.empty()) {
    write_text(a.out, doc.dump(2) + "\n");
    record = record_beside(a.out);
  }
  ctx.out << csv.str();
  write_record(ctx, resolve_record(a.record, record), std::nullopt);
}

// ------------------------------------------------------------------- plan

struct PlanArgs {
  std::string stages;
  std::string generated_dir;
  std::string generated_name = "gas";
  std::vector<std::string> external;
  bool curriculum = false;
  std::size_t block = 400;
  std::size_t period = 2;
  std::size_t epochs = 200;
  std::string out;
  std::string record;
};

void run_plan(const Context& ctx, const PlanArgs& a) {
  std::vector<StageSpec> specs;
  if (!a.stages.empty()) {
    specs = stage_specs_from_json(read_json(a.stages));
  } else {
    if (a.generated_dir.empty()) {
      fail(Errc::kInvalidConfig, "either --stages or --generated-dir is required");
    }
    std::vector<std::pair<std::string, std::string>> external;
    for (const auto& e : a.external) {
      const auto eq = e.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == e.size()) {
        fail(Errc::kInvalidConfig, "--external expects NAME=DIR, got '" + e + "'");
      }
      external.emplace_back(e.substr(0, eq), e.substr(eq + 1));
    }
    std::optional<CurriculumParams> cur;
    if (a.curriculum) cur = CurriculumParams{a.block, a.period, a.epochs};
    specs = chained_stages(a.generated_name, a.generated_dir, external, cur);
  }
  const StagePlan plan = build_stage_plan(std::move(specs));
  write_text(a.out, stage_plan_to_json(plan).dump(2) + "\n");
  ctx.out << json{{"stages", plan.stages.size()}}.dump() << '\n';
  write_record(ctx, resolve_record(a.record, record_beside(a.out)), std::nullopt);
}

// ------------------------------------------------------------------- eval

struct EvalArgs {
  std::string manifest;
  std::string root;
  std::string out;
  std::string group_key = "group";
  std::string record;
  bool no_sdr = false;
};

struct GroupStats {
  std::size_t mixtures = 0;
  double si_sdri_sources = 0.0;
  double sdri_sources = 0.0;
  double si_sdri_mixtures = 0.0;
  double sdri_mixtures = 0.0;
  std::size_t sources = 0;

  void add(const SeparationMetrics& m) {
    ++mixtures;
    sources += 2;
    si_sdri_sources += m.si_sdri[0] + m.si_sdri[1];
    sdri_sources += m.sdri[0] + m.sdri[1];
    si_sdri_mixtures += m.mean_si_sdri();
    sdri_mixtures += m.mean_sdri();
  }
  json to_json(bool with_sdr) const {
    json j{{"mixtures", mixtures},
           {"si_sdri_per_source_mean", si_sdri_sources / sources},
           {"si_sdri_per_mixture_mean", si_sdri_mixtures / mixtures}};
    if (with_sdr) {
      j["sdri_per_source_mean"] = sdri_sources / sources;
      j["sdri_per_mixture_mean"] = sdri_mixtures / mixtures;
    }
    return j;
  }
};

std::string group_of(const json& row, const std::string& key) {
  if (row.contains(key) && row[key].is_string()) return row[key].get<std::string>();
  return "all";
}

std::array<std::string, 2> pair_field(const json& row, const char* name) {
  const json& v = row.at(name);
  if (!v.is_array() || v.size() != 2) {
    fail(Errc::kInvalidConfig, std::string("manifest field '") + name +
                                   "' must list exactly two paths");
  }
  return {v[0].get<std::string>(), v[1].get<std::string>()};
}

void run_eval(const Context& ctx, const EvalArgs& a) {
  const std::vector<json> rows = read_jsonl(a.manifest);
  const fs::path root = a.root.empty() ? fs::path(a.manifest).parent_path() : fs::path(a.root);
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : root / path;
  };
  std::vector<SeparationMetrics> metrics(rows.size());
  parallel_for(rows.size(), ctx.threads, [&](std::size_t i) {
    const json& row = rows[i];
    try {
      const AudioSignal mixture = read_wav(resolve(row.at("mixture").get<std::string>()));
      const auto ref_paths = pair_field(row, row.contains("references") ? "references" : "targets");
      std::vector<AudioSignal> refs{read_wav(resolve(ref_paths[0])),
                                    read_wav(resolve(ref_paths[1]))};
      // Without estimates the mixture itself is scored, which is the
      // no-processing baseline.
      std::vector<AudioSignal> ests{mixture, mixture};
      if (row.contains("estimates")) {
        const auto est_paths = pair_field(row, "estimates");
        ests = {read_wav(resolve(est_paths[0])), read_wav(resolve(est_paths[1]))};
      }
      if (a.no_sdr) {
        SeparationMetrics m;
        const double base[2] = {si_sdr(mixture, refs[0]), si_sdr(mixture, refs[1])};
        const double id = si_sdr(ests[0], refs[0]) + si_sdr(ests[1], refs[1]);
        const double sw = si_sdr(ests[1], refs[0]) + si_sdr(ests[0], refs[1]);
        m.permutation = sw > id ? std::array<std::size_t, 2>{1, 0}
                                : std::array<std::size_t, 2>{0, 1};
        for (int r = 0; r < 2; ++r) {
          m.si_sdr[r] = si_sdr(ests[m.permutation[r]], refs[r]);
          m.si_sdri[r] = m.si_sdr[r] - base[r];
        }
        metrics[i] = m;
      } else {
        metrics[i] = eval_pair(ests, refs, mixture);
      }
    } catch (const json::exception& e) {
      fail(Errc::kInvalidConfig, "manifest row " + std::to_string(i) + ": " + e.what());
    }
  });

  std::vector<json> out_rows;
  std::map<std::string, GroupStats> groups;
  GroupStats all;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SeparationMetrics& m = metrics[i];
    const std::string g = group_of(rows[i], a.group_key);
    json r{{"mixture", rows[i]["mixture"]},
           {"group", g},
           {"permutation", m.permutation},
           {"si_sdr", m.si_sdr},
           {"si_sdri", m.si_sdri}};
    if (!a.no_sdr) {
      r["sdr"] = m.sdr;
      r["sdri"] = m.sdri;
    }
    out_rows.push_back(std::move(r));
    groups[g].add(m);
    all.add(m);
  }
  json aggregate{{"aggregate", all.to_json(!a.no_sdr)}};
  for (const auto& [g, s] : groups) aggregate["groups"][g] = s.to_json(!a.no_sdr);

  fs::path record = "eval.run.json";
  if (!a.out.empty()) {
    std::vector<json> lines = out_rows;
    lines.push_back(aggregate);
    write_jsonl(a.out, lines);
    record = record_beside(a.out);
  }
  char line[160];
  ctx.out << (a.no_sdr ? "group               mixtures    SI-SDRi\n"
                       : "group               mixtures    SI-SDRi       SDRi\n");
  auto print_row = [&](const std::string& name, const GroupStats& s) {
    if (a.no_sdr) {
      std::snprintf(line, sizeof(line), "%-18s %9zu %10.3f\n", name.c_str(), s.mixtures,
                    s.si_sdri_sources / s.sources);
    } else {
      std::snprintf(line, sizeof(line), "%-18s %9zu %10.3f %10.3f\n", name.c_str(),
                    s.mixtures, s.si_sdri_sources / s.sources, s.sdri_sources / s.sources);
    }
    ctx.out << line;
  };
  for (const auto& [g, s] : groups) print_row(g, s);
  if (!rows.empty()) print_row("mean", all);
  write_record(ctx, resolve_record(a.record, record), std::nullopt);
}

// ------------------------------------------------------------ spectrogram

struct SpectrogramArgs {
  std::string input;
  std::size_t window = 256;
  std::size_t hop = 64;
  std::string csv;
  std::string png;
  double range_db = 80.0;
  std::string record;
};

void run_spectrogram(const Context& ctx, const SpectrogramArgs& a) {
  if (a.csv.empty() && a.png.empty()) {
    fail(Errc::kInvalidConfig, "at least one of --csv or --png is required");
  }
  const Spectrogram spec = spectrogram(read_wav(a.input), a.window, a.hop);
  if (!a.csv.empty()) write_spectrogram_csv(a.csv, spec);
  if (!a.png.empty()) write_spectrogram_png(a.png, spec, a.range_db);
  ctx.out << json{{"bins", spec.num_bins()}, {"frames", spec.num_frames()}}.dump() << '\n';
  write_record(ctx, resolve_record(a.record, record_beside(a.csv.empty() ? a.png : a.csv)),
               std::nullopt);
}

// ------------------------------------------------------------------------

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kMissingFile:
    case Errc::kCorruptWav:
    case Errc::kIo:
      return kExitIo;
    default:
      return kExitInvalidConfig;
  }
}

int report(std::ostream& err, const std::string& code, const std::string& message,
           int exit_code) {
  err << json{{"error", {{"code", code}, {"message", message}}}, {"exit_code", exit_code}}.dump()
      << '\n';
  return exit_code;
}

void add_record_flag(CLI::App* sub, std::string& target) {
  sub->add_option("--record", target,
                  "Run-record JSON path (default: beside the primary output)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"reverbkit: room impulse response synthesis, reverberant mixing, "
               "curriculum scheduling and separation metrics",
               "reverbkit"};
  app.set_version_flag("--version", REVERBKIT_VERSION_STRING);
  app.require_subcommand(1);
  app.fallthrough();

  std::size_t threads_flag = 0;
  int verbosity = 0;
  app.add_option("-j,--threads", threads_flag,
                 "Worker threads; 0 uses REVERBKIT_THREADS or all cores")
      ->capture_default_str();
  app.add_flag("-v,--verbose", verbosity, "Log progress to stderr (repeat for more)");

  GenRirArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-rir", "Generate one RIR with ISM or GAS");
  gen_cmd->add_option("--method", gen.method, "Generator")
      ->check(CLI::IsMember({"ism", "gas"}))
      ->required();
  gen_cmd->add_option("--scene", gen.scene, "Scene config JSON")->required();
  gen_cmd->add_option("--out", gen.out, "Output WAV; sidecar is written beside it")->required();
  gen.height_opt = gen_cmd->add_option("--height", gen.height,
                                       "Room height for configs that leave it unset");
  gen.t60_opt = gen_cmd->add_option("--t60", gen.t60,
                                    "Target T60 in s; sets uniform absorption by Sabine");
  gen.absorption_opt = gen_cmd->add_option("--absorption", gen.absorption,
                                           "Uniform absorption for all walls");
  gen.t60_opt->excludes(gen.absorption_opt);
  gen.scattering_opt = gen_cmd->add_option("--scattering", gen.scattering,
                                           "Uniform scattering for all walls");
  gen.duration_opt = gen_cmd->add_option("--duration", gen.duration,
                                         "RIR length in s (default 1.25 x Sabine T60, min 0.25)");
  gen_cmd->add_option("--max-order", gen.max_order, "ISM reflection order; -1 is automatic")
      ->capture_default_str();
  gen_cmd->add_option("--highpass", gen.highpass, "ISM high-pass cutoff in Hz; 0 disables")
      ->capture_default_str();
  gen_cmd->add_option("--rays", gen.rays, "GAS ray count")->capture_default_str();
  gen_cmd->add_option("--max-bounces", gen.max_bounces, "GAS bounce limit")
      ->capture_default_str();
  gen_cmd->add_option("--receiver-radius", gen.receiver_radius, "GAS receiver radius in m")
      ->capture_default_str();
  gen_cmd->add_option("--bin-width", gen.bin_width, "GAS histogram bin width in s")
      ->capture_default_str();
  gen_cmd->add_option("--energy-floor", gen.energy_floor,
                      "GAS ray termination threshold relative to initial energy")
      ->capture_default_str();
  gen.seed_opt = gen_cmd->add_option("--seed", gen.seed, "Seed; required for GAS");
  gen_cmd->add_option("--histogram-csv", gen.histogram_csv,
                      "GAS: also write the energy histogram (direct path included)");
  add_record_flag(gen_cmd, gen.record);

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Build and execute an absorption sweep");
  sweep_cmd->add_option("--rooms", sweep.rooms, "Room configs or directories of them");
  sweep_cmd->add_option("--plan", sweep.plan, "Execute an existing plan JSON instead");
  sweep_cmd->add_option("--out", sweep.out, "Output directory")->required();
  sweep_cmd->add_option("--step", sweep.step, "Absorption grid step")->capture_default_str();
  sweep_cmd->add_option("--per-step", sweep.per_step, "RIRs per absorption value")
      ->capture_default_str();
  sweep_cmd->add_option("--generator", sweep.generator, "Generator")
      ->check(CLI::IsMember({"ism", "gas"}))
      ->capture_default_str();
  sweep.height_opt = sweep_cmd->add_option("--height", sweep.height,
                                           "Height for room configs that leave it unset");
  sweep.seed_opt = sweep_cmd->add_option("--seed", sweep.seed, "Plan seed");
  add_record_flag(sweep_cmd, sweep.record);

  AnalyzeArgs analyze;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "T60, DRR and energy per RIR");
  analyze_cmd->add_option("inputs", analyze.inputs, "RIR WAVs or directories")->required();
  analyze_cmd->add_option("--out", analyze.out, "Also write the JSON lines here");
  add_record_flag(analyze_cmd, analyze.record);

  SortPoolArgs sortp;
  CLI::App* sort_cmd = app.add_subcommand("sort-pool", "Annotate T60 and sort an RIR pool");
  sort_cmd->add_option("--index", sortp.index, "Unsorted pool index (JSON lines)");
  sort_cmd->add_option("--dir", sortp.dir, "Directory of RIR WAVs instead of an index");
  sort_cmd->add_option("--out", sortp.out, "Sorted pool index")->required();
  add_record_flag(sort_cmd, sortp.record);

  HistArgs hist;
  CLI::App* hist_cmd = app.add_subcommand("hist-t60", "Histogram of pool T60 values");
  hist_cmd->add_option("--pool", hist.pool, "Sorted pool index")->required();
  hist_cmd->add_option("--bin-width", hist.bin_width, "Bin width in s")->capture_default_str();
  hist_cmd->add_option("--out", hist.out, "CSV path (default: stdout)");
  add_record_flag(hist_cmd, hist.record);

  MixArgs mix;
  CLI::App* mix_cmd = app.add_subcommand("mix", "Build reverberant two-speaker mixtures");
  mix_cmd->add_option("--specs", mix.specs, "Mixture specs or a previous manifest (JSON lines)");
  mix_cmd->add_option("--clips", mix.clips, "Directory of dry clips");
  mix_cmd->add_option("--pool", mix.pool, "Sorted pool index to draw RIRs from");
  mix_cmd->add_option("--count", mix.count, "Number of mixtures to draw");
  mix_cmd->add_option("--frontier", mix.frontier, "Draw from the first N pool entries");
  mix_cmd->add_option("--epoch", mix.epoch, "Draw from the curriculum frontier at this epoch");
  mix_cmd->add_option("--block", mix.block, "Curriculum block size")->capture_default_str();
  mix_cmd->add_option("--period", mix.period, "Epochs per curriculum block")
      ->capture_default_str();
  mix_cmd->add_option("--epochs", mix.epochs, "Total curriculum epochs")->capture_default_str();
  mix_cmd->add_flag("--same-room", mix.same_room, "Draw both RIRs from one room");
  mix_cmd->add_option("--gains-db", mix.gains_db, "Per-source gains in dB")->expected(2);
  mix_cmd->add_option("--input-root", mix.input_root, "Base for relative input paths")
      ->capture_default_str();
  mix_cmd->add_option("--out", mix.out, "Output directory")->required();
  mix.seed_opt = mix_cmd->add_option("--seed", mix.seed, "Draw seed");
  add_record_flag(mix_cmd, mix.record);

  CurriculumArgs cur;
  CLI::App* cur_cmd = app.add_subcommand("curriculum", "Emit the curriculum frontier table");
  cur_cmd->add_option("--pool", cur.pool, "Sorted pool index")->required();
  cur_cmd->add_option("--block", cur.block, "RIRs unlocked per block")->capture_default_str();
  cur_cmd->add_option("--period", cur.period, "Epochs per block")->capture_default_str();
  cur_cmd->add_option("--epochs", cur.epochs, "Total epochs")->capture_default_str();
  cur_cmd->add_option("--out", cur.out, "Schedule JSON");
  add_record_flag(cur_cmd, cur.record);

  PlanArgs plan;
  CLI::App* plan_cmd = app.add_subcommand("plan", "Emit a multi-stage training plan");
  plan_cmd->add_option("--stages", plan.stages, "Stage list JSON instead of the chain flags");
  plan_cmd->add_option("--generated-dir", plan.generated_dir, "Generated RIR pool directory");
  plan_cmd->add_option("--generated-name", plan.generated_name, "Generated stage name")
      ->capture_default_str();
  plan_cmd->add_option("--external", plan.external,
                       "External pool stage NAME=DIR, in fine-tuning order");
  plan_cmd->add_flag("--curriculum", plan.curriculum, "Curriculum on the generated stage");
  plan_cmd->add_option("--block", plan.block, "Curriculum block size")->capture_default_str();
  plan_cmd->add_option("--period", plan.period, "Epochs per block")->capture_default_str();
  plan_cmd->add_option("--epochs", plan.epochs, "Total epochs")->capture_default_str();
  plan_cmd->add_option("--out", plan.out, "Stage plan JSON")->required();
  add_record_flag(plan_cmd, plan.record);

  EvalArgs ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "SI-SDRi and SDRi over a mixture manifest");
  eval_cmd->add_option("--manifest", ev.manifest, "JSON lines with mixture, references or "
                                                  "targets, optional estimates")
      ->required();
  eval_cmd->add_option("--root", ev.root, "Base for relative paths (default: manifest dir)");
  eval_cmd->add_option("--group-key", ev.group_key, "Row field used for grouping")
      ->capture_default_str();
  eval_cmd->add_flag("--no-sdr", ev.no_sdr, "Skip the filtered SDR");
  eval_cmd->add_option("--out", ev.out, "Per-mixture results plus aggregate (JSON lines)");
  add_record_flag(eval_cmd, ev.record);

  SpectrogramArgs sg;
  CLI::App* sg_cmd = app.add_subcommand("spectrogram", "STFT magnitude export");
  sg_cmd->add_option("input", sg.input, "Input WAV")->required();
  sg_cmd->add_option("--window", sg.window, "Window length in samples")->capture_default_str();
  sg_cmd->add_option("--hop", sg.hop, "Hop in samples")->capture_default_str();
  sg_cmd->add_option("--csv", sg.csv, "CSV output, rows are frequency bins");
  sg_cmd->add_option("--png", sg.png, "8-bit grayscale PNG output");
  sg_cmd->add_option("--range-db", sg.range_db, "PNG dynamic range in dB")->capture_default_str();
  add_record_flag(sg_cmd, sg.record);

  std::vector<const char*> argv{"reverbkit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << REVERBKIT_VERSION_STRING << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report(err, "usage", e.what(), kExitUsage);
  }

  Context ctx{out, err, args, 0, 1, {}, nullptr};
  ctx.verbosity = verbosity;
  try {
    ctx.threads = resolve_parallelism(threads_flag);
    const CLI::App* sub = app.get_subcommands().front();
    ctx.subcommand = sub->get_name();
    ctx.app = sub;
    if (sub == gen_cmd) run_gen_rir(ctx, gen);
    else if (sub == sweep_cmd) run_sweep(ctx, sweep);
    else if (sub == analyze_cmd) run_analyze(ctx, analyze);
    else if (sub == sort_cmd) run_sort_pool(ctx, sortp);
    else if (sub == hist_cmd) run_hist_t60(ctx, hist);
    else if (sub == mix_cmd) run_mix(ctx, mix);
    else if (sub == cur_cmd) run_curriculum(ctx, cur);
    else if (sub == plan_cmd) run_plan(ctx, plan);
    else if (sub == eval_cmd) run_eval(ctx, ev);
    else if (sub == sg_cmd) run_spectrogram(ctx, sg);
  } catch (const Error& e) {
    return report(err, std::string(errc_name(e.code())), e.what(), exit_code_for(e.code()));
  } catch (const fs::filesystem_error& e) {
    return report(err, "io", e.what(), kExitIo);
  } catch (const json::exception& e) {
    return report(err, "invalid_config", e.what(), kExitInvalidConfig);
  } catch (const std::exception& e) {
    return report(err, "internal", e.what(), kExitInternal);
  }
  return kExitOk;
}

}  // namespace reverbkit::cli
