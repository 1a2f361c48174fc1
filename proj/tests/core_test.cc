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

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "reverbkit/error.h"
#include "reverbkit/parallel.h"
#include "reverbkit/rng.h"
#include "reverbkit/scene.h"
#include "reverbkit/types.h"
#include "reverbkit/wav.h"
#include "test_util.h"

namespace reverbkit {
namespace {

using testing::TempDir;

Errc code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return Errc::kInvalidArgument;
}

TEST(SceneTest, FirstTableRoomIsValid) {
  const Scene s = make_scene({10.7, 6.9, 2.6}, {2, 2, 1}, {5, 3, 1.5}, {0.3, 0.0});
  EXPECT_NO_THROW(validate_scene(s));
}

TEST(SceneTest, CoincidentPositionsRejected) {
  Scene s;
  s.room_dims = {1, 1, 1};
  s.source_pos = {0.5, 0.5, 0.5};
  s.receiver_pos = {0.5, 0.5, 0.5};
  EXPECT_EQ(code_of([&] { validate_scene(s); }), Errc::kCoincidentPositions);
}

TEST(SceneTest, SourceOutsideRoomRejected) {
  Scene s;
  s.room_dims = {4, 4, 4};
  s.source_pos = {5, 1, 1};
  s.receiver_pos = {2, 2, 2};
  EXPECT_EQ(code_of([&] { validate_scene(s); }), Errc::kPositionOutsideRoom);
}

TEST(SceneTest, PositionOnWallRejected) {
  Scene s = make_scene({4, 4, 4}, {1, 1, 1}, {2, 2, 2});
  s.receiver_pos.z = 4.0;
  EXPECT_EQ(code_of([&] { validate_scene(s); }), Errc::kPositionOutsideRoom);
}

TEST(SceneTest, NonPositiveDimensionRejected) {
  Scene s = make_scene({4, 4, 4}, {1, 1, 1}, {2, 2, 2});
  s.room_dims.y = 0.0;
  EXPECT_EQ(code_of([&] { validate_scene(s); }), Errc::kNonPositiveDimension);
}

TEST(SceneTest, MaterialRangeChecked) {
  Scene s = make_scene({4, 4, 4}, {1, 1, 1}, {2, 2, 2});
  s.walls[3].absorption = 1.2;
  EXPECT_EQ(code_of([&] { validate_scene(s); }), Errc::kMaterialOutOfRange);
  s.walls[3].absorption = 0.2;
  s.walls[5].scattering = -0.1;
  EXPECT_EQ(code_of([&] { validate_scene(s); }), Errc::kMaterialOutOfRange);
}

TEST(SceneTest, ValidationIsIdempotent) {
  const Scene s = make_scene({5, 4, 3}, {1, 1, 1}, {3, 2, 2});
  const Scene& once = validate_scene(s);
  const Scene& twice = validate_scene(once);
  EXPECT_EQ(twice, s);
}

TEST(SceneTest, JsonRoundTrip) {
  Scene s = make_scene({5, 4, 3}, {1, 1.5, 1}, {3, 2, 2.5}, {0.25, 0.4});
  s.walls[4].absorption = 0.7;
  s.speed_of_sound = 340.0;
  const SceneConfig back = scene_config_from_json(scene_to_json(s));
  EXPECT_EQ(back.scene, s);
  EXPECT_EQ(scene_hash(back.scene), scene_hash(s));
}

TEST(SceneTest, HashDistinguishesScenes) {
  Scene a = make_scene({5, 4, 3}, {1, 1, 1}, {3, 2, 2});
  Scene b = a;
  b.walls[0].absorption = 0.31;
  EXPECT_NE(scene_hash(a), scene_hash(b));
  EXPECT_EQ(scene_hash_hex(a).size(), 16u);
}

TEST(SceneTest, NullHeightNeedsOverride) {
  const nlohmann::json doc = {{"room", {7.62, 7.62, nullptr}},
                              {"source", {2, 2, 1.2}},
                              {"receiver", {5, 4, 1.0}},
                              {"walls", {{"absorption", 0.3}, {"scattering", 0.0}}}};
  EXPECT_EQ(code_of([&] { scene_config_from_json(doc); }), Errc::kInvalidConfig);
  const SceneConfig cfg = scene_config_from_json(doc, 3.0);
  EXPECT_DOUBLE_EQ(cfg.scene.room_dims.z, 3.0);
}

TEST(SceneTest, MissingKeyIsConfigError) {
  const nlohmann::json doc = {{"room", {4, 4, 4}}, {"source", {1, 1, 1}}};
  EXPECT_EQ(code_of([&] { scene_config_from_json(doc); }), Errc::kInvalidConfig);
}

TEST(SceneTest, ShippedTableRoomsLoad) {
  const double dims[9][3] = {{10.7, 6.9, 2.6},  {4.6, 6.9, 3.1}, {7.5, 4.6, 3.1},
                             {6.2, 2.6, 14.2},  {28.1, 11.1, 3.3}, {11.5, 20.1, 4.8},
                             {17.2, 22.8, 6.9}, {7.0, 4.1, 3.6}, {4.4, 2.8, 2.7}};
  for (int i = 0; i < 9; ++i) {
    const auto path =
        testing::source_dir() / "scenes/sim" / ("room" + std::to_string(i + 1) + ".json");
    const SceneConfig cfg = load_scene(path);
    EXPECT_EQ(cfg.scene.room_dims, (Vec3{dims[i][0], dims[i][1], dims[i][2]})) << path;
    EXPECT_EQ(cfg.scene.sample_rate, 8000.0);
  }
}

TEST(SceneTest, ShippedVoicesRooms) {
  const auto dir = testing::source_dir() / "scenes/voices";
  EXPECT_NO_THROW(load_scene(dir / "room1.json"));
  EXPECT_NO_THROW(load_scene(dir / "room2.json"));
  EXPECT_EQ(code_of([&] { load_scene(dir / "room3.json"); }), Errc::kInvalidConfig);
  const SceneConfig r4 = load_scene(dir / "room4.json", 3.0);
  EXPECT_EQ(r4.metadata.at("approximation"), "bounding-box");
}

TEST(TypesTest, ImpulseResponseRejectsNonFinite) {
  EXPECT_EQ(code_of([] {
              ImpulseResponse({0.0, std::numeric_limits<double>::quiet_NaN()}, 8000,
                              Provenance::kIsm);
            }),
            Errc::kNonFiniteSample);
  EXPECT_EQ(code_of([] {
              ImpulseResponse({std::numeric_limits<double>::infinity()}, 8000,
                              Provenance::kGas);
            }),
            Errc::kNonFiniteSample);
  EXPECT_EQ(code_of([] { AudioSignal({1.0, -INFINITY}, 8000); }), Errc::kNonFiniteSample);
}

TEST(TypesTest, ImpulseResponseNeedsSamplesAndRate) {
  EXPECT_THROW(ImpulseResponse({}, 8000, Provenance::kIsm), Error);
  EXPECT_THROW(ImpulseResponse({1.0}, 0.0, Provenance::kIsm), Error);
}

TEST(TypesTest, ProvenanceNames) {
  for (Provenance p : {Provenance::kIsm, Provenance::kGas, Provenance::kExternalReal,
                       Provenance::kExternalGan}) {
    EXPECT_EQ(parse_provenance(provenance_name(p)), p);
  }
  EXPECT_THROW(parse_provenance("gpu"), Error);
}

TEST(TypesTest, ReflectionMagnitude) {
  EXPECT_DOUBLE_EQ((SurfaceMaterial{0.36, 0.0}).reflection(), 0.8);
  EXPECT_DOUBLE_EQ((SurfaceMaterial{1.0, 0.0}).reflection(), 0.0);
}

TEST(WavTest, FloatRoundTripIsExact) {
  TempDir dir;
  std::mt19937_64 gen(1);
  std::vector<double> v = testing::random_vector(gen, 1000, 0.3);
  for (double& x : v) x = static_cast<float>(x);
  write_wav(dir / "a.wav", v, 8000);
  const AudioSignal back = read_wav(dir / "a.wav");
  EXPECT_EQ(back.sample_rate(), 8000);
  ASSERT_EQ(back.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(back.samples()[i], v[i]);
}

TEST(WavTest, ReadsSixteenBitPcm) {
  TempDir dir;
  const std::vector<std::int16_t> pcm = {0, 16384, -32768, 32767, -1};
  std::ofstream f(dir / "p.wav", std::ios::binary);
  auto put32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
  auto put16 = [&](std::uint16_t v) { f.write(reinterpret_cast<const char*>(&v), 2); };
  f.write("RIFF", 4);
  put32(36 + 2 * pcm.size());
  f.write("WAVEfmt ", 8);
  put32(16);
  put16(1);
  put16(1);
  put32(16000);
  put32(32000);
  put16(2);
  put16(16);
  f.write("data", 4);
  put32(2 * pcm.size());
  for (auto s : pcm) put16(static_cast<std::uint16_t>(s));
  f.close();
  const AudioSignal sig = read_wav(dir / "p.wav");
  EXPECT_EQ(sig.sample_rate(), 16000);
  ASSERT_EQ(sig.size(), pcm.size());
  for (std::size_t i = 0; i < pcm.size(); ++i) {
    EXPECT_DOUBLE_EQ(sig.samples()[i], pcm[i] / 32768.0);
  }
}

TEST(WavTest, MissingAndCorruptFilesAreDistinct) {
  TempDir dir;
  EXPECT_EQ(code_of([&] { read_wav(dir / "none.wav"); }), Errc::kMissingFile);
  std::ofstream(dir / "bad.wav") << "not a wave file at all";
  EXPECT_EQ(code_of([&] { read_wav(dir / "bad.wav"); }), Errc::kCorruptWav);
}

TEST(WavTest, RirSidecarCarriesProvenance) {
  TempDir dir;
  const ImpulseResponse rir({1.0, 0.5, 0.25}, 8000, Provenance::kGas, "abc");
  write_rir(dir / "r.wav", rir, {{"absorption", 0.4}});
  EXPECT_TRUE(std::filesystem::exists(dir / "r.json"));
  const ImpulseResponse back = read_rir(dir / "r.wav");
  EXPECT_EQ(back.provenance(), Provenance::kGas);
  EXPECT_EQ(back.scene_id(), "abc");
  EXPECT_EQ(read_sidecar(dir / "r.wav")->at("absorption"), 0.4);
  write_wav(dir / "plain.wav", rir.samples(), 8000);
  EXPECT_EQ(read_rir(dir / "plain.wav", Provenance::kExternalGan).provenance(),
            Provenance::kExternalGan);
}

TEST(RngTest, StreamsAreReproducibleAndDistinct) {
  CounterRng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, d.next_u64());
  }
}

TEST(RngTest, UniformRange) {
  CounterRng rng(7);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform_open_low();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(RngTest, BelowIsUniformChiSquare) {
  CounterRng rng(11);
  constexpr int kBins = 7;
  constexpr int kDraws = 70000;
  int counts[kBins] = {};
  for (int i = 0; i < kDraws; ++i) ++counts[rng.below(kBins)];
  double chi2 = 0.0;
  const double expect = static_cast<double>(kDraws) / kBins;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  // 6 degrees of freedom; 0.999 quantile is 22.46.
  EXPECT_LT(chi2, 22.46);
}

TEST(RngTest, NormalMoments) {
  CounterRng rng(5);
  double s = 0.0, s2 = 0.0;
  constexpr int kN = 200000;
  for (int i = 0; i < kN; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / kN, 0.0, 0.01);
  EXPECT_NEAR(s2 / kN, 1.0, 0.01);
}

TEST(ParallelTest, VisitsEveryIndexOnce) {
  for (std::size_t threads : {1u, 3u, 8u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) ASSERT_EQ(h, 1);
  }
}

TEST(ParallelTest, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 4,
                            [](std::size_t i) {
                              if (i == 5) fail(Errc::kInvalidArgument, "boom");
                            }),
               Error);
}

TEST(ParallelTest, ResolveZeroUsesDefault) {
  EXPECT_EQ(resolve_parallelism(3), 3u);
  EXPECT_EQ(resolve_parallelism(0), default_parallelism());
  EXPECT_GE(default_parallelism(), 1u);
}

}  // namespace
}  // namespace reverbkit
