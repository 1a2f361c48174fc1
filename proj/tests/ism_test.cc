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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "reverbkit/analysis.h"
#include "reverbkit/error.h"
#include "reverbkit/ism.h"
#include "reverbkit/scene.h"

namespace reverbkit {
namespace {

Scene box(Vec3 dims, Vec3 src, Vec3 rcv, double alpha) {
  return make_scene(dims, src, rcv, {alpha, 0.0});
}

TEST(SabineTest, FirstTableRoomClosedForm) {
  const Scene s = box({10.7, 6.9, 2.6}, {2, 2, 1}, {5, 3, 1.5}, 0.3);
  EXPECT_NEAR(s.volume(), 191.958, 1e-3);
  EXPECT_NEAR(s.surface_area(), 239.18, 1e-2);
  EXPECT_NEAR(estimate_absorption_for_t60(s, 0.4307), 0.30, 1e-3);
}

TEST(SabineTest, UnitCubeBoundary) {
  const Scene s = box({1, 1, 1}, {0.3, 0.3, 0.3}, {0.7, 0.7, 0.7}, 0.3);
  EXPECT_DOUBLE_EQ(estimate_absorption_for_t60(s, 0.161 / 6.0), 1.0);
}

TEST(SabineTest, DoublingTargetHalvesAbsorption) {
  const Scene s = box({7.5, 4.6, 3.1}, {1, 1, 1}, {4, 3, 2}, 0.3);
  const double a1 = estimate_absorption_for_t60(s, 0.4);
  const double a2 = estimate_absorption_for_t60(s, 0.8);
  EXPECT_NEAR(a2, a1 / 2, 1e-15);
}

TEST(SabineTest, Errors) {
  const Scene s = box({17.2, 22.8, 6.9}, {2, 2, 1}, {5, 3, 1.5}, 0.3);
  try {
    estimate_absorption_for_t60(s, 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnachievableTarget);
  }
  EXPECT_THROW(estimate_absorption_for_t60(s, 0.0), Error);
  EXPECT_THROW(estimate_absorption_for_t60(s, -1.0), Error);
}

TEST(SabineTest, ForwardMatchesInverse) {
  Scene s = box({4.6, 6.9, 3.1}, {1, 1, 1}, {3, 4, 2}, 0.3);
  s.set_uniform_absorption(estimate_absorption_for_t60(s, 0.55));
  EXPECT_NEAR(sabine_t60(s), 0.55, 1e-12);
}

TEST(EnumerateTest, OrderZeroIsTheSource) {
  const Scene s = box({4, 4, 4}, {1, 2, 3}, {3, 3, 3}, 0.3);
  const auto images = enumerate_images(s, 0);
  ASSERT_EQ(images.size(), 1u);
  EXPECT_EQ(images[0].position, s.source_pos);
  EXPECT_EQ(images[0].gain, 1.0);
  EXPECT_EQ(images[0].order, 0);
}

TEST(EnumerateTest, FirstOrderShoebox) {
  const double alpha = 0.36;
  const Scene s = box({4, 4, 4}, {1, 1, 1}, {3, 3, 3}, alpha);
  const auto images = enumerate_images(s, 1);
  ASSERT_EQ(images.size(), 7u);
  bool found = false;
  for (const auto& img : images) {
    if (img.position == Vec3{-1, 1, 1}) {
      found = true;
      EXPECT_NEAR(img.gain, std::sqrt(1 - alpha), 1e-15);
      EXPECT_EQ(img.order, 1);
    }
  }
  EXPECT_TRUE(found);
}

// Independent image model: along one axis the unfolded images sit at
// 2kL + s and 2kL - s. An image in cell [jL, (j+1)L) is reached through
// the |j| lattice planes between it and the room; plane mL is a copy of the
// x = 0 wall for even m and of the x = L wall for odd m.
struct AxisOracle {
  double position;
  int reflections;
  int near_hits;
  int far_hits;
};

std::vector<AxisOracle> axis_oracle(double length, double source, int max_reflections) {
  std::vector<AxisOracle> out;
  for (int k = -max_reflections; k <= max_reflections; ++k) {
    for (double p : {2.0 * k * length + source, 2.0 * k * length - source}) {
      const int cell = static_cast<int>(std::floor(p / length));
      const int n = std::abs(cell);
      if (n > max_reflections) continue;
      int near = 0, far = 0;
      // Planes mL strictly separating the cell from [0, L).
      for (int m = (cell < 0 ? cell + 1 : 1); m <= (cell < 0 ? 0 : cell); ++m) {
        ((m % 2 == 0) ? near : far) += 1;
      }
      out.push_back({p, n, near, far});
    }
  }
  return out;
}

TEST(EnumerateTest, MatchesBruteForceLattice) {
  Scene s = box({3.7, 2.9, 2.3}, {0.9, 1.7, 0.6}, {2.5, 1.0, 1.8}, 0.0);
  const double alphas[6] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  for (int w = 0; w < 6; ++w) s.walls[w].absorption = alphas[w];
  for (int K = 0; K <= 6; ++K) {
    // Triple loop over reflection indices.
    std::size_t brute = 0;
    for (int nx = -K; nx <= K; ++nx)
      for (int ny = -K; ny <= K; ++ny)
        for (int nz = -K; nz <= K; ++nz)
          if (std::abs(nx) + std::abs(ny) + std::abs(nz) <= K) ++brute;
    const auto images = enumerate_images(s, K);
    ASSERT_EQ(images.size(), brute) << "K=" << K;

    // Position and gain of every image against the unfolded-lattice model.
    std::multimap<std::tuple<long, long, long>, double> expected;
    auto key = [](Vec3 p) {
      return std::make_tuple(std::lround(p.x * 1e6), std::lround(p.y * 1e6),
                             std::lround(p.z * 1e6));
    };
    const auto ox = axis_oracle(s.room_dims.x, s.source_pos.x, K);
    const auto oy = axis_oracle(s.room_dims.y, s.source_pos.y, K);
    const auto oz = axis_oracle(s.room_dims.z, s.source_pos.z, K);
    for (const auto& a : ox)
      for (const auto& b : oy)
        for (const auto& c : oz) {
          if (a.reflections + b.reflections + c.reflections > K) continue;
          double g = 1.0;
          g *= std::pow(std::sqrt(1 - alphas[0]), a.near_hits) *
               std::pow(std::sqrt(1 - alphas[1]), a.far_hits);
          g *= std::pow(std::sqrt(1 - alphas[2]), b.near_hits) *
               std::pow(std::sqrt(1 - alphas[3]), b.far_hits);
          g *= std::pow(std::sqrt(1 - alphas[4]), c.near_hits) *
               std::pow(std::sqrt(1 - alphas[5]), c.far_hits);
          expected.emplace(key({a.position, b.position, c.position}), g);
        }
    ASSERT_EQ(expected.size(), brute);
    for (const auto& img : images) {
      const auto it = expected.find(key(img.position));
      ASSERT_NE(it, expected.end());
      EXPECT_NEAR(img.gain, it->second, 1e-12);
      EXPECT_GE(img.gain, 0.0);
      EXPECT_LE(img.gain, 1.0);
    }
  }
}

TEST(FractionalImpulseTest, MatchesWindowedSincFormula) {
  for (double delay : {40.0, 40.25, 40.5, 41.875, 3.3}) {
    std::vector<double> out(100, 0.0);
    add_fractional_impulse(out, delay, 0.7, 81);
    const long center = std::lround(delay);
    for (long n = 0; n < 100; ++n) {
      double expect = 0.0;
      const double x = n - delay;
      if (std::abs(n - center) <= 40) {
        const double sinc = std::abs(x) < 1e-12 ? 1.0 : std::sin(kPi * x) / (kPi * x);
        expect = 0.7 * sinc * 0.5 * (1.0 + std::cos(kPi * x / 41.0));
      }
      EXPECT_NEAR(out[n], expect, 1e-12) << "delay " << delay << " n " << n;
    }
  }
}

TEST(FractionalImpulseTest, SingleTapRounds) {
  std::vector<double> out(10, 0.0);
  add_fractional_impulse(out, 4.4, 2.0, 1);
  EXPECT_NEAR(out[4], 2.0 * std::sin(kPi * 0.4) / (kPi * 0.4) * 0.5 *
                          (1 + std::cos(kPi * 0.4 / 1.0)),
              1e-12);
}

TEST(HighpassTest, RemovesDcAndPassesHighFrequencies) {
  std::vector<double> dc(8000, 1.0);
  highpass_in_place(dc, 20.0, 8000.0);
  EXPECT_LT(std::abs(dc.back()), 1e-6);
  std::vector<double> nyq(2000);
  for (std::size_t i = 0; i < nyq.size(); ++i) nyq[i] = (i % 2 == 0) ? 1.0 : -1.0;
  highpass_in_place(nyq, 20.0, 8000.0);
  EXPECT_NEAR(std::abs(nyq.back()), 1.0, 1e-9);
  EXPECT_THROW(highpass_in_place(nyq, 0.0, 8000.0), Error);
  EXPECT_THROW(highpass_in_place(nyq, 4000.0, 8000.0), Error);
}

TEST(SimulateIsmTest, DirectPeakSample) {
  // 1.715 m at 343 m/s and 8 kHz is exactly 40 samples.
  const Scene s = box({5, 4, 3}, {1, 1, 1}, {2.715, 1, 1}, 0.3);
  IsmConfig cfg;
  cfg.duration_s = 0.1;
  cfg.max_order = 0;
  const ImpulseResponse rir = simulate_ism(s, cfg);
  const auto it = std::max_element(rir.samples().begin(), rir.samples().end(),
                                   [](double a, double b) { return std::abs(a) < std::abs(b); });
  EXPECT_EQ(it - rir.samples().begin(), 40);
  EXPECT_EQ(rir.size(), 800u);
  EXPECT_EQ(rir.provenance(), Provenance::kIsm);
}

TEST(SimulateIsmTest, FullAbsorptionLeavesDirectPathOnly) {
  const Scene s = box({6, 5, 3}, {1.2, 1.3, 1.1}, {4.1, 3.2, 1.9}, 1.0);
  IsmConfig cfg = default_ism_config(s);
  IsmConfig direct = cfg;
  direct.max_order = 0;
  EXPECT_GT(cfg.max_order, 0);
  const ImpulseResponse a = simulate_ism(s, cfg);
  const ImpulseResponse b = simulate_ism(s, direct);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a.samples()[i], b.samples()[i]);
}

TEST(SimulateIsmTest, DirectAmplitudeHalvesWithDistance) {
  // 1.715 m and 3.43 m both land on whole samples.
  const Scene near = box({8, 4, 3}, {1, 2, 1.5}, {2.715, 2, 1.5}, 0.3);
  const Scene far = box({8, 4, 3}, {1, 2, 1.5}, {4.43, 2, 1.5}, 0.3);
  IsmConfig cfg;
  cfg.duration_s = 0.05;
  cfg.max_order = 0;
  const double a = simulate_ism(near, cfg).samples()[40];
  const double b = simulate_ism(far, cfg).samples()[80];
  EXPECT_NEAR(b / a, 0.5, 1e-12);
  cfg.highpass_hz = 0.0;
  EXPECT_NEAR(simulate_ism(near, cfg).samples()[40], 1.0 / (4 * kPi * 1.715), 1e-12);
}

TEST(SimulateIsmTest, DeterministicAcrossThreadCounts) {
  const Scene s = box({7.5, 4.6, 3.1}, {1.5, 1.2, 1.4}, {5.2, 3.1, 1.6}, 0.25);
  const IsmConfig cfg = default_ism_config(s);
  const ImpulseResponse a = simulate_ism(s, cfg, 1);
  const ImpulseResponse b = simulate_ism(s, cfg, 1);
  const ImpulseResponse c = simulate_ism(s, cfg, 4);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(SimulateIsmTest, EnergyNonIncreasingInAbsorption) {
  Scene s = box({4.4, 2.8, 2.7}, {1.1, 0.9, 1.3}, {3.2, 1.9, 1.5}, 0.1);
  IsmConfig cfg;
  cfg.duration_s = 0.3;
  cfg.max_order = 20;
  double previous = INFINITY;
  for (double alpha : {0.1, 0.2, 0.35, 0.5, 0.7, 0.9, 1.0}) {
    s.set_uniform_absorption(alpha);
    const double e = simulate_ism(s, cfg).energy();
    EXPECT_LE(e, previous) << alpha;
    previous = e;
  }
}

TEST(SimulateIsmTest, T60FallsAsAbsorptionRises) {
  Scene s = box({7.5, 4.6, 3.1}, {2.25, 1.84, 1.5}, {4.88, 2.53, 1.2}, 0.1);
  double previous = INFINITY;
  for (double alpha : {0.1, 0.3, 0.6, 0.9}) {
    s.set_uniform_absorption(alpha);
    const double t60 = estimate_t60(simulate_ism(s, default_ism_config(s)));
    EXPECT_LT(t60, previous) << alpha;
    previous = t60;
  }
}

TEST(IsmConfigTest, Validation) {
  IsmConfig cfg;
  cfg.fractional_delay_taps = 80;
  EXPECT_THROW(validate(cfg), Error);
  cfg.fractional_delay_taps = 81;
  cfg.duration_s = 0.0;
  EXPECT_THROW(validate(cfg), Error);
  cfg.duration_s = 0.1;
  cfg.highpass_hz = -1.0;
  EXPECT_THROW(validate(cfg), Error);
}

TEST(IsmConfigTest, Defaults) {
  Scene s = box({10.7, 6.9, 2.6}, {2, 2, 1}, {5, 3, 1.5}, 0.3);
  EXPECT_NEAR(default_duration(s), 1.25 * sabine_t60(s), 1e-12);
  s.set_uniform_absorption(1.0);
  EXPECT_DOUBLE_EQ(default_duration(s), 0.25);
  // Every image with path length <= c * duration has order <= the default.
  const double dur = 0.3;
  const int k = default_max_order(s, dur);
  for (const auto& img : enumerate_images(s, k + 2)) {
    if (distance(img.position, s.receiver_pos) <= s.speed_of_sound * dur) {
      EXPECT_LE(img.order, k);
    }
  }
}

}  // namespace
}  // namespace reverbkit
