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
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "reverbkit/analysis.h"
#include "reverbkit/error.h"
#include "reverbkit/ism.h"
#include "reverbkit/scene.h"
#include "reverbkit/tracer.h"
#include "test_util.h"

namespace reverbkit {
namespace {

Scene shoebox(double alpha, double scattering = 0.0) {
  return make_scene({5, 4, 3}, {1.3, 1.1, 1.2}, {3.4, 2.7, 1.6}, {alpha, scattering});
}

TracerConfig small_config(std::uint64_t seed, std::size_t rays = 20000) {
  TracerConfig cfg;
  cfg.num_rays = rays;
  cfg.duration_s = 0.25;
  cfg.seed = seed;
  return cfg;
}

TEST(TraceRaysTest, FullAbsorptionKeepsOnlyDirectBin) {
  const Scene s = shoebox(1.0, 0.5);
  const TracerConfig cfg = small_config(3);
  const EnergyHistogram h = trace_rays(s, cfg);
  const std::size_t direct = h.bin_of(s.source_receiver_distance() / s.speed_of_sound);
  EXPECT_GT(h.bins()[direct], 0.0);
  for (std::size_t b = 0; b < h.bins().size(); ++b) {
    if (b != direct) {
      ASSERT_EQ(h.bins()[b], 0.0) << b;
    }
  }
}

TEST(TraceRaysTest, DirectFractionMatchesSolidAngle) {
  const Scene s = shoebox(1.0);
  TracerConfig cfg = small_config(8, 200000);
  const EnergyHistogram h = trace_rays(s, cfg);
  const double d = s.source_receiver_distance();
  const double r = cfg.receiver_radius;
  // A sphere of radius r at distance d subtends a cap of fractional area
  // (1 - sqrt(1 - r^2/d^2)) / 2.
  const double p = 0.5 * (1.0 - std::sqrt(1.0 - r * r / (d * d)));
  const double sigma = std::sqrt(p * (1 - p) / cfg.num_rays);
  EXPECT_NEAR(h.total(), p, 4 * sigma);
  // Small-sphere limit p = r^2 / (4 d^2) maps to the squared direct pressure.
  const double pressure2 = 1.0 / (16 * kPi * kPi * d * d);
  EXPECT_NEAR(receiver_energy_scale(r) * r * r / (4 * d * d), pressure2, 1e-15);
  EXPECT_NEAR(p / (r * r / (4 * d * d)), 1.0, 1e-2);
}

TEST(TraceRaysTest, DirectArrivalLandsAtDistanceOverC) {
  const Scene s = shoebox(1.0);
  TracerConfig cfg = small_config(1);
  cfg.bin_width_s = 1.0 / 8000.0;
  const EnergyHistogram h = trace_rays(s, cfg);
  const double t = s.source_receiver_distance() / s.speed_of_sound;
  EXPECT_GT(h.bins()[static_cast<std::size_t>(t / cfg.bin_width_s)], 0.0);
}

TEST(TraceRaysTest, ReceivedNeverExceedsEmitted) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Vec3 dims{2.5 + 6 * u(gen), 2.5 + 6 * u(gen), 2.2 + 3 * u(gen)};
    auto inside = [&](double L) { return 0.5 + (L - 1.0) * u(gen); };
    Scene s = make_scene(dims, {inside(dims.x), inside(dims.y), inside(dims.z)},
                         {inside(dims.x), inside(dims.y), inside(dims.z)},
                         {0.05 + 0.9 * u(gen), u(gen)});
    if (s.source_receiver_distance() < 0.5) continue;
    TracerConfig cfg = small_config(i, 5000);
    cfg.duration_s = 0.4;
    const double total = trace_rays(s, cfg).total();
    EXPECT_LT(total, 1.0);
    EXPECT_GT(total, 0.0);
  }
}

TEST(TraceRaysTest, IndependentOfThreadCount) {
  const Scene s = shoebox(0.4, 0.5);
  const TracerConfig cfg = small_config(17, 9000);
  const EnergyHistogram a = trace_rays(s, cfg, DirectPath::kInclude, 1);
  const EnergyHistogram b = trace_rays(s, cfg, DirectPath::kInclude, 4);
  const EnergyHistogram c = trace_rays(s, cfg, DirectPath::kInclude, 1);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_NE(a, trace_rays(s, small_config(18, 9000)));
}

TEST(TraceRaysTest, ExcludingDirectRemovesOnlyTheDirectPath) {
  const Scene s = shoebox(1.0);
  const TracerConfig cfg = small_config(2);
  EXPECT_EQ(trace_rays(s, cfg, DirectPath::kExclude).total(), 0.0);
}

TEST(TraceRaysTest, ReceiverContainingSourceRejected) {
  const Scene s = make_scene({5, 4, 3}, {2, 2, 1.5}, {2.1, 2, 1.5});
  try {
    trace_rays(s, small_config(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kReceiverContainsSource);
  }
}

TEST(TraceRaysTest, ConfigValidation) {
  const Scene s = shoebox(0.3);
  auto bad = [&](auto mutate) {
    TracerConfig cfg = small_config(1);
    mutate(cfg);
    EXPECT_THROW(validate(cfg, s), Error);
  };
  bad([](TracerConfig& c) { c.num_rays = 0; });
  bad([](TracerConfig& c) { c.max_bounces = 0; });
  bad([](TracerConfig& c) { c.receiver_radius = 0.0; });
  bad([](TracerConfig& c) { c.receiver_radius = 1.5; });
  bad([](TracerConfig& c) { c.bin_width_s = 0.0; });
  bad([](TracerConfig& c) { c.duration_s = -1.0; });
  bad([](TracerConfig& c) { c.energy_floor = 1.0; });
  EXPECT_NO_THROW(validate(small_config(1), s));
}

double late_energy(const EnergyHistogram& h, double after_s) {
  double e = 0.0;
  for (std::size_t b = h.bin_of(after_s); b < h.bins().size(); ++b) e += h.bins()[b];
  return e;
}

TEST(TraceRaysTest, DiffuseReflectionChangesLateField) {
  // Two-sided Welch test on late energy (t > 50 ms), 10 seeds per arm.
  constexpr int kSeeds = 10;
  std::vector<double> spec, diff;
  for (int k = 0; k < kSeeds; ++k) {
    TracerConfig cfg = small_config(100 + k, 30000);
    spec.push_back(late_energy(trace_rays(shoebox(0.5, 0.0), cfg), 0.05));
    diff.push_back(late_energy(trace_rays(shoebox(0.5, 0.5), cfg), 0.05));
  }
  auto mean_var = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    return std::pair{m, var / (v.size() - 1)};
  };
  const auto [m0, v0] = mean_var(spec);
  const auto [m1, v1] = mean_var(diff);
  const double t = (m1 - m0) / std::sqrt(v0 / kSeeds + v1 / kSeeds);
  // |t| > 2.88 rejects equality at the 1% level for 18 degrees of freedom.
  EXPECT_GT(std::abs(t), 2.88);
}

TEST(HistogramToRirTest, ZeroHistogram) {
  const EnergyHistogram h(std::vector<double>(50, 0.0), 1e-3, 8000);
  const ImpulseResponse rir = histogram_to_rir(h, 1);
  EXPECT_EQ(rir.size(), 400u);
  for (double v : rir.samples()) ASSERT_EQ(v, 0.0);
  EXPECT_EQ(rir.provenance(), Provenance::kGas);
}

TEST(HistogramToRirTest, SingleBinEnergy) {
  std::vector<double> bins(20, 0.0);
  bins[7] = 0.0123;
  const ImpulseResponse rir = histogram_to_rir(EnergyHistogram(bins, 1e-3, 8000), 5);
  EXPECT_NEAR(rir.energy(), 0.0123, 0.0123 * 1e-6);
}

TEST(HistogramToRirTest, PerBinEnergyAndSeeding) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> bins(120);
  for (double& b : bins) b = u(gen) < 0.2 ? 0.0 : std::pow(u(gen), 4);
  // 1 ms bins span 8 samples at 8 kHz; 1.3 ms bins span 10 or 11.
  for (double width : {1e-3, 1.3e-3}) {
    const EnergyHistogram h(bins, width, 8000);
    const ImpulseResponse a = histogram_to_rir(h, 10);
    const ImpulseResponse b = histogram_to_rir(h, 10);
    const ImpulseResponse c = histogram_to_rir(h, 11);
    EXPECT_EQ(a, b);
    std::size_t live = 0;
    while (bins[live] == 0.0) ++live;
    EXPECT_NE(a.samples()[bin_start_sample(h, live)], c.samples()[bin_start_sample(h, live)]);
    for (std::size_t k = 0; k < bins.size(); ++k) {
      double ea = 0.0, ec = 0.0;
      for (std::size_t i = bin_start_sample(h, k); i < bin_start_sample(h, k + 1); ++i) {
        ea += a.samples()[i] * a.samples()[i];
        ec += c.samples()[i] * c.samples()[i];
      }
      EXPECT_NEAR(ea, bins[k], 1e-6 * bins[k]) << k;
      EXPECT_NEAR(ec, bins[k], 1e-6 * bins[k]) << k;
    }
  }
}

TEST(SimulateGasTest, FullAbsorptionIsTheDirectImpulse) {
  const Scene s = shoebox(1.0, 0.3);
  TracerConfig cfg = small_config(2);
  const ImpulseResponse rir = simulate_gas(s, cfg);
  std::vector<double> expect(static_cast<std::size_t>(std::ceil(cfg.duration_s * 8000)), 0.0);
  const double d = s.source_receiver_distance();
  add_fractional_impulse(expect, d / 343.0 * 8000.0, 1.0 / (4 * kPi * d), 81);
  ASSERT_EQ(rir.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) ASSERT_EQ(rir.samples()[i], expect[i]);
  EXPECT_EQ(rir.provenance(), Provenance::kGas);
}

TEST(SimulateGasTest, T60FallsAsAbsorptionRises) {
  Scene s = make_scene({7.5, 4.6, 3.1}, {2.25, 1.84, 1.5}, {4.88, 2.53, 1.2}, {0.1, 0.0});
  double previous = INFINITY;
  for (double alpha : {0.1, 0.3, 0.6, 0.9}) {
    s.set_uniform_absorption(alpha);
    const double t60 = estimate_t60(simulate_gas(s, default_tracer_config(s, 21)));
    EXPECT_LT(t60, previous) << alpha;
    previous = t60;
  }
}

TEST(SimulateGasTest, AgreesWithImageSourceDecay) {
  const Scene s =
      make_scene({7.5, 4.6, 3.1}, {2.25, 1.84, 1.5}, {4.88, 2.53, 1.2}, {0.3, 0.0});
  const double gas = estimate_t60(simulate_gas(s, default_tracer_config(s, 4)));
  const double ism = estimate_t60(simulate_ism(s, default_ism_config(s)));
  EXPECT_NEAR(gas / ism, 1.0, 0.25);
}

TEST(SimulateGasTest, ThreadCountIndependent) {
  const Scene s = shoebox(0.35, 0.4);
  const TracerConfig cfg = small_config(31, 6000);
  EXPECT_EQ(simulate_gas(s, cfg, 1), simulate_gas(s, cfg, 3));
}

TEST(HistogramCsvTest, Header) {
  testing::TempDir dir;
  write_histogram_csv(dir / "h.csv", EnergyHistogram({0.5, 0.25}, 1e-3, 8000));
  std::ifstream f(dir / "h.csv");
  std::string line;
  std::getline(f, line);
  EXPECT_EQ(line, "bin_start_s,energy");
  std::getline(f, line);
  EXPECT_EQ(line, "0,0.5");
}

}  // namespace
}  // namespace reverbkit
