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

#include "reverbkit/metrics.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "reverbkit/error.h"

namespace reverbkit {

namespace {

double capped_ratio_db(double signal_energy, double error_energy) {
  // A vanishing projection scores the floor even when the error vanishes
  // too (an all-zero estimate).
  if (signal_energy <= 0.0) return -kMetricCapDb;
  if (error_energy <= 0.0) return kMetricCapDb;
  return std::clamp(10.0 * std::log10(signal_energy / error_energy), -kMetricCapDb,
                    kMetricCapDb);
}

void check_pair(std::span<const double> estimate, std::span<const double> reference) {
  if (estimate.size() != reference.size() || estimate.empty()) {
    fail(Errc::kLengthMismatch, "estimate and reference must have equal, non-zero length");
  }
  double ref_energy = 0.0;
  for (double r : reference) ref_energy += r * r;
  if (ref_energy <= 0.0) fail(Errc::kZeroSignal, "reference signal is all zeros");
}

}  // namespace

double si_sdr(std::span<const double> estimate, std::span<const double> reference) {
  check_pair(estimate, reference);
  double cross = 0.0, ref_energy = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    cross += estimate[i] * reference[i];
    ref_energy += reference[i] * reference[i];
  }
  const double alpha = cross / ref_energy;
  double target = 0.0, error = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double s = alpha * reference[i];
    const double e = estimate[i] - s;
    target += s * s;
    error += e * e;
  }
  return capped_ratio_db(target, error);
}

double si_sdr(const AudioSignal& estimate, const AudioSignal& reference) {
  return si_sdr(estimate.samples(), reference.samples());
}

double sdr(std::span<const double> estimate, std::span<const double> reference,
           std::size_t taps) {
  check_pair(estimate, reference);
  if (taps < 1) fail(Errc::kInvalidArgument, "SDR filter needs at least one tap");
  const std::size_t n = reference.size();
  const auto lags = static_cast<Eigen::Index>(taps);

  // Gram matrix of the delayed, zero-padded reference is Toeplitz in its
  // autocorrelation; the right-hand side is the reference/estimate
  // cross-correlation.
  std::vector<double> autocorr(taps, 0.0), cross(taps, 0.0);
  for (std::size_t lag = 0; lag < taps && lag < n; ++lag) {
    double a = 0.0, c = 0.0;
    for (std::size_t t = lag; t < n; ++t) {
      a += reference[t] * reference[t - lag];
      c += estimate[t] * reference[t - lag];
    }
    autocorr[lag] = a;
    cross[lag] = c;
  }
  Eigen::MatrixXd gram(lags, lags);
  Eigen::VectorXd rhs(lags);
  for (Eigen::Index i = 0; i < lags; ++i) {
    rhs(i) = cross[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < lags; ++j) {
      gram(i, j) = autocorr[static_cast<std::size_t>(std::abs(i - j))];
    }
  }
  const Eigen::VectorXd filter = gram.ldlt().solve(rhs);

  // s_target has n + taps - 1 samples; the estimate is zero padded to match.
  const std::size_t out_len = n + taps - 1;
  double target = 0.0, error = 0.0;
  for (std::size_t t = 0; t < out_len; ++t) {
    double s = 0.0;
    const std::size_t k_begin = t >= n ? t - n + 1 : 0;
    const std::size_t k_end = std::min(taps, t + 1);
    for (std::size_t k = k_begin; k < k_end; ++k) {
      s += filter(static_cast<Eigen::Index>(k)) * reference[t - k];
    }
    const double e = (t < n ? estimate[t] : 0.0) - s;
    target += s * s;
    error += e * e;
  }
  return capped_ratio_db(target, error);
}

double sdr(const AudioSignal& estimate, const AudioSignal& reference) {
  return sdr(estimate.samples(), reference.samples());
}

SeparationMetrics eval_pair(std::span<const AudioSignal> estimates,
                            std::span<const AudioSignal> references,
                            const AudioSignal& mixture) {
  if (estimates.size() != 2 || references.size() != 2) {
    fail(Errc::kInvalidArgument, "eval_pair needs exactly two estimates and two references");
  }
  const std::size_t n = mixture.size();
  for (const auto* group : {&estimates, &references}) {
    for (const auto& s : *group) {
      if (s.size() != n) fail(Errc::kLengthMismatch, "all signals must have equal length");
    }
  }

  double si[2][2];
  for (int e = 0; e < 2; ++e) {
    for (int r = 0; r < 2; ++r) si[e][r] = si_sdr(estimates[e], references[r]);
  }
  const double identity = 0.5 * (si[0][0] + si[1][1]);
  const double swapped = 0.5 * (si[1][0] + si[0][1]);

  SeparationMetrics m;
  // Ties keep the identity assignment.
  m.permutation = swapped > identity ? std::array<std::size_t, 2>{1, 0}
                                     : std::array<std::size_t, 2>{0, 1};
  for (int r = 0; r < 2; ++r) {
    const AudioSignal& est = estimates[m.permutation[r]];
    m.si_sdr[r] = si[m.permutation[r]][r];
    m.sdr[r] = sdr(est, references[r]);
    m.si_sdri[r] = m.si_sdr[r] - si_sdr(mixture, references[r]);
    m.sdri[r] = m.sdr[r] - sdr(mixture, references[r]);
  }
  return m;
}

}  // namespace reverbkit
