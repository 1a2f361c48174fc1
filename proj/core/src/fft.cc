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

#include "fft.h"

#include <algorithm>
#include <mutex>

#include "reverbkit/error.h"

namespace reverbkit::internal {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n == 0) fail(Errc::kInvalidArgument, "FFT length must be positive");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(n_);
  spectrum_ = fftw_alloc_complex(num_bins());
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, spectrum_,
                                       FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spectrum_, real_,
                                       FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(forward_plan_);
  fftw_destroy_plan(inverse_plan_);
  fftw_free(real_);
  fftw_free(spectrum_);
}

std::span<const std::complex<double>> RealFft::forward(std::span<const double> input) {
  const std::size_t m = std::min(input.size(), n_);
  std::copy_n(input.begin(), m, real_);
  std::fill(real_ + m, real_ + n_, 0.0);
  fftw_execute(forward_plan_);
  return {reinterpret_cast<const std::complex<double>*>(spectrum_), num_bins()};
}

std::span<const double> RealFft::inverse(std::span<const std::complex<double>> bins) {
  // c2r destroys its input, so the spectrum buffer is refilled every call.
  auto* dst = reinterpret_cast<std::complex<double>*>(spectrum_);
  const std::size_t m = std::min(bins.size(), num_bins());
  std::copy_n(bins.begin(), m, dst);
  std::fill(dst + m, dst + num_bins(), std::complex<double>{});
  fftw_execute(inverse_plan_);
  return {real_, n_};
}

}  // namespace reverbkit::internal
