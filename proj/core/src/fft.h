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

#ifndef REVERBKIT_SRC_FFT_H_
#define REVERBKIT_SRC_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <fftw3.h>

namespace reverbkit::internal {

// Real <-> half-complex transform pair of fixed length backed by FFTW.
// Buffers are owned and FFTW-aligned so repeated calls take the same code
// path. Not thread-safe per instance; distinct instances may run
// concurrently.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t num_bins() const { return n_ / 2 + 1; }

  // Zero-pads `input` to size(); returns num_bins() unnormalized bins.
  std::span<const std::complex<double>> forward(std::span<const double> input);

  // Unnormalized inverse of num_bins() bins; multiply by 1/size() to invert
  // forward().
  std::span<const double> inverse(std::span<const std::complex<double>> bins);

 private:
  std::size_t n_;
  double* real_;
  fftw_complex* spectrum_;
  fftw_plan forward_plan_;
  fftw_plan inverse_plan_;
};

}  // namespace reverbkit::internal

#endif  // REVERBKIT_SRC_FFT_H_
