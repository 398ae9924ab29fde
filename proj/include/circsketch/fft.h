// Copyright 2026 The circsketch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CIRCSKETCH_FFT_H_
#define CIRCSKETCH_FFT_H_

#include <complex>
#include <cstddef>
#include <span>

namespace circsketch {

// Real-input DFT of arbitrary length n backed by FFTW. Plans are created once
// per length and shared; execution is thread-safe.
class RealFft {
 public:
  explicit RealFft(std::size_t n);

  std::size_t size() const { return n_; }
  // Number of non-redundant complex bins, n/2 + 1.
  std::size_t spectrum_size() const { return n_ / 2 + 1; }

  // out[k] = sum_t in[t] exp(-2 pi i k t / n), k = 0..n/2.
  void forward(std::span<const double> in,
               std::span<std::complex<double>> out) const;

  // Inverse of forward including the 1/n normalization.
  void inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const;

 private:
  std::size_t n_;
  void* r2c_;
  void* c2r_;
};

}  // namespace circsketch

#endif  // CIRCSKETCH_FFT_H_
