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

#include "circsketch/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <new>
#include <mutex>
#include <utility>
#include <vector>

#include "circsketch/errors.h"

namespace circsketch {
namespace {

struct PlanPair {
  fftw_plan r2c;
  fftw_plan c2r;
};

// fftw planner calls are not thread-safe; only execution is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

PlanPair plans_for(std::size_t n) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const int len = static_cast<int>(n);
  double* real = fftw_alloc_real(n);
  fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
  // Planned for SIMD-aligned arrays; execution copies misaligned buffers.
  const unsigned flags = FFTW_ESTIMATE;
  PlanPair plans{fftw_plan_dft_r2c_1d(len, real, cplx, flags),
                 fftw_plan_dft_c2r_1d(len, cplx, real, flags)};
  fftw_free(real);
  fftw_free(cplx);
  if (plans.r2c == nullptr || plans.c2r == nullptr) {
    throw Error("FFTW failed to create a plan");
  }
  cache.emplace(n, plans);
  return plans;
}

// An fftw_malloc'd buffer, so it meets the alignment the plans assume.
template <typename T>
class AlignedBuffer {
 public:
  explicit AlignedBuffer(std::size_t count)
      : data_(static_cast<T*>(fftw_malloc(sizeof(T) * count))) {
    if (data_ == nullptr) throw std::bad_alloc();
  }
  ~AlignedBuffer() { fftw_free(data_); }
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;
  T* get() const { return data_; }

 private:
  T* data_;
};

bool aligned(const void* p) {
  return fftw_alignment_of(static_cast<double*>(const_cast<void*>(p))) == 0;
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidArgument("FFT length must be positive");
  const PlanPair plans = plans_for(n);
  r2c_ = plans.r2c;
  c2r_ = plans.c2r;
}

void RealFft::forward(std::span<const double> in,
                      std::span<std::complex<double>> out) const {
  if (in.size() != n_ || out.size() != spectrum_size()) {
    throw DimensionError("RealFft::forward: buffer size mismatch");
  }
  const auto plan = static_cast<fftw_plan>(r2c_);
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  if (aligned(in.data()) && aligned(out.data())) {
    // Out-of-place r2c leaves its input untouched.
    fftw_execute_dft_r2c(plan, const_cast<double*>(in.data()), dst);
    return;
  }
  AlignedBuffer<double> src(n_);
  AlignedBuffer<fftw_complex> spec(spectrum_size());
  std::copy(in.begin(), in.end(), src.get());
  fftw_execute_dft_r2c(plan, src.get(), spec.get());
  std::copy_n(reinterpret_cast<const std::complex<double>*>(spec.get()),
              spectrum_size(), out.data());
}

void RealFft::inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) const {
  if (in.size() != spectrum_size() || out.size() != n_) {
    throw DimensionError("RealFft::inverse: buffer size mismatch");
  }
  // c2r overwrites its input, so run it on a scratch copy.
  AlignedBuffer<fftw_complex> scratch(spectrum_size());
  std::copy(in.begin(), in.end(),
            reinterpret_cast<std::complex<double>*>(scratch.get()));
  const auto plan = static_cast<fftw_plan>(c2r_);
  if (aligned(out.data())) {
    fftw_execute_dft_c2r(plan, scratch.get(), out.data());
  } else {
    AlignedBuffer<double> dst(n_);
    fftw_execute_dft_c2r(plan, scratch.get(), dst.get());
    std::copy_n(dst.get(), n_, out.data());
  }
  const double scale = 1.0 / static_cast<double>(n_);
  for (double& v : out) v *= scale;
}

}  // namespace circsketch
