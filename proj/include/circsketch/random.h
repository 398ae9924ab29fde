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

#ifndef CIRCSKETCH_RANDOM_H_
#define CIRCSKETCH_RANDOM_H_

// Seeded randomness with a frozen algorithm: mt19937_64 words, 53-bit
// uniforms, polar Box-Muller normals and a hand-rolled Fisher-Yates. The
// standard distributions are implementation-defined, so none are used here;
// a given seed yields the same stream on every conforming toolchain.

#include <cstdint>
#include <random>
#include <vector>

#include "circsketch/circulant.h"

namespace circsketch {

// SplitMix64 finalizer; derives independent child seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform();
  // Uniform integer in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound);
  double normal();

  Vector normal_vector(Index n);
  DenseMatrix normal_matrix(Index rows, Index cols);
  // Random permutation of 0..count-1.
  std::vector<Index> permutation(Index count);
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace circsketch

#endif  // CIRCSKETCH_RANDOM_H_
