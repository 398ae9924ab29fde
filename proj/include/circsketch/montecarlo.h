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

#ifndef CIRCSKETCH_MONTECARLO_H_
#define CIRCSKETCH_MONTECARLO_H_

// Monte Carlo probes of how rarely a Gaussian matrix is close to a partial
// circulant one, and of the random-subspace projection tail used to bound
// that probability.

#include <cstdint>
#include <string>
#include <vector>

#include "circsketch/rubik.h"

namespace circsketch {

DenseMatrix sample_gaussian(Index m, Index n, std::uint64_t seed);

// Deltas at or above this need an explicit override.
inline constexpr double kMaxTailDelta = 0.125;

enum class TailModel { kGaussian, kPlanted };

struct TailExperimentConfig {
  Index m = 3;
  Index n = 16;
  double delta = 0.05;
  int trials = 1000;
  std::uint64_t seed = 0;
  SolveMode solver = SolveMode::kExact;
  // Accept delta in [0.125, 1) for exploration.
  bool force = false;
  // kPlanted swaps the Gaussian draw for a planted partial circulant matrix;
  // used to self-test the harness.
  TailModel model = TailModel::kGaussian;
  std::uint64_t budget = kDefaultEnumerationBudget;
  std::size_t threads = 1;

  void validate() const;
};

struct TailTrial {
  double ratio = 0.0;             // R^2 / ||A||_F^2
  double normalized_error = 0.0;  // E / ||A||_F^2
  bool hit = false;
};

struct TailExperimentResult {
  int hits = 0;
  int trials = 0;
  std::vector<double> ratio_samples;
  std::vector<TailTrial> per_trial;
  SolveMode solver = SolveMode::kExact;
};

TailExperimentResult run_tail_experiment(const TailExperimentConfig& cfg);

struct SampleSummary {
  double mean = 0.0;
  double stderr_mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Mean with a normal-approximation 95% confidence interval.
SampleSummary summarize(const std::vector<double>& samples);

struct ProjectionConfig {
  Index d = 200;
  Index k = 50;
  double eps = 0.5;
  int trials = 10000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const;
};

struct ProjectionResult {
  // Fraction of trials with ||w|| <= (1 - eps) sqrt(k / d).
  double empirical_tail = 0.0;
  // 3 exp(-k eps^2 / 64).
  double bound = 0.0;
  double mean_sq = 0.0;
  double mean_sq_stderr = 0.0;
  std::vector<double> sq_norms;
};

// Projects e_1 onto a Haar-random k-dimensional subspace of R^d per trial.
ProjectionResult run_projection_experiment(const ProjectionConfig& cfg);

std::string solver_name(SolveMode mode);

}  // namespace circsketch

#endif  // CIRCSKETCH_MONTECARLO_H_
