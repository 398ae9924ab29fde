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

#include "circsketch/montecarlo.h"

#include <fmt/format.h>

#include <cmath>

#include "circsketch/dataio.h"
#include "circsketch/errors.h"
#include "circsketch/parallel.h"
#include "circsketch/random.h"

namespace circsketch {

DenseMatrix sample_gaussian(Index m, Index n, std::uint64_t seed) {
  return gen_gaussian(m, n, seed);
}

std::string solver_name(SolveMode mode) {
  return mode == SolveMode::kExact ? "exact" : "greedy";
}

void TailExperimentConfig::validate() const {
  if (m < 2 || m > n) {
    throw InvalidArgument(
        fmt::format("tail experiment needs 2 <= m <= n, got m={}, n={}", m, n));
  }
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be >= 0");
  if (delta >= kMaxTailDelta && !force) {
    throw InvalidArgument(fmt::format(
        "delta {} is outside [0, 0.125); pass force to explore it", delta));
  }
  if (!(delta < 1.0)) throw InvalidArgument("delta must be < 1");
}

TailExperimentResult run_tail_experiment(const TailExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.solver == SolveMode::kExact &&
      assignment_count(cfg.m, cfg.n) > cfg.budget) {
    throw BudgetExceededError(fmt::format(
        "{}x{} is too large for exact enumeration under budget {}", cfg.m,
        cfg.n, cfg.budget));
  }
  TailExperimentResult result;
  result.trials = cfg.trials;
  result.solver = cfg.solver;
  result.per_trial.resize(static_cast<size_t>(cfg.trials));

  parallel_for(static_cast<size_t>(cfg.trials), cfg.threads, [&](size_t t) {
    const std::uint64_t seed = child_seed(cfg.seed, t);
    const DenseMatrix a = cfg.model == TailModel::kGaussian
                              ? sample_gaussian(cfg.m, cfg.n, seed)
                              : partial_to_dense(gen_planted_pc(cfg.m, cfg.n, seed));
    const double total = a.squaredNorm();
    const ScoreResult score = cfg.solver == SolveMode::kExact
                                  ? rubik_score_exact(a, cfg.budget)
                                  : rubik_score_greedy(a);
    TailTrial& trial = result.per_trial[t];
    trial.ratio = std::clamp(score.score * score.score / total, 0.0, 1.0);
    trial.normalized_error = score.error / total;
    trial.hit = score.error <= cfg.delta * total;
  });

  for (const TailTrial& trial : result.per_trial) {
    result.ratio_samples.push_back(trial.ratio);
    if (trial.hit) ++result.hits;
  }
  return result;
}

SampleSummary summarize(const std::vector<double>& samples) {
  SampleSummary s;
  if (samples.empty()) return s;
  const double count = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / count;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.stderr_mean = std::sqrt(ss / (count - 1.0) / count);
  }
  s.ci_low = s.mean - 1.96 * s.stderr_mean;
  s.ci_high = s.mean + 1.96 * s.stderr_mean;
  return s;
}

void ProjectionConfig::validate() const {
  if (k < 1 || k > d) throw InvalidArgument("projection needs 1 <= k <= d");
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("eps must be in [0, 1]");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
}

ProjectionResult run_projection_experiment(const ProjectionConfig& cfg) {
  cfg.validate();
  ProjectionResult result;
  result.sq_norms.resize(static_cast<size_t>(cfg.trials));
  parallel_for(static_cast<size_t>(cfg.trials), cfg.threads, [&](size_t t) {
    Rng rng(child_seed(cfg.seed, t));
    const Eigen::MatrixXd g = rng.normal_matrix(cfg.d, cfg.k);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    // Coordinates of e_1 in the orthonormal basis Q: the first k entries of
    // Q_full^T e_1.
    const Vector full =
        qr.householderQ().adjoint() * Vector::Unit(cfg.d, 0);
    result.sq_norms[t] = full.head(cfg.k).squaredNorm();
  });

  const double threshold =
      (1.0 - cfg.eps) * std::sqrt(static_cast<double>(cfg.k) /
                                  static_cast<double>(cfg.d));
  int tail = 0;
  for (double sq : result.sq_norms) {
    if (std::sqrt(sq) <= threshold) ++tail;
  }
  result.empirical_tail = static_cast<double>(tail) / cfg.trials;
  result.bound = 3.0 * std::exp(-static_cast<double>(cfg.k) * cfg.eps *
                                cfg.eps / 64.0);
  const SampleSummary s = summarize(result.sq_norms);
  result.mean_sq = s.mean;
  result.mean_sq_stderr = s.stderr_mean;
  return result;
}

}  // namespace circsketch
