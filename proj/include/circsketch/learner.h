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

#ifndef CIRCSKETCH_LEARNER_H_
#define CIRCSKETCH_LEARNER_H_

// Data-driven approximation A ~ M * C over a restricted input domain X.
//
// Alternates two convex solves on
//   obj(M, c) = ||A X - M C X||_F^2 + mu * n * ||c||^2 + lambda * sum_j ||M_:,j||
// where C = circ(c). The column-group penalty zeroes whole columns of M; the
// surviving columns j pick circulant rows (shifts) and their values form the
// post-processing matrix P, giving A ~ P S C.

#include <cstdint>
#include <functional>
#include <vector>

#include "circsketch/circulant.h"

namespace circsketch {

struct LearnConfig {
  double lambda = 0.1;
  double mu = 0.1;
  double epsilon = 1e-6;
  int max_outer = 200;
  double cg_tol = 1e-10;
  int cg_max_iter = 5000;
  double fista_tol = 1e-9;
  int fista_max_iter = 100000;
  // Absolute bound on the proximal-gradient mapping at M-step termination.
  double fista_kkt_tol = 1e-8;
  double column_zero_threshold = 1e-6;
  std::uint64_t seed = 0;

  // Throws InvalidArgument on non-positive weights or caps.
  void validate() const;
};

// One row of the outer-loop trace. Iteration 0 is the initial point.
struct OuterStep {
  int iteration = 0;
  double objective = 0.0;
  double residual = 0.0;
  Index mprime = 0;
};

using StepObserver = std::function<void(const OuterStep&)>;

struct LearnedFactors {
  DenseMatrix m;
  Generator gen;
  // trace[0] is the objective at the initialization (M0, c = 0); trace[t] the
  // objective after outer iteration t.
  std::vector<double> trace;
  std::vector<OuterStep> steps;
  int iterations = 0;
  // The post-matrix the final C-step was solved against.
  DenseMatrix m_previous;
};

struct CompressedFactors {
  DenseMatrix p;
  std::vector<Index> shift_indices;
  Index n = 0;

  Index mprime() const { return static_cast<Index>(shift_indices.size()); }
};

enum class CStepSolver { kConjugateGradient, kDirect };

struct CStepReport {
  int iterations = 0;
  double relative_residual = 0.0;
};

// Minimizer over c of ||A X - M circ(c) X||^2 + mu * n * ||c||^2.
// kDirect forms the n x n normal matrix and is refused for n > 512.
Generator c_step(const DenseMatrix& a, const Eigen::MatrixXd& x,
                 const DenseMatrix& m, double mu, double cg_tol = 1e-10,
                 int cg_max_iter = 5000,
                 CStepSolver solver = CStepSolver::kConjugateGradient,
                 const Generator* warm = nullptr, CStepReport* report = nullptr);

struct MStepOptions {
  double tol = 1e-9;
  int max_iter = 100000;
  double kkt_tol = 1e-8;
  std::uint64_t seed = 0;
};

struct MStepReport {
  int iterations = 0;
  double step = 0.0;
  double kkt = 0.0;
  std::vector<double> trace;
};

// Column group lasso in M with B = circ(gen) X, by monotone FISTA with
// gradient restarts started at `warm`.
DenseMatrix m_step(const DenseMatrix& a, const Eigen::MatrixXd& x,
                   const Generator& gen, double lambda, const DenseMatrix& warm,
                   const MStepOptions& options = {},
                   MStepReport* report = nullptr);

double objective(const DenseMatrix& a, const Eigen::MatrixXd& x,
                 const DenseMatrix& m, const Generator& gen, double lambda,
                 double mu);

// ||A X - M C X||_F^2 alone.
double residual(const DenseMatrix& a, const Eigen::MatrixXd& x,
                const DenseMatrix& m, const Generator& gen);

// Initial post-matrix [U Sigma | 0] from the thin SVD of A X.
DenseMatrix initial_post_matrix(const DenseMatrix& a, const Eigen::MatrixXd& x);

LearnedFactors learn(const DenseMatrix& a, const Eigen::MatrixXd& x,
                     const LearnConfig& cfg,
                     const StepObserver& observer = {});

// Keeps columns whose norm exceeds threshold * (largest column norm).
// Columns of M whose norm exceeds threshold times the largest column norm.
Index active_columns(const DenseMatrix& m, double threshold);

CompressedFactors extract_factors(const DenseMatrix& m, double threshold);

// P * (circ(gen) x)[shift_indices].
Vector fast_apply(const CompressedFactors& cf, const Generator& gen,
                  const Vector& x);

// Multiply-add count of fast_apply: two length-n real FFTs plus m * m'.
// Per-column normalized error ||A x - P S C x||^2 / ||x||^2 of the factored
// surrogate. Zero columns are skipped rather than divided by zero.
struct ColumnErrors {
  std::vector<double> errors;
  std::vector<Index> columns;
  Index skipped = 0;
};

ColumnErrors normalized_column_errors(const DenseMatrix& a,
                                      const CompressedFactors& cf,
                                      const Generator& gen,
                                      const Eigen::MatrixXd& x);

double fast_apply_flops(Index n, Index m, Index mprime);

}  // namespace circsketch

#endif  // CIRCSKETCH_LEARNER_H_
