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

#ifndef CIRCSKETCH_RUBIK_H_
#define CIRCSKETCH_RUBIK_H_

// Optimal partial-circulant approximation of a wide matrix A (m x n).
//
// For a fixed shift assignment f the best generator is the mean of the rows
// of A rotated left by their shifts, and the residual is
//   ||A||_F^2 - ||sum_i rotate_left(A_i, f_i)||^2 / m.
// The Rubik's score R(A) is the maximum over f of the square root of the
// subtracted term, so the minimum error is ||A||_F^2 - R(A)^2. Maximizing
// over f is combinatorial: exhaustive search for small instances, a greedy
// FFT-scored heuristic otherwise.

#include <cstdint>
#include <optional>

#include "circsketch/circulant.h"

namespace circsketch {

struct ScoreResult {
  double score = 0.0;
  ShiftAssignment assignment;
  // Exact: ||A||_F^2 - score^2. Heuristic: squared residual of the
  // reconstruction built from `assignment`, an upper bound on the optimum.
  double error = 0.0;
  bool exact = false;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

// ||sum_i rotate_left(A_i, f_i)||_2 / sqrt(m).
double rubik_objective(const DenseMatrix& a, const ShiftAssignment& f);

// n! / (n - m)!, saturating at UINT64_MAX.
std::uint64_t assignment_count(Index m, Index n);

// Exhaustive maximization. Throws BudgetExceededError when the number of
// assignments n!/(n-m)! exceeds `budget`.
ScoreResult rubik_score_exact(const DenseMatrix& a,
                              std::uint64_t budget = kDefaultEnumerationBudget,
                              std::size_t threads = 1);

struct GreedyOptions {
  int restarts = 8;
  bool local_search = true;
  std::uint64_t seed = 0;
};

ScoreResult rubik_score_greedy(const DenseMatrix& a,
                               const GreedyOptions& options = {});

// argmin_c ||A - S C||_F^2 for the rows selected by f.
Generator optimal_generator(const DenseMatrix& a, const ShiftAssignment& f);

enum class SolveMode { kExact, kGreedy };

struct PartialCirculantFit {
  PartialCirculantOp op;
  // ||A - partial_to_dense(op)||_F^2.
  double error;
  ScoreResult score;
};

struct FitOptions {
  std::uint64_t budget = kDefaultEnumerationBudget;
  GreedyOptions greedy;
  std::size_t threads = 1;
};

PartialCirculantFit best_partial_circulant(const DenseMatrix& a, SolveMode mode,
                                           const FitOptions& options = {});

}  // namespace circsketch

#endif  // CIRCSKETCH_RUBIK_H_
