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

#include "circsketch/rubik.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "circsketch/errors.h"
#include "circsketch/parallel.h"
#include "circsketch/random.h"

namespace circsketch {
namespace {

void check_shape(const DenseMatrix& a) {
  validate_matrix(a, "rubik");
  if (a.rows() > a.cols()) {
    throw DimensionError("partial circulant approximation needs m <= n, got " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
}

// acc += rotate_left(row, s) without materializing the rotation.
void add_rotated(Vector& acc, const auto& row, Index s) {
  const Index n = acc.size();
  for (Index k = 0; k + s < n; ++k) acc[k] += row[k + s];
  for (Index k = n - s; k < n; ++k) acc[k] += row[k + s - n];
}

struct SubtreeBest {
  double value = -1.0;
  std::vector<Index> shifts;
};

// Depth-first enumeration of rows `depth..m-1`. Each level keeps its own
// accumulator copy, so leaves see no add/remove drift.
class Enumerator {
 public:
  Enumerator(const DenseMatrix& a, std::vector<Index> prefix, Vector acc)
      : a_(a),
        m_(a.rows()),
        n_(a.cols()),
        shifts_(std::move(prefix)),
        used_(static_cast<size_t>(a.cols()), false),
        levels_(static_cast<size_t>(a.rows()) + 1, Vector(a.cols())) {
    for (Index s : shifts_) used_[static_cast<size_t>(s)] = true;
    levels_[shifts_.size()] = std::move(acc);
  }

  SubtreeBest run() {
    descend(static_cast<Index>(shifts_.size()));
    return best_;
  }

 private:
  void descend(Index depth) {
    const Vector& acc = levels_[static_cast<size_t>(depth)];
    if (depth == m_) {
      const double value = acc.squaredNorm();
      if (value > best_.value) {
        best_.value = value;
        best_.shifts = shifts_;
      }
      return;
    }
    Vector& next = levels_[static_cast<size_t>(depth) + 1];
    shifts_.push_back(0);
    for (Index s = 0; s < n_; ++s) {
      if (used_[static_cast<size_t>(s)]) continue;
      used_[static_cast<size_t>(s)] = true;
      shifts_.back() = s;
      next = acc;
      add_rotated(next, a_.row(depth), s);
      descend(depth + 1);
      used_[static_cast<size_t>(s)] = false;
    }
    shifts_.pop_back();
  }

  const DenseMatrix& a_;
  Index m_;
  Index n_;
  std::vector<Index> shifts_;
  std::vector<bool> used_;
  std::vector<Vector> levels_;
  SubtreeBest best_;
};

double squared_residual(const DenseMatrix& a, const ShiftAssignment& f) {
  const PartialCirculantOp op(optimal_generator(a, f), f);
  return (a - partial_to_dense(op)).squaredNorm();
}

// corr[s] = <acc, rotate_left(row, s)> for every s, via one FFT correlation.
Vector shift_correlations(const Vector& acc, const Vector& row) {
  return CirculantOperator(Generator(acc)).apply(row);
}

// Smallest-index argmax of corr over shifts with free[s] == true.
Index best_free_shift(const Vector& corr, const std::vector<bool>& free) {
  Index best = -1;
  for (Index s = 0; s < corr.size(); ++s) {
    if (!free[static_cast<size_t>(s)]) continue;
    if (best < 0 || corr[s] > corr[best]) best = s;
  }
  return best;
}

std::vector<Index> greedy_pass(const DenseMatrix& a, Index anchor,
                               const std::vector<Index>& order,
                               bool local_search) {
  const Index m = a.rows();
  const Index n = a.cols();
  std::vector<Index> f(static_cast<size_t>(m), -1);
  std::vector<bool> free(static_cast<size_t>(n), true);
  Vector acc = a.row(anchor).transpose();
  f[static_cast<size_t>(anchor)] = 0;
  free[0] = false;

  for (Index i : order) {
    const Vector row = a.row(i).transpose();
    const Index s = best_free_shift(shift_correlations(acc, row), free);
    f[static_cast<size_t>(i)] = s;
    free[static_cast<size_t>(s)] = false;
    add_rotated(acc, row, s);
  }
  if (!local_search || m < 2) return f;

  // Single-row reassignment until no row can strictly improve.
  const double tol = 1e-12 * std::max(a.squaredNorm(), 1e-300);
  const int max_passes = 100 * static_cast<int>(m);
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (Index i = 0; i < m; ++i) {
      const Vector row = a.row(i).transpose();
      const Index current = f[static_cast<size_t>(i)];
      Vector rest = acc - rotate_left(row, current);
      const Vector corr = shift_correlations(rest, row);
      free[static_cast<size_t>(current)] = true;
      const Index s = best_free_shift(corr, free);
      if (corr[s] > corr[current] + tol) {
        f[static_cast<size_t>(i)] = s;
        improved = true;
      }
      free[static_cast<size_t>(f[static_cast<size_t>(i)])] = false;
      add_rotated(rest, row, f[static_cast<size_t>(i)]);
      acc = std::move(rest);
    }
    if (!improved) break;
  }
  return f;
}

}  // namespace

double rubik_objective(const DenseMatrix& a, const ShiftAssignment& f) {
  validate_matrix(a, "rubik_objective");
  if (f.m() != a.rows() || f.n() != a.cols()) {
    throw DimensionError("shift assignment shape does not match matrix");
  }
  Vector acc = Vector::Zero(a.cols());
  for (Index i = 0; i < a.rows(); ++i) add_rotated(acc, a.row(i), f[i]);
  return acc.norm() / std::sqrt(static_cast<double>(a.rows()));
}

std::uint64_t assignment_count(Index m, Index n) {
  std::uint64_t count = 1;
  for (Index k = 0; k < m; ++k) {
    const auto factor = static_cast<std::uint64_t>(n - k);
    if (factor == 0) return 0;
    if (count > UINT64_MAX / factor) return UINT64_MAX;
    count *= factor;
  }
  return count;
}

ScoreResult rubik_score_exact(const DenseMatrix& a, std::uint64_t budget,
                              std::size_t threads) {
  check_shape(a);
  const Index m = a.rows();
  const Index n = a.cols();
  const std::uint64_t count = assignment_count(m, n);
  if (count > budget) {
    throw BudgetExceededError(
        "too large for exact enumeration: " + std::to_string(m) + "x" +
        std::to_string(n) + " has " + std::to_string(count) +
        " assignments, budget " + std::to_string(budget) +
        "; use the greedy solver");
  }

  // The objective is invariant under a joint rotation of all shifts, so
  // row 0 is pinned to shift 0. Subtrees are split on row 1's shift and
  // reduced in index order, keeping the lexicographic tie-break.
  std::vector<SubtreeBest> subtrees;
  const Vector first = a.row(0).transpose();
  if (m == 1) {
    subtrees.push_back(Enumerator(a, {0}, first).run());
  } else {
    subtrees.resize(static_cast<size_t>(n - 1));
    parallel_for(static_cast<size_t>(n - 1), threads, [&](size_t k) {
      const Index s = static_cast<Index>(k) + 1;
      Vector acc = first;
      add_rotated(acc, a.row(1), s);
      subtrees[k] = Enumerator(a, {0, s}, std::move(acc)).run();
    });
  }
  const SubtreeBest* best = &subtrees.front();
  for (const SubtreeBest& sub : subtrees) {
    if (sub.value > best->value) best = &sub;
  }

  ShiftAssignment f(best->shifts, n);
  const double score = rubik_objective(a, f);
  const double error = std::max(0.0, a.squaredNorm() - score * score);
  return ScoreResult{score, std::move(f), error, true};
}

ScoreResult rubik_score_greedy(const DenseMatrix& a,
                               const GreedyOptions& options) {
  check_shape(a);
  const Index m = a.rows();
  const Index n = a.cols();
  const Vector norms = a.rowwise().norm();
  Index anchor = 0;
  for (Index i = 1; i < m; ++i) {
    if (norms[i] > norms[anchor]) anchor = i;
  }
  std::vector<Index> rest;
  for (Index i = 0; i < m; ++i) {
    if (i != anchor) rest.push_back(i);
  }

  const int restarts = std::max(options.restarts, 1);
  std::optional<ShiftAssignment> best;
  double best_score = -1.0;
  for (int r = 0; r < restarts; ++r) {
    std::vector<Index> order = rest;
    if (r == 0 || r == 1) {
      std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
        return r == 0 ? norms[x] > norms[y] : norms[x] < norms[y];
      });
    } else {
      Rng rng(child_seed(options.seed, static_cast<std::uint64_t>(r)));
      rng.shuffle(order);
    }
    ShiftAssignment f(greedy_pass(a, anchor, order, options.local_search), n);
    const double score = rubik_objective(a, f);
    if (score > best_score) {
      best_score = score;
      best = std::move(f);
    }
  }
  const double error = squared_residual(a, *best);
  return ScoreResult{best_score, std::move(*best), error, false};
}

Generator optimal_generator(const DenseMatrix& a, const ShiftAssignment& f) {
  validate_matrix(a, "optimal_generator");
  if (f.m() != a.rows() || f.n() != a.cols()) {
    throw DimensionError("shift assignment shape does not match matrix");
  }
  Vector acc = Vector::Zero(a.cols());
  for (Index i = 0; i < a.rows(); ++i) add_rotated(acc, a.row(i), f[i]);
  return Generator(acc / static_cast<double>(a.rows()));
}

PartialCirculantFit best_partial_circulant(const DenseMatrix& a, SolveMode mode,
                                           const FitOptions& options) {
  ScoreResult score = mode == SolveMode::kExact
                          ? rubik_score_exact(a, options.budget, options.threads)
                          : rubik_score_greedy(a, options.greedy);
  PartialCirculantOp op(optimal_generator(a, score.assignment),
                        score.assignment);
  const double error = (a - partial_to_dense(op)).squaredNorm();
  return PartialCirculantFit{std::move(op), error, std::move(score)};
}

}  // namespace circsketch
