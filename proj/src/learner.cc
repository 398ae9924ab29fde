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

#include "circsketch/learner.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "circsketch/errors.h"
#include "circsketch/random.h"

namespace circsketch {
namespace {

using Matrix = Eigen::MatrixXd;

void check_dims(const DenseMatrix& a, const Matrix& x) {
  validate_matrix(a, "A");
  if (x.rows() < 1 || x.cols() < 1 || !x.allFinite()) {
    throw InvalidArgument("X must be non-empty with finite entries");
  }
  if (x.rows() != a.cols()) {
    throw DimensionError("A is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " but X has " +
                         std::to_string(x.rows()) + " rows");
  }
}

void check_post(const DenseMatrix& a, const DenseMatrix& m) {
  if (m.rows() != a.rows() || m.cols() != a.cols()) {
    throw DimensionError("M must have the shape of A");
  }
}

// Everything the two subproblems need from the data: X enters only through
// S = X X^T and A S, so the per-iteration cost does not grow with p once
// p > n.
class GramData {
 public:
  GramData(const DenseMatrix& a, const Matrix& x)
      : a_(a), x_(x), fft_(static_cast<size_t>(a.cols())) {
    check_dims(a, x);
    const Matrix y = a * x;
    y_sq_ = y.squaredNorm();
    use_gram_ = x.cols() > x.rows();
    if (use_gram_) {
      s_ = x * x.transpose();
      as_ = a * s_;
    } else {
      as_ = y * x.transpose();
    }
  }

  Index n() const { return a_.cols(); }
  Index m() const { return a_.rows(); }
  double y_sq() const { return y_sq_; }
  const Matrix& as() const { return as_; }

  // W S with W m x n.
  Matrix times_gram(const Matrix& w) const {
    if (use_gram_) return w * s_;
    return (w * x_) * x_.transpose();
  }

  // C S C^T and (A S) C^T for C = circ(gen).
  std::pair<Matrix, Matrix> circ_gram(const Generator& gen) const {
    const CirculantOperator op(gen);
    Matrix bbt;
    if (use_gram_) {
      const Matrix cs = op.apply_columns(s_);
      bbt = op.apply_columns(cs.transpose());
    } else {
      const Matrix b = op.apply_columns(x_);
      bbt = b * b.transpose();
    }
    bbt = 0.5 * (bbt + bbt.transpose()).eval();
    const Matrix ybt = op.apply_columns(as_.transpose()).transpose();
    return {std::move(bbt), std::move(ybt)};
  }

  const RealFft& fft() const { return fft_; }

 private:
  const DenseMatrix& a_;
  const Matrix& x_;
  RealFft fft_;
  bool use_gram_ = false;
  Matrix s_;
  Matrix as_;
  double y_sq_ = 0.0;
};

// Normal equations of the C-subproblem, (H + mu n I) c = b, where
//   H c = sum_i circ(M_i) (M circ(c) S)_i  and  b = sum_i circ(M_i) (A S)_i.
// Row i of M circ(c) is circ(c)^T M_i^T, so every product is an FFT apply.
class CStepOperator {
 public:
  CStepOperator(const GramData& data, const DenseMatrix& m, double mu)
      : data_(data), ridge_(mu * static_cast<double>(data.n())) {
    rows_.reserve(static_cast<size_t>(m.rows()));
    for (Index i = 0; i < m.rows(); ++i) {
      const Vector row = m.row(i).transpose();
      rows_.emplace_back(Generator(row));
      row_values_.push_back(row);
    }
  }

  Vector rhs() const { return correlate_rows(data_.as()); }

  Vector apply(const Vector& c) const {
    const CirculantOperator circ{Generator(c)};
    Matrix w(static_cast<Index>(rows_.size()), data_.n());
    for (size_t i = 0; i < rows_.size(); ++i) {
      w.row(static_cast<Index>(i)) = circ.apply_adjoint(row_values_[i]);
    }
    return correlate_rows(data_.times_gram(w)) + ridge_ * c;
  }

 private:
  Vector correlate_rows(const Matrix& q) const {
    Vector out = Vector::Zero(data_.n());
    for (size_t i = 0; i < rows_.size(); ++i) {
      out += rows_[i].apply(q.row(static_cast<Index>(i)).transpose());
    }
    return out;
  }

  const GramData& data_;
  double ridge_;
  std::vector<CirculantOperator> rows_;
  std::vector<Vector> row_values_;
};

Generator solve_c_step(const GramData& data, const DenseMatrix& m, double mu,
                       double cg_tol, int cg_max_iter, CStepSolver solver,
                       const Generator* warm, CStepReport* report) {
  if (!(mu > 0.0)) throw InvalidArgument("mu must be positive");
  const Index n = data.n();
  const CStepOperator op(data, m, mu);
  const Vector b = op.rhs();
  const double b_norm = b.norm();
  CStepReport local;
  CStepReport& rep = report != nullptr ? *report : local;
  rep = {};
  if (b_norm == 0.0) return Generator::zero(n);

  if (solver == CStepSolver::kDirect) {
    if (n > 512) {
      throw InvalidArgument("direct C-step solve is limited to n <= 512");
    }
    Matrix normal(n, n);
    for (Index k = 0; k < n; ++k) normal.col(k) = op.apply(Vector::Unit(n, k));
    normal = 0.5 * (normal + normal.transpose()).eval();
    const Vector c = normal.llt().solve(b);
    rep.relative_residual = (op.apply(c) - b).norm() / b_norm;
    return Generator(c);
  }

  Vector c = warm != nullptr && warm->size() == n ? warm->coefficients()
                                                  : Vector::Zero(n);
  Vector r = b - op.apply(c);
  Vector p = r;
  double rho = r.squaredNorm();
  const double target = cg_tol * b_norm;
  int it = 0;
  while (std::sqrt(rho) > target) {
    if (it >= cg_max_iter) {
      throw ConvergenceError("C-step conjugate gradient did not converge in " +
                                 std::to_string(cg_max_iter) + " iterations",
                             std::sqrt(rho) / b_norm);
    }
    const Vector q = op.apply(p);
    const double alpha = rho / p.dot(q);
    c += alpha * p;
    r -= alpha * q;
    const double rho_next = r.squaredNorm();
    p = r + (rho_next / rho) * p;
    rho = rho_next;
    ++it;
  }
  rep.iterations = it;
  rep.relative_residual = (op.apply(c) - b).norm() / b_norm;
  if (!c.allFinite()) throw NumericalError("C-step produced non-finite values");
  return Generator(c);
}

double largest_eigenvalue(const Matrix& sym, std::uint64_t seed) {
  Rng rng(seed);
  Vector v = rng.normal_vector(sym.rows());
  v.normalize();
  double estimate = 0.0;
  for (int k = 0; k < 100; ++k) {
    Vector w = sym * v;
    const double next = v.dot(w);
    const double w_norm = w.norm();
    if (w_norm == 0.0) return 0.0;
    v = w / w_norm;
    const bool done = std::abs(next - estimate) <= 1e-8 * std::abs(next);
    estimate = next;
    if (done) break;
  }
  // The Rayleigh quotient of the final iterate is a lower bound; ||S v||
  // over a unit v is never smaller.
  return std::max(estimate, (sym * v).norm());
}

void group_shrink(Matrix& v, double threshold) {
  for (Index j = 0; j < v.cols(); ++j) {
    const double norm = v.col(j).norm();
    if (norm <= threshold) {
      v.col(j).setZero();
    } else {
      v.col(j) *= 1.0 - threshold / norm;
    }
  }
}

double column_norm_sum(const Matrix& m) {
  double total = 0.0;
  for (Index j = 0; j < m.cols(); ++j) total += m.col(j).norm();
  return total;
}

DenseMatrix solve_m_step(const GramData& data, const Generator& gen,
                         double lambda, const DenseMatrix& warm,
                         const MStepOptions& options, MStepReport* report) {
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (warm.rows() != data.m() || warm.cols() != data.n()) {
    throw DimensionError("M-step warm start must have the shape of A");
  }
  MStepReport local;
  MStepReport& rep = report != nullptr ? *report : local;
  rep = {};

  const auto [bbt, ybt] = data.circ_gram(gen);
  const double lipschitz = 2.0 * largest_eigenvalue(bbt, options.seed);
  if (lipschitz == 0.0) {
    // B = 0: only the penalty remains.
    return DenseMatrix::Zero(data.m(), data.n());
  }
  const double step = 1.0 / (1.05 * lipschitz);
  const double shrink = lambda * step;
  rep.step = step;

  // Smooth part tr(M BB^T M^T) - 2 <M, YB^T> + ||Y||^2 plus the penalty.
  // Absolute values suffer cancellation against ||Y||^2, so acceptance and
  // stopping use the difference
  //   F(z) - F(x) = <z - x, (z + x) BB^T - 2 YB^T> + lambda (|z|_21 - |x|_21)
  // which stays accurate down to the size of the step.
  auto value = [&](const Matrix& m, const Matrix& m_bbt) {
    return (m_bbt.cwiseProduct(m)).sum() - 2.0 * m.cwiseProduct(ybt).sum() +
           data.y_sq() + lambda * column_norm_sum(m);
  };
  auto difference = [&](const Matrix& z, const Matrix& z_bbt, const Matrix& x,
                        const Matrix& x_bbt) {
    double penalty = 0.0;
    for (Index j = 0; j < z.cols(); ++j) {
      // ||z_j|| - ||x_j|| without cancellation.
      const double denom = z.col(j).norm() + x.col(j).norm();
      if (denom > 0.0) {
        penalty += (z.col(j) - x.col(j)).dot(z.col(j) + x.col(j)) / denom;
      }
    }
    return ((z - x).cwiseProduct(z_bbt + x_bbt - 2.0 * ybt)).sum() +
           lambda * penalty;
  };
  auto prox_grad = [&](const Matrix& point, const Matrix& point_bbt) {
    Matrix z = point - step * 2.0 * (point_bbt - ybt);
    group_shrink(z, shrink);
    return z;
  };

  Matrix x = warm;
  Matrix x_bbt = x * bbt;
  double fx = value(x, x_bbt);
  rep.trace.push_back(fx);
  Matrix y = x;
  Matrix y_bbt = x_bbt;
  double t = 1.0;
  bool at_x = true;

  for (int it = 1; it <= options.max_iter; ++it) {
    Matrix z = prox_grad(y, y_bbt);
    Matrix z_bbt = z * bbt;
    const double delta = difference(z, z_bbt, x, x_bbt);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double change = 0.0;
    bool restart = false;
    Matrix x_prev;
    if (delta <= 0.0) {
      // Gradient-based restart: momentum points uphill.
      restart = ((y - z).cwiseProduct(z - x)).sum() > 0.0;
      x_prev = std::move(x);
      x = std::move(z);
      x_bbt = std::move(z_bbt);
      fx += delta;
      change = -delta;
    } else {
      if (at_x) {
        // A plain proximal-gradient step from x failed to descend: rounding
        // has taken over and further iterations cannot make progress.
        rep.kkt = (x - z).norm() / step;
        throw ConvergenceError(
            "M-step stagnated at the rounding floor after " +
                std::to_string(it) + " iterations",
            rep.kkt, rep.trace);
      }
      restart = true;
    }
    at_x = restart;
    if (restart) {
      y = x;
      y_bbt = x_bbt;
      t = 1.0;
    } else {
      // z was accepted, so the momentum term reduces to (t - 1) / t_next.
      y = x + ((t - 1.0) / t_next) * (x - x_prev);
      y_bbt = y * bbt;
      t = t_next;
    }
    rep.trace.push_back(fx);
    rep.iterations = it;

    if (change <= options.tol * std::max(std::abs(fx), 1e-300)) {
      // Certify with one proximal-gradient step from x; its output has a
      // subgradient residual of at most twice the mapping norm.
      Matrix polished = prox_grad(x, x_bbt);
      const double kkt = (x - polished).norm() / step;
      if (kkt <= options.kkt_tol) {
        const Matrix polished_bbt = polished * bbt;
        const double dp = difference(polished, polished_bbt, x, x_bbt);
        rep.kkt = kkt;
        if (dp <= 0.0) {
          rep.trace.push_back(fx + dp);
          return polished;
        }
        return x;
      }
    }
  }
  Matrix polished = prox_grad(x, x_bbt);
  rep.kkt = (x - polished).norm() / step;
  throw ConvergenceError("M-step did not converge in " +
                             std::to_string(options.max_iter) + " iterations",
                         rep.kkt, rep.trace);
}

double residual_sq(const DenseMatrix& a, const Matrix& x, const DenseMatrix& m,
                   const Generator& gen) {
  const Matrix cx = CirculantOperator(gen).apply_columns(x);
  return (a * x - m * cx).squaredNorm();
}

}  // namespace

void LearnConfig::validate() const {
  if (!(lambda > 0.0) || !(mu > 0.0) || !(epsilon > 0.0)) {
    throw InvalidArgument("lambda, mu and epsilon must be positive");
  }
  if (max_outer < 1 || cg_max_iter < 1 || fista_max_iter < 1) {
    throw InvalidArgument("iteration caps must be positive");
  }
  if (!(cg_tol > 0.0) || !(fista_tol > 0.0) || !(fista_kkt_tol > 0.0)) {
    throw InvalidArgument("solver tolerances must be positive");
  }
  if (!(column_zero_threshold >= 0.0)) {
    throw InvalidArgument("column_zero_threshold must be non-negative");
  }
}

Generator c_step(const DenseMatrix& a, const Eigen::MatrixXd& x,
                 const DenseMatrix& m, double mu, double cg_tol,
                 int cg_max_iter, CStepSolver solver, const Generator* warm,
                 CStepReport* report) {
  const GramData data(a, x);
  check_post(a, m);
  return solve_c_step(data, m, mu, cg_tol, cg_max_iter, solver, warm, report);
}

DenseMatrix m_step(const DenseMatrix& a, const Eigen::MatrixXd& x,
                   const Generator& gen, double lambda, const DenseMatrix& warm,
                   const MStepOptions& options, MStepReport* report) {
  const GramData data(a, x);
  if (gen.size() != a.cols()) throw DimensionError("generator length != n");
  return solve_m_step(data, gen, lambda, warm, options, report);
}

double residual(const DenseMatrix& a, const Eigen::MatrixXd& x,
                const DenseMatrix& m, const Generator& gen) {
  check_dims(a, x);
  check_post(a, m);
  if (gen.size() != a.cols()) throw DimensionError("generator length != n");
  return residual_sq(a, x, m, gen);
}

double objective(const DenseMatrix& a, const Eigen::MatrixXd& x,
                 const DenseMatrix& m, const Generator& gen, double lambda,
                 double mu) {
  const double fit = residual(a, x, m, gen);
  const double ridge = static_cast<double>(gen.size()) *
                       gen.coefficients().squaredNorm();
  return fit + mu * ridge + lambda * column_norm_sum(m);
}

DenseMatrix initial_post_matrix(const DenseMatrix& a,
                                const Eigen::MatrixXd& x) {
  check_dims(a, x);
  const Matrix y = a * x;
  const Eigen::BDCSVD<Matrix> svd(y, Eigen::ComputeThinU);
  const Index k = std::min(y.rows(), y.cols());
  DenseMatrix m0 = DenseMatrix::Zero(a.rows(), a.cols());
  m0.leftCols(k) =
      svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal();
  return m0;
}

LearnedFactors learn(const DenseMatrix& a, const Eigen::MatrixXd& x,
                     const LearnConfig& cfg, const StepObserver& observer) {
  cfg.validate();
  const GramData data(a, x);
  if (a.rows() > a.cols()) throw DimensionError("learn needs m <= n");

  DenseMatrix m = initial_post_matrix(a, x);
  Generator gen = Generator::zero(a.cols());
  LearnedFactors out{m, gen, {}, {}, 0, m};
  auto record = [&](int t, double obj) {
    const OuterStep step{t, obj, residual(a, x, m, gen),
                         active_columns(m, cfg.column_zero_threshold)};
    out.trace.push_back(obj);
    out.steps.push_back(step);
    if (observer) observer(step);
  };
  record(0, objective(a, x, m, gen, cfg.lambda, cfg.mu));

  const MStepOptions m_options{cfg.fista_tol, cfg.fista_max_iter,
                               cfg.fista_kkt_tol, cfg.seed};
  for (int t = 1; t <= cfg.max_outer; ++t) {
    const DenseMatrix m_prev = m;
    gen = solve_c_step(data, m, cfg.mu, cfg.cg_tol, cfg.cg_max_iter,
                       CStepSolver::kConjugateGradient, &gen, nullptr);
    try {
      m = solve_m_step(data, gen, cfg.lambda, m, m_options, nullptr);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " (outer iteration " +
                                 std::to_string(t) + ")",
                             e.last_residual(), out.trace);
    }
    const double obj = objective(a, x, m, gen, cfg.lambda, cfg.mu);
    if (!std::isfinite(obj)) {
      throw NumericalError("objective became non-finite at outer iteration " +
                           std::to_string(t));
    }
    const double prev = out.trace.back();
    record(t, obj);
    out.iterations = t;
    out.m = m;
    out.gen = gen;
    out.m_previous = m_prev;
    if (prev - obj <= cfg.epsilon * prev) break;
  }
  return out;
}

Index active_columns(const DenseMatrix& m, double threshold) {
  const Vector norms = m.colwise().norm().transpose();
  if (norms.size() == 0) return 0;
  const double cutoff = threshold * norms.maxCoeff();
  return static_cast<Index>((norms.array() > cutoff).count());
}

CompressedFactors extract_factors(const DenseMatrix& m, double threshold) {
  if (!(threshold >= 0.0)) throw InvalidArgument("threshold must be >= 0");
  validate_matrix(m, "extract_factors");
  const Vector norms = m.colwise().norm().transpose();
  const double cutoff = threshold * norms.maxCoeff();
  CompressedFactors cf;
  cf.n = m.cols();
  for (Index j = 0; j < m.cols(); ++j) {
    if (norms[j] > cutoff) cf.shift_indices.push_back(j);
  }
  if (cf.shift_indices.empty()) {
    throw InvalidArgument("every column of M is below the zero threshold");
  }
  cf.p.resize(m.rows(), cf.mprime());
  for (Index k = 0; k < cf.mprime(); ++k) {
    cf.p.col(k) = m.col(cf.shift_indices[static_cast<size_t>(k)]);
  }
  return cf;
}

Vector fast_apply(const CompressedFactors& cf, const Generator& gen,
                  const Vector& x) {
  if (gen.size() != cf.n) throw DimensionError("generator length != n");
  if (cf.p.cols() != cf.mprime()) throw DimensionError("P width != m'");
  const Vector full = circ_apply(gen, x);
  Vector picked(cf.mprime());
  for (Index k = 0; k < cf.mprime(); ++k) {
    picked[k] = full[cf.shift_indices[static_cast<size_t>(k)]];
  }
  return cf.p * picked;
}

ColumnErrors normalized_column_errors(const DenseMatrix& a,
                                      const CompressedFactors& cf,
                                      const Generator& gen,
                                      const Eigen::MatrixXd& x) {
  if (gen.size() != cf.n || a.cols() != cf.n || x.rows() != cf.n) {
    throw DimensionError("A, factors and data disagree on n");
  }
  if (cf.p.rows() != a.rows()) throw DimensionError("P and A disagree on m");
  const Eigen::MatrixXd cx = CirculantOperator(gen).apply_columns(x);
  Eigen::MatrixXd picked(cf.mprime(), x.cols());
  for (Index k = 0; k < cf.mprime(); ++k) {
    picked.row(k) = cx.row(cf.shift_indices[static_cast<size_t>(k)]);
  }
  const Eigen::MatrixXd diff = a * x - cf.p * picked;
  ColumnErrors out;
  for (Index q = 0; q < x.cols(); ++q) {
    const double denom = x.col(q).squaredNorm();
    if (denom == 0.0) {
      ++out.skipped;
      continue;
    }
    out.errors.push_back(diff.col(q).squaredNorm() / denom);
    out.columns.push_back(q);
  }
  return out;
}

double fast_apply_flops(Index n, Index m, Index mprime) {
  const double len = static_cast<double>(n);
  const double fft = len > 1.0 ? 2.5 * len * std::log2(len) : 1.0;
  return 2.0 * fft + 4.0 * len + static_cast<double>(m * mprime);
}

}  // namespace circsketch
