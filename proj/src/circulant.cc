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

#include "circsketch/circulant.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "circsketch/errors.h"

namespace circsketch {
namespace {

void check_shift(Index s, Index n) {
  if (s < 0 || s >= n) {
    throw RangeError("shift " + std::to_string(s) + " outside [0, " +
                     std::to_string(n) + ")");
  }
}

std::vector<std::complex<double>> spectrum_of(const RealFft& fft,
                                              const Vector& v) {
  std::vector<std::complex<double>> out(fft.spectrum_size());
  fft.forward({v.data(), static_cast<size_t>(v.size())}, out);
  return out;
}

}  // namespace

void validate_matrix(const DenseMatrix& mat, const char* what) {
  if (mat.rows() < 1 || mat.cols() < 1) {
    throw InvalidArgument(std::string(what) + ": matrix must be non-empty");
  }
  if (!mat.allFinite()) {
    throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
  }
}

Generator::Generator(Vector c) : c_(std::move(c)) {
  if (c_.size() < 1) throw InvalidArgument("generator length must be >= 1");
  if (!c_.allFinite()) throw InvalidArgument("generator has non-finite entries");
}

Generator Generator::zero(Index n) { return Generator(Vector::Zero(n)); }

ShiftAssignment::ShiftAssignment(std::vector<Index> shifts, Index n)
    : shifts_(std::move(shifts)), n_(n) {
  const Index m = static_cast<Index>(shifts_.size());
  if (m < 1 || m > n) {
    throw InvalidArgument("shift assignment needs 1 <= m <= n, got m=" +
                          std::to_string(m) + ", n=" + std::to_string(n));
  }
  std::vector<bool> used(static_cast<size_t>(n), false);
  for (Index s : shifts_) {
    check_shift(s, n);
    if (used[static_cast<size_t>(s)]) {
      throw InvalidArgument("duplicate shift " + std::to_string(s));
    }
    used[static_cast<size_t>(s)] = true;
  }
}

PartialCirculantOp::PartialCirculantOp(Generator g, ShiftAssignment f)
    : gen(std::move(g)), shifts(std::move(f)) {
  if (gen.size() != shifts.n()) {
    throw DimensionError("generator length differs from shift ambient n");
  }
}

Vector rotate_right(const Vector& v, Index s) {
  const Index n = v.size();
  check_shift(s, n);
  Vector w(n);
  w.tail(n - s) = v.head(n - s);
  w.head(s) = v.tail(s);
  return w;
}

Vector rotate_left(const Vector& v, Index s) {
  const Index n = v.size();
  check_shift(s, n);
  Vector w(n);
  w.head(n - s) = v.tail(n - s);
  w.tail(s) = v.head(s);
  return w;
}

Vector circ_row(const Generator& gen, Index j) {
  if (j < 0 || j >= gen.size()) {
    throw RangeError("row index " + std::to_string(j) + " out of range");
  }
  return rotate_right(gen.coefficients(), j);
}

DenseMatrix circ_to_dense(const Generator& gen) {
  const Index n = gen.size();
  DenseMatrix out(n, n);
  for (Index j = 0; j < n; ++j) out.row(j) = circ_row(gen, j).transpose();
  return out;
}

Vector circ_apply(const Generator& gen, const Vector& x) {
  return CirculantOperator(gen).apply(x);
}

Vector circ_apply_adjoint(const Generator& gen, const Vector& y) {
  return CirculantOperator(gen).apply_adjoint(y);
}

Vector partial_apply(const PartialCirculantOp& op, const Vector& x) {
  const Vector full = circ_apply(op.gen, x);
  Vector out(op.shifts.m());
  for (Index i = 0; i < op.shifts.m(); ++i) out[i] = full[op.shifts[i]];
  return out;
}

DenseMatrix partial_to_dense(const PartialCirculantOp& op) {
  DenseMatrix out(op.shifts.m(), op.gen.size());
  for (Index i = 0; i < op.shifts.m(); ++i) {
    out.row(i) = circ_row(op.gen, op.shifts[i]).transpose();
  }
  return out;
}

CirculantOperator::CirculantOperator(const Generator& gen)
    : fft_(static_cast<size_t>(gen.size())),
      spectrum_(spectrum_of(fft_, gen.coefficients())) {}

Vector CirculantOperator::apply(const Vector& x) const {
  if (x.size() != size()) {
    throw DimensionError("circulant apply: expected length " +
                         std::to_string(size()) + ", got " +
                         std::to_string(x.size()));
  }
  // Cross-correlation: multiply by the conjugate generator spectrum.
  auto xs = spectrum_of(fft_, x);
  for (size_t k = 0; k < xs.size(); ++k) xs[k] *= std::conj(spectrum_[k]);
  Vector y(size());
  fft_.inverse(xs, {y.data(), static_cast<size_t>(y.size())});
  return y;
}

Vector CirculantOperator::apply_adjoint(const Vector& y) const {
  if (y.size() != size()) {
    throw DimensionError("circulant adjoint: expected length " +
                         std::to_string(size()) + ", got " +
                         std::to_string(y.size()));
  }
  auto ys = spectrum_of(fft_, y);
  for (size_t k = 0; k < ys.size(); ++k) ys[k] *= spectrum_[k];
  Vector x(size());
  fft_.inverse(ys, {x.data(), static_cast<size_t>(x.size())});
  return x;
}

Eigen::MatrixXd CirculantOperator::apply_columns(
    const Eigen::MatrixXd& x) const {
  if (x.rows() != size()) {
    throw DimensionError("circulant apply_columns: row count mismatch");
  }
  Eigen::MatrixXd out(x.rows(), x.cols());
  std::vector<std::complex<double>> bins(fft_.spectrum_size());
  for (Index q = 0; q < x.cols(); ++q) {
    fft_.forward({x.col(q).data(), static_cast<size_t>(x.rows())}, bins);
    for (size_t k = 0; k < bins.size(); ++k) bins[k] *= std::conj(spectrum_[k]);
    fft_.inverse(bins, {out.col(q).data(), static_cast<size_t>(x.rows())});
  }
  return out;
}

Eigen::MatrixXcd column_spectra(const RealFft& fft, const Eigen::MatrixXd& x) {
  if (x.rows() != static_cast<Index>(fft.size())) {
    throw DimensionError("column_spectra: row count mismatch");
  }
  const Index bins = static_cast<Index>(fft.spectrum_size());
  Eigen::MatrixXcd out(bins, x.cols());
  for (Index q = 0; q < x.cols(); ++q) {
    fft.forward({x.col(q).data(), static_cast<size_t>(x.rows())},
                {out.col(q).data(), static_cast<size_t>(bins)});
  }
  return out;
}

}  // namespace circsketch
