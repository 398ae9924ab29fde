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

#ifndef CIRCSKETCH_CIRCULANT_H_
#define CIRCSKETCH_CIRCULANT_H_

// Circulant and partial-circulant algebra.
//
// A circulant matrix C is fixed by its first row c (the generator); row j of
// C is c rotated right by j positions, so C[j][k] = c[(k - j) mod n] and C*x
// is the circular cross-correlation of c with x. All indices are 0-based.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "circsketch/fft.h"

namespace circsketch {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Throws InvalidArgument unless mat is non-empty with finite entries.
void validate_matrix(const DenseMatrix& mat, const char* what);

class Generator {
 public:
  // Requires c.size() >= 1 and all entries finite.
  explicit Generator(Vector c);

  static Generator zero(Index n);

  Index size() const { return c_.size(); }
  const Vector& coefficients() const { return c_; }
  double operator[](Index k) const { return c_[k]; }

 private:
  Vector c_;
};

// m pairwise-distinct shifts in [0, n). Shift f_i means row i of the
// sampling matrix S picks row f_i of C.
class ShiftAssignment {
 public:
  ShiftAssignment(std::vector<Index> shifts, Index n);

  Index m() const { return static_cast<Index>(shifts_.size()); }
  Index n() const { return n_; }
  Index operator[](Index i) const { return shifts_[static_cast<size_t>(i)]; }
  const std::vector<Index>& shifts() const { return shifts_; }

  friend bool operator==(const ShiftAssignment&,
                         const ShiftAssignment&) = default;

 private:
  std::vector<Index> shifts_;
  Index n_;
};

// S * C as a (generator, shifts) pair.
struct PartialCirculantOp {
  PartialCirculantOp(Generator g, ShiftAssignment f);

  Generator gen;
  ShiftAssignment shifts;
};

// w[(k + s) mod n] = v[k]; the row-vector product v * R^s.
Vector rotate_right(const Vector& v, Index s);
// Inverse of rotate_right; the row-vector product v * L^s with L = R^T.
Vector rotate_left(const Vector& v, Index s);

Vector circ_row(const Generator& gen, Index j);
// Reference construction; the oracle for every fast path.
DenseMatrix circ_to_dense(const Generator& gen);

// C * x via FFT.
Vector circ_apply(const Generator& gen, const Vector& x);
// C^T * y via FFT.
Vector circ_apply_adjoint(const Generator& gen, const Vector& y);

// (S * C * x)[i] = (C * x)[f_i].
Vector partial_apply(const PartialCirculantOp& op, const Vector& x);
DenseMatrix partial_to_dense(const PartialCirculantOp& op);

// Circulant operator with a cached spectrum, for repeated applications.
class CirculantOperator {
 public:
  explicit CirculantOperator(const Generator& gen);

  Index size() const { return static_cast<Index>(fft_.size()); }

  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& y) const;
  // Applies C to every column of x (n x p).
  Eigen::MatrixXd apply_columns(const Eigen::MatrixXd& x) const;

 private:
  RealFft fft_;
  std::vector<std::complex<double>> spectrum_;
};

// Column spectra of an n x p matrix, stored spectrum-major
// ((n/2 + 1) x p). Used to batch correlations against a fixed data matrix.
Eigen::MatrixXcd column_spectra(const RealFft& fft, const Eigen::MatrixXd& x);

}  // namespace circsketch

#endif  // CIRCSKETCH_CIRCULANT_H_
