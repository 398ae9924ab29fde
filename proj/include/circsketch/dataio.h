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

#ifndef CIRCSKETCH_DATAIO_H_
#define CIRCSKETCH_DATAIO_H_

// Matrix files, datasets, PCA targets and synthetic data.
//
// File formats:
//   CSV  one matrix row per line, comma-separated, '.' decimal point. Lines
//        starting with '#' are comments. Written with 17 significant digits.
//   RBM  "RBM1", u64 LE rows, u64 LE cols, rows*cols float64 LE, row-major.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "circsketch/circulant.h"
#include "circsketch/learner.h"

namespace circsketch {

enum class MatrixFormat { kCsv, kRbm };

// ".csv" -> kCsv, ".rbm" -> kRbm; anything else is an InvalidArgument.
MatrixFormat format_from_path(const std::string& path);

DenseMatrix load_matrix(const std::string& path, MatrixFormat format);
DenseMatrix load_matrix(const std::string& path);
void save_matrix(const DenseMatrix& mat, const std::string& path,
                 MatrixFormat format);
void save_matrix(const DenseMatrix& mat, const std::string& path);

// Parses CSV text; `source` only labels error messages.
DenseMatrix parse_csv(const std::string& text, const std::string& source);

// Columns of x are data points.
struct Dataset {
  Eigen::MatrixXd x;
  std::optional<std::vector<std::int64_t>> labels;

  Index n() const { return x.rows(); }
  Index p() const { return x.cols(); }
  void validate() const;
};

struct PcaModel {
  // k x n, orthonormal rows, descending singular value.
  DenseMatrix components;
  // Column mean subtracted before the decomposition.
  Vector mean;
  Vector singular_values;
};

PcaModel pca(const Dataset& ds, Index k);
DenseMatrix pca_operator(const Dataset& ds, Index k);

enum class SplitStrategy { kHead, kShuffled };

struct SplitSpec {
  Index train_count = 0;
  std::uint64_t seed = 0;
  SplitStrategy strategy = SplitStrategy::kHead;
};

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

// iid N(0, 1) entries.
DenseMatrix gen_gaussian(Index rows, Index cols, std::uint64_t seed);

// Random Gaussian generator and m distinct random shifts.
PartialCirculantOp gen_planted_pc(Index m, Index n, std::uint64_t seed);

// X = B G + sigma E with B an n x r orthonormal basis, G and E Gaussian.
Dataset gen_subspace_plus_noise(Index n, Index r, Index p, double sigma,
                                std::uint64_t seed);

// Factored surrogate on disk: a JSON index plus P and c as RBM files stored
// next to it. P is omitted when no column survived.
struct StoredFactors {
  CompressedFactors factors;
  Generator gen;
};

void save_factors(const CompressedFactors& cf, const Generator& gen,
                  const std::string& json_path);
StoredFactors load_factors(const std::string& json_path);

}  // namespace circsketch

#endif  // CIRCSKETCH_DATAIO_H_
