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

#include "circsketch/dataio.h"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "circsketch/errors.h"
#include "circsketch/random.h"
#include "circsketch/rubik.h"

namespace circsketch {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("circsketch_dataio_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

TEST(MatrixIoTest, RbmRoundTripIsBitwise) {
  TempDir dir;
  Rng rng(1);
  const DenseMatrix mat = rng.normal_matrix(7, 13);
  save_matrix(mat, dir.file("a.rbm"));
  const DenseMatrix back = load_matrix(dir.file("a.rbm"));
  ASSERT_EQ(back.rows(), 7);
  ASSERT_EQ(back.cols(), 13);
  EXPECT_EQ(std::memcmp(back.data(), mat.data(), sizeof(double) * 7 * 13), 0);
}

TEST(MatrixIoTest, RbmGoldenBytes) {
  TempDir dir;
  DenseMatrix mat(1, 2);
  mat << 1.0, -2.5;
  save_matrix(mat, dir.file("g.rbm"));
  const std::string want(
      "RBM1"
      "\x01\x00\x00\x00\x00\x00\x00\x00"
      "\x02\x00\x00\x00\x00\x00\x00\x00"
      "\x00\x00\x00\x00\x00\x00\xf0\x3f"
      "\x00\x00\x00\x00\x00\x00\x04\xc0",
      36);
  EXPECT_EQ(read_bytes(dir.file("g.rbm")), want);
}

TEST(MatrixIoTest, RbmBadMagicAndTruncation) {
  TempDir dir;
  write_text(dir.file("bad.rbm"), "RBM2xxxxxxxxxxxxxxxx");
  EXPECT_THROW(load_matrix(dir.file("bad.rbm")), ParseError);
  write_text(dir.file("short.rbm"),
             std::string("RBM1\x01\0\0\0\0\0\0\0\x01\0\0\0\0\0\0\0\x01", 21));
  EXPECT_THROW(load_matrix(dir.file("short.rbm")), ParseError);
}

TEST(MatrixIoTest, CsvParsesAndRoundTrips) {
  DenseMatrix want(2, 2);
  want << 1, 2, 3, 4;
  EXPECT_EQ(parse_csv("1,2\n3,4", "inline"), want);
  EXPECT_EQ(parse_csv("# rows of A\n1, 2\r\n3,4\n\n", "inline"), want);

  TempDir dir;
  Rng rng(2);
  const DenseMatrix mat = rng.normal_matrix(5, 3) * 1e3;
  save_matrix(mat, dir.file("m.csv"));
  const DenseMatrix back = load_matrix(dir.file("m.csv"));
  EXPECT_LE((back - mat).cwiseAbs().maxCoeff(),
            1e-15 * mat.cwiseAbs().maxCoeff());
}

TEST(MatrixIoTest, CsvErrorsNameTheLine) {
  try {
    parse_csv("1,2\n3\n", "ragged.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("ragged.csv:2"), std::string::npos);
  }
  try {
    parse_csv("1,2\n3,abc\n", "bad.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 2u);
  }
  EXPECT_THROW(parse_csv("# only a header\n", "empty.csv"), ParseError);
}

TEST(MatrixIoTest, MissingFileAndUnknownExtension) {
  EXPECT_THROW(load_matrix("/nonexistent/dir/a.rbm"), IoError);
  EXPECT_THROW(load_matrix("/nonexistent/dir/a.csv"), IoError);
  EXPECT_THROW(format_from_path("matrix.txt"), InvalidArgument);
}

TEST(PcaTest, LineThroughOriginGivesItsDirection) {
  Rng rng(3);
  Vector dir = rng.normal_vector(6);
  dir.normalize();
  Dataset ds;
  ds.x.resize(6, 30);
  for (Index q = 0; q < 30; ++q) ds.x.col(q) = (q - 14.5) * dir;
  const DenseMatrix a = pca_operator(ds, 1);
  EXPECT_GE(std::abs(a.row(0).dot(dir.transpose())), 1.0 - 1e-10);
}

TEST(PcaTest, RowsAreOrthonormalWithSignConvention) {
  Rng rng(4);
  Dataset ds;
  ds.x = rng.normal_matrix(10, 25);
  const DenseMatrix a = pca_operator(ds, 4);
  EXPECT_LE((a * a.transpose() - DenseMatrix::Identity(4, 4)).norm(), 1e-10);
  for (Index i = 0; i < 4; ++i) {
    Index pivot = 0;
    a.row(i).cwiseAbs().maxCoeff(&pivot);
    EXPECT_GT(a(i, pivot), 0.0);
  }
}

TEST(PcaTest, AllComponentsCaptureTotalVariance) {
  Rng rng(5);
  Dataset ds;
  ds.x = rng.normal_matrix(5, 40);
  const PcaModel model = pca(ds, 5);
  const Eigen::MatrixXd centered = ds.x.colwise() - model.mean;
  EXPECT_NEAR((model.components * centered).squaredNorm(),
              centered.squaredNorm(), 1e-9 * centered.squaredNorm());
}

TEST(PcaTest, ProjectionEnergyGrowsWithK) {
  Rng rng(6);
  Dataset ds;
  ds.x = rng.normal_matrix(8, 30);
  const PcaModel full = pca(ds, 8);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector xc = rng.normal_vector(8);
    double previous = 0.0;
    for (Index k = 1; k <= 8; ++k) {
      const double energy = (full.components.topRows(k) * xc).squaredNorm();
      EXPECT_GE(energy, previous - 1e-12);
      previous = energy;
    }
  }
}

TEST(PcaTest, ComponentCountOutOfRange) {
  Dataset ds;
  ds.x = Eigen::MatrixXd::Ones(4, 3);
  EXPECT_THROW(pca(ds, 0), RangeError);
  EXPECT_THROW(pca(ds, 4), RangeError);
}

TEST(SplitTest, HeadSplit) {
  Dataset ds;
  ds.x.resize(2, 10);
  for (Index q = 0; q < 10; ++q) ds.x.col(q).setConstant(static_cast<double>(q));
  const auto [train, test] = split(ds, {7, 0, SplitStrategy::kHead});
  ASSERT_EQ(train.p(), 7);
  ASSERT_EQ(test.p(), 3);
  for (Index q = 0; q < 7; ++q) EXPECT_EQ(train.x(0, q), q);
  for (Index q = 0; q < 3; ++q) EXPECT_EQ(test.x(0, q), 7 + q);
}

TEST(SplitTest, ShuffledSplitIsSeededPartition) {
  Dataset ds;
  ds.x.resize(1, 20);
  ds.labels.emplace();
  for (Index q = 0; q < 20; ++q) {
    ds.x(0, q) = static_cast<double>(q);
    ds.labels->push_back(q);
  }
  const SplitSpec spec{12, 99, SplitStrategy::kShuffled};
  const auto [a1, b1] = split(ds, spec);
  const auto [a2, b2] = split(ds, spec);
  EXPECT_EQ(a1.x, a2.x);
  EXPECT_EQ(b1.x, b2.x);
  std::vector<double> all;
  for (Index q = 0; q < a1.p(); ++q) all.push_back(a1.x(0, q));
  for (Index q = 0; q < b1.p(); ++q) all.push_back(b1.x(0, q));
  std::sort(all.begin(), all.end());
  for (Index q = 0; q < 20; ++q) EXPECT_EQ(all[static_cast<size_t>(q)], q);
  for (Index q = 0; q < a1.p(); ++q) {
    EXPECT_EQ((*a1.labels)[static_cast<size_t>(q)], a1.x(0, q));
  }
}

TEST(SplitTest, BadCounts) {
  Dataset ds;
  ds.x = Eigen::MatrixXd::Ones(2, 5);
  EXPECT_THROW(split(ds, {0, 0, SplitStrategy::kHead}), InvalidArgument);
  EXPECT_THROW(split(ds, {5, 0, SplitStrategy::kHead}), InvalidArgument);
}

TEST(SyntheticTest, PlantedHasZeroPcError) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const DenseMatrix a = partial_to_dense(gen_planted_pc(3, 10, seed));
    const ScoreResult r = rubik_score_exact(a);
    EXPECT_LE(r.error, 1e-10 * a.squaredNorm());
  }
}

TEST(SyntheticTest, NoiselessSubspaceHasLowRank) {
  const Dataset ds = gen_subspace_plus_noise(20, 3, 50, 0.0, 7);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(ds.x);
  const Vector sv = svd.singularValues();
  EXPECT_LE(sv[3], 1e-10 * sv[0]);
  EXPECT_GT(sv[2], 1e-3 * sv[0]);
}

TEST(SyntheticTest, GaussianMomentsAndDeterminism) {
  const DenseMatrix a = gen_gaussian(1000, 1000, 42);
  const double mean = a.mean();
  const double var = (a.array() - mean).square().sum() / (a.size() - 1);
  EXPECT_LE(std::abs(mean), 0.005);
  EXPECT_LE(std::abs(var - 1.0), 0.01);
  EXPECT_EQ(gen_gaussian(4, 6, 9), gen_gaussian(4, 6, 9));
  EXPECT_NE(gen_gaussian(4, 6, 9), gen_gaussian(4, 6, 10));
}

TEST(SyntheticTest, InvalidParameters) {
  EXPECT_THROW(gen_planted_pc(5, 4, 0), InvalidArgument);
  EXPECT_THROW(gen_subspace_plus_noise(4, 5, 10, 0.1, 0), InvalidArgument);
  EXPECT_THROW(gen_subspace_plus_noise(4, 2, 10, -0.1, 0), InvalidArgument);
  EXPECT_THROW(gen_gaussian(0, 3, 0), InvalidArgument);
}

}  // namespace
}  // namespace circsketch
