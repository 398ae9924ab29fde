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

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "circsketch/errors.h"
#include "json.hpp"
#include "circsketch/random.h"

namespace circsketch {
namespace {

constexpr char kRbmMagic[4] = {'R', 'B', 'M', '1'};

template <typename T>
void write_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const std::string& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw ParseError(path + ": truncated RBM file", 0, 0);
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

DenseMatrix load_rbm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kRbmMagic, 4) != 0) {
    throw ParseError(path + ": bad magic, expected RBM1", 0, 0);
  }
  const auto rows = read_le<std::uint64_t>(in, path);
  const auto cols = read_le<std::uint64_t>(in, path);
  if (rows == 0 || cols == 0 || rows > (1ULL << 40) / cols) {
    throw ParseError(path + ": implausible RBM dimensions", 0, 0);
  }
  DenseMatrix mat(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index i = 0; i < mat.rows(); ++i) {
    for (Index j = 0; j < mat.cols(); ++j) mat(i, j) = read_le<double>(in, path);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError(path + ": trailing bytes after RBM payload", 0, 0);
  }
  return mat;
}

void save_rbm(const DenseMatrix& mat, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(kRbmMagic, 4);
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(mat.rows()));
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(mat.cols()));
  for (Index i = 0; i < mat.rows(); ++i) {
    for (Index j = 0; j < mat.cols(); ++j) write_le<double>(out, mat(i, j));
  }
  if (!out) throw IoError("write failed for " + path);
}

void save_csv(const DenseMatrix& mat, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  std::string line;
  for (Index i = 0; i < mat.rows(); ++i) {
    line.clear();
    for (Index j = 0; j < mat.cols(); ++j) {
      if (j > 0) line += ',';
      line += fmt::format("{:.17g}", mat(i, j));
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace

MatrixFormat format_from_path(const std::string& path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() &&
           path.compare(path.size() - suffix.size(), suffix.size(), suffix) ==
               0;
  };
  if (ends_with(".csv")) return MatrixFormat::kCsv;
  if (ends_with(".rbm")) return MatrixFormat::kRbm;
  throw InvalidArgument("cannot infer matrix format from '" + path +
                        "' (expected .csv or .rbm)");
}

DenseMatrix parse_csv(const std::string& text, const std::string& source) {
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::istringstream stream(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    Index count = 0;
    std::size_t pos = 0;
    for (;;) {
      const std::size_t comma = line.find(',', pos);
      const std::string_view field = trim(line.substr(
          pos, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - pos));
      ++count;
      double v = 0.0;
      const auto [end, ec] =
          std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() ||
          end != field.data() + field.size() || !std::isfinite(v)) {
        throw ParseError(fmt::format("{}:{}: field {} is not a finite number: "
                                     "'{}'",
                                     source, line_no, count, field),
                         line_no, static_cast<std::size_t>(count));
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (cols < 0) {
      cols = count;
    } else if (count != cols) {
      throw ParseError(fmt::format("{}:{}: expected {} fields, found {}",
                                   source, line_no, cols, count),
                       line_no, static_cast<std::size_t>(count));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(source + ": no data rows", line_no, 0);
  DenseMatrix mat(rows, cols);
  std::copy(values.begin(), values.end(), mat.data());
  return mat;
}

DenseMatrix load_matrix(const std::string& path, MatrixFormat format) {
  if (format == MatrixFormat::kRbm) return load_rbm(path);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), path);
}

DenseMatrix load_matrix(const std::string& path) {
  return load_matrix(path, format_from_path(path));
}

void save_matrix(const DenseMatrix& mat, const std::string& path,
                 MatrixFormat format) {
  if (format == MatrixFormat::kRbm) {
    save_rbm(mat, path);
  } else {
    save_csv(mat, path);
  }
}

void save_matrix(const DenseMatrix& mat, const std::string& path) {
  save_matrix(mat, path, format_from_path(path));
}

void Dataset::validate() const {
  if (x.rows() < 1 || x.cols() < 1) {
    throw InvalidArgument("dataset must have n >= 1 and p >= 1");
  }
  if (labels && static_cast<Index>(labels->size()) != x.cols()) {
    throw InvalidArgument("label count differs from sample count");
  }
}

PcaModel pca(const Dataset& ds, Index k) {
  ds.validate();
  if (k < 1 || k > std::min(ds.n(), ds.p())) {
    throw RangeError(fmt::format("PCA component count {} outside [1, {}]", k,
                                 std::min(ds.n(), ds.p())));
  }
  PcaModel model;
  model.mean = ds.x.rowwise().mean();
  const Eigen::MatrixXd centered = ds.x.colwise() - model.mean;
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  model.components = svd.matrixU().leftCols(k).transpose();
  model.singular_values = svd.singularValues().head(k);
  for (Index i = 0; i < k; ++i) {
    Index pivot = 0;
    model.components.row(i).cwiseAbs().maxCoeff(&pivot);
    if (model.components(i, pivot) < 0.0) model.components.row(i) *= -1.0;
  }
  return model;
}

DenseMatrix pca_operator(const Dataset& ds, Index k) {
  return pca(ds, k).components;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
  ds.validate();
  if (spec.train_count <= 0 || spec.train_count >= ds.p()) {
    throw InvalidArgument(fmt::format(
        "train count must lie in (0, {}), got {}", ds.p(), spec.train_count));
  }
  std::vector<Index> order(static_cast<size_t>(ds.p()));
  for (Index i = 0; i < ds.p(); ++i) order[static_cast<size_t>(i)] = i;
  if (spec.strategy == SplitStrategy::kShuffled) {
    order = Rng(spec.seed).permutation(ds.p());
  }
  auto take = [&](std::size_t from, std::size_t to) {
    Dataset part;
    part.x.resize(ds.n(), static_cast<Index>(to - from));
    if (ds.labels) part.labels.emplace();
    for (std::size_t q = from; q < to; ++q) {
      part.x.col(static_cast<Index>(q - from)) = ds.x.col(order[q]);
      if (ds.labels) part.labels->push_back((*ds.labels)[order[q]]);
    }
    return part;
  };
  const auto cut = static_cast<std::size_t>(spec.train_count);
  return {take(0, cut), take(cut, order.size())};
}

DenseMatrix gen_gaussian(Index rows, Index cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw InvalidArgument("sizes must be >= 1");
  return Rng(seed).normal_matrix(rows, cols);
}

PartialCirculantOp gen_planted_pc(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || m > n) throw InvalidArgument("planted PC needs 1 <= m <= n");
  Rng rng(seed);
  Generator gen(rng.normal_vector(n));
  std::vector<Index> perm = rng.permutation(n);
  perm.resize(static_cast<size_t>(m));
  return PartialCirculantOp(std::move(gen), ShiftAssignment(std::move(perm), n));
}

Dataset gen_subspace_plus_noise(Index n, Index r, Index p, double sigma,
                                std::uint64_t seed) {
  if (n < 1 || p < 1 || r < 1 || r > n) {
    throw InvalidArgument("subspace data needs n, p >= 1 and 1 <= r <= n");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("noise level must be finite and >= 0");
  }
  Rng rng(seed);
  const Eigen::MatrixXd raw = rng.normal_matrix(n, r);
  const Eigen::MatrixXd basis =
      Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() *
      Eigen::MatrixXd::Identity(n, r);
  const Eigen::MatrixXd coeffs = rng.normal_matrix(r, p);
  const Eigen::MatrixXd noise = rng.normal_matrix(n, p);
  Dataset ds;
  ds.x = basis * coeffs + sigma * noise;
  return ds;
}

namespace {

constexpr const char* kFactorsFormat = "circsketch-factors-1";

}  // namespace

void save_factors(const CompressedFactors& cf, const Generator& gen,
                  const std::string& json_path) {
  if (gen.size() != cf.n) throw DimensionError("generator length != n");
  const std::filesystem::path index(json_path);
  const std::string stem = index.stem().string();
  nlohmann::ordered_json doc;
  doc["format"] = kFactorsFormat;
  doc["n"] = cf.n;
  doc["m"] = cf.p.rows();
  doc["mprime"] = cf.mprime();
  doc["shift_indices"] = cf.shift_indices;
  doc["generator"] = stem + "_c.rbm";
  doc["post"] = nullptr;
  save_matrix(gen.coefficients().transpose(),
              (index.parent_path() / (stem + "_c.rbm")).string(),
              MatrixFormat::kRbm);
  if (cf.mprime() > 0) {
    doc["post"] = stem + "_P.rbm";
    save_matrix(cf.p, (index.parent_path() / (stem + "_P.rbm")).string(),
                MatrixFormat::kRbm);
  }
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + json_path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + json_path);
}

StoredFactors load_factors(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open " + json_path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
    if (doc.at("format").get<std::string>() != kFactorsFormat) {
      throw ParseError(json_path + ": unknown factors format", 0, 0);
    }
    const std::filesystem::path dir = std::filesystem::path(json_path).parent_path();
    CompressedFactors cf;
    cf.n = doc.at("n").get<Index>();
    const Index m = doc.at("m").get<Index>();
    cf.shift_indices = doc.at("shift_indices").get<std::vector<Index>>();
    const DenseMatrix c =
        load_matrix((dir / doc.at("generator").get<std::string>()).string(),
                    MatrixFormat::kRbm);
    if (c.rows() != 1 || c.cols() != cf.n) {
      throw DimensionError(json_path + ": generator shape does not match n");
    }
    if (cf.shift_indices.empty()) {
      cf.p = DenseMatrix::Zero(m, 0);
    } else {
      cf.p = load_matrix((dir / doc.at("post").get<std::string>()).string(),
                         MatrixFormat::kRbm);
    }
    if (cf.p.rows() != m || cf.p.cols() != cf.mprime()) {
      throw DimensionError(json_path + ": P shape does not match m, mprime");
    }
    for (Index j : cf.shift_indices) {
      if (j < 0 || j >= cf.n) throw RangeError(json_path + ": shift out of range");
    }
    return {std::move(cf), Generator(c.row(0).transpose())};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(json_path + ": " + e.what(), 0, 0);
  }
}

}  // namespace circsketch
