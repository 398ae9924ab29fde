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

#include "circsketch/bench.h"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "circsketch/errors.h"
#include "circsketch/learner.h"
#include "circsketch/random.h"

namespace circsketch {
namespace {

// Keeps results observable so the timed work is not optimized away.
volatile double g_sink = 0.0;

double percentile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const auto hi = static_cast<size_t>(std::ceil(pos));
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Per-call wall time of `fn`: calls are batched until a batch lasts at least
// ~0.2 ms, one warmup batch is discarded, then `reps` batches are measured.
template <typename Fn>
std::vector<double> time_calls(int reps, Fn&& fn) {
  using Clock = std::chrono::steady_clock;
  auto run_batch = [&](long calls) {
    const auto start = Clock::now();
    for (long i = 0; i < calls; ++i) g_sink = g_sink + fn();
    return std::chrono::duration<double, std::nano>(Clock::now() - start)
        .count();
  };
  long calls = 1;
  while (run_batch(calls) < 2e5 && calls < (1L << 24)) calls *= 2;
  run_batch(calls);
  std::vector<double> per_call;
  per_call.reserve(static_cast<size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    per_call.push_back(run_batch(calls) / static_cast<double>(calls));
  }
  return per_call;
}

BenchRecord make_record(BenchMethod method, const BenchSize& size, int reps,
                        const std::vector<double>& times, double flops) {
  BenchRecord rec;
  rec.method = method;
  rec.n = size.n;
  rec.m = size.m;
  rec.mprime = size.mprime;
  rec.reps = reps;
  rec.median_ns = percentile(times, 0.5);
  rec.p10_ns = percentile(times, 0.1);
  rec.p90_ns = percentile(times, 0.9);
  rec.flops_model = flops;
  return rec;
}

void check_close(const Vector& fast, const Vector& oracle, double scale,
                 const char* what) {
  const double dev = (fast - oracle).cwiseAbs().maxCoeff();
  if (!(dev <= 1e-9 * std::max(scale, 1e-300))) {
    throw NumericalError(fmt::format("{} path deviates from dense oracle by {}",
                                     what, dev));
  }
}

}  // namespace

std::string method_name(BenchMethod method) {
  switch (method) {
    case BenchMethod::kDense:
      return "dense";
    case BenchMethod::kCirculant:
      return "circulant";
    case BenchMethod::kFactored:
      return "factored";
  }
  return "unknown";
}

std::string model_name(ComplexityModel model) {
  switch (model) {
    case ComplexityModel::kMn:
      return "mn";
    case ComplexityModel::kNLogN:
      return "nlogn";
    case ComplexityModel::kMmprimePlusNLogN:
      return "mmprime_plus_nlogn";
  }
  return "unknown";
}

ComplexityModel parse_model(const std::string& name) {
  if (name == "mn") return ComplexityModel::kMn;
  if (name == "nlogn") return ComplexityModel::kNLogN;
  if (name == "mmprime_plus_nlogn") return ComplexityModel::kMmprimePlusNLogN;
  throw InvalidArgument("unknown complexity model '" + name + "'");
}

double model_count(ComplexityModel model, Index n, Index m, Index mprime) {
  const double len = static_cast<double>(n);
  const double nlogn = len * std::log2(std::max(len, 2.0));
  switch (model) {
    case ComplexityModel::kMn:
      return static_cast<double>(m) * len;
    case ComplexityModel::kNLogN:
      return nlogn;
    case ComplexityModel::kMmprimePlusNLogN:
      return static_cast<double>(m * mprime) + nlogn;
  }
  return 0.0;
}

std::vector<BenchRecord> run_apply_bench(const std::vector<BenchSize>& sizes,
                                         int reps, std::uint64_t seed) {
  if (reps < 5) throw InvalidArgument("bench needs reps >= 5");
  std::vector<BenchRecord> records;
  for (size_t idx = 0; idx < sizes.size(); ++idx) {
    const BenchSize& size = sizes[idx];
    if (size.n < 2 || size.m < 1 || size.m > size.n || size.mprime < 1 ||
        size.mprime > size.n) {
      throw InvalidArgument(fmt::format("invalid bench size n={} m={} m'={}",
                                        size.n, size.m, size.mprime));
    }
    Rng rng(child_seed(seed, idx));
    const Generator gen(rng.normal_vector(size.n));
    const Vector x = rng.normal_vector(size.n);
    const DenseMatrix dense = rng.normal_matrix(size.m, size.n);

    std::vector<Index> perm = rng.permutation(size.n);
    std::vector<Index> rows(perm.begin(), perm.begin() + size.m);
    const PartialCirculantOp partial(gen, ShiftAssignment(rows, size.n));
    std::vector<Index> picked(perm.begin(), perm.begin() + size.mprime);
    std::sort(picked.begin(), picked.end());
    CompressedFactors cf{rng.normal_matrix(size.m, size.mprime), picked,
                         size.n};

    const CirculantOperator circ(gen);
    auto circulant_apply = [&] {
      const Vector full = circ.apply(x);
      Vector out(size.m);
      for (Index i = 0; i < size.m; ++i) out[i] = full[rows[i]];
      return out;
    };
    auto factored_apply = [&] {
      const Vector full = circ.apply(x);
      Vector sub(cf.mprime());
      for (Index k = 0; k < cf.mprime(); ++k) {
        sub[k] = full[cf.shift_indices[static_cast<size_t>(k)]];
      }
      return Vector(cf.p * sub);
    };

    const double scale = gen.coefficients().norm() * x.norm();
    const DenseMatrix partial_dense = partial_to_dense(partial);
    check_close(circulant_apply(), partial_dense * x, scale, "circulant");
    DenseMatrix sampled(cf.mprime(), size.n);
    for (Index k = 0; k < cf.mprime(); ++k) {
      sampled.row(k) = circ_row(gen, cf.shift_indices[static_cast<size_t>(k)])
                           .transpose();
    }
    check_close(factored_apply(), cf.p * (sampled * x),
                scale * cf.p.cwiseAbs().rowwise().sum().maxCoeff(), "factored");

    const auto dense_times = time_calls(reps, [&] {
      const Vector y = dense * x;
      return y[0];
    });
    const auto circ_times = time_calls(reps, [&] { return circulant_apply()[0]; });
    const auto factored_times =
        time_calls(reps, [&] { return factored_apply()[0]; });

    records.push_back(make_record(
        BenchMethod::kDense, size, reps, dense_times,
        model_count(ComplexityModel::kMn, size.n, size.m, size.mprime)));
    records.push_back(make_record(
        BenchMethod::kCirculant, size, reps, circ_times,
        model_count(ComplexityModel::kNLogN, size.n, size.m, size.mprime)));
    records.push_back(make_record(
        BenchMethod::kFactored, size, reps, factored_times,
        model_count(ComplexityModel::kMmprimePlusNLogN, size.n, size.m,
                    size.mprime)));
  }
  return records;
}

ComplexityFit fit_complexity(const std::vector<BenchRecord>& records,
                             ComplexityModel model) {
  if (records.size() < 4) {
    throw InvalidArgument("complexity fit needs at least 4 records");
  }
  std::vector<double> xs, ys;
  for (const BenchRecord& r : records) {
    const double count = model_count(model, r.n, r.m, r.mprime);
    if (!(count > 0.0) || !(r.median_ns > 0.0)) {
      throw InvalidArgument("complexity fit needs positive times and counts");
    }
    xs.push_back(std::log(count));
    ys.push_back(std::log(r.median_ns));
  }
  const double count = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 1e-24 * std::max(1.0, mx * mx)) {
    throw InvalidArgument("complexity fit is degenerate: constant model counts");
  }
  ComplexityFit fit;
  fit.slope = sxy / sxx;
  double ss_res = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double pred = my + fit.slope * (xs[i] - mx);
    ss_res += (ys[i] - pred) * (ys[i] - pred);
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

std::vector<BenchRecord> select_method(const std::vector<BenchRecord>& records,
                                       BenchMethod method) {
  std::vector<BenchRecord> out;
  for (const BenchRecord& r : records) {
    if (r.method == method) out.push_back(r);
  }
  return out;
}

std::string bench_csv_row(const BenchRecord& r) {
  return fmt::format("{},{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g}",
                     method_name(r.method), r.n, r.m, r.mprime, r.reps,
                     r.median_ns, r.p10_ns, r.p90_ns, r.flops_model);
}

}  // namespace circsketch
