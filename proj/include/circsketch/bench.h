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

#ifndef CIRCSKETCH_BENCH_H_
#define CIRCSKETCH_BENCH_H_

// Timing harness for y = A x: dense O(mn), partial circulant O(n log n) and
// factored P S C O(m m' + n log n).

#include <cstdint>
#include <string>
#include <vector>

#include "circsketch/circulant.h"

namespace circsketch {

enum class BenchMethod { kDense, kCirculant, kFactored };
enum class ComplexityModel { kMn, kNLogN, kMmprimePlusNLogN };

std::string method_name(BenchMethod method);
std::string model_name(ComplexityModel model);
ComplexityModel parse_model(const std::string& name);

struct BenchSize {
  Index n = 0;
  Index m = 0;
  Index mprime = 0;
};

struct BenchRecord {
  BenchMethod method = BenchMethod::kDense;
  Index n = 0;
  Index m = 0;
  Index mprime = 0;
  int reps = 0;
  double median_ns = 0.0;
  double p10_ns = 0.0;
  double p90_ns = 0.0;
  double flops_model = 0.0;
};

// Operation count of the model for one record's dimensions.
double model_count(ComplexityModel model, Index n, Index m, Index mprime);

// Every fast path is checked once per size against its dense oracle
// (1e-9 relative) before it is timed; a mismatch throws NumericalError.
std::vector<BenchRecord> run_apply_bench(const std::vector<BenchSize>& sizes,
                                         int reps, std::uint64_t seed);

struct ComplexityFit {
  double slope = 0.0;
  double r2 = 0.0;
};

// Least squares of log(median_ns) on log(model count); needs >= 4 records.
ComplexityFit fit_complexity(const std::vector<BenchRecord>& records,
                             ComplexityModel model);

std::vector<BenchRecord> select_method(const std::vector<BenchRecord>& records,
                                       BenchMethod method);

inline constexpr const char* kBenchCsvHeader =
    "method,n,m,mprime,reps,median_ns,p10_ns,p90_ns,flops_model";
std::string bench_csv_row(const BenchRecord& record);

}  // namespace circsketch

#endif  // CIRCSKETCH_BENCH_H_
