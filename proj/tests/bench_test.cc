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

#include <gtest/gtest.h>

#include <cmath>

#include "circsketch/errors.h"
#include "circsketch/random.h"

namespace circsketch {
namespace {

std::vector<BenchRecord> synthetic_records(ComplexityModel model, double scale) {
  std::vector<BenchRecord> out;
  for (Index n : {256, 512, 1024, 2048, 4096}) {
    BenchRecord r;
    r.n = n;
    r.m = 16;
    r.mprime = 8;
    r.reps = 5;
    r.median_ns = scale * model_count(model, n, r.m, r.mprime);
    out.push_back(r);
  }
  return out;
}

TEST(FitComplexityTest, ExactPowerLawHasUnitSlope) {
  for (ComplexityModel model : {ComplexityModel::kMn, ComplexityModel::kNLogN,
                                ComplexityModel::kMmprimePlusNLogN}) {
    const ComplexityFit fit = fit_complexity(synthetic_records(model, 3.5), model);
    EXPECT_NEAR(fit.slope, 1.0, 1e-9);
    EXPECT_NEAR(fit.r2, 1.0, 1e-9);
  }
}

TEST(FitComplexityTest, ShuffledPairsStillReport) {
  auto records = synthetic_records(ComplexityModel::kMn, 1.0);
  std::swap(records[0].median_ns, records[3].median_ns);
  std::swap(records[1].median_ns, records[4].median_ns);
  const ComplexityFit fit = fit_complexity(records, ComplexityModel::kMn);
  EXPECT_TRUE(std::isfinite(fit.slope));
  EXPECT_LT(fit.r2, 1.0);
}

TEST(FitComplexityTest, DegenerateInputs) {
  auto records = synthetic_records(ComplexityModel::kMn, 1.0);
  records.resize(3);
  EXPECT_THROW(fit_complexity(records, ComplexityModel::kMn), InvalidArgument);
  records = synthetic_records(ComplexityModel::kMn, 1.0);
  for (BenchRecord& r : records) r.n = 512;
  EXPECT_THROW(fit_complexity(records, ComplexityModel::kMn), InvalidArgument);
}

TEST(RunApplyBenchTest, RecordsArePositiveAndComplete) {
  const auto records = run_apply_bench({{64, 8, 4}, {128, 8, 6}}, 5, 1);
  ASSERT_EQ(records.size(), 6u);
  for (const BenchRecord& r : records) {
    EXPECT_GT(r.median_ns, 0.0);
    EXPECT_LE(r.p10_ns, r.median_ns);
    EXPECT_LE(r.median_ns, r.p90_ns);
    EXPECT_EQ(r.reps, 5);
    EXPECT_GT(r.flops_model, 0.0);
  }
  EXPECT_EQ(select_method(records, BenchMethod::kFactored).size(), 2u);
  EXPECT_EQ(bench_csv_row(records[0]).substr(0, 9), "dense,64,");
}

TEST(RunApplyBenchTest, InvalidSizes) {
  EXPECT_THROW(run_apply_bench({{64, 8, 4}}, 4, 0), InvalidArgument);
  EXPECT_THROW(run_apply_bench({{8, 9, 4}}, 5, 0), InvalidArgument);
}

TEST(ModelTest, NamesRoundTrip) {
  for (ComplexityModel model : {ComplexityModel::kMn, ComplexityModel::kNLogN,
                                ComplexityModel::kMmprimePlusNLogN}) {
    EXPECT_EQ(parse_model(model_name(model)), model);
  }
  EXPECT_THROW(parse_model("cubic"), InvalidArgument);
}

}  // namespace
}  // namespace circsketch
