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

// Subcommands of the circsketch tool. Each run_* function returns the
// process exit code for outcomes it handles itself and throws for the rest;
// main maps exceptions to exit codes.

#ifndef CIRCSKETCH_TOOLS_COMMANDS_H_
#define CIRCSKETCH_TOOLS_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "circsketch/rubik.h"

namespace circsketch::cli {

struct ScoreFlags {
  std::string input;
  std::string mode = "exact";
  std::uint64_t budget = kDefaultEnumerationBudget;
  int restarts = 8;
  std::uint64_t seed = 0;
  std::string out = ".";
};

struct LearnFlags {
  std::string a_path;
  std::string x_path;
  double lambda = 0.0;
  std::vector<double> lambda_grid;
  double mu = 0.1;
  double epsilon = 1e-6;
  int max_outer = 200;
  double threshold = 1e-6;
  std::uint64_t seed = 0;
  std::string out = ".";
};

struct EvalFlags {
  std::string a_path;
  std::string factors;
  std::string data;
  int bins = 50;
  std::string out = ".";
};

struct TailFlags {
  long m = 3;
  long n = 16;
  double delta = 0.05;
  int trials = 1000;
  std::uint64_t seed = 0;
  std::string solver = "exact";
  std::string model = "gaussian";
  bool force = false;
  std::uint64_t budget = kDefaultEnumerationBudget;
  std::string out = ".";
};

struct ProjectionFlags {
  long d = 200;
  long k = 50;
  double eps = 0.5;
  int trials = 10000;
  std::uint64_t seed = 0;
  std::string out = ".";
};

struct GenFlags {
  std::string kind;
  long rows = 0;
  long cols = 0;
  long r = 5;
  double sigma = 0.05;
  std::uint64_t seed = 0;
  std::string output;
};

struct PrepFlags {
  std::string data;
  long train = 0;
  std::string strategy = "head";
  long k = 5;
  std::uint64_t seed = 0;
  std::string out = ".";
};

struct BenchFlags {
  int log2_min = 8;
  int log2_max = 14;
  long m = 64;
  long mprime = 8;
  int reps = 7;
  std::uint64_t seed = 0;
  std::string out = ".";
};

int run_score(const ScoreFlags& flags, std::size_t threads);
int run_learn(const LearnFlags& flags);
int run_eval(const EvalFlags& flags);
int run_tail(const TailFlags& flags, std::size_t threads);
int run_projection(const ProjectionFlags& flags, std::size_t threads);
int run_gen(const GenFlags& flags);
int run_prep(const PrepFlags& flags);
int run_bench(const BenchFlags& flags);

// All flag storage for one invocation; must outlive parsing.
struct Flags {
  std::size_t threads = 0;
  ScoreFlags score;
  LearnFlags learn;
  EvalFlags eval;
  TailFlags tail;
  ProjectionFlags projection;
  GenFlags gen;
  PrepFlags prep;
  BenchFlags bench;
};

using CommandTable = std::vector<std::pair<CLI::App*, std::function<int()>>>;

// Declares every subcommand on app. After parsing, run the entry whose
// App* reports parsed().
CommandTable register_commands(CLI::App& app, Flags& flags);

}  // namespace circsketch::cli

#endif  // CIRCSKETCH_TOOLS_COMMANDS_H_
