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

#include "commands.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>

#include "circsketch/bench.h"
#include "circsketch/dataio.h"
#include "circsketch/errors.h"
#include "circsketch/learner.h"
#include "circsketch/montecarlo.h"
#include "circsketch/parallel.h"
#include "output.h"

namespace circsketch::cli {
namespace {

constexpr double kGoodError = 0.02;

void emit(const Json& result, const std::string& dir, Manifest& manifest) {
  const std::string path = join_path(dir, "result.json");
  write_json(result, path);
  manifest.add_output(path);
  std::cout << result.dump(2) << '\n';
}

SolveMode parse_mode(const std::string& mode) {
  if (mode == "exact") return SolveMode::kExact;
  if (mode == "greedy") return SolveMode::kGreedy;
  throw InvalidArgument("mode must be exact or greedy, got " + mode);
}

// Linear interpolation between order statistics of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

// --- score -----------------------------------------------------------------

Json score_json(const DenseMatrix& a, const ScoreResult& r) {
  const double total = a.squaredNorm();
  Json j;
  j["m"] = a.rows();
  j["n"] = a.cols();
  j["score"] = r.score;
  j["error"] = r.error;
  j["normalized_error"] = total > 0.0 ? r.error / total : 0.0;
  j["assignment"] = r.assignment.shifts();
  j["exact"] = r.exact;
  return j;
}

// --- learn -----------------------------------------------------------------

struct LearnOutcome {
  Json summary;
  std::string csv_row;
  bool failed = false;
};

LearnOutcome learn_one(const DenseMatrix& a, const Eigen::MatrixXd& x,
                       double ax_norm_sq, const LearnFlags& flags,
                       double lambda, const std::string& dir,
                       Manifest& manifest) {
  ensure_dir(dir);
  LearnConfig cfg;
  cfg.lambda = lambda;
  cfg.mu = flags.mu;
  cfg.epsilon = flags.epsilon;
  cfg.max_outer = flags.max_outer;
  cfg.column_zero_threshold = flags.threshold;
  cfg.seed = flags.seed;

  std::vector<std::string> trace_rows;
  auto observer = [&](const OuterStep& s) {
    trace_rows.push_back(fmt::format("{},{},{},{}", s.iteration, num(s.objective),
                                     num(s.residual), s.mprime));
  };
  auto write_trace = [&] {
    const std::string path = join_path(dir, "trace.csv");
    write_lines(path, "iteration,obj,residual,mprime", trace_rows);
    manifest.add_output(path);
  };

  LearnOutcome outcome;
  Json& s = outcome.summary;
  s["lambda"] = lambda;
  s["dir"] = dir;
  std::optional<LearnedFactors> result;
  try {
    result = learn(a, x, cfg, observer);
  } catch (const ConvergenceError& e) {
    write_trace();
    std::cerr << "circsketch: lambda " << num(lambda) << ": " << e.what() << '\n';
    s["status"] = "failed";
    s["message"] = e.what();
    outcome.failed = true;
    return outcome;
  }
  write_trace();
  const LearnedFactors& learned = *result;

  CompressedFactors cf;
  bool empty = false;
  try {
    cf = extract_factors(learned.m, flags.threshold);
  } catch (const InvalidArgument&) {
    empty = true;
    cf.n = a.cols();
    cf.p = DenseMatrix::Zero(a.rows(), 0);
  }
  const OuterStep& last = learned.steps.back();
  const ColumnErrors train = normalized_column_errors(a, cf, learned.gen, x);
  const double train_error = mean_of(train.errors);

  for (const auto& [name, mat] :
       {std::pair<std::string, DenseMatrix>{"M.rbm", learned.m},
        {"c.rbm", learned.gen.coefficients().transpose()}}) {
    const std::string path = join_path(dir, name);
    save_matrix(mat, path, MatrixFormat::kRbm);
    manifest.add_output(path);
  }
  const std::string factors_path = join_path(dir, "factors.json");
  save_factors(cf, learned.gen, factors_path);
  manifest.add_output(join_path(dir, "factors_c.rbm"));
  if (!empty) manifest.add_output(join_path(dir, "factors_P.rbm"));
  manifest.add_output(factors_path);

  s["status"] = learned.iterations >= flags.max_outer ? "max_outer" : "converged";
  s["iterations"] = learned.iterations;
  s["objective"] = last.objective;
  s["residual"] = last.residual;
  s["relative_residual"] = ax_norm_sq > 0.0 ? last.residual / ax_norm_sq : 0.0;
  s["mprime"] = cf.mprime();
  s["train_error"] = train_error;
  if (empty) s["warning"] = "every column of M is zero; the surrogate is empty";
  outcome.csv_row =
      fmt::format("{},{},{}", num(lambda), cf.mprime(), num(train_error));
  return outcome;
}

// --- eval ------------------------------------------------------------------

std::vector<std::string> histogram_rows(const std::vector<double>& errors,
                                        int bins, long* zeros) {
  std::vector<double> logs;
  for (double e : errors) {
    if (e > 0.0) logs.push_back(std::log10(e));
  }
  *zeros = static_cast<long>(errors.size() - logs.size());
  std::vector<std::string> rows;
  if (logs.empty()) return rows;
  double lo = *std::min_element(logs.begin(), logs.end());
  double hi = *std::max_element(logs.begin(), logs.end());
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / bins;
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  for (double v : logs) {
    auto b = static_cast<long>((v - lo) / width);
    b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  for (int b = 0; b < bins; ++b) {
    rows.push_back(fmt::format("{},{},{},{}", b, num(lo + b * width),
                               num(lo + (b + 1) * width),
                               counts[static_cast<std::size_t>(b)]));
  }
  return rows;
}

}  // namespace

int run_score(const ScoreFlags& flags, std::size_t threads) {
  const SolveMode mode = parse_mode(flags.mode);
  Json config{{"input", flags.input},     {"mode", flags.mode},
              {"budget", flags.budget},   {"restarts", flags.restarts},
              {"threads", threads}};
  Manifest manifest("score", config, flags.seed);
  ensure_dir(flags.out);
  manifest.phase("load");
  const DenseMatrix a = load_matrix(flags.input);
  manifest.phase("solve");
  const ScoreResult r =
      mode == SolveMode::kExact
          ? rubik_score_exact(a, flags.budget, threads)
          : rubik_score_greedy(a, {flags.restarts, true, flags.seed});
  manifest.phase("write");
  emit(score_json(a, r), flags.out, manifest);
  manifest.write(flags.out);
  return 0;
}

int run_learn(const LearnFlags& flags) {
  std::vector<double> lambdas = flags.lambda_grid;
  const bool sweep = !lambdas.empty();
  if (!sweep) {
    if (!(flags.lambda > 0.0)) {
      throw InvalidArgument("learn needs --lambda > 0 or --lambda-grid");
    }
    lambdas.push_back(flags.lambda);
  }
  Json config{{"A", flags.a_path},           {"X", flags.x_path},
              {"lambdas", lambdas},          {"mu", flags.mu},
              {"epsilon", flags.epsilon},    {"max_outer", flags.max_outer},
              {"threshold", flags.threshold}};
  Manifest manifest("learn", config, flags.seed);
  ensure_dir(flags.out);
  manifest.phase("load");
  const DenseMatrix a = load_matrix(flags.a_path);
  const Eigen::MatrixXd x = load_matrix(flags.x_path);
  if (x.rows() != a.cols()) {
    throw DimensionError(fmt::format("X has {} rows but A has {} columns",
                                     x.rows(), a.cols()));
  }
  const double ax_norm_sq = (a * x).squaredNorm();

  Json result;
  result["m"] = a.rows();
  result["n"] = a.cols();
  result["p"] = x.cols();
  result["runs"] = Json::array();
  std::vector<std::string> summary_rows;
  bool failed = false;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    manifest.phase(fmt::format("learn_{}", k));
    const std::string dir =
        sweep ? join_path(flags.out, fmt::format("lambda_{:02d}", k)) : flags.out;
    LearnOutcome outcome =
        learn_one(a, x, ax_norm_sq, flags, lambdas[k], dir, manifest);
    failed = failed || outcome.failed;
    if (!outcome.failed) summary_rows.push_back(outcome.csv_row);
    result["runs"].push_back(std::move(outcome.summary));
  }
  manifest.phase("write");
  const std::string summary_path = join_path(flags.out, "summary.csv");
  write_lines(summary_path, "lambda,mprime,train_error", summary_rows);
  manifest.add_output(summary_path);
  emit(result, flags.out, manifest);
  manifest.write(flags.out);
  return failed ? 3 : 0;
}

int run_eval(const EvalFlags& flags) {
  if (flags.bins < 1) throw InvalidArgument("--bins must be >= 1");
  Json config{{"A", flags.a_path},
              {"factors", flags.factors},
              {"data", flags.data},
              {"bins", flags.bins},
              {"metric", "uncentered ||Ax - PSCx||^2 / ||x||^2"}};
  Manifest manifest("eval", config, 0);
  ensure_dir(flags.out);
  manifest.phase("load");
  const DenseMatrix a = load_matrix(flags.a_path);
  const StoredFactors stored = load_factors(flags.factors);
  const Eigen::MatrixXd x = load_matrix(flags.data);
  manifest.phase("evaluate");
  const ColumnErrors errors =
      normalized_column_errors(a, stored.factors, stored.gen, x);

  manifest.phase("write");
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < errors.errors.size(); ++i) {
    rows.push_back(fmt::format("{},{}", errors.columns[i], num(errors.errors[i])));
  }
  const std::string errors_path = join_path(flags.out, "errors.csv");
  write_lines(errors_path, "column,error", rows);
  manifest.add_output(errors_path);

  long zeros = 0;
  const std::string hist_path = join_path(flags.out, "histogram.csv");
  write_lines(hist_path, "bin,log10_low,log10_high,count",
              histogram_rows(errors.errors, flags.bins, &zeros));
  manifest.add_output(hist_path);

  std::vector<double> sorted = errors.errors;
  std::sort(sorted.begin(), sorted.end());
  const auto good = std::count_if(sorted.begin(), sorted.end(),
                                  [](double e) { return e <= kGoodError; });
  Json result;
  result["evaluated"] = sorted.size();
  result["skipped_zero_columns"] = errors.skipped;
  result["zero_errors"] = zeros;
  result["mprime"] = stored.factors.mprime();
  result["median"] = quantile(sorted, 0.5);
  result["mean"] = mean_of(sorted);
  result["p90"] = quantile(sorted, 0.9);
  result["fraction_le_0.02"] =
      sorted.empty() ? 0.0 : static_cast<double>(good) / sorted.size();
  if (errors.skipped > 0) {
    std::cerr << "circsketch: skipped " << errors.skipped << " zero column(s)\n";
  }
  emit(result, flags.out, manifest);
  manifest.write(flags.out);
  return 0;
}

int run_tail(const TailFlags& flags, std::size_t threads) {
  TailExperimentConfig cfg;
  cfg.m = flags.m;
  cfg.n = flags.n;
  cfg.delta = flags.delta;
  cfg.trials = flags.trials;
  cfg.seed = flags.seed;
  cfg.solver = parse_mode(flags.solver);
  cfg.force = flags.force;
  cfg.budget = flags.budget;
  cfg.threads = threads;
  if (flags.model == "gaussian") {
    cfg.model = TailModel::kGaussian;
  } else if (flags.model == "planted") {
    cfg.model = TailModel::kPlanted;
  } else {
    throw InvalidArgument("model must be gaussian or planted");
  }
  cfg.validate();
  Json config{{"m", flags.m},         {"n", flags.n},
              {"delta", flags.delta}, {"trials", flags.trials},
              {"solver", flags.solver}, {"model", flags.model},
              {"force", flags.force}, {"budget", flags.budget},
              {"threads", threads}};
  Manifest manifest("mc tail", config, flags.seed);
  ensure_dir(flags.out);
  manifest.phase("trials");
  const TailExperimentResult r = run_tail_experiment(cfg);
  manifest.phase("write");
  std::vector<std::string> rows;
  for (std::size_t t = 0; t < r.per_trial.size(); ++t) {
    const TailTrial& trial = r.per_trial[t];
    rows.push_back(fmt::format("{},{},{},{}", t, num(trial.ratio),
                               num(trial.normalized_error), trial.hit ? 1 : 0));
  }
  const std::string trials_path = join_path(flags.out, "trials.csv");
  write_lines(trials_path, "trial,ratio,normalized_error,hit", rows);
  manifest.add_output(trials_path);

  const SampleSummary s = summarize(r.ratio_samples);
  Json result;
  result["m"] = flags.m;
  result["n"] = flags.n;
  result["delta"] = flags.delta;
  result["trials"] = r.trials;
  result["hits"] = r.hits;
  result["solver"] = solver_name(r.solver);
  result["model"] = flags.model;
  result["ratio"] = {{"mean", s.mean},
                     {"stderr", s.stderr_mean},
                     {"ci95_low", s.ci_low},
                     {"ci95_high", s.ci_high}};
  if (flags.delta >= kMaxTailDelta) {
    result["warning"] = "delta is outside the range covered by the tail bound";
    std::cerr << "circsketch: warning: delta >= 0.125 (forced)\n";
  }
  emit(result, flags.out, manifest);
  manifest.write(flags.out);
  return 0;
}

int run_projection(const ProjectionFlags& flags, std::size_t threads) {
  const ProjectionConfig cfg{flags.d, flags.k, flags.eps, flags.trials,
                             flags.seed, threads};
  cfg.validate();
  Json config{{"d", flags.d},
              {"k", flags.k},
              {"eps", flags.eps},
              {"trials", flags.trials},
              {"threads", threads}};
  Manifest manifest("mc projection", config, flags.seed);
  ensure_dir(flags.out);
  manifest.phase("trials");
  const ProjectionResult r = run_projection_experiment(cfg);
  manifest.phase("write");
  std::vector<std::string> rows;
  for (std::size_t t = 0; t < r.sq_norms.size(); ++t) {
    rows.push_back(fmt::format("{},{}", t, num(r.sq_norms[t])));
  }
  const std::string trials_path = join_path(flags.out, "trials.csv");
  write_lines(trials_path, "trial,sq_norm", rows);
  manifest.add_output(trials_path);
  Json result;
  result["d"] = flags.d;
  result["k"] = flags.k;
  result["eps"] = flags.eps;
  result["trials"] = flags.trials;
  result["empirical_tail"] = r.empirical_tail;
  result["bound"] = r.bound;
  result["mean_sq"] = r.mean_sq;
  result["mean_sq_stderr"] = r.mean_sq_stderr;
  result["expected_mean_sq"] =
      static_cast<double>(flags.k) / static_cast<double>(flags.d);
  emit(result, flags.out, manifest);
  manifest.write(flags.out);
  return 0;
}

int run_gen(const GenFlags& flags) {
  if (flags.output.empty()) throw InvalidArgument("--output is required");
  Json config{{"kind", flags.kind}, {"output", flags.output}};
  Json result{{"kind", flags.kind}, {"output", flags.output}};
  DenseMatrix mat;
  if (flags.kind == "gaussian") {
    config["rows"] = flags.rows;
    config["cols"] = flags.cols;
    mat = gen_gaussian(flags.rows, flags.cols, flags.seed);
  } else if (flags.kind == "planted") {
    config["m"] = flags.rows;
    config["n"] = flags.cols;
    const PartialCirculantOp op = gen_planted_pc(flags.rows, flags.cols, flags.seed);
    mat = partial_to_dense(op);
    result["shifts"] = op.shifts.shifts();
    result["generator"] = std::vector<double>(
        op.gen.coefficients().begin(), op.gen.coefficients().end());
  } else if (flags.kind == "subspace") {
    config["n"] = flags.rows;
    config["p"] = flags.cols;
    config["r"] = flags.r;
    config["sigma"] = flags.sigma;
    mat = gen_subspace_plus_noise(flags.rows, flags.r, flags.cols, flags.sigma,
                                  flags.seed)
              .x;
  } else {
    throw InvalidArgument("unknown generator " + flags.kind);
  }
  Manifest manifest("gen " + flags.kind, config, flags.seed);
  manifest.phase("write");
  const std::filesystem::path out_path(flags.output);
  const std::string dir =
      out_path.has_parent_path() ? out_path.parent_path().string() : ".";
  ensure_dir(dir);
  save_matrix(mat, flags.output);
  manifest.add_output(flags.output);
  result["rows"] = mat.rows();
  result["cols"] = mat.cols();
  std::cout << result.dump(2) << '\n';
  manifest.write(dir);
  return 0;
}

int run_prep(const PrepFlags& flags) {
  SplitStrategy strategy;
  if (flags.strategy == "head") {
    strategy = SplitStrategy::kHead;
  } else if (flags.strategy == "shuffled") {
    strategy = SplitStrategy::kShuffled;
  } else {
    throw InvalidArgument("--split must be head or shuffled");
  }
  Json config{{"data", flags.data},
              {"train", flags.train},
              {"split", flags.strategy},
              {"k", flags.k},
              {"centered", true}};
  Manifest manifest("prep", config, flags.seed);
  ensure_dir(flags.out);
  manifest.phase("load");
  Dataset ds;
  ds.x = load_matrix(flags.data);
  ds.validate();
  manifest.phase("split");
  const auto [train, test] = split(ds, {flags.train, flags.seed, strategy});
  manifest.phase("pca");
  const PcaModel model = pca(train, flags.k);
  manifest.phase("write");
  const std::pair<std::string, DenseMatrix> files[] = {
      {"train.rbm", train.x},
      {"test.rbm", test.x},
      {"A.rbm", model.components},
      {"pca_mean.rbm", model.mean}};
  for (const auto& [name, mat] : files) {
    const std::string path = join_path(flags.out, name);
    save_matrix(mat, path, MatrixFormat::kRbm);
    manifest.add_output(path);
  }
  Json result;
  result["n"] = ds.n();
  result["train"] = train.p();
  result["test"] = test.p();
  result["k"] = flags.k;
  result["singular_values"] = std::vector<double>(
      model.singular_values.begin(), model.singular_values.end());
  emit(result, flags.out, manifest);
  manifest.write(flags.out);
  return 0;
}

int run_bench(const BenchFlags& flags) {
  if (flags.log2_min < 1 || flags.log2_max > 24 || flags.log2_min > flags.log2_max) {
    throw InvalidArgument("need 1 <= --log2-min <= --log2-max <= 24");
  }
  Json config{{"log2_min", flags.log2_min}, {"log2_max", flags.log2_max},
              {"m", flags.m},               {"mprime", flags.mprime},
              {"reps", flags.reps}};
  Manifest manifest("bench", config, flags.seed);
  ensure_dir(flags.out);
  std::vector<BenchSize> sizes;
  for (int e = flags.log2_min; e <= flags.log2_max; ++e) {
    sizes.push_back({Index{1} << e, flags.m, flags.mprime});
  }
  manifest.phase("bench");
  const std::vector<BenchRecord> records =
      run_apply_bench(sizes, flags.reps, flags.seed);
  manifest.phase("write");
  std::vector<std::string> rows;
  for (const BenchRecord& r : records) rows.push_back(bench_csv_row(r));
  const std::string csv_path = join_path(flags.out, "bench.csv");
  write_lines(csv_path, kBenchCsvHeader, rows);
  manifest.add_output(csv_path);

  Json result;
  result["sizes"] = sizes.size();
  Json fits = Json::object();
  const std::pair<BenchMethod, ComplexityModel> pairs[] = {
      {BenchMethod::kDense, ComplexityModel::kMn},
      {BenchMethod::kCirculant, ComplexityModel::kNLogN},
      {BenchMethod::kFactored, ComplexityModel::kMmprimePlusNLogN}};
  for (const auto& [method, model] : pairs) {
    const auto subset = select_method(records, method);
    if (subset.size() < 4) continue;
    const ComplexityFit fit = fit_complexity(subset, model);
    fits[method_name(method) + "_vs_" + model_name(model)] = {
        {"slope", fit.slope}, {"r2", fit.r2}};
  }
  result["fits"] = fits;
  emit(result, flags.out, manifest);
  manifest.write(flags.out);
  return 0;
}

CommandTable register_commands(CLI::App& app, Flags& f) {
  CommandTable table;
  app.add_option("--threads", f.threads,
                 "Worker cap (default: CIRCSKETCH_THREADS or 1)");

  auto* score = app.add_subcommand("score", "Rubik's score and best PC error");
  score->add_option("--input", f.score.input, "Matrix file (.csv or .rbm)")
      ->required();
  score->add_option("--mode", f.score.mode, "exact or greedy")
      ->check(CLI::IsMember({"exact", "greedy"}));
  score->add_option("--budget", f.score.budget, "Enumeration budget (exact)");
  score->add_option("--restarts", f.score.restarts, "Greedy restarts");
  score->add_option("--seed", f.score.seed, "Seed for greedy restarts");
  score->add_option("--out", f.score.out, "Output directory");
  table.emplace_back(score, [&f] { return run_score(f.score, f.threads); });

  auto* learn = app.add_subcommand("learn", "Learn a factored P S C surrogate");
  learn->add_option("--A", f.learn.a_path, "Target operator (m x n)")->required();
  learn->add_option("--X", f.learn.x_path, "Training data (n x p)")->required();
  auto* lambda = learn->add_option("--lambda", f.learn.lambda, "Column sparsity weight");
  auto* grid = learn->add_option("--lambda-grid", f.learn.lambda_grid,
                                 "Comma-separated lambda sweep")
                   ->delimiter(',');
  lambda->excludes(grid);
  learn->add_option("--mu", f.learn.mu, "Circulant ridge weight");
  learn->add_option("--epsilon", f.learn.epsilon, "Relative stopping tolerance");
  learn->add_option("--max-outer", f.learn.max_outer, "Outer iteration cap");
  learn->add_option("--threshold", f.learn.threshold,
                    "Relative column norm below which a column is dropped");
  learn->add_option("--seed", f.learn.seed, "Seed");
  learn->add_option("--out", f.learn.out, "Output directory");
  table.emplace_back(learn, [&f] { return run_learn(f.learn); });

  auto* eval = app.add_subcommand("eval", "Per-point error of learned factors");
  eval->add_option("--A", f.eval.a_path, "Target operator (m x n)")->required();
  eval->add_option("--factors", f.eval.factors, "factors.json from learn")
      ->required();
  eval->add_option("--data", f.eval.data, "Test data (n x q)")->required();
  eval->add_option("--bins", f.eval.bins, "Histogram bins on log10 error");
  eval->add_option("--out", f.eval.out, "Output directory");
  table.emplace_back(eval, [&f] { return run_eval(f.eval); });

  auto* mc = app.add_subcommand("mc", "Monte Carlo experiments");
  mc->require_subcommand(1);
  auto* tail = mc->add_subcommand("tail", "Tail probability of small PC error");
  tail->add_option("--m", f.tail.m, "Rows");
  tail->add_option("--n", f.tail.n, "Columns");
  tail->add_option("--delta", f.tail.delta, "Threshold on E / ||A||^2");
  tail->add_option("--trials", f.tail.trials, "Trials");
  tail->add_option("--seed", f.tail.seed, "Seed");
  tail->add_option("--solver", f.tail.solver, "exact or greedy")
      ->check(CLI::IsMember({"exact", "greedy"}));
  tail->add_option("--model", f.tail.model, "gaussian or planted")
      ->check(CLI::IsMember({"gaussian", "planted"}));
  tail->add_flag("--force", f.tail.force, "Allow delta >= 0.125");
  tail->add_option("--budget", f.tail.budget, "Enumeration budget");
  tail->add_option("--out", f.tail.out, "Output directory");
  table.emplace_back(tail, [&f] { return run_tail(f.tail, f.threads); });

  auto* proj = mc->add_subcommand("projection", "Random subspace projection norms");
  proj->add_option("--d", f.projection.d, "Ambient dimension");
  proj->add_option("--k", f.projection.k, "Subspace dimension");
  proj->add_option("--eps", f.projection.eps, "Deviation epsilon");
  proj->add_option("--trials", f.projection.trials, "Trials");
  proj->add_option("--seed", f.projection.seed, "Seed");
  proj->add_option("--out", f.projection.out, "Output directory");
  table.emplace_back(proj,
                     [&f] { return run_projection(f.projection, f.threads); });

  auto* gen = app.add_subcommand("gen", "Generate synthetic matrices");
  gen->require_subcommand(1);
  auto* gauss = gen->add_subcommand("gaussian", "iid N(0,1) matrix");
  gauss->add_option("--rows", f.gen.rows, "Rows")->required();
  gauss->add_option("--cols", f.gen.cols, "Columns")->required();
  auto* planted = gen->add_subcommand("planted", "Random partial circulant matrix");
  planted->add_option("--m", f.gen.rows, "Rows")->required();
  planted->add_option("--n", f.gen.cols, "Columns")->required();
  auto* sub = gen->add_subcommand("subspace", "Low-dimensional subspace plus noise");
  sub->add_option("--n", f.gen.rows, "Ambient dimension")->required();
  sub->add_option("--p", f.gen.cols, "Number of points")->required();
  sub->add_option("--r", f.gen.r, "Subspace dimension");
  sub->add_option("--sigma", f.gen.sigma, "Noise level");
  const std::pair<CLI::App*, std::string> kinds[] = {
      {gauss, "gaussian"}, {planted, "planted"}, {sub, "subspace"}};
  for (const auto& [cmd, kind] : kinds) {
    cmd->add_option("--seed", f.gen.seed, "Seed");
    cmd->add_option("--output", f.gen.output, "Output file (.csv or .rbm)")
        ->required();
    table.emplace_back(cmd, [&f, kind = kind] {
      f.gen.kind = kind;
      return run_gen(f.gen);
    });
  }

  auto* prep = app.add_subcommand("prep", "Split data and build a PCA operator");
  prep->add_option("--data", f.prep.data, "Data matrix, one point per column")
      ->required();
  prep->add_option("--train", f.prep.train, "Training column count")->required();
  prep->add_option("--split", f.prep.strategy, "head or shuffled")
      ->check(CLI::IsMember({"head", "shuffled"}));
  prep->add_option("--k", f.prep.k, "Principal components kept");
  prep->add_option("--seed", f.prep.seed, "Seed for the shuffled split");
  prep->add_option("--out", f.prep.out, "Output directory");
  table.emplace_back(prep, [&f] { return run_prep(f.prep); });

  auto* bench = app.add_subcommand("bench", "Time dense, circulant and factored applies");
  bench->add_option("--log2-min", f.bench.log2_min, "Smallest n as a power of 2");
  bench->add_option("--log2-max", f.bench.log2_max, "Largest n as a power of 2");
  bench->add_option("--m", f.bench.m, "Rows of the dense operator");
  bench->add_option("--mprime", f.bench.mprime, "Surviving shifts in the factored path");
  bench->add_option("--reps", f.bench.reps, "Timed repetitions (>= 5)");
  bench->add_option("--seed", f.bench.seed, "Seed");
  bench->add_option("--out", f.bench.out, "Output directory");
  table.emplace_back(bench, [&f] { return run_bench(f.bench); });

  return table;
}

}  // namespace circsketch::cli
