#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcadmm/admm.hpp"
#include "qcadmm/graph.hpp"
#include "qcadmm/objectives.hpp"

namespace qcadmm {

/// A fixed instance: graph, objectives and initialization.
struct Problem {
  NetworkGraph graph;
  std::vector<LocalObjective> objectives;
  Eigen::VectorXd x0;
  Eigen::VectorXd alpha0;
};

/// The seeded random instance used by every sweep point with this (n, e, m,
/// seed): graph from `seed`, objectives from `problem_seed(seed)`, zero init.
Problem make_problem(Scenario scenario, int n, int e, int m, std::uint64_t seed);
std::uint64_t problem_seed(std::uint64_t seed);

std::string to_string(Engine engine);
/// Accepts "c_admm", "qc_admm".
Engine parse_engine(std::string_view name);

struct ExperimentConfig {
  Scenario scenario = Scenario::Lasso;
  int n = 40;
  std::vector<int> edge_counts{300};
  int m = 20;
  std::vector<double> deltas{1.0};
  std::vector<double> rhos{1.0};
  std::vector<std::uint64_t> seeds{1};
  long long max_iterations = 500;
  Engine engine = Engine::QcAdmm;
  double mu = 1.5;
  /// 0 picks std::thread::hardware_concurrency().
  int threads = 0;
  /// When set, replaces the random instance: n, m and edge_counts are taken
  /// from it and every seed runs the same problem.
  std::optional<Problem> problem;
};

/// Throws std::invalid_argument on empty sweep lists or out-of-range sizes.
void validate(const ExperimentConfig& cfg);

struct SweepRow {
  std::string scenario;
  int n = 0;
  int e = 0;
  int m = 0;
  double delta = 0.0;
  double rho = 0.0;
  std::uint64_t seed = 0;
  /// ||x_q - 1 x*|| / sqrt(N) at the last iterate.
  double final_error = 0.0;
  std::optional<long long> iters_to_fixed_point;
  long long iterations_run = 0;
  double error_bound = 0.0;
  std::optional<long long> iter_bound;
  /// No certificate is contradicted by this run; see README for the rules.
  bool bound_ok = false;
  double eta = 0.0;
  /// tau0 for smooth scenarios, tau1 otherwise.
  double tau = 0.0;
  std::optional<double> delta_x;
  double u0_distance = 0.0;
  /// Non-empty if the run failed; the numeric fields are then meaningless.
  std::string error;
};

struct SweepAverage {
  int e = 0;
  double delta = 0.0;
  double rho = 0.0;
  int runs = 0;
  int failed = 0;
  /// Over successful runs. Iterations of runs without a fixed point count as
  /// the number of iterations performed.
  double mean_final_error = 0.0;
  double mean_iterations = 0.0;
  double mean_error_bound = 0.0;
  /// Over runs that have an iteration bound (delta > 0).
  std::optional<double> mean_iter_bound;
  double fixed_point_fraction = 0.0;
  bool all_bound_ok = true;
};

struct SweepSummary {
  std::vector<SweepRow> rows;
  /// One per (e, delta, rho) in sweep order.
  std::vector<SweepAverage> averages;
};

/// Cartesian product edge_counts x deltas x rhos x seeds, in that nesting
/// order. Runs execute concurrently; the output order and content do not
/// depend on the thread count. Per-run failures are recorded in SweepRow::error.
SweepSummary run_experiment(const ExperimentConfig& cfg);

/// One sweep point; exceptions propagate.
SweepRow run_single(const ExperimentConfig& cfg, const Problem& problem, double delta, double rho,
                    std::uint64_t seed);

std::vector<SweepAverage> summarize(const std::vector<SweepRow>& rows);

}  // namespace qcadmm
