#include "qcadmm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "qcadmm/analysis.hpp"
#include "qcadmm/oracle.hpp"

namespace qcadmm {

std::uint64_t problem_seed(std::uint64_t seed) {
  // splitmix64 finalizer, so graph and objective streams are decorrelated.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Problem make_problem(Scenario scenario, int n, int e, int m, std::uint64_t seed) {
  Problem p{random_connected_graph(n, e, seed), build_problem_instance(scenario, n, m, problem_seed(seed)),
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * m),
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * m)};
  return p;
}

std::string to_string(Engine engine) {
  return engine == Engine::CAdmm ? "c_admm" : "qc_admm";
}

Engine parse_engine(std::string_view name) {
  if (name == "c_admm") return Engine::CAdmm;
  if (name == "qc_admm") return Engine::QcAdmm;
  throw std::invalid_argument("unknown engine: " + std::string(name));
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.deltas.empty() || cfg.rhos.empty() || cfg.seeds.empty()) {
    throw std::invalid_argument("sweep lists and seeds must be nonempty");
  }
  if (!cfg.problem && cfg.edge_counts.empty()) throw std::invalid_argument("edge_counts must be nonempty");
  for (double d : cfg.deltas) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("delta must be finite and >= 0");
  }
  for (double r : cfg.rhos) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("rho must be finite and positive");
  }
  if (cfg.max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (!(cfg.mu > 1.0)) throw std::invalid_argument("mu must exceed 1");
  if (!cfg.problem) {
    if (cfg.n < 2) throw std::invalid_argument("n must be at least 2");
    if (cfg.m < 1) throw std::invalid_argument("m must be positive");
    const long long max_e = static_cast<long long>(cfg.n) * (cfg.n - 1) / 2;
    for (int e : cfg.edge_counts) {
      if (e < cfg.n - 1 || e > max_e) throw std::invalid_argument("edge count out of range");
    }
  }
}

SweepRow run_single(const ExperimentConfig& cfg, const Problem& problem, double delta, double rho,
                    std::uint64_t seed) {
  const auto& g = problem.graph;
  const int m_dim = problem.objectives.front().dim();
  SweepRow row;
  row.scenario = to_string(cfg.scenario);
  row.n = g.n_agents();
  row.e = g.n_edges();
  row.m = m_dim;
  row.delta = delta;
  row.rho = rho;
  row.seed = seed;

  const GraphMatrices mats = build_matrices(g);
  const SpectralData spec = spectral_quantities(mats);
  const ReferenceSolution ref = solve_reference(problem.objectives);
  const ConvergenceCertificate cert =
      certify(g, mats, spec, problem.objectives, problem.x0, problem.alpha0,
              CertifyOptions{rho, cfg.engine == Engine::QcAdmm ? delta : 0.0, cfg.mu});
  row.error_bound = cert.consensus_error_bound;
  row.iter_bound = cert.iteration_bound;
  row.eta = cert.eta;
  row.tau = cert.tau1.value_or(cert.tau0);
  row.delta_x = cert.delta_x;
  row.u0_distance = cert.u0_distance;

  const RunReference reference{ref.x_star, cert.reference};
  const RunConfig run_cfg{rho, delta, cfg.max_iterations, true};
  const RunRecord rec =
      run(cfg.engine, run_cfg, g, mats, problem.objectives, problem.x0, problem.alpha0, &reference);
  row.final_error = rec.rows.back().rms_error;
  row.iters_to_fixed_point = rec.fixed_point_iteration;
  row.iterations_run = rec.rows.back().iter;

  if (row.iters_to_fixed_point) {
    const bool error_ok = row.final_error <= row.error_bound + 1e-9 * (1.0 + row.error_bound);
    const bool iter_ok = !row.iter_bound || *row.iters_to_fixed_point <= *row.iter_bound;
    row.bound_ok = error_ok && iter_ok;
  } else {
    // Without a fixed point only the iteration bound can be contradicted.
    row.bound_ok = !row.iter_bound || row.iterations_run < *row.iter_bound;
  }
  return row;
}

std::vector<SweepAverage> summarize(const std::vector<SweepRow>& rows) {
  std::vector<SweepAverage> out;
  std::vector<int> iter_bound_counts;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SweepAverage& a) {
      return a.e == r.e && a.delta == r.delta && a.rho == r.rho;
    });
    if (it == out.end()) {
      SweepAverage a;
      a.e = r.e;
      a.delta = r.delta;
      a.rho = r.rho;
      out.push_back(a);
      iter_bound_counts.push_back(0);
      it = out.end() - 1;
    }
    const auto idx = static_cast<std::size_t>(it - out.begin());
    ++it->runs;
    if (!r.error.empty()) {
      ++it->failed;
      it->all_bound_ok = false;
      continue;
    }
    it->mean_final_error += r.final_error;
    it->mean_iterations += static_cast<double>(r.iters_to_fixed_point.value_or(r.iterations_run));
    it->mean_error_bound += r.error_bound;
    if (r.iter_bound) {
      it->mean_iter_bound = it->mean_iter_bound.value_or(0.0) + static_cast<double>(*r.iter_bound);
      ++iter_bound_counts[idx];
    }
    if (r.iters_to_fixed_point) it->fixed_point_fraction += 1.0;
    it->all_bound_ok = it->all_bound_ok && r.bound_ok;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& a = out[i];
    const int ok = a.runs - a.failed;
    if (ok > 0) {
      a.mean_final_error /= ok;
      a.mean_iterations /= ok;
      a.mean_error_bound /= ok;
      a.fixed_point_fraction /= ok;
    }
    if (a.mean_iter_bound) *a.mean_iter_bound /= iter_bound_counts[i];
  }
  return out;
}

SweepSummary run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  struct Task {
    int e;
    double delta;
    double rho;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  const std::vector<int> edge_counts =
      cfg.problem ? std::vector<int>{cfg.problem->graph.n_edges()} : cfg.edge_counts;
  for (int e : edge_counts)
    for (double d : cfg.deltas)
      for (double r : cfg.rhos)
        for (auto s : cfg.seeds) tasks.push_back({e, d, r, s});

  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      try {
        if (cfg.problem) {
          rows[i] = run_single(cfg, *cfg.problem, t.delta, t.rho, t.seed);
        } else {
          const Problem p = make_problem(cfg.scenario, cfg.n, t.e, cfg.m, t.seed);
          rows[i] = run_single(cfg, p, t.delta, t.rho, t.seed);
        }
      } catch (const std::exception& ex) {
        SweepRow failed;
        failed.scenario = to_string(cfg.scenario);
        failed.n = cfg.problem ? cfg.problem->graph.n_agents() : cfg.n;
        failed.e = t.e;
        failed.m = cfg.problem ? cfg.problem->objectives.front().dim() : cfg.m;
        failed.delta = t.delta;
        failed.rho = t.rho;
        failed.seed = t.seed;
        failed.error = ex.what();
        rows[i] = std::move(failed);
      }
    }
  };

  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepSummary summary;
  summary.rows = std::move(rows);
  summary.averages = summarize(summary.rows);
  return summary;
}

}  // namespace qcadmm
