// qcadmm: run, sweep and certify quantized consensus ADMM from the command line.
//
//   qcadmm run --scenario lasso --n 40 --e 300 --m 20 --delta 1 --seed 7 --out run.csv
//   qcadmm sweep --param delta --values 0,0.1,0.5,2.5,10 --seeds 1-50 --out sweep.csv
//   qcadmm certify --scenario quadratic --n 10 --e 20 --m 2 --delta 1
//   qcadmm graph --n 40 --e 300 --seed 7
//
// Every option can also come from a JSON object passed with --config; flags
// given on the command line win.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcadmm/admm.hpp"
#include "qcadmm/analysis.hpp"
#include "qcadmm/experiments.hpp"
#include "qcadmm/oracle.hpp"
#include "qcadmm/serialization.hpp"

using namespace qcadmm;

namespace {

struct Options {
  std::string config;
  std::string scenario = "lasso";
  int n = 40;
  int e = 300;
  int m = 20;
  double delta = 1.0;
  double rho = 1.0;
  double mu = 1.5;
  std::uint64_t seed = 1;
  long long max_iter = 500;
  std::string engine = "qc_admm";
  std::string load_problem;
  std::string dump_problem;
  std::string out;
  std::string format;
  // sweep only
  std::string param = "delta";
  std::vector<double> values;
  std::string seeds;
  int threads = 0;
  std::string averages_out;
};

// "1-50" or "3,5,9".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(std::stoull(part));
    } else {
      const auto lo = std::stoull(part.substr(0, dash));
      const auto hi = std::stoull(part.substr(dash + 1));
      if (hi < lo) throw std::invalid_argument("bad seed range " + part);
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    }
  }
  if (out.empty()) throw std::invalid_argument("no seeds given");
  return out;
}

template <typename T>
void take(const json& cfg, const char* key, CLI::App& app, const char* flag, T& target) {
  if (!cfg.contains(key)) return;
  const auto* opt = app.get_option_no_throw(flag);
  if (opt != nullptr && opt->count() > 0) return;
  target = cfg.at(key).get<T>();
}

void apply_config(CLI::App& app, Options& o) {
  if (o.config.empty()) return;
  const json cfg = read_json_file(o.config);
  if (!cfg.is_object()) throw std::invalid_argument("--config must hold a JSON object");
  take(cfg, "scenario", app, "--scenario", o.scenario);
  take(cfg, "n", app, "--n", o.n);
  take(cfg, "e", app, "--e", o.e);
  take(cfg, "m", app, "--m", o.m);
  take(cfg, "delta", app, "--delta", o.delta);
  take(cfg, "rho", app, "--rho", o.rho);
  take(cfg, "mu", app, "--mu", o.mu);
  take(cfg, "seed", app, "--seed", o.seed);
  take(cfg, "max_iter", app, "--max-iter", o.max_iter);
  take(cfg, "engine", app, "--engine", o.engine);
  take(cfg, "load_problem", app, "--load-problem", o.load_problem);
  take(cfg, "dump_problem", app, "--dump-problem", o.dump_problem);
  take(cfg, "out", app, "--out", o.out);
  take(cfg, "format", app, "--format", o.format);
  take(cfg, "param", app, "--param", o.param);
  take(cfg, "values", app, "--values", o.values);
  take(cfg, "threads", app, "--threads", o.threads);
  take(cfg, "averages_out", app, "--averages-out", o.averages_out);
  if (cfg.contains("seeds")) {
    const auto* opt = app.get_option_no_throw("--seeds");
    if (opt == nullptr || opt->count() == 0) {
      const auto& s = cfg.at("seeds");
      o.seeds = s.is_string() ? s.get<std::string>() : std::string();
      if (s.is_array()) {
        for (const auto& v : s) o.seeds += (o.seeds.empty() ? "" : ",") + std::to_string(v.get<std::uint64_t>());
      }
    }
  }
}

void add_problem_options(CLI::App& app, Options& o) {
  app.add_option("--config", o.config, "JSON file with any of these options");
  app.add_option("--scenario", o.scenario, "quadratic, quadratic_box or lasso");
  app.add_option("--n", o.n, "number of agents");
  app.add_option("--e", o.e, "number of edges");
  app.add_option("--m", o.m, "dimension of the decision variable");
  app.add_option("--delta", o.delta, "quantization resolution (0 disables quantization)");
  app.add_option("--rho", o.rho, "ADMM penalty parameter");
  app.add_option("--mu", o.mu, "mu > 1 in the rate constant");
  app.add_option("--seed", o.seed, "seed for graph and objectives");
  app.add_option("--max-iter", o.max_iter, "iteration cap");
  app.add_option("--engine", o.engine, "qc_admm or c_admm");
  app.add_option("--load-problem", o.load_problem, "read graph, objectives and init from JSON");
  app.add_option("--dump-problem", o.dump_problem, "write the instance used to JSON");
  app.add_option("--out", o.out, "output file (default stdout)");
  app.add_option("--format", o.format, "csv or json (default from --out extension)");
}

Problem resolve_problem(const Options& o) {
  if (!o.load_problem.empty()) return problem_from_json(read_json_file(o.load_problem));
  return make_problem(parse_scenario(o.scenario), o.n, o.e, o.m, o.seed);
}

void maybe_dump(const Options& o, const Problem& p) {
  if (!o.dump_problem.empty()) write_text_file(o.dump_problem, problem_to_json(p).dump(2) + "\n");
}

bool want_json(const Options& o) {
  if (!o.format.empty()) {
    if (o.format != "csv" && o.format != "json") throw std::invalid_argument("--format is csv or json");
    return o.format == "json";
  }
  return o.out.size() >= 5 && o.out.compare(o.out.size() - 5, 5, ".json") == 0;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(o.out, text);
  }
}

int cmd_run(const Options& o) {
  const Problem p = resolve_problem(o);
  maybe_dump(o, p);
  const GraphMatrices mats = build_matrices(p.graph);
  const SpectralData spec = spectral_quantities(mats);
  const ReferenceSolution ref = solve_reference(p.objectives);
  const ConvergenceCertificate cert = certify(p.graph, mats, spec, p.objectives, p.x0, p.alpha0,
                                              CertifyOptions{o.rho, o.delta, o.mu});
  const RunReference reference{ref.x_star, cert.reference};
  const Engine engine = parse_engine(o.engine);
  const RunRecord rec = run(engine, RunConfig{o.rho, o.delta, o.max_iter, true}, p.graph, mats,
                            p.objectives, p.x0, p.alpha0, &reference);
  std::ostringstream text;
  if (want_json(o)) {
    text << run_record_to_json(rec).dump(2) << '\n';
  } else {
    write_run_record_csv(rec, text);
  }
  emit(o, text.str());
  const auto& last = rec.rows.back();
  std::cerr << "iterations " << last.iter << ", final error " << format_double(last.rms_error)
            << ", bound " << format_double(cert.consensus_error_bound);
  if (rec.fixed_point_iteration) std::cerr << ", fixed point at k=" << *rec.fixed_point_iteration;
  std::cerr << '\n';
  return 0;
}

int cmd_sweep(const Options& o) {
  ExperimentConfig cfg;
  cfg.scenario = parse_scenario(o.scenario);
  cfg.n = o.n;
  cfg.m = o.m;
  cfg.edge_counts = {o.e};
  cfg.deltas = {o.delta};
  cfg.rhos = {o.rho};
  cfg.mu = o.mu;
  cfg.max_iterations = o.max_iter;
  cfg.engine = parse_engine(o.engine);
  cfg.threads = o.threads;
  cfg.seeds = o.seeds.empty() ? std::vector<std::uint64_t>{o.seed} : parse_seeds(o.seeds);
  if (!o.values.empty()) {
    if (o.param == "delta") {
      cfg.deltas = o.values;
    } else if (o.param == "rho") {
      cfg.rhos = o.values;
    } else if (o.param == "e") {
      cfg.edge_counts.clear();
      for (double v : o.values) cfg.edge_counts.push_back(static_cast<int>(v));
    } else {
      throw std::invalid_argument("--param is delta, rho or e");
    }
  }
  if (!o.load_problem.empty()) cfg.problem = problem_from_json(read_json_file(o.load_problem));
  if (!o.dump_problem.empty()) {
    maybe_dump(o, cfg.problem ? *cfg.problem
                              : make_problem(cfg.scenario, cfg.n, cfg.edge_counts.front(), cfg.m,
                                             cfg.seeds.front()));
  }

  const SweepSummary summary = run_experiment(cfg);
  std::ostringstream text;
  if (want_json(o)) {
    text << summary_to_json(summary).dump(2) << '\n';
  } else {
    write_summary_csv(summary, text);
  }
  emit(o, text.str());
  if (!o.averages_out.empty()) {
    write_text_file(o.averages_out, summary_to_json(summary).at("averages").dump(2) + "\n");
  }
  int failed = 0;
  for (const auto& r : summary.rows) {
    if (!r.error.empty()) {
      ++failed;
      std::cerr << "seed " << r.seed << " (e=" << r.e << ", delta=" << format_double(r.delta)
                << ", rho=" << format_double(r.rho) << ") failed: " << r.error << '\n';
    }
  }
  for (const auto& a : summary.averages) {
    std::cerr << "e=" << a.e << " delta=" << format_double(a.delta) << " rho=" << format_double(a.rho)
              << ": mean error " << format_double(a.mean_final_error) << ", mean iterations "
              << format_double(a.mean_iterations) << ", mean bound "
              << format_double(a.mean_error_bound) << '\n';
  }
  return failed == 0 ? 0 : 1;
}

int cmd_certify(const Options& o) {
  const Problem p = resolve_problem(o);
  maybe_dump(o, p);
  const GraphMatrices mats = build_matrices(p.graph);
  const SpectralData spec = spectral_quantities(mats);
  const ConvergenceCertificate cert = certify(p.graph, mats, spec, p.objectives, p.x0, p.alpha0,
                                              CertifyOptions{o.rho, o.delta, o.mu});
  emit(o, certificate_to_json(cert).dump(2) + "\n");
  return 0;
}

int cmd_graph(const Options& o) {
  const NetworkGraph g = random_connected_graph(o.n, o.e, o.seed);
  emit(o, graph_to_json(g).dump() + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized consensus ADMM simulator"};
  app.require_subcommand(1);
  Options opts;

  auto* run_cmd = app.add_subcommand("run", "one run, per-iteration trace as CSV or JSON");
  add_problem_options(*run_cmd, opts);

  auto* sweep_cmd = app.add_subcommand("sweep", "cartesian sweep over seeds and one parameter");
  add_problem_options(*sweep_cmd, opts);
  sweep_cmd->add_option("--param", opts.param, "delta, rho or e");
  sweep_cmd->add_option("--values", opts.values, "comma-separated sweep values")->delimiter(',');
  sweep_cmd->add_option("--seeds", opts.seeds, "seed list such as 1-50 or 3,5,9");
  sweep_cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
  sweep_cmd->add_option("--averages-out", opts.averages_out, "per-config averages as JSON");

  auto* certify_cmd = app.add_subcommand("certify", "print the convergence certificate as JSON");
  add_problem_options(*certify_cmd, opts);

  auto* graph_cmd = app.add_subcommand("graph", "print a random connected graph as JSON");
  graph_cmd->add_option("--config", opts.config, "JSON file with any of these options");
  graph_cmd->add_option("--n", opts.n, "number of agents");
  graph_cmd->add_option("--e", opts.e, "number of edges");
  graph_cmd->add_option("--seed", opts.seed, "seed");
  graph_cmd->add_option("--out", opts.out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    apply_config(*active, opts);
    if (active == run_cmd) return cmd_run(opts);
    if (active == sweep_cmd) return cmd_sweep(opts);
    if (active == certify_cmd) return cmd_certify(opts);
    return cmd_graph(opts);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
}
