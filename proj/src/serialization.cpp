#include "qcadmm/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace qcadmm {

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vec_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vec_to_json(m.row(r).transpose()));
  return out;
}

Eigen::MatrixXd mat_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a nonempty list of rows");
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != cols) throw std::invalid_argument("ragged matrix rows");
    m.row(static_cast<Eigen::Index>(r)) = vec_from_json(j[r]).transpose();
  }
  return m;
}

// JSON has no NaN; absent metrics become null.
json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T>
json opt_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from_json(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

std::string cell(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json graph_to_json(const NetworkGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.i, e.j});
  return {{"n", g.n_agents()}, {"edges", edges}};
}

NetworkGraph graph_from_json(const json& j) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("edge must be a pair [i, j]");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return NetworkGraph(j.at("n").get<int>(), edges);
}

json objective_to_json(const LocalObjective& obj) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ScaledQuadratic>) {
          return {{"type", "quadratic"}, {"a", d.a}, {"b", vec_to_json(d.b)}};
        } else if constexpr (std::is_same_v<T, QuadraticBox>) {
          return {{"type", "quadratic_box"}, {"a", d.a}, {"b", vec_to_json(d.b)},
                  {"lo", vec_to_json(d.lo)}, {"hi", vec_to_json(d.hi)}};
        } else {
          return {{"type", "lasso"}, {"a_mat", mat_to_json(d.a_mat)}, {"y", vec_to_json(d.y_vec)},
                  {"xi", d.xi}};
        }
      },
      obj.data());
}

LocalObjective objective_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "quadratic") {
    return LocalObjective(ScaledQuadratic{j.at("a").get<double>(), vec_from_json(j.at("b"))});
  }
  if (type == "quadratic_box") {
    return LocalObjective(QuadraticBox{j.at("a").get<double>(), vec_from_json(j.at("b")),
                                       vec_from_json(j.at("lo")), vec_from_json(j.at("hi"))});
  }
  if (type == "lasso") {
    return LocalObjective(LeastSquaresL1{mat_from_json(j.at("a_mat")), vec_from_json(j.at("y")),
                                         j.at("xi").get<double>()});
  }
  throw std::invalid_argument("unknown objective type: " + type);
}

json problem_to_json(const Problem& p) {
  json objs = json::array();
  for (const auto& o : p.objectives) objs.push_back(objective_to_json(o));
  return {{"graph", graph_to_json(p.graph)},
          {"objectives", objs},
          {"x0", vec_to_json(p.x0)},
          {"alpha0", vec_to_json(p.alpha0)}};
}

Problem problem_from_json(const json& j) {
  NetworkGraph g = graph_from_json(j.at("graph"));
  std::vector<LocalObjective> objs;
  for (const auto& o : j.at("objectives")) objs.push_back(objective_from_json(o));
  if (static_cast<int>(objs.size()) != g.n_agents()) {
    throw std::invalid_argument("problem needs one objective per agent");
  }
  const Eigen::Index len = static_cast<Eigen::Index>(g.n_agents()) * objs.front().dim();
  Eigen::VectorXd x0 = j.contains("x0") ? vec_from_json(j.at("x0")) : Eigen::VectorXd::Zero(len);
  Eigen::VectorXd alpha0 =
      j.contains("alpha0") ? vec_from_json(j.at("alpha0")) : Eigen::VectorXd::Zero(len);
  if (x0.size() != len || alpha0.size() != len) {
    throw std::invalid_argument("x0 and alpha0 must have length N*M");
  }
  return Problem{std::move(g), std::move(objs), std::move(x0), std::move(alpha0)};
}

json certificate_to_json(const ConvergenceCertificate& c) {
  return {
      {"mu", c.mu},
      {"rho", c.rho},
      {"delta", c.delta_q},
      {"smooth", c.smooth},
      {"sigma_max_m_plus", c.spectral.sigma_max_m_plus},
      {"sigma_max_m_minus", c.spectral.sigma_max_m_minus},
      {"sigma_min_nonzero_m_minus", c.spectral.sigma_min_nonzero_m_minus},
      {"m_g", c.m_g},
      {"big_m_g", c.big_m_g},
      {"sum_m_g", c.sum_m_g},
      {"delta_rate", c.delta_rate},
      {"eta", c.eta},
      {"tau0", c.tau0},
      {"delta_x", opt_to_json(c.delta_x)},
      {"tau1", opt_to_json(c.tau1)},
      {"consensus_error_bound", c.consensus_error_bound},
      {"omega", opt_to_json(c.omega)},
      {"iteration_bound", opt_to_json(c.iteration_bound)},
      {"u0_distance", c.u0_distance},
      {"x_star_smooth", vec_to_json(c.reference.x_star)},
  };
}

void write_run_record_csv(const RunRecord& rec, std::ostream& out) {
  out << "iter,max_agent_error,rms_error,g_norm_u_error,alpha_sum_norm,consensus,fixed_point\n";
  for (const auto& r : rec.rows) {
    out << r.iter << ',' << cell(r.max_agent_error) << ',' << cell(r.rms_error) << ','
        << cell(r.g_norm_u_error) << ',' << cell(r.alpha_sum_norm) << ',' << (r.consensus ? 1 : 0)
        << ',' << (r.fixed_point ? 1 : 0) << '\n';
  }
}

json run_record_to_json(const RunRecord& rec) {
  json rows = json::array();
  for (const auto& r : rec.rows) {
    rows.push_back({{"iter", r.iter},
                    {"max_agent_error", num_or_null(r.max_agent_error)},
                    {"rms_error", num_or_null(r.rms_error)},
                    {"g_norm_u_error", num_or_null(r.g_norm_u_error)},
                    {"alpha_sum_norm", num_or_null(r.alpha_sum_norm)},
                    {"consensus", r.consensus},
                    {"fixed_point", r.fixed_point}});
  }
  return {{"rows", rows}, {"fixed_point_iteration", opt_to_json(rec.fixed_point_iteration)}};
}

void write_summary_csv(const SweepSummary& s, std::ostream& out) {
  out << "scenario,n,e,m,delta,rho,seed,final_error,iters_to_fixed_point,error_bound,iter_bound,"
         "bound_ok\n";
  for (const auto& r : s.rows) {
    const bool failed = !r.error.empty();
    out << r.scenario << ',' << r.n << ',' << r.e << ',' << r.m << ',' << format_double(r.delta)
        << ',' << format_double(r.rho) << ',' << r.seed << ','
        << (failed ? std::string() : cell(r.final_error)) << ','
        << (r.iters_to_fixed_point ? std::to_string(*r.iters_to_fixed_point) : std::string())
        << ',' << (failed ? std::string() : cell(r.error_bound)) << ','
        << (r.iter_bound ? std::to_string(*r.iter_bound) : std::string()) << ','
        << (r.bound_ok ? 1 : 0) << '\n';
  }
}

json summary_to_json(const SweepSummary& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"scenario", r.scenario},
                    {"n", r.n},
                    {"e", r.e},
                    {"m", r.m},
                    {"delta", r.delta},
                    {"rho", r.rho},
                    {"seed", r.seed},
                    {"final_error", num_or_null(r.final_error)},
                    {"iters_to_fixed_point", opt_to_json(r.iters_to_fixed_point)},
                    {"iterations_run", r.iterations_run},
                    {"error_bound", num_or_null(r.error_bound)},
                    {"iter_bound", opt_to_json(r.iter_bound)},
                    {"bound_ok", r.bound_ok},
                    {"eta", num_or_null(r.eta)},
                    {"tau", num_or_null(r.tau)},
                    {"delta_x", opt_to_json(r.delta_x)},
                    {"u0_distance", num_or_null(r.u0_distance)},
                    {"error", r.error}});
  }
  json averages = json::array();
  for (const auto& a : s.averages) {
    averages.push_back({{"e", a.e},
                        {"delta", a.delta},
                        {"rho", a.rho},
                        {"runs", a.runs},
                        {"failed", a.failed},
                        {"mean_final_error", a.mean_final_error},
                        {"mean_iterations", a.mean_iterations},
                        {"mean_error_bound", a.mean_error_bound},
                        {"mean_iter_bound", opt_to_json(a.mean_iter_bound)},
                        {"fixed_point_fraction", a.fixed_point_fraction},
                        {"all_bound_ok", a.all_bound_ok}});
  }
  return {{"rows", rows}, {"averages", averages}};
}

SweepSummary summary_from_json(const json& j) {
  auto num = [](const json& obj, const char* key) {
    const auto& v = obj.at(key);
    return v.is_null() ? std::nan("") : v.get<double>();
  };
  SweepSummary s;
  for (const auto& r : j.at("rows")) {
    SweepRow row;
    row.scenario = r.at("scenario").get<std::string>();
    row.n = r.at("n").get<int>();
    row.e = r.at("e").get<int>();
    row.m = r.at("m").get<int>();
    row.delta = r.at("delta").get<double>();
    row.rho = r.at("rho").get<double>();
    row.seed = r.at("seed").get<std::uint64_t>();
    row.final_error = num(r, "final_error");
    row.iters_to_fixed_point = opt_from_json<long long>(r, "iters_to_fixed_point");
    row.iterations_run = r.at("iterations_run").get<long long>();
    row.error_bound = num(r, "error_bound");
    row.iter_bound = opt_from_json<long long>(r, "iter_bound");
    row.bound_ok = r.at("bound_ok").get<bool>();
    row.eta = num(r, "eta");
    row.tau = num(r, "tau");
    row.delta_x = opt_from_json<double>(r, "delta_x");
    row.u0_distance = num(r, "u0_distance");
    row.error = r.at("error").get<std::string>();
    s.rows.push_back(std::move(row));
  }
  for (const auto& a : j.at("averages")) {
    SweepAverage avg;
    avg.e = a.at("e").get<int>();
    avg.delta = a.at("delta").get<double>();
    avg.rho = a.at("rho").get<double>();
    avg.runs = a.at("runs").get<int>();
    avg.failed = a.at("failed").get<int>();
    avg.mean_final_error = a.at("mean_final_error").get<double>();
    avg.mean_iterations = a.at("mean_iterations").get<double>();
    avg.mean_error_bound = a.at("mean_error_bound").get<double>();
    avg.mean_iter_bound = opt_from_json<double>(a, "mean_iter_bound");
    avg.fixed_point_fraction = a.at("fixed_point_fraction").get<double>();
    avg.all_bound_ok = a.at("all_bound_ok").get<bool>();
    s.averages.push_back(avg);
  }
  return s;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace qcadmm
