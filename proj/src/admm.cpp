#include "qcadmm/admm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qcadmm {

namespace {

Eigen::VectorXd stack(const NetworkState& s, Eigen::VectorXd AgentState::*field) {
  const int m_dim = s.m_dim();
  Eigen::VectorXd out(static_cast<Eigen::Index>(s.agents.size()) * m_dim);
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    out.segment(static_cast<Eigen::Index>(i) * m_dim, m_dim) = s.agents[i].*field;
  }
  return out;
}

void check_objectives(const NetworkGraph& g, std::span<const LocalObjective> objs, int m_dim) {
  if (static_cast<int>(objs.size()) != g.n_agents()) {
    throw std::invalid_argument("one objective per agent");
  }
  for (const auto& obj : objs) {
    if (obj.dim() != m_dim) throw std::invalid_argument("objective dimension does not match state");
  }
}

// Shared by both engines so that an identity quantizer reproduces C-ADMM
// bit for bit.
NetworkState sweep(const NetworkState& s, const NetworkGraph& g, const GraphMatrices& m,
                   std::span<const LocalObjective> objs, double rho, const QuantizerConfig& q,
                   bool read_quantized, const XUpdateOptions& options) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  const int n = g.n_agents();
  const int m_dim = s.m_dim();
  check_objectives(g, objs, m_dim);

  NetworkState next;
  next.iteration = s.iteration + 1;
  next.agents.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& own = read_quantized ? s.agents[i].x_q : s.agents[i].x;
    const int d = g.degree(i);
    Eigen::VectorXd hood = d * own;
    for (int j : g.neighbors(i)) hood += read_quantized ? s.agents[j].x_q : s.agents[j].x;
    next.agents[i].x =
        solve_x_update(objs[i], rho, d, hood, s.agents[i].alpha, &s.agents[i].x, options);
    next.agents[i].x_q = quantize(next.agents[i].x, q);
  }
  for (int i = 0; i < n; ++i) {
    // Sum of differences rather than d x_i - sum x_j: exactly zero at consensus.
    Eigen::VectorXd diff = Eigen::VectorXd::Zero(m_dim);
    for (int j : g.neighbors(i)) diff += next.agents[i].x_q - next.agents[j].x_q;
    next.agents[i].alpha = s.agents[i].alpha + rho * diff;
  }
  const Eigen::VectorXd xq = next.stacked_x_q();
  next.beta_q = s.beta_q + 0.5 * rho * apply_m_minus_t(m, xq, m_dim);
  next.z_q = 0.5 * apply_m_plus_t(m, xq, m_dim);
  return next;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

Eigen::VectorXd NetworkState::stacked_x() const { return stack(*this, &AgentState::x); }
Eigen::VectorXd NetworkState::stacked_x_q() const { return stack(*this, &AgentState::x_q); }
Eigen::VectorXd NetworkState::stacked_alpha() const { return stack(*this, &AgentState::alpha); }

NetworkState init_state(const Eigen::VectorXd& x0, const Eigen::VectorXd& alpha0,
                        const NetworkGraph& g, const GraphMatrices& m, const QuantizerConfig& q) {
  const int n = g.n_agents();
  if (x0.size() == 0 || x0.size() % n != 0) throw std::invalid_argument("x0 must have length N*M");
  if (alpha0.size() != x0.size()) throw std::invalid_argument("alpha0 must have length N*M");
  validate(q);
  const int m_dim = static_cast<int>(x0.size() / n);
  NetworkState s;
  s.beta_q = recover_beta(alpha0, m);
  s.agents.resize(n);
  for (int i = 0; i < n; ++i) {
    s.agents[i].x = x0.segment(i * m_dim, m_dim);
    s.agents[i].x_q = quantize(s.agents[i].x, q);
    s.agents[i].alpha = alpha0.segment(i * m_dim, m_dim);
  }
  s.z_q = 0.5 * apply_m_plus_t(m, s.stacked_x_q(), m_dim);
  return s;
}

NetworkState c_admm_step(const NetworkState& s, const NetworkGraph& g, const GraphMatrices& m,
                         std::span<const LocalObjective> objs, double rho,
                         const XUpdateOptions& options) {
  return sweep(s, g, m, objs, rho, QuantizerConfig{}, false, options);
}

NetworkState qc_admm_step(const NetworkState& s, const NetworkGraph& g, const GraphMatrices& m,
                          std::span<const LocalObjective> objs, double rho,
                          const QuantizerConfig& q, const XUpdateOptions& options) {
  validate(q);
  return sweep(s, g, m, objs, rho, q, true, options);
}

bool in_consensus(const NetworkState& s, const NetworkGraph& g) {
  for (const auto& e : g.edges()) {
    if (s.agents[e.i].x_q != s.agents[e.j].x_q) return false;
  }
  return true;
}

CentralizedAdmm::CentralizedAdmm(const NetworkGraph& g, const GraphMatrices& m,
                                 std::span<const LocalObjective> objs, double rho,
                                 const Eigen::VectorXd& x0, const Eigen::VectorXd& alpha0)
    : rho_(rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  const int n = g.n_agents();
  if (x0.size() == 0 || x0.size() % n != 0) throw std::invalid_argument("x0 must have length N*M");
  m_dim_ = static_cast<int>(x0.size() / n);
  check_objectives(g, objs, m_dim_);
  for (const auto& obj : objs) objs_.push_back(&obj);
  for (int i = 0; i < n; ++i) degrees_.push_back(g.degree(i));

  const auto arcs = g.arcs();
  const int n_arcs = static_cast<int>(arcs.size());
  Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(n_arcs, n);
  Eigen::MatrixXd a2 = Eigen::MatrixXd::Zero(n_arcs, n);
  for (int q = 0; q < n_arcs; ++q) {
    a1(q, arcs[q].tail) = 1.0;
    a2(q, arcs[q].head) = 1.0;
  }
  Eigen::MatrixXd a_base(2 * n_arcs, n);
  a_base << a1, a2;
  a_ = kron_identity(a_base, m_dim_);
  const Eigen::Index zm = static_cast<Eigen::Index>(n_arcs) * m_dim_;
  b_.resize(2 * zm, zm);
  b_ << -Eigen::MatrixXd::Identity(zm, zm), -Eigen::MatrixXd::Identity(zm, zm);

  // A^T A = 2 diag(degrees) (x) I_M, so the x-update splits into per-agent
  // problems of the same shape as the decentralized one.
  const Eigen::MatrixXd ata = a_.transpose() * a_;
  if (!ata.isDiagonal()) throw std::logic_error("A^T A is not block diagonal");

  x_ = x0;
  z_ = 0.5 * apply_m_plus_t(m, x0, m_dim_);
  const Eigen::VectorXd beta0 = recover_beta(alpha0, m);
  lambda_.resize(2 * zm);
  lambda_ << beta0, -beta0;
}

void CentralizedAdmm::step(const XUpdateOptions& options) {
  const int n = static_cast<int>(objs_.size());
  // Stationarity of L_rho in x: grad f + A^T lambda + rho A^T A x + rho A^T B z = 0.
  const Eigen::VectorXd at_lambda = a_.transpose() * lambda_;
  const Eigen::VectorXd at_bz = a_.transpose() * (b_ * z_);
  Eigen::VectorXd x_next(x_.size());
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd hood = -at_bz.segment(i * m_dim_, m_dim_);
    const Eigen::VectorXd xi = x_.segment(i * m_dim_, m_dim_);
    x_next.segment(i * m_dim_, m_dim_) = solve_x_update(
        *objs_[i], rho_, degrees_[i], hood, at_lambda.segment(i * m_dim_, m_dim_), &xi, options);
  }
  x_ = x_next;
  // B^T B = 2 I.
  z_ = -(b_.transpose() * lambda_ + rho_ * b_.transpose() * (a_ * x_)) / (2.0 * rho_);
  lambda_ += rho_ * (a_ * x_ + b_ * z_);
}

RunRecord run(Engine engine, const RunConfig& config, const NetworkGraph& g,
              const GraphMatrices& m, std::span<const LocalObjective> objs,
              const Eigen::VectorXd& x0, const Eigen::VectorXd& alpha0,
              const RunReference* reference, const XUpdateOptions& options) {
  if (!(config.rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  const QuantizerConfig q{engine == Engine::QcAdmm ? config.delta : 0.0};
  validate(q);
  const int n = g.n_agents();

  NetworkState state = init_state(x0, alpha0, g, m, q);
  const int m_dim = state.m_dim();
  if (reference != nullptr && reference->x_star.size() != m_dim) {
    throw std::invalid_argument("reference has the wrong dimension");
  }

  auto measure = [&](const NetworkState& s) {
    RunRow row;
    row.iter = s.iteration;
    row.max_agent_error = nan();
    row.rms_error = nan();
    row.g_norm_u_error = nan();
    row.u_e_norm = nan();
    if (reference != nullptr) {
      double worst = 0.0;
      double sum_sq = 0.0;
      for (const auto& agent : s.agents) {
        const double err = (agent.x_q - reference->x_star).norm();
        worst = std::max(worst, err);
        sum_sq += err * err;
      }
      row.max_agent_error = worst;
      row.rms_error = std::sqrt(sum_sq / n);
      if (reference->u_star) {
        row.g_norm_u_error = g_norm(s.z_q - reference->u_star->z_star,
                                    s.beta_q - reference->u_star->beta_star, config.rho);
      }
    }
    Eigen::VectorXd alpha_sum = Eigen::VectorXd::Zero(m_dim);
    for (const auto& agent : s.agents) alpha_sum += agent.alpha;
    row.alpha_sum_norm = alpha_sum.norm();
    row.consensus = in_consensus(s, g);
    return row;
  };

  RunRecord record;
  record.rows.push_back(measure(state));
  for (long long k = 1; k <= config.max_iterations; ++k) {
    NetworkState next = engine == Engine::QcAdmm
                            ? qc_admm_step(state, g, m, objs, config.rho, q, options)
                            : c_admm_step(state, g, m, objs, config.rho, options);
    RunRow row = measure(next);
    row.fixed_point = record.rows.back().consensus && next.stacked_x_q() == state.stacked_x_q();
    const Eigen::VectorXd e = next.stacked_x_q() - next.stacked_x();
    row.u_e_norm = g_norm(0.5 * apply_m_plus_t(m, e, m_dim),
                          0.5 * config.rho * apply_m_minus_t(m, e, m_dim), config.rho);
    record.rows.push_back(row);
    state = std::move(next);
    if (row.fixed_point && !record.fixed_point_iteration) record.fixed_point_iteration = k;
    if (row.fixed_point && engine == Engine::QcAdmm && config.detect_fixed_point) break;
  }
  record.final_state = std::move(state);
  return record;
}

}  // namespace qcadmm
