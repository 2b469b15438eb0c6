#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qcadmm/analysis.hpp"
#include "qcadmm/graph.hpp"
#include "qcadmm/objectives.hpp"
#include "qcadmm/quantizer.hpp"

namespace qcadmm {

struct AgentState {
  Eigen::VectorXd x;      // unquantized iterate, kept for diagnostics
  Eigen::VectorXd x_q;    // what the agent transmits
  Eigen::VectorXd alpha;
};

struct NetworkState {
  std::vector<AgentState> agents;
  long long iteration = 0;
  Eigen::VectorXd beta_q;  // 2EM, alpha = M- beta
  Eigen::VectorXd z_q;     // 2EM, 1/2 M+^T x_q

  int m_dim() const { return agents.empty() ? 0 : static_cast<int>(agents.front().x.size()); }
  Eigen::VectorXd stacked_x() const;
  Eigen::VectorXd stacked_x_q() const;
  Eigen::VectorXd stacked_alpha() const;
};

struct RunConfig {
  double rho = 1.0;
  double delta = 0.0;
  long long max_iterations = 1000;
  bool detect_fixed_point = true;
};

enum class Engine { CAdmm, QcAdmm };

/// Throws std::invalid_argument unless alpha0 lies in range(L-).
NetworkState init_state(const Eigen::VectorXd& x0, const Eigen::VectorXd& alpha0,
                        const NetworkGraph& g, const GraphMatrices& m, const QuantizerConfig& q);

/// One synchronous C-ADMM sweep on the unquantized values.
NetworkState c_admm_step(const NetworkState& s, const NetworkGraph& g, const GraphMatrices& m,
                         std::span<const LocalObjective> objs, double rho,
                         const XUpdateOptions& options = {});

/// One synchronous QC-ADMM sweep: agents read their own and their neighbors'
/// quantized values and transmit Q(x^{k+1}).
NetworkState qc_admm_step(const NetworkState& s, const NetworkGraph& g, const GraphMatrices& m,
                          std::span<const LocalObjective> objs, double rho,
                          const QuantizerConfig& q, const XUpdateOptions& options = {});

/// Exact agreement of every neighbor pair's transmitted values.
bool in_consensus(const NetworkState& s, const NetworkGraph& g);

/// The three-block ADMM on Ax + Bz = 0 with dense A = [A1; A2], B = [-I; -I],
/// started from z0 = 1/2 M+^T x0 and lambda0 = [beta0; -beta0].
class CentralizedAdmm {
 public:
  CentralizedAdmm(const NetworkGraph& g, const GraphMatrices& m,
                  std::span<const LocalObjective> objs, double rho, const Eigen::VectorXd& x0,
                  const Eigen::VectorXd& alpha0);

  void step(const XUpdateOptions& options = {});

  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& z() const { return z_; }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::MatrixXd& b() const { return b_; }

 private:
  std::vector<const LocalObjective*> objs_;
  std::vector<int> degrees_;
  double rho_;
  int m_dim_;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd b_;
  Eigen::VectorXd x_;
  Eigen::VectorXd z_;
  Eigen::VectorXd lambda_;
};

/// Error columns are measured against x_star; the G-norm column against u_star
/// when given (pass the smooth-only optimum for objectives with an h part).
struct RunReference {
  Eigen::VectorXd x_star;
  std::optional<OptimalPoint> u_star;
};

/// Missing metrics are NaN.
struct RunRow {
  long long iter = 0;
  double max_agent_error = 0.0;
  double rms_error = 0.0;
  double g_norm_u_error = 0.0;
  double alpha_sum_norm = 0.0;
  bool consensus = false;
  bool fixed_point = false;
  /// ||u_e^{k-1}||_G for the step that produced this row; NaN at k = 0.
  double u_e_norm = 0.0;
};

struct RunRecord {
  std::vector<RunRow> rows;
  std::optional<long long> fixed_point_iteration;
  NetworkState final_state;
};

/// Rows k = 0 (initial state) up to the last step. With QC-ADMM and
/// detect_fixed_point the run stops at the first k where x_q^k == x_q^{k-1}
/// exactly and x_q^{k-1} is in exact consensus (so alpha stops moving too).
RunRecord run(Engine engine, const RunConfig& config, const NetworkGraph& g,
              const GraphMatrices& m, std::span<const LocalObjective> objs,
              const Eigen::VectorXd& x0, const Eigen::VectorXd& alpha0,
              const RunReference* reference = nullptr, const XUpdateOptions& options = {});

}  // namespace qcadmm
