#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "qcadmm/graph.hpp"
#include "qcadmm/objectives.hpp"
#include "qcadmm/quantizer.hpp"

namespace qcadmm {

/// sqrt(rho ||z||^2 + ||beta||^2 / rho), the norm induced by G = diag(rho I, I / rho).
double g_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& beta, double rho);

struct RateConstants {
  double delta_rate = 0.0;
  double eta = 0.0;
};

/// Linear-rate constants of C-ADMM for smooth strongly convex objectives:
///
///   delta = min{ (mu-1) s_min^2 / (mu S_+^2),
///                4 rho m_g s_min^2 / (rho^2 S_+^2 s_min^2 + mu M_g^2) }
///   eta   = sqrt(1 + delta) - 1
///
/// with S_+ = sigma_max(M+), s_min = smallest nonzero singular value of M-,
/// m_g = min_i m_gi and M_g = max_i M_gi. Requires mu > 1 and rho > 0.
RateConstants compute_eta(const SpectralData& spec, double m_g, double big_m_g, double rho,
                          double mu);

/// (Delta / 4) sqrt(rho M (sigma_max^2(M+) + sigma_max^2(M-))).
double compute_tau0(double delta_q, double rho, int m_dim, const SpectralData& spec);

/// (1/2 + 2 rho E / sum_i m_gi) sqrt(M) Delta.
double consensus_error_bound(double rho, int e_edges, double sum_m_g, int m_dim, double delta_q);

struct IterationBound {
  double omega = 0.0;
  long long iterations = 0;
};

/// Omega = max{ 3 sqrt(rho) sigma_max(M-) (1+eta)^2 (d0 + tau) / (eta Delta),
///              3 (1+eta) (d0 + tau) / (sqrt(2 rho E) eta Delta) }
/// and iterations = ceil(log_{1+eta} Omega), floored at 1. `tau` is tau0 for
/// smooth objectives and tau1 otherwise; d0 is the G-norm distance of the
/// initial auxiliary vector to the matching optimum. Throws for Delta <= 0.
IterationBound iteration_bound(double eta, double delta_q, double rho, int e_edges,
                               const SpectralData& spec, double u0_distance, double tau);

/// sqrt(M sum_i xi_i^2) / (m_g + 2 rho |N|_min): bound on the x-update gap
/// between f and its smooth part for l1 regularizers.
double delta_x_l1(std::span<const double> xi_weights, double m_g, double rho, int min_degree,
                  int m_dim);

/// Box-indicator counterpart, summed over agents:
///   max{ ||a0_i|| + t_i + 6 rho d_i Q0, (sqrt(M)+1) t_i + (4 + 6 sqrt(M)) rho d_i Q0 }
///   / (m_gi + 2 rho d_i)
double delta_x_box(std::span<const double> alpha0_norms, std::span<const double> t_bounds,
                   double rho, std::span<const int> degrees, double q0,
                   std::span<const double> m_g_list, int m_dim);

/// (Delta_x / 2 + Delta sqrt(M) / 4) sqrt(rho sigma_max^2(M+) + sigma_max^2(M-) / rho).
double compute_tau1(double delta_x, double delta_q, int m_dim, double rho, const SpectralData& spec);

/// Optimal auxiliary point u* = [z*; beta*] for a stationary point x* of sum_i g_i.
/// alpha* is the C-ADMM dual limit -grad g(1 (x) x*); see the README for the sign.
struct OptimalPoint {
  Eigen::VectorXd x_star;
  Eigen::VectorXd z_star;
  Eigen::VectorXd alpha_star;
  Eigen::VectorXd beta_star;
};

OptimalPoint optimal_point(const NetworkGraph& g, const GraphMatrices& m,
                           std::span<const LocalObjective> objs, const Eigen::VectorXd& x_star);

/// Minimal-norm beta with M- beta = alpha. Throws std::invalid_argument if
/// alpha is outside range(L-).
Eigen::VectorXd recover_beta(const Eigen::VectorXd& alpha, const GraphMatrices& m);

/// sup of ||grad g_i|| over agent i's box (exact: the maximum of a convex
/// function over a box sits at a vertex, and the norm splits by coordinate).
double box_gradient_bound(const QuadraticBox& q);

/// sup{ ||x|| : x in box } + Delta sqrt(M) / 2.
double box_radius_bound(const QuadraticBox& q, double delta_q);

struct ConvergenceCertificate {
  double mu = 1.5;
  double rho = 1.0;
  double delta_q = 0.0;
  bool smooth = true;
  SpectralData spectral;
  double m_g = 0.0;
  double big_m_g = 0.0;
  double sum_m_g = 0.0;
  double delta_rate = 0.0;
  double eta = 0.0;
  double tau0 = 0.0;
  /// General case only.
  std::optional<double> delta_x;
  std::optional<double> tau1;
  double consensus_error_bound = 0.0;
  /// Undefined without quantization.
  std::optional<double> omega;
  std::optional<long long> iteration_bound;
  /// ||u_Q^0 - u*||_G, against the smooth-only optimum in the general case.
  double u0_distance = 0.0;
  /// The optimum the distance is measured to.
  OptimalPoint reference;
};

struct CertifyOptions {
  double rho = 1.0;
  double delta_q = 0.0;
  double mu = 1.5;
};

/// Every closed-form certificate for one (graph, objectives, init, config).
/// x0 and alpha0 are stacked NM vectors; alpha0 must lie in range(L-).
ConvergenceCertificate certify(const NetworkGraph& g, const GraphMatrices& m,
                               const SpectralData& spec, std::span<const LocalObjective> objs,
                               const Eigen::VectorXd& x0, const Eigen::VectorXd& alpha0,
                               const CertifyOptions& options);

}  // namespace qcadmm
