#include "qcadmm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qcadmm/oracle.hpp"

namespace qcadmm {

double g_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& beta, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  return std::sqrt(rho * z.squaredNorm() + beta.squaredNorm() / rho);
}

RateConstants compute_eta(const SpectralData& spec, double m_g, double big_m_g, double rho,
                          double mu) {
  if (!(mu > 1.0)) throw std::invalid_argument("mu must exceed 1");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  const double s_min2 = spec.sigma_min_nonzero_m_minus * spec.sigma_min_nonzero_m_minus;
  const double s_plus2 = spec.sigma_max_m_plus * spec.sigma_max_m_plus;
  const double first = (mu - 1.0) * s_min2 / (mu * s_plus2);
  const double second =
      4.0 * rho * m_g * s_min2 / (rho * rho * s_plus2 * s_min2 + mu * big_m_g * big_m_g);
  RateConstants out;
  out.delta_rate = std::min(first, second);
  out.eta = std::sqrt(1.0 + out.delta_rate) - 1.0;
  return out;
}

double compute_tau0(double delta_q, double rho, int m_dim, const SpectralData& spec) {
  const double s2 = spec.sigma_max_m_plus * spec.sigma_max_m_plus +
                    spec.sigma_max_m_minus * spec.sigma_max_m_minus;
  return 0.25 * delta_q * std::sqrt(rho * m_dim * s2);
}

double consensus_error_bound(double rho, int e_edges, double sum_m_g, int m_dim, double delta_q) {
  if (!(sum_m_g > 0.0)) throw std::invalid_argument("sum of strong-convexity moduli must be positive");
  return (0.5 + rho * 2.0 * e_edges / sum_m_g) * std::sqrt(static_cast<double>(m_dim)) * delta_q;
}

IterationBound iteration_bound(double eta, double delta_q, double rho, int e_edges,
                               const SpectralData& spec, double u0_distance, double tau) {
  if (!(delta_q > 0.0)) throw std::invalid_argument("iteration bound requires quantization (delta > 0)");
  if (!(eta > 0.0)) throw std::invalid_argument("iteration bound requires eta > 0");
  const double reach = u0_distance + tau;
  const double first = 3.0 * std::sqrt(rho) * spec.sigma_max_m_minus * (1.0 + eta) * (1.0 + eta) *
                       reach / (eta * delta_q);
  const double second =
      3.0 * (1.0 + eta) * reach / (std::sqrt(2.0 * rho * e_edges) * eta * delta_q);
  IterationBound out;
  out.omega = std::max(first, second);
  const double k = std::ceil(std::log(out.omega) / std::log1p(eta));
  out.iterations = std::max(1LL, static_cast<long long>(k));
  return out;
}

double delta_x_l1(std::span<const double> xi_weights, double m_g, double rho, int min_degree,
                  int m_dim) {
  double sum_sq = 0.0;
  for (double xi : xi_weights) sum_sq += xi * xi;
  return std::sqrt(m_dim * sum_sq) / (m_g + 2.0 * rho * min_degree);
}

double delta_x_box(std::span<const double> alpha0_norms, std::span<const double> t_bounds,
                   double rho, std::span<const int> degrees, double q0,
                   std::span<const double> m_g_list, int m_dim) {
  const std::size_t n = alpha0_norms.size();
  if (t_bounds.size() != n || degrees.size() != n || m_g_list.size() != n) {
    throw std::invalid_argument("delta_x_box: per-agent lists differ in length");
  }
  const double root_m = std::sqrt(static_cast<double>(m_dim));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rd = rho * degrees[i];
    const double first = alpha0_norms[i] + t_bounds[i] + 6.0 * rd * q0;
    const double second = (root_m + 1.0) * t_bounds[i] + (4.0 + 6.0 * root_m) * rd * q0;
    total += std::max(first, second) / (m_g_list[i] + 2.0 * rd);
  }
  return total;
}

double compute_tau1(double delta_x, double delta_q, int m_dim, double rho, const SpectralData& spec) {
  const double s_plus2 = spec.sigma_max_m_plus * spec.sigma_max_m_plus;
  const double s_minus2 = spec.sigma_max_m_minus * spec.sigma_max_m_minus;
  return (0.5 * delta_x + 0.25 * delta_q * std::sqrt(static_cast<double>(m_dim))) *
         std::sqrt(rho * s_plus2 + s_minus2 / rho);
}

Eigen::VectorXd recover_beta(const Eigen::VectorXd& alpha, const GraphMatrices& m) {
  if (!is_in_column_space_l_minus(alpha, m)) {
    throw std::invalid_argument("alpha is not in the column space of L-");
  }
  const int m_dim = static_cast<int>(alpha.size() / m.n_agents);
  Eigen::VectorXd beta(static_cast<Eigen::Index>(2) * m.n_edges * m_dim);
  Eigen::Map<Eigen::MatrixXd>(beta.data(), m_dim, 2 * m.n_edges) =
      Eigen::Map<const Eigen::MatrixXd>(alpha.data(), m_dim, m.n_agents) *
      m.m_minus_pinv.transpose();
  return beta;
}

OptimalPoint optimal_point(const NetworkGraph& g, const GraphMatrices& m,
                           std::span<const LocalObjective> objs, const Eigen::VectorXd& x_star) {
  const int n = g.n_agents();
  if (static_cast<int>(objs.size()) != n) throw std::invalid_argument("one objective per agent");
  const int m_dim = static_cast<int>(x_star.size());
  OptimalPoint out;
  out.x_star = x_star;
  const Eigen::VectorXd stacked = x_star.replicate(n, 1);
  out.z_star = apply_m_plus_t(m, stacked, m_dim) * 0.5;
  out.alpha_star.resize(stacked.size());
  for (int i = 0; i < n; ++i) out.alpha_star.segment(i * m_dim, m_dim) = -objs[i].gradient_smooth(x_star);
  out.beta_star = recover_beta(out.alpha_star, m);
  return out;
}

double box_gradient_bound(const QuadraticBox& q) {
  const Eigen::ArrayXd at_lo = 2.0 * q.a * q.lo.array() + q.b.array();
  const Eigen::ArrayXd at_hi = 2.0 * q.a * q.hi.array() + q.b.array();
  return std::sqrt(at_lo.square().max(at_hi.square()).sum());
}

double box_radius_bound(const QuadraticBox& q, double delta_q) {
  const double far = q.lo.cwiseAbs().cwiseMax(q.hi.cwiseAbs()).norm();
  return far + 0.5 * delta_q * std::sqrt(static_cast<double>(q.b.size()));
}

ConvergenceCertificate certify(const NetworkGraph& g, const GraphMatrices& m,
                               const SpectralData& spec, std::span<const LocalObjective> objs,
                               const Eigen::VectorXd& x0, const Eigen::VectorXd& alpha0,
                               const CertifyOptions& options) {
  const int n = g.n_agents();
  if (static_cast<int>(objs.size()) != n) throw std::invalid_argument("one objective per agent");
  const int m_dim = objs.front().dim();
  if (x0.size() != static_cast<Eigen::Index>(n) * m_dim || alpha0.size() != x0.size()) {
    throw std::invalid_argument("initial vectors must have length N*M");
  }
  const QuantizerConfig quantizer{options.delta_q};
  validate(quantizer);

  ConvergenceCertificate cert;
  cert.mu = options.mu;
  cert.rho = options.rho;
  cert.delta_q = options.delta_q;
  cert.spectral = spec;
  cert.m_g = objs.front().m_g();
  cert.big_m_g = objs.front().big_m_g();
  for (const auto& obj : objs) {
    cert.m_g = std::min(cert.m_g, obj.m_g());
    cert.big_m_g = std::max(cert.big_m_g, obj.big_m_g());
    cert.sum_m_g += obj.m_g();
    if (obj.has_nonsmooth_part()) cert.smooth = false;
  }

  const auto rate = compute_eta(spec, cert.m_g, cert.big_m_g, options.rho, options.mu);
  cert.delta_rate = rate.delta_rate;
  cert.eta = rate.eta;
  cert.tau0 = compute_tau0(options.delta_q, options.rho, m_dim, spec);
  cert.consensus_error_bound =
      consensus_error_bound(options.rho, g.n_edges(), cert.sum_m_g, m_dim, options.delta_q);

  // The smooth-only optimum coincides with x* when there is no h.
  const ReferenceSolution smooth_ref = solve_reference(objs, /*smooth_only=*/true);
  cert.reference = optimal_point(g, m, objs, smooth_ref.x_star);

  const Eigen::VectorXd z0 = 0.5 * apply_m_plus_t(m, quantize(x0, quantizer), m_dim);
  const Eigen::VectorXd beta0 = recover_beta(alpha0, m);
  cert.u0_distance =
      g_norm(z0 - cert.reference.z_star, beta0 - cert.reference.beta_star, options.rho);

  double tau = cert.tau0;
  if (!cert.smooth) {
    const bool all_l1 = std::all_of(objs.begin(), objs.end(), [](const LocalObjective& o) {
      return std::holds_alternative<LeastSquaresL1>(o.data()) ||
             std::holds_alternative<ScaledQuadratic>(o.data());
    });
    const bool all_box = std::all_of(objs.begin(), objs.end(), [](const LocalObjective& o) {
      return std::holds_alternative<QuadraticBox>(o.data());
    });
    if (all_l1) {
      std::vector<double> xi;
      for (const auto& o : objs) {
        const auto* l = std::get_if<LeastSquaresL1>(&o.data());
        xi.push_back(l != nullptr ? l->xi : 0.0);
      }
      cert.delta_x = delta_x_l1(xi, cert.m_g, options.rho, g.min_degree(), m_dim);
    } else if (all_box) {
      std::vector<double> a0_norms, t_bounds, m_gs;
      std::vector<int> degrees;
      double q0 = 0.0;
      for (int i = 0; i < n; ++i) {
        const auto& q = std::get<QuadraticBox>(objs[i].data());
        a0_norms.push_back(alpha0.segment(i * m_dim, m_dim).norm());
        t_bounds.push_back(box_gradient_bound(q));
        m_gs.push_back(objs[i].m_g());
        degrees.push_back(g.degree(i));
        q0 = std::max(q0, box_radius_bound(q, options.delta_q));
      }
      cert.delta_x = delta_x_box(a0_norms, t_bounds, options.rho, degrees, q0, m_gs, m_dim);
    } else {
      throw std::invalid_argument("no x-update gap bound for mixed l1/box objectives");
    }
    cert.tau1 = compute_tau1(*cert.delta_x, options.delta_q, m_dim, options.rho, spec);
    tau = *cert.tau1;
  }

  if (options.delta_q > 0.0) {
    const auto bound = iteration_bound(cert.eta, options.delta_q, options.rho, g.n_edges(), spec,
                                       cert.u0_distance, tau);
    cert.omega = bound.omega;
    cert.iteration_bound = bound.iterations;
  }
  return cert;
}

}  // namespace qcadmm
