#include "qcadmm/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

#include "qcadmm/errors.hpp"

namespace qcadmm {

namespace {

// Aggregated data of sum_i f_i. Every supported g_i is quadratic, so the sum
// is 1/2 x^T H x + lin^T x + const, and sum_i h_i is xi_total ||x||_1 plus the
// indicator of [lo, hi].
struct Aggregate {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear;
  double xi_total = 0.0;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  double lipschitz_sum = 0.0;
  bool quadratic_only = true;
};

Aggregate aggregate(std::span<const LocalObjective> objs, bool smooth_only) {
  if (objs.empty()) throw std::invalid_argument("no objectives");
  const int m = objs.front().dim();
  Aggregate agg;
  agg.hessian = Eigen::MatrixXd::Zero(m, m);
  agg.linear = Eigen::VectorXd::Zero(m);
  agg.lo = Eigen::VectorXd::Constant(m, -std::numeric_limits<double>::infinity());
  agg.hi = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
  for (const auto& obj : objs) {
    if (obj.dim() != m) throw std::invalid_argument("objectives disagree on dimension");
    agg.lipschitz_sum += obj.big_m_g();
    if (const auto* q = std::get_if<ScaledQuadratic>(&obj.data())) {
      agg.hessian.diagonal().array() += 2.0 * q->a;
      agg.linear += q->b;
    } else if (const auto* qb = std::get_if<QuadraticBox>(&obj.data())) {
      agg.hessian.diagonal().array() += 2.0 * qb->a;
      agg.linear += qb->b;
      if (!smooth_only) {
        agg.lo = agg.lo.cwiseMax(qb->lo);
        agg.hi = agg.hi.cwiseMin(qb->hi);
      }
    } else {
      const auto& l = std::get<LeastSquaresL1>(obj.data());
      agg.quadratic_only = false;
      agg.hessian += obj.gram();
      agg.linear -= obj.a_t_y();
      if (!smooth_only) agg.xi_total += l.xi;
    }
  }
  if ((agg.lo.array() > agg.hi.array()).any()) {
    throw std::invalid_argument("box constraints have an empty intersection");
  }
  return agg;
}

Eigen::VectorXd summed_prox(const Aggregate& agg, const Eigen::VectorXd& v, double step) {
  const double t = agg.xi_total * step;
  Eigen::VectorXd out = v.unaryExpr([t](double u) {
    if (u > t) return u - t;
    if (u < -t) return u + t;
    return 0.0;
  });
  // In one dimension prox(l1 + interval indicator) = clamp(soft-threshold).
  return out.cwiseMax(agg.lo).cwiseMin(agg.hi);
}

double relative_residual(std::span<const LocalObjective> objs, const Aggregate& agg,
                         const Eigen::VectorXd& x) {
  double scale = 1.0;
  for (const auto& obj : objs) scale += obj.gradient_smooth(x).norm();
  const Eigen::VectorXd grad = agg.hessian * x + agg.linear;
  // With no non-smooth part the prox is the identity and this is ||grad|| / scale.
  const double lipschitz = agg.lipschitz_sum;
  const Eigen::VectorXd stepped = summed_prox(agg, x - grad / lipschitz, 1.0 / lipschitz);
  return lipschitz * (x - stepped).norm() / scale;
}

}  // namespace

double total_objective(std::span<const LocalObjective> objs, const Eigen::VectorXd& x,
                       bool smooth_only) {
  double total = 0.0;
  for (const auto& obj : objs) total += smooth_only ? obj.smooth_value(x) : obj.value(x);
  return total;
}

double optimality_residual(std::span<const LocalObjective> objs, const Eigen::VectorXd& x,
                           bool smooth_only) {
  const Aggregate agg = aggregate(objs, smooth_only);
  if (x.size() != agg.linear.size()) throw std::invalid_argument("point has wrong dimension");
  return relative_residual(objs, agg, x);
}

bool verify_optimality(std::span<const LocalObjective> objs, const Eigen::VectorXd& x, double tol,
                       bool smooth_only) {
  if (!x.allFinite()) return false;
  return optimality_residual(objs, x, smooth_only) <= tol;
}

ReferenceSolution solve_reference(std::span<const LocalObjective> objs, bool smooth_only,
                                  const OracleOptions& options) {
  const Aggregate agg = aggregate(objs, smooth_only);
  ReferenceSolution out;
  out.smooth_only = smooth_only;

  if (agg.quadratic_only) {
    // H is a multiple of the identity here.
    const double sum_2a = agg.hessian(0, 0);
    out.x_star = (-agg.linear / sum_2a).cwiseMax(agg.lo).cwiseMin(agg.hi);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(agg.hessian, Eigen::EigenvaluesOnly);
    const double strong = std::max(es.eigenvalues()(0), 0.0);
    const double lipschitz = agg.lipschitz_sum;
    const double step = 1.0 / lipschitz;
    const double root = std::sqrt(strong / lipschitz);
    const double momentum = (1.0 - root) / (1.0 + root);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(agg.linear.size()).cwiseMax(agg.lo).cwiseMin(agg.hi);
    Eigen::VectorXd y = x;
    bool done = false;
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < options.max_iterations; ++it) {
      const Eigen::VectorXd grad = agg.hessian * y + agg.linear;
      const Eigen::VectorXd x_next = summed_prox(agg, y - step * grad, step);
      if ((y - x_next).dot(x_next - x) > 0.0) {
        y = x_next;
      } else {
        y = x_next + momentum * (x_next - x);
      }
      x = x_next;
      if (it % 16 == 15) {
        residual = relative_residual(objs, agg, x);
        if (residual <= options.tol) {
          done = true;
          break;
        }
      }
    }
    if (!done) {
      throw NumericalError("reference solver did not reach tolerance", residual);
    }
    out.x_star = x;
  }

  out.optimality_residual = relative_residual(objs, agg, out.x_star);
  out.objective_value = total_objective(objs, out.x_star, smooth_only);
  if (!(out.optimality_residual <= options.tol)) {
    throw NumericalError("reference solution misses the optimality tolerance",
                         out.optimality_residual);
  }
  return out;
}

}  // namespace qcadmm
