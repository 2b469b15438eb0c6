#include "qcadmm/objectives.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "qcadmm/errors.hpp"

namespace qcadmm {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  return v.unaryExpr([t](double u) {
    if (u > t) return u - t;
    if (u < -t) return u + t;
    return 0.0;
  });
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Minimizes 1/2 x^T (G + 2 rho d I) x - (A^T y)^T x + c^T x + xi ||x||_1 with
// the constant-momentum accelerated scheme for strongly convex composites and
// gradient-based restart.
Eigen::VectorXd lasso_subproblem(const Eigen::MatrixXd& gram, const Eigen::VectorXd& a_t_y,
                                 double xi, double lipschitz, double strong, double rho_d2,
                                 const Eigen::VectorXd& c, const Eigen::VectorXd& start,
                                 const XUpdateOptions& options) {
  const double step = 1.0 / lipschitz;
  const double root = std::sqrt(strong / lipschitz);
  const double momentum = (1.0 - root) / (1.0 + root);
  const Eigen::VectorXd shift = c - a_t_y;

  Eigen::VectorXd x = start;
  Eigen::VectorXd y = start;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd grad = gram * y + rho_d2 * y + shift;
    const Eigen::VectorXd x_next = soft_threshold(y - step * grad, xi * step);
    residual = lipschitz * (y - x_next).norm();
    if (residual <= options.tol * (1.0 + x_next.norm())) return x_next;
    if ((y - x_next).dot(x_next - x) > 0.0) {
      y = x_next;
    } else {
      y = x_next + momentum * (x_next - x);
    }
    x = x_next;
  }
  throw NumericalError("LASSO x-update did not reach tolerance", residual);
}

}  // namespace

LocalObjective::LocalObjective(Data data) : data_(std::move(data)) {
  std::visit(
      Overloaded{
          [this](const ScaledQuadratic& q) {
            require(q.a > 0.0 && std::isfinite(q.a), "quadratic coefficient must be positive");
            require(q.b.size() > 0 && q.b.allFinite(), "quadratic linear term must be finite");
            dim_ = static_cast<int>(q.b.size());
            m_g_ = big_m_g_ = 2.0 * q.a;
          },
          [this](const QuadraticBox& q) {
            require(q.a > 0.0 && std::isfinite(q.a), "quadratic coefficient must be positive");
            require(q.b.size() > 0 && q.b.allFinite(), "quadratic linear term must be finite");
            require(q.lo.size() == q.b.size() && q.hi.size() == q.b.size(),
                    "box bounds must match the dimension");
            require(q.lo.allFinite() && q.hi.allFinite(), "box must be compact");
            require((q.lo.array() <= q.hi.array()).all(), "box must be nonempty");
            dim_ = static_cast<int>(q.b.size());
            m_g_ = big_m_g_ = 2.0 * q.a;
          },
          [this](const LeastSquaresL1& l) {
            require(l.a_mat.rows() == l.a_mat.cols() && l.a_mat.rows() > 0,
                    "measurement matrix must be square");
            require(l.y_vec.size() == l.a_mat.rows(), "measurement vector size mismatch");
            require(l.xi >= 0.0 && std::isfinite(l.xi), "l1 weight must be nonnegative");
            require(l.a_mat.allFinite() && l.y_vec.allFinite(), "LASSO data must be finite");
            dim_ = static_cast<int>(l.a_mat.cols());
            gram_ = l.a_mat.transpose() * l.a_mat;
            a_t_y_ = l.a_mat.transpose() * l.y_vec;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_, Eigen::EigenvaluesOnly);
            if (es.info() != Eigen::Success) throw NumericalError("A^T A eigensolver failed", 0.0);
            m_g_ = es.eigenvalues()(0);
            big_m_g_ = es.eigenvalues()(dim_ - 1);
            require(m_g_ > 0.0, "measurement matrix must have full column rank");
          },
      },
      data_);
}

bool LocalObjective::has_nonsmooth_part() const {
  if (const auto* l = std::get_if<LeastSquaresL1>(&data_)) return l->xi > 0.0;
  return std::holds_alternative<QuadraticBox>(data_);
}

void LocalObjective::check_dim(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) {
    throw std::invalid_argument("objective expects dimension " + std::to_string(dim_) + ", got " +
                                std::to_string(x.size()));
  }
}

double LocalObjective::smooth_value(const Eigen::VectorXd& x) const {
  check_dim(x);
  return std::visit(Overloaded{
                        [&](const ScaledQuadratic& q) { return q.a * x.squaredNorm() + q.b.dot(x); },
                        [&](const QuadraticBox& q) { return q.a * x.squaredNorm() + q.b.dot(x); },
                        [&](const LeastSquaresL1& l) {
                          return 0.5 * (l.a_mat * x - l.y_vec).squaredNorm();
                        },
                    },
                    data_);
}

double LocalObjective::nonsmooth_value(const Eigen::VectorXd& x) const {
  check_dim(x);
  return std::visit(Overloaded{
                        [](const ScaledQuadratic&) { return 0.0; },
                        [&](const QuadraticBox& q) {
                          const bool inside =
                              (x.array() >= q.lo.array()).all() && (x.array() <= q.hi.array()).all();
                          return inside ? 0.0 : std::numeric_limits<double>::infinity();
                        },
                        [&](const LeastSquaresL1& l) { return l.xi * x.lpNorm<1>(); },
                    },
                    data_);
}

Eigen::VectorXd LocalObjective::gradient_smooth(const Eigen::VectorXd& x) const {
  check_dim(x);
  if (!x.allFinite()) throw std::invalid_argument("gradient at a non-finite point");
  return std::visit(Overloaded{
                        [&](const ScaledQuadratic& q) -> Eigen::VectorXd { return 2.0 * q.a * x + q.b; },
                        [&](const QuadraticBox& q) -> Eigen::VectorXd { return 2.0 * q.a * x + q.b; },
                        [&](const LeastSquaresL1&) -> Eigen::VectorXd { return gram_ * x - a_t_y_; },
                    },
                    data_);
}

Eigen::VectorXd LocalObjective::prox_nonsmooth(const Eigen::VectorXd& v, double step) const {
  check_dim(v);
  return std::visit(Overloaded{
                        [&](const ScaledQuadratic&) -> Eigen::VectorXd { return v; },
                        [&](const QuadraticBox& q) -> Eigen::VectorXd {
                          return v.cwiseMax(q.lo).cwiseMin(q.hi);
                        },
                        [&](const LeastSquaresL1& l) -> Eigen::VectorXd {
                          return soft_threshold(v, l.xi * step);
                        },
                    },
                    data_);
}

Eigen::VectorXd solve_x_update(const LocalObjective& obj, double rho, int degree,
                               const Eigen::VectorXd& neighborhood_sum,
                               const Eigen::VectorXd& alpha, const Eigen::VectorXd* warm_start,
                               const XUpdateOptions& options) {
  if (neighborhood_sum.size() != obj.dim() || alpha.size() != obj.dim()) {
    throw std::invalid_argument("x-update inputs do not match the objective dimension");
  }
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  const double rho_d2 = 2.0 * rho * degree;

  return std::visit(
      Overloaded{
          [&](const ScaledQuadratic& q) -> Eigen::VectorXd {
            return (rho * neighborhood_sum - alpha - q.b) / (2.0 * q.a + rho_d2);
          },
          [&](const QuadraticBox& q) -> Eigen::VectorXd {
            // Isotropic Hessian: the constrained minimizer is the clamped
            // unconstrained one.
            const Eigen::VectorXd free = (rho * neighborhood_sum - alpha - q.b) / (2.0 * q.a + rho_d2);
            return free.cwiseMax(q.lo).cwiseMin(q.hi);
          },
          [&](const LeastSquaresL1& l) -> Eigen::VectorXd {
            const Eigen::VectorXd c = alpha - rho * neighborhood_sum;
            Eigen::VectorXd start = Eigen::VectorXd::Zero(obj.dim());
            if (warm_start != nullptr && warm_start->size() == obj.dim() && warm_start->allFinite()) {
              start = *warm_start;
            }
            return lasso_subproblem(obj.gram(), obj.a_t_y(), l.xi, obj.big_m_g() + rho_d2,
                                    obj.m_g() + rho_d2, rho_d2, c, start, options);
          },
      },
      obj.data());
}

double x_update_residual(const LocalObjective& obj, double rho, int degree,
                         const Eigen::VectorXd& neighborhood_sum, const Eigen::VectorXd& alpha,
                         const Eigen::VectorXd& x) {
  const double rho_d2 = 2.0 * rho * degree;
  const Eigen::VectorXd grad = obj.gradient_smooth(x) + rho_d2 * x + alpha - rho * neighborhood_sum;
  const double lipschitz = obj.big_m_g() + rho_d2;
  const Eigen::VectorXd stepped = obj.prox_nonsmooth(x - grad / lipschitz, 1.0 / lipschitz);
  return lipschitz * (x - stepped).norm();
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Quadratic:
      return "quadratic";
    case Scenario::QuadraticBox:
      return "quadratic_box";
    case Scenario::Lasso:
      return "lasso";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "quadratic") return Scenario::Quadratic;
  if (name == "quadratic_box") return Scenario::QuadraticBox;
  if (name == "lasso") return Scenario::Lasso;
  throw std::invalid_argument("unknown scenario: " + std::string(name));
}

std::vector<LocalObjective> build_problem_instance(Scenario scenario, int n, int m,
                                                   std::uint64_t seed) {
  if (n <= 0 || m <= 0) throw std::invalid_argument("instance needs n > 0 and m > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double nd = static_cast<double>(n);

  auto draw_vector = [&](double scale) {
    Eigen::VectorXd v(m);
    for (int k = 0; k < m; ++k) v(k) = scale * normal(rng);
    return v;
  };
  auto draw_coefficient = [&] {
    double a = 0.0;
    do {
      a = std::abs(normal(rng));
    } while (a < 1e-6);
    return a;
  };

  std::vector<LocalObjective> objs;
  objs.reserve(n);
  for (int i = 0; i < n; ++i) {
    switch (scenario) {
      case Scenario::Quadratic: {
        const double a = draw_coefficient();
        objs.emplace_back(ScaledQuadratic{a, draw_vector(nd * nd)});
        break;
      }
      case Scenario::QuadraticBox: {
        const double a = draw_coefficient();
        Eigen::VectorXd b = draw_vector(nd * nd);
        objs.emplace_back(QuadraticBox{a, std::move(b), Eigen::VectorXd::Constant(m, -nd),
                                       Eigen::VectorXd::Constant(m, nd)});
        break;
      }
      case Scenario::Lasso: {
        Eigen::MatrixXd a_mat(m, m);
        for (;;) {
          for (int c = 0; c < m; ++c)
            for (int r = 0; r < m; ++r) a_mat(r, c) = normal(rng);
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a_mat.transpose() * a_mat,
                                                            Eigen::EigenvaluesOnly);
          if (es.eigenvalues()(0) >= 1e-8) break;
        }
        Eigen::VectorXd y = draw_vector(nd);
        const double xi = std::abs(nd * normal(rng));
        objs.emplace_back(LeastSquaresL1{std::move(a_mat), std::move(y), xi});
        break;
      }
    }
  }
  return objs;
}

}  // namespace qcadmm
