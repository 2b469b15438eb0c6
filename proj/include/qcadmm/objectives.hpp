#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace qcadmm {

/// g(x) = a ||x||^2 + b^T x, no non-smooth part.
struct ScaledQuadratic {
  double a = 1.0;
  Eigen::VectorXd b;
};

/// g(x) = 1/2 ||A x - y||^2, h(x) = xi ||x||_1.
struct LeastSquaresL1 {
  Eigen::MatrixXd a_mat;
  Eigen::VectorXd y_vec;
  double xi = 0.0;
};

/// g as ScaledQuadratic, h the indicator of {lo <= x <= hi}.
struct QuadraticBox {
  double a = 1.0;
  Eigen::VectorXd b;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

/// Per-agent convex objective f = g + h with strongly convex, Lipschitz-smooth
/// g. Immutable once built; the constructor validates the data and derives the
/// curvature moduli m_g <= M_g.
class LocalObjective {
 public:
  using Data = std::variant<ScaledQuadratic, LeastSquaresL1, QuadraticBox>;

  explicit LocalObjective(Data data);

  const Data& data() const { return data_; }
  int dim() const { return dim_; }
  double m_g() const { return m_g_; }
  double big_m_g() const { return big_m_g_; }

  bool is_quadratic_family() const { return !std::holds_alternative<LeastSquaresL1>(data_); }
  bool has_nonsmooth_part() const;

  double smooth_value(const Eigen::VectorXd& x) const;
  /// +infinity outside the box for QuadraticBox.
  double nonsmooth_value(const Eigen::VectorXd& x) const;
  double value(const Eigen::VectorXd& x) const { return smooth_value(x) + nonsmooth_value(x); }

  Eigen::VectorXd gradient_smooth(const Eigen::VectorXd& x) const;

  /// prox of step * h evaluated at v.
  Eigen::VectorXd prox_nonsmooth(const Eigen::VectorXd& v, double step) const;

  /// A^T A for LeastSquaresL1, empty otherwise.
  const Eigen::MatrixXd& gram() const { return gram_; }
  /// A^T y for LeastSquaresL1, empty otherwise.
  const Eigen::VectorXd& a_t_y() const { return a_t_y_; }

 private:
  void check_dim(const Eigen::VectorXd& x) const;

  Data data_;
  int dim_ = 0;
  double m_g_ = 0.0;
  double big_m_g_ = 0.0;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd a_t_y_;
};

struct XUpdateOptions {
  double tol = 1e-10;
  int max_iterations = 100000;
};

/// Minimizer of f(x) + rho*degree*||x||^2 + (alpha - rho*neighborhood_sum)^T x.
///
/// Closed form for the quadratic families (clamped for boxes); LeastSquaresL1
/// runs accelerated proximal gradient from `warm_start` (or zero) until the
/// gradient-mapping residual is <= tol * (1 + ||x||). Throws NumericalError
/// carrying the residual if max_iterations is hit.
Eigen::VectorXd solve_x_update(const LocalObjective& obj, double rho, int degree,
                               const Eigen::VectorXd& neighborhood_sum,
                               const Eigen::VectorXd& alpha,
                               const Eigen::VectorXd* warm_start = nullptr,
                               const XUpdateOptions& options = {});

/// Gradient-mapping norm of the x-update subproblem at x (zero at the minimizer).
double x_update_residual(const LocalObjective& obj, double rho, int degree,
                         const Eigen::VectorXd& neighborhood_sum, const Eigen::VectorXd& alpha,
                         const Eigen::VectorXd& x);

enum class Scenario { Quadratic, QuadraticBox, Lasso };

std::string to_string(Scenario s);
/// Accepts "quadratic", "quadratic_box", "lasso".
Scenario parse_scenario(std::string_view name);

/// Seeded random instance with n agents in dimension m.
///
///   quadratic      a_i = |N(0,1)| (redrawn below 1e-6), b_i ~ N(0, n^4) entrywise
///   quadratic_box  as quadratic, plus the box [-n, n]^m
///   lasso          A_i ~ N(0,1) entrywise (redrawn if lambda_min(A^T A) < 1e-8),
///                  y_i ~ N(0, n^2), xi_i = |N(0, n^2)|
///
/// The second argument of N(., .) is a variance.
std::vector<LocalObjective> build_problem_instance(Scenario scenario, int n, int m,
                                                   std::uint64_t seed);

}  // namespace qcadmm
