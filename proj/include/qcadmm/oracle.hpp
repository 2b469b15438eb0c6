#pragma once

#include <span>

#include <Eigen/Dense>

#include "qcadmm/objectives.hpp"

namespace qcadmm {

/// Centralized optimum of sum_i f_i (or of sum_i g_i when smooth_only).
struct ReferenceSolution {
  Eigen::VectorXd x_star;
  double objective_value = 0.0;
  /// Gradient-mapping norm at x_star relative to 1 + sum_i ||grad g_i(x_star)||.
  double optimality_residual = 0.0;
  bool smooth_only = false;
};

struct OracleOptions {
  double tol = 1e-10;
  int max_iterations = 1000000;
};

/// Quadratic families: x* = -(sum b_i) / (2 sum a_i), clamped into the
/// intersection of the boxes (std::invalid_argument if it is empty). Anything
/// else: accelerated proximal gradient on the summed objective with step
/// 1 / sum_i M_gi. Throws NumericalError if the tolerance is not met.
ReferenceSolution solve_reference(std::span<const LocalObjective> objs, bool smooth_only = false,
                                  const OracleOptions& options = {});

/// Relative residual of 0 in the summed subdifferential at x (see ReferenceSolution).
double optimality_residual(std::span<const LocalObjective> objs, const Eigen::VectorXd& x,
                           bool smooth_only = false);

bool verify_optimality(std::span<const LocalObjective> objs, const Eigen::VectorXd& x, double tol,
                       bool smooth_only = false);

/// sum_i f_i(x), or sum_i g_i(x) when smooth_only.
double total_objective(std::span<const LocalObjective> objs, const Eigen::VectorXd& x,
                       bool smooth_only = false);

}  // namespace qcadmm
