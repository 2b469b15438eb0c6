#pragma once

#include <Eigen/Dense>

namespace qcadmm {

/// Rounding quantizer onto the lattice {t * delta : t integer}. delta == 0 is
/// the identity (no quantization).
struct QuantizerConfig {
  double delta = 0.0;

  bool is_identity() const { return delta == 0.0; }
};

/// Throws std::invalid_argument unless delta is finite and nonnegative.
void validate(const QuantizerConfig& q);

/// t * delta with (t - 1/2) delta <= y < (t + 1/2) delta, i.e. ties round up.
double quantize_scalar(double y, const QuantizerConfig& q);

struct QuantizedVector {
  Eigen::VectorXd values;
  Eigen::VectorXd error;  ///< values - input
};

QuantizedVector quantize_vector(const Eigen::VectorXd& w, const QuantizerConfig& q);

/// Entrywise quantization without the error vector.
Eigen::VectorXd quantize(const Eigen::VectorXd& w, const QuantizerConfig& q);

/// Worst-case Euclidean quantization error for a length-L vector: delta*sqrt(L)/2.
double quantization_error_bound(Eigen::Index length, const QuantizerConfig& q);

}  // namespace qcadmm
