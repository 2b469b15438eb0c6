#include "qcadmm/quantizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qcadmm {

void validate(const QuantizerConfig& q) {
  if (!std::isfinite(q.delta) || q.delta < 0.0) {
    throw std::invalid_argument("quantization resolution must be finite and >= 0, got " +
                                std::to_string(q.delta));
  }
}

double quantize_scalar(double y, const QuantizerConfig& q) {
  if (!std::isfinite(y)) throw std::invalid_argument("cannot quantize a non-finite value");
  validate(q);
  if (q.is_identity()) return y;
  return std::floor(y / q.delta + 0.5) * q.delta;
}

Eigen::VectorXd quantize(const Eigen::VectorXd& w, const QuantizerConfig& q) {
  validate(q);
  if (!w.allFinite()) throw std::invalid_argument("cannot quantize a non-finite vector");
  if (q.is_identity()) return w;
  Eigen::VectorXd out(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) out(k) = std::floor(w(k) / q.delta + 0.5) * q.delta;
  return out;
}

QuantizedVector quantize_vector(const Eigen::VectorXd& w, const QuantizerConfig& q) {
  QuantizedVector out;
  out.values = quantize(w, q);
  out.error = out.values - w;
  return out;
}

double quantization_error_bound(Eigen::Index length, const QuantizerConfig& q) {
  validate(q);
  return 0.5 * q.delta * std::sqrt(static_cast<double>(length));
}

}  // namespace qcadmm
