#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "qcadmm/quantizer.hpp"

using namespace qcadmm;

TEST_CASE("boundary rule rounds up on the half-open interval") {
  const QuantizerConfig q{1.0};
  CHECK(quantize_scalar(-1.5, q) == -1.0);
  CHECK(quantize_scalar(0.49, q) == 0.0);
  CHECK(quantize_scalar(0.5, q) == 1.0);
  CHECK(quantize_scalar(-0.5, q) == 0.0);
  CHECK(quantize_scalar(-0.51, q) == -1.0);
  CHECK(quantize_scalar(2.5, QuantizerConfig{5.0}) == 5.0);
}

TEST_CASE("lattice points are fixed") {
  for (double delta : {0.1, 1.0, 2.5}) {
    const QuantizerConfig q{delta};
    for (int t = -50; t <= 50; ++t) {
      const double p = quantize_scalar(t * delta, q);
      CHECK(quantize_scalar(p, q) == p);
      CHECK(p == doctest::Approx(t * delta));
    }
  }
}

TEST_CASE("identity quantizer") {
  const QuantizerConfig q{};
  CHECK(q.is_identity());
  CHECK(quantize_scalar(0.123456789, q) == 0.123456789);
  const Eigen::Vector3d w(1.25, -3.5, 1e-300);
  const auto qv = quantize_vector(w, q);
  CHECK(qv.values == w);
  CHECK(qv.error.isZero(0.0));
  CHECK(quantization_error_bound(3, q) == 0.0);
}

TEST_CASE("invalid input is rejected") {
  CHECK_THROWS_AS(quantize_scalar(std::numeric_limits<double>::quiet_NaN(), QuantizerConfig{1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(quantize_scalar(std::numeric_limits<double>::infinity(), QuantizerConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(quantize_scalar(1.0, QuantizerConfig{-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(QuantizerConfig{std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
  Eigen::Vector2d bad(1.0, std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(quantize(bad, QuantizerConfig{1.0}), std::invalid_argument);
}

TEST_CASE("vector example and error bound") {
  const auto qv = quantize_vector(Eigen::Vector2d(0.4, -0.4), QuantizerConfig{1.0});
  CHECK(qv.values.isZero(0.0));
  CHECK(qv.error(0) == doctest::Approx(-0.4));
  CHECK(qv.error(1) == doctest::Approx(0.4));
  CHECK(qv.error.norm() == doctest::Approx(std::sqrt(0.32)));
  CHECK(qv.error.norm() <= quantization_error_bound(2, QuantizerConfig{1.0}));
  CHECK(quantization_error_bound(2, QuantizerConfig{1.0}) == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(quantize(Eigen::Vector3d::Zero(), QuantizerConfig{0.3}).isZero(0.0));
}

TEST_CASE("random residuals stay in the quantization cell") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (double delta : {0.1, 1.0, 2.5}) {
    const QuantizerConfig q{delta};
    for (int k = 0; k < 20000; ++k) {
      const double y = u(rng);
      const double r = y - quantize_scalar(y, q);
      REQUIRE(r >= -delta / 2);
      REQUIRE(r < delta / 2);
    }
  }
}
