#include <doctest.h>

#include <cmath>
#include <random>

#include "qcadmm/analysis.hpp"
#include "qcadmm/oracle.hpp"

using namespace qcadmm;

namespace {

NetworkGraph two_node() { return NetworkGraph(2, {{0, 1}}); }

std::vector<LocalObjective> two_node_objectives() {
  return {LocalObjective(ScaledQuadratic{0.5, Eigen::VectorXd::Constant(1, 1.5)}),
          LocalObjective(ScaledQuadratic{0.5, Eigen::VectorXd::Constant(1, 3.5)})};
}

// Singular values straight from an SVD of the incidence matrices.
SpectralData svd_spectrum(const GraphMatrices& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> sp(m.m_plus), sm(m.m_minus);
  const auto n = sm.singularValues().size();
  return {sp.singularValues()(0), sm.singularValues()(0), sm.singularValues()(n - 2)};
}

// Plug-in evaluation of delta with explicit squares, kept apart from the library.
double delta_by_hand(double sp2, double smin2, double mg, double big_mg, double rho, double mu) {
  const double a = (mu - 1) * smin2 / (mu * sp2);
  const double b = 4 * rho * mg * smin2 / (rho * rho * sp2 * smin2 + mu * big_mg * big_mg);
  return a < b ? a : b;
}

}  // namespace

TEST_CASE("g_norm") {
  CHECK(g_norm(Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), 3.0) == 0.0);
  const Eigen::Vector3d z(1, 2, 2);
  CHECK(g_norm(z, Eigen::Vector3d::Zero(), 1.0) == doctest::Approx(3.0));
  CHECK(g_norm(Eigen::Vector2d(1.5, 1.5), Eigen::Vector2d(1, -1), 1.0) == doctest::Approx(std::sqrt(6.5)));
  CHECK(g_norm(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), 4.0) == doctest::Approx(std::sqrt(4.25)));
  CHECK_THROWS_AS(g_norm(z, z, 0.0), std::invalid_argument);
}

TEST_CASE("rate constants on two nodes") {
  const auto spec = svd_spectrum(build_matrices(two_node()));
  const auto rc = compute_eta(spec, 1.0, 1.0, 1.0, 1.5);
  CHECK(rc.delta_rate == doctest::Approx(1.0 / 3.0));
  CHECK(rc.eta == doctest::Approx(std::sqrt(4.0 / 3.0) - 1.0));
  CHECK(rc.eta == doctest::Approx(0.154701).epsilon(1e-6));

  const auto near_one = compute_eta(spec, 1.0, 1.0, 1.0, 1.0 + 1e-9);
  CHECK(near_one.delta_rate < 1e-8);
  CHECK_THROWS_AS(compute_eta(spec, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_eta(spec, 1.0, 1.0, 0.0, 1.5), std::invalid_argument);

  // Scaling both moduli by c only moves the second term.
  const auto scaled = compute_eta(spec, 0.1, 0.1, 1.0, 1.5);
  CHECK(scaled.delta_rate == doctest::Approx(delta_by_hand(4, 4, 0.1, 0.1, 1.0, 1.5)));
}

TEST_CASE("rate constants on random graphs match a plug-in evaluation") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const int n = std::uniform_int_distribution<int>(3, 12)(rng);
    const int e = std::uniform_int_distribution<int>(n - 1, n * (n - 1) / 2)(rng);
    const auto m = build_matrices(random_connected_graph(n, e, rng()));
    const auto s = svd_spectrum(m);
    const double mg = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
    const double big = mg * std::uniform_real_distribution<double>(1.0, 5.0)(rng);
    const double rho = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    const auto rc = compute_eta(spectral_quantities(m), mg, big, rho, 1.5);
    const double expected = delta_by_hand(s.sigma_max_m_plus * s.sigma_max_m_plus,
                                          s.sigma_min_nonzero_m_minus * s.sigma_min_nonzero_m_minus,
                                          mg, big, rho, 1.5);
    CHECK(rc.delta_rate == doctest::Approx(expected).epsilon(1e-9));
    CHECK(rc.eta > 0.0);
    CHECK(rc.eta == doctest::Approx(std::sqrt(1 + expected) - 1).epsilon(1e-9));
  }
}

TEST_CASE("tau0 and the consensus bound") {
  const auto spec = svd_spectrum(build_matrices(two_node()));
  CHECK(compute_tau0(0.0, 1.0, 1, spec) == 0.0);
  CHECK(compute_tau0(1.0, 1.0, 1, spec) == doctest::Approx(0.25 * std::sqrt(8.0)));
  CHECK(compute_tau0(2.0, 1.0, 1, spec) == doctest::Approx(2 * compute_tau0(1.0, 1.0, 1, spec)));

  CHECK(consensus_error_bound(1.0, 1, 2.0, 1, 1.0) == doctest::Approx(1.5));
  CHECK(consensus_error_bound(1.0, 1, 2.0, 1, 0.0) == 0.0);
  CHECK(consensus_error_bound(1.0, 2, 2.0, 1, 1.0) > consensus_error_bound(1.0, 1, 2.0, 1, 1.0));
  CHECK(consensus_error_bound(2.0, 1, 2.0, 1, 1.0) > consensus_error_bound(1.0, 1, 2.0, 1, 1.0));
  CHECK(consensus_error_bound(1.0, 3, 7.0, 4, 0.5) == doctest::Approx((0.5 + 6.0 / 7.0) * 2.0 * 0.5));
}

TEST_CASE("iteration bound formula") {
  const auto spec = svd_spectrum(build_matrices(two_node()));
  const double eta = std::sqrt(4.0 / 3.0) - 1.0;
  const double tau0 = 0.25 * std::sqrt(8.0);
  const double d0 = std::sqrt(6.5);
  const auto b = iteration_bound(eta, 1.0, 1.0, 1, spec, d0, tau0);
  const double first = 3 * 2 * (1 + eta) * (1 + eta) * (d0 + tau0) / eta;
  const double second = 3 * (1 + eta) * (d0 + tau0) / (std::sqrt(2.0) * eta);
  CHECK(b.omega == doctest::Approx(std::max(first, second)));
  CHECK(b.omega == doctest::Approx(168.4).epsilon(1e-3));
  CHECK(b.iterations == 36);

  const auto closer = iteration_bound(eta, 1.0, 1.0, 1, spec, 0.0, tau0);
  CHECK(closer.omega > 0.0);
  CHECK(closer.omega < b.omega);
  CHECK(iteration_bound(eta, 2.0, 1.0, 1, spec, d0, tau0).omega < b.omega);
  CHECK(iteration_bound(eta, 1.0, 1.0, 1, spec, 0.0, 0.0).iterations == 1);
  CHECK_THROWS_AS(iteration_bound(eta, 0.0, 1.0, 1, spec, d0, tau0), std::invalid_argument);
  CHECK_THROWS_AS(iteration_bound(0.0, 1.0, 1.0, 1, spec, d0, tau0), std::invalid_argument);
}

TEST_CASE("x-update gap bounds and tau1") {
  const std::vector<double> xi{1.0, 1.0};
  CHECK(delta_x_l1(xi, 1.0, 1.0, 1, 1) == doctest::Approx(std::sqrt(2.0) / 3.0));
  CHECK(delta_x_l1(std::vector<double>{0.0, 0.0}, 1.0, 1.0, 1, 1) == 0.0);
  CHECK(delta_x_l1(xi, 1.0, 1.0, 1, 4) == doctest::Approx(2 * delta_x_l1(xi, 1.0, 1.0, 1, 1)));

  const std::vector<double> a0{0.0}, t{1.0}, mg{1.0};
  const std::vector<int> deg{1};
  CHECK(delta_x_box(a0, t, 1.0, deg, 2.0, mg, 1) == doctest::Approx(22.0 / 3.0));
  CHECK(delta_x_box(a0, std::vector<double>{0.0}, 1.0, deg, 0.0, mg, 1) == 0.0);
  const std::vector<double> a2{0.0, 3.0}, t2{1.0, 0.5}, mg2{1.0, 2.0};
  const std::vector<int> deg2{1, 2};
  const double sum = delta_x_box(std::vector<double>{0.0}, std::vector<double>{1.0}, 1.0,
                                 std::vector<int>{1}, 2.0, std::vector<double>{1.0}, 1) +
                     delta_x_box(std::vector<double>{3.0}, std::vector<double>{0.5}, 1.0,
                                 std::vector<int>{2}, 2.0, std::vector<double>{2.0}, 1);
  CHECK(delta_x_box(a2, t2, 1.0, deg2, 2.0, mg2, 1) == doctest::Approx(sum));
  CHECK_THROWS_AS(delta_x_box(a2, t, 1.0, deg2, 2.0, mg2, 1), std::invalid_argument);

  const auto spec = svd_spectrum(build_matrices(two_node()));
  CHECK(compute_tau1(std::sqrt(2.0) / 3, 1.0, 1, 1.0, spec) ==
        doctest::Approx((std::sqrt(2.0) / 6 + 0.25) * std::sqrt(8.0)));
  CHECK(compute_tau1(0.0, 1.0, 1, 1.0, spec) == doctest::Approx(compute_tau0(1.0, 1.0, 1, spec)));
  CHECK(compute_tau1(0.6, 2.0, 3, 0.5, spec) == doctest::Approx(2 * compute_tau1(0.3, 1.0, 3, 0.5, spec)));
}

TEST_CASE("box bounds against corner enumeration") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> nd(0.0, 3.0);
  for (int t = 0; t < 10; ++t) {
    QuadraticBox q{0.7, Eigen::VectorXd(3), Eigen::VectorXd(3), Eigen::VectorXd(3)};
    for (int k = 0; k < 3; ++k) {
      q.b(k) = nd(rng);
      q.lo(k) = -std::abs(nd(rng)) - 0.1;
      q.hi(k) = std::abs(nd(rng)) + 0.1;
    }
    double best = 0.0;
    double far = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
      Eigen::Vector3d c;
      for (int k = 0; k < 3; ++k) c(k) = (mask >> k & 1) ? q.hi(k) : q.lo(k);
      best = std::max(best, (2 * q.a * c + q.b).norm());
      far = std::max(far, c.norm());
    }
    CHECK(box_gradient_bound(q) == doctest::Approx(best));
    CHECK(box_radius_bound(q, 1.0) == doctest::Approx(far + 0.5 * std::sqrt(3.0)));
  }
}

TEST_CASE("recover_beta") {
  const auto m = build_matrices(two_node());
  CHECK(recover_beta(Eigen::Vector2d::Zero(), m).isZero(0.0));
  const Eigen::VectorXd b = recover_beta(Eigen::Vector2d(1, -1), m);
  CHECK(b(0) == doctest::Approx(0.5));
  CHECK(b(1) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(recover_beta(Eigen::Vector2d(1, 1), m), std::invalid_argument);

  const auto g = random_connected_graph(7, 12, 4);
  const auto mm = build_matrices(g);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd x(7 * 2);
    for (auto& v : x) v = nd(rng);
    const Eigen::VectorXd alpha = apply_l_minus(mm, x, 2);
    const Eigen::VectorXd beta = recover_beta(alpha, mm);
    CHECK((apply_m_minus(mm, beta, 2) - alpha).norm() < 1e-10 * (1 + alpha.norm()));
    // beta in range(M-^T): beta = M-^T w for the least-squares w.
    const Eigen::MatrixXd mt = kron_identity(mm.m_minus, 2).transpose();
    const Eigen::VectorXd w = mt.completeOrthogonalDecomposition().solve(beta);
    CHECK((mt * w - beta).norm() < 1e-10 * (1 + beta.norm()));
    // And recovering from M- beta' for beta' in range(M-^T) gives beta' back.
    Eigen::VectorXd u(7 * 2);
    for (auto& v : u) v = nd(rng);
    const Eigen::VectorXd in_range = apply_m_minus_t(mm, u, 2);
    CHECK((recover_beta(apply_m_minus(mm, in_range, 2), mm) - in_range).norm() <
          1e-10 * (1 + in_range.norm()));
  }
}

TEST_CASE("optimal point of the two-node example") {
  const auto g = two_node();
  const auto m = build_matrices(g);
  const auto objs = two_node_objectives();
  const auto u = optimal_point(g, m, objs, Eigen::VectorXd::Constant(1, -2.5));
  // The C-ADMM dual limit is minus the local gradients: grads are (-1, 1).
  CHECK(u.alpha_star(0) == doctest::Approx(1.0));
  CHECK(u.alpha_star(1) == doctest::Approx(-1.0));
  CHECK(u.z_star(0) == doctest::Approx(-2.5));
  CHECK(u.z_star(1) == doctest::Approx(-2.5));
  CHECK(u.beta_star(0) == doctest::Approx(0.5));
  CHECK(u.beta_star(1) == doctest::Approx(-0.5));
}

TEST_CASE("optimal point invariants on random instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = random_connected_graph(6, 9, seed);
    const auto m = build_matrices(g);
    const auto objs = build_problem_instance(Scenario::Quadratic, 6, 3, seed);
    const auto ref = solve_reference(objs);
    const auto u = optimal_point(g, m, objs, ref.x_star);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(3);
    for (int i = 0; i < 6; ++i) sum += u.alpha_star.segment(3 * i, 3);
    CHECK(sum.norm() < 1e-9 * (1 + u.alpha_star.norm()));
    CHECK((apply_m_minus(m, u.beta_star, 3) - u.alpha_star).norm() < 1e-9 * (1 + u.alpha_star.norm()));
    for (int q = 0; q < 2 * g.n_edges(); ++q) CHECK((u.z_star.segment(3 * q, 3) - ref.x_star).norm() < 1e-12);
  }
  // Identical objectives leave nothing for the duals to balance.
  const auto g = random_connected_graph(4, 5, 2);
  const std::vector<LocalObjective> same(4, LocalObjective(ScaledQuadratic{1.0, Eigen::Vector2d(1, 2)}));
  const auto u = optimal_point(g, build_matrices(g), same, solve_reference(same).x_star);
  CHECK(u.alpha_star.norm() < 1e-12);
}

TEST_CASE("certify the two-node example") {
  const auto g = two_node();
  const auto m = build_matrices(g);
  const auto objs = two_node_objectives();
  const auto cert = certify(g, m, spectral_quantities(m), objs, Eigen::Vector2d(-1, -1),
                            Eigen::Vector2d(1, -1), CertifyOptions{1.0, 1.0, 1.5});
  CHECK(cert.smooth);
  CHECK(cert.consensus_error_bound == doctest::Approx(1.5));
  CHECK(cert.eta == doctest::Approx(std::sqrt(4.0 / 3.0) - 1.0));
  CHECK(cert.tau0 == doctest::Approx(0.25 * std::sqrt(8.0)));
  CHECK_FALSE(cert.tau1.has_value());
  // z0 - z* = (1.5, 1.5); beta0 equals beta* because alpha0 is the dual limit.
  CHECK(cert.u0_distance == doctest::Approx(std::sqrt(4.5)));
  REQUIRE(cert.iteration_bound.has_value());
  const auto expected = iteration_bound(cert.eta, 1.0, 1.0, 1, cert.spectral, std::sqrt(4.5), cert.tau0);
  CHECK(*cert.iteration_bound == expected.iterations);
  CHECK(*cert.omega == doctest::Approx(expected.omega));

  const auto unquantized = certify(g, m, spectral_quantities(m), objs, Eigen::Vector2d(-1, -1),
                                   Eigen::Vector2d(1, -1), CertifyOptions{1.0, 0.0, 1.5});
  CHECK_FALSE(unquantized.iteration_bound.has_value());
  CHECK(unquantized.consensus_error_bound == 0.0);
  CHECK_THROWS_AS(certify(g, m, spectral_quantities(m), objs, Eigen::Vector2d(-1, -1),
                          Eigen::Vector2d(1, 1), CertifyOptions{}),
                  std::invalid_argument);
}

TEST_CASE("rate constant does not depend on M") {
  const auto g = random_connected_graph(8, 14, 5);
  const auto m = build_matrices(g);
  const auto spec = spectral_quantities(m);
  auto objs_for = [](int dim) {
    std::vector<LocalObjective> out;
    for (int i = 0; i < 8; ++i) out.emplace_back(ScaledQuadratic{0.5 + 0.1 * i, Eigen::VectorXd::Constant(dim, i)});
    return out;
  };
  const auto c1 = certify(g, m, spec, objs_for(1), Eigen::VectorXd::Zero(8), Eigen::VectorXd::Zero(8),
                          CertifyOptions{1.0, 1.0, 1.5});
  const auto c3 = certify(g, m, spec, objs_for(3), Eigen::VectorXd::Zero(24), Eigen::VectorXd::Zero(24),
                          CertifyOptions{1.0, 1.0, 1.5});
  CHECK(c1.delta_rate == c3.delta_rate);
  CHECK(c1.eta == c3.eta);
}

TEST_CASE("certify the general case") {
  const auto g = random_connected_graph(6, 9, 3);
  const auto m = build_matrices(g);
  const auto spec = spectral_quantities(m);
  const auto lasso = build_problem_instance(Scenario::Lasso, 6, 3, 3);
  const auto cert = certify(g, m, spec, lasso, Eigen::VectorXd::Zero(18), Eigen::VectorXd::Zero(18),
                            CertifyOptions{1.0, 1.0, 1.5});
  CHECK_FALSE(cert.smooth);
  REQUIRE(cert.delta_x.has_value());
  REQUIRE(cert.tau1.has_value());
  std::vector<double> xi;
  for (const auto& o : lasso) xi.push_back(std::get<LeastSquaresL1>(o.data()).xi);
  CHECK(*cert.delta_x == doctest::Approx(delta_x_l1(xi, cert.m_g, 1.0, g.min_degree(), 3)));
  CHECK(*cert.tau1 == doctest::Approx(compute_tau1(*cert.delta_x, 1.0, 3, 1.0, spec)));
  // Distances are measured to the smooth-only optimum.
  CHECK((cert.reference.x_star - solve_reference(lasso, true).x_star).norm() < 1e-9);
  const auto expected = iteration_bound(cert.eta, 1.0, 1.0, g.n_edges(), spec, cert.u0_distance, *cert.tau1);
  CHECK(*cert.iteration_bound == expected.iterations);

  const auto boxes = build_problem_instance(Scenario::QuadraticBox, 6, 3, 3);
  const auto bc = certify(g, m, spec, boxes, Eigen::VectorXd::Zero(18), Eigen::VectorXd::Zero(18),
                          CertifyOptions{1.0, 1.0, 1.5});
  REQUIRE(bc.delta_x.has_value());
  std::vector<double> a0(6, 0.0), t, mg;
  std::vector<int> deg;
  double q0 = 0.0;
  for (int i = 0; i < 6; ++i) {
    const auto& q = std::get<QuadraticBox>(boxes[i].data());
    t.push_back(box_gradient_bound(q));
    mg.push_back(boxes[i].m_g());
    deg.push_back(g.degree(i));
    q0 = std::max(q0, box_radius_bound(q, 1.0));
  }
  CHECK(*bc.delta_x == doctest::Approx(delta_x_box(a0, t, 1.0, deg, q0, mg, 3)));
}
