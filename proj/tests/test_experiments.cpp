#include <doctest.h>

#include <cmath>

#include "qcadmm/experiments.hpp"
#include "qcadmm/oracle.hpp"

using namespace qcadmm;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::Quadratic;
  cfg.n = 8;
  cfg.edge_counts = {10, 16};
  cfg.m = 2;
  cfg.deltas = {0.5, 1.0};
  cfg.rhos = {1.0};
  cfg.seeds = {1, 2, 3};
  cfg.max_iterations = 2000;
  return cfg;
}

Problem two_node_problem() {
  return Problem{NetworkGraph(2, {{0, 1}}),
                 {LocalObjective(ScaledQuadratic{0.5, Eigen::VectorXd::Constant(1, 1.5)}),
                  LocalObjective(ScaledQuadratic{0.5, Eigen::VectorXd::Constant(1, 3.5)})},
                 Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, -1)};
}

}  // namespace

TEST_CASE("engine names") {
  CHECK(parse_engine("c_admm") == Engine::CAdmm);
  CHECK(parse_engine(to_string(Engine::QcAdmm)) == Engine::QcAdmm);
  CHECK_THROWS_AS(parse_engine("admm"), std::invalid_argument);
}

TEST_CASE("make_problem is seeded") {
  const auto a = make_problem(Scenario::Lasso, 10, 20, 3, 7);
  const auto b = make_problem(Scenario::Lasso, 10, 20, 3, 7);
  const auto c = make_problem(Scenario::Lasso, 10, 20, 3, 8);
  CHECK(a.graph == b.graph);
  CHECK(a.graph.n_edges() == 20);
  CHECK(is_connected(a.graph.n_agents(), a.graph.edges()));
  CHECK(std::get<LeastSquaresL1>(a.objectives[4].data()).y_vec ==
        std::get<LeastSquaresL1>(b.objectives[4].data()).y_vec);
  CHECK(std::get<LeastSquaresL1>(a.objectives[4].data()).y_vec !=
        std::get<LeastSquaresL1>(c.objectives[4].data()).y_vec);
  CHECK(a.x0.isZero(0.0));
  CHECK(a.alpha0.size() == 30);
  CHECK(problem_seed(1) != problem_seed(2));
}

TEST_CASE("sweep order, determinism across thread counts") {
  auto cfg = small_config();
  cfg.threads = 1;
  const auto serial = run_experiment(cfg);
  cfg.threads = 4;
  const auto parallel = run_experiment(cfg);
  REQUIRE(serial.rows.size() == 12);
  REQUIRE(parallel.rows.size() == 12);
  std::size_t i = 0;
  for (int e : cfg.edge_counts)
    for (double d : cfg.deltas)
      for (auto s : cfg.seeds) {
        const auto& r = serial.rows[i];
        CHECK(r.e == e);
        CHECK(r.delta == d);
        CHECK(r.seed == s);
        CHECK(r.error.empty());
        const auto& p = parallel.rows[i];
        CHECK(p.final_error == r.final_error);
        CHECK(p.iters_to_fixed_point == r.iters_to_fixed_point);
        CHECK(p.error_bound == r.error_bound);
        ++i;
      }
}

TEST_CASE("quadratic sweep rows respect their certificates") {
  const auto s = run_experiment(small_config());
  for (const auto& r : s.rows) {
    REQUIRE(r.iters_to_fixed_point.has_value());
    REQUIRE(r.iter_bound.has_value());
    CHECK(*r.iters_to_fixed_point <= *r.iter_bound);
    CHECK(r.final_error <= r.error_bound);
    CHECK(r.bound_ok);
    // Independent evaluation of (1/2 + 2 rho E / sum m_g) sqrt(M) Delta, m_g = 2a for quadratics.
    const auto p = make_problem(Scenario::Quadratic, r.n, r.e, r.m, r.seed);
    double sum_mg = 0;
    for (const auto& o : p.objectives) sum_mg += 2 * std::get<ScaledQuadratic>(o.data()).a;
    CHECK(r.error_bound == doctest::Approx((0.5 + 2 * r.rho * r.e / sum_mg) * std::sqrt(r.m) * r.delta));
    CHECK(r.eta > 0);
    CHECK_FALSE(r.delta_x.has_value());
  }
}

TEST_CASE("averages are the means of their group") {
  const auto s = run_experiment(small_config());
  REQUIRE(s.averages.size() == 4);
  for (const auto& a : s.averages) {
    double err = 0, iters = 0, bound = 0, ib = 0;
    int count = 0;
    for (const auto& r : s.rows) {
      if (r.e != a.e || r.delta != a.delta || r.rho != a.rho) continue;
      err += r.final_error;
      iters += static_cast<double>(*r.iters_to_fixed_point);
      bound += r.error_bound;
      ib += static_cast<double>(*r.iter_bound);
      ++count;
    }
    CHECK(count == 3);
    CHECK(a.runs == 3);
    CHECK(a.failed == 0);
    CHECK(a.mean_final_error == doctest::Approx(err / 3));
    CHECK(a.mean_iterations == doctest::Approx(iters / 3));
    CHECK(a.mean_error_bound == doctest::Approx(bound / 3));
    REQUIRE(a.mean_iter_bound.has_value());
    CHECK(*a.mean_iter_bound == doctest::Approx(ib / 3));
    CHECK(a.fixed_point_fraction == 1.0);
    CHECK(a.all_bound_ok);
  }
}

TEST_CASE("fixed problem sweep") {
  ExperimentConfig cfg;
  cfg.problem = two_node_problem();
  cfg.deltas = {1.0};
  cfg.seeds = {1};
  cfg.max_iterations = 50;
  const auto s = run_experiment(cfg);
  REQUIRE(s.rows.size() == 1);
  const auto& r = s.rows[0];
  CHECK(r.error.empty());
  CHECK(r.n == 2);
  CHECK(r.e == 1);
  CHECK(r.m == 1);
  REQUIRE(r.iters_to_fixed_point.has_value());
  CHECK(*r.iters_to_fixed_point == 1);
  CHECK(r.final_error == 1.5);
  // (1/2 + 2 rho E / sum m_g) sqrt(M) Delta with m_g = 1 on both agents.
  CHECK(r.error_bound == doctest::Approx(1.5));
  CHECK(r.bound_ok);
  CHECK(r.u0_distance == doctest::Approx(std::sqrt(4.5)));
}

TEST_CASE("per-run failures are captured") {
  ExperimentConfig cfg;
  cfg.problem = Problem{path_graph(2),
                        {LocalObjective(LeastSquaresL1{Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Ones(1), 0.1}),
                         LocalObjective(QuadraticBox{1.0, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, -1),
                                                     Eigen::VectorXd::Constant(1, 1)})},
                        Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
  cfg.seeds = {1, 2};
  const auto s = run_experiment(cfg);
  REQUIRE(s.rows.size() == 2);
  for (const auto& r : s.rows) CHECK_FALSE(r.error.empty());
  REQUIRE(s.averages.size() == 1);
  CHECK(s.averages[0].failed == 2);
  CHECK_FALSE(s.averages[0].all_bound_ok);
}

TEST_CASE("config validation") {
  auto cfg = small_config();
  cfg.deltas.clear();
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.rhos = {0.0};
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.edge_counts = {3};
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.edge_counts = {29};
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.mu = 1.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  CHECK_NOTHROW(validate(small_config()));
}

TEST_CASE("lasso rows carry delta_x") {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::Lasso;
  cfg.n = 6;
  cfg.edge_counts = {8};
  cfg.m = 3;
  cfg.seeds = {4};
  cfg.max_iterations = 50;
  const auto s = run_experiment(cfg);
  REQUIRE(s.rows.size() == 1);
  const auto& r = s.rows[0];
  CHECK(r.error.empty());
  REQUIRE(r.delta_x.has_value());
  CHECK(*r.delta_x > 0);
  CHECK(r.iterations_run <= 50);
}
