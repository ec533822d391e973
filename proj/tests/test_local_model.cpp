#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "perron/error.hpp"
#include "perron/local_model.hpp"
#include "perron/lyapunov_perron.hpp"

using namespace perron;
using fixtures::vec;

namespace {

GradientProblem quartic() { return fixtures::config("P2").problem; }

}  // namespace

TEST_CASE("polynomial derivatives match finite differences") {
  const GradientProblem p = fixtures::config("P3").problem;
  const Eigen::VectorXd x = vec({0.13, -0.07, 0.21});
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
    e[i] = h;
    CHECK(p.gradient(x)[i] == doctest::Approx((p.value(x + e) - p.value(x - e)) / (2 * h)).epsilon(1e-8));
    const Eigen::VectorXd col = (p.gradient(x + e) - p.gradient(x - e)) / (2 * h);
    CHECK((p.hessian_at(x).col(i) - col).norm() < 1e-8);
  }
}

TEST_CASE("config parsing and validation") {
  const auto cfg = fixtures::config("P1");
  CHECK(cfg.problem.dimension() == 2);
  CHECK(cfg.overrides.lambda.value() == 0.5);
  CHECK(cfg.overrides.varkappa.value() == 0.1);
  CHECK_THROWS_AS(parse_config("{not json"), Error);
  // Not a critical point: gradient (1, 0) at the origin.
  try {
    parse_config(R"({"dimension": 2, "objective": [[[1, 0], 1.0], [[0, 2], 1.0]]})");
    FAIL("non-critical point accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfig);
  }
  CHECK_THROWS_AS(load_config("configs/does_not_exist.json"), Error);
}

TEST_CASE("nonlinearity") {
  const GradientProblem quad = fixtures::config("P1").problem;
  const SpectralSplit sq = split(quad.hessian_at(quad.critical_point));
  CHECK(nonlinearity(quad, sq, vec({0.3, -0.4})).norm() == 0.0);

  const GradientProblem p = quartic();
  const SpectralSplit s = split(p.hessian_at(p.critical_point));
  const Eigen::VectorXd h = nonlinearity(p, s, vec({0.1, 0.1}));
  CHECK(h[0] == doctest::Approx(-5e-4).epsilon(1e-12));
  CHECK(h[1] == doctest::Approx(-5e-4).epsilon(1e-12));
  CHECK(nonlinearity(p, s, vec({0.0, 0.0})).norm() == 0.0);

  // Jacobian against central differences.
  const Eigen::VectorXd xi = vec({0.2, -0.15});
  const Eigen::MatrixXd J = nonlinearity_jacobian(p, s, xi);
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(2);
    e[j] = 1e-6;
    const Eigen::VectorXd fd = (nonlinearity(p, s, xi + e) - nonlinearity(p, s, xi - e)) / 2e-6;
    CHECK((J.col(j) - fd).norm() < 1e-9);
  }
}

TEST_CASE("sampled Lipschitz modulus") {
  const GradientProblem quad = fixtures::config("P1").problem;
  const SpectralSplit sq = split(quad.hessian_at(quad.critical_point));
  const KappaTable kq = lipschitz_modulus(quad, sq, default_radius_grid(1.0), 200);
  for (double k : kq.kappa) CHECK(k == 0.0);

  const GradientProblem p = quartic();
  const SpectralSplit s = split(p.hessian_at(p.critical_point));
  const KappaTable k = lipschitz_modulus(p, s, {0.05, 0.1, 0.2}, 400);
  CHECK(k.at(0.0) == 0.0);
  for (std::size_t i = 1; i < k.kappa.size(); ++i) CHECK(k.kappa[i] >= k.kappa[i - 1]);

  // Dense grid maximum of |dh| on the closed ball of radius 0.1.
  double dense = 0.0;
  for (int i = -200; i <= 200; ++i)
    for (int j = -200; j <= 200; ++j) {
      const Eigen::VectorXd xi = vec({0.1 * i / 200.0, 0.1 * j / 200.0});
      if (xi.norm() <= 0.1) dense = std::max(dense, nonlinearity_jacobian(p, s, xi).operatorNorm());
    }
  REQUIRE(k.radii[2] == 0.1);
  const double raw = k.raw[2];
  CHECK(raw <= dense * (1 + 1e-12));
  CHECK(raw >= 0.5 * dense);
  CHECK(k.at(0.1) >= dense);
  CHECK(k.at(0.1) <= 2.0 * dense);
  // Hand estimate: the largest eigenvalue of dh on B_0.1 is 3/4 * 0.1^2.
  CHECK(k.at(0.1) >= 0.015 / 2);
  CHECK(k.at(0.1) <= 0.015 * 2);
}

TEST_CASE("ladder of the quadratic model") {
  const auto m = fixtures::model("P1");
  const RateLadder& L = m->ladder;
  CHECK(L.lambda == 0.5);
  CHECK(L.delta < 0.25);
  CHECK(L.mu > 0.5);
  CHECK(L.mu < 0.75);
  CHECK(L.kappa_rho == 0.0);
  CHECK(L.varkappa == 0.1);
  CHECK(L.T1 == doctest::Approx(std::log(10.0) / 0.5));
  CHECK(L.T1 == doctest::Approx(4.605).epsilon(1e-3));
  CHECK(L.T0 == std::max({L.T1, L.T2, 1.0}));
  CHECK(L.violations().empty());
}

TEST_CASE("horizon T2 in closed form") {
  const double T2 = horizon_T2(0.6);
  CHECK(T2 == doctest::Approx(4.0 * std::log(8.0) / 0.6).epsilon(1e-14));
  CHECK(T2 == doctest::Approx(13.86).epsilon(1e-3));
  CHECK(std::exp(-T2 * 0.6 / 4.0) <= 0.125);
}

TEST_CASE("ladder identities hold exactly on the reference problems") {
  for (const char* name : {"P1", "P2", "P3"}) {
    CAPTURE(name);
    const RateLadder& L = fixtures::model(name)->ladder;
    CHECK(L.T1 == -std::log(L.varkappa) / L.lambda);
    CHECK(L.T0 == std::max({L.T1, L.T2, 1.0}));
    CHECK(L.c1 == 2.0 * (std::abs(L.lambda1) + 1.0));
    CHECK(L.c_star == 2.0 * L.kappa_star * (1.0 / L.delta + 1.0 / L.lambda) + 0.25);
    CHECK(L.smallness() <= 0.125);
    CHECK(L.contraction_bound() <= 0.5);
    CHECK(L.varkappa <= 1.0);
    CHECK(L.violations().empty());
  }
}

TEST_CASE("flattening") {
  const auto q = fixtures::model("P1");
  const GraphSample Fq = graph_F_inf(*q, 5), Gq = graph_G_inf(*q, 5);
  const Eigen::VectorXd p = vec({0.05, -0.1});
  CHECK((flatten(Fq, Gq, q->split, p) - p).norm() < 1e-14);
  CHECK(flatten(Fq, Gq, q->split, vec({0, 0})).norm() == 0.0);

  const auto m = fixtures::model("P2");
  const GraphSample F = graph_F_inf(*m, 9), G = graph_G_inf(*m, 9);
  for (int i = 0; i < F.grid.size(); ++i) {
    const Eigen::VectorXd on_graph = F.grid.point(i) + F.values[i];
    const Eigen::VectorXd y = flatten(F, G, m->split, on_graph);
    CHECK((m->split.proj_plus * y).norm() <= F.interpolation_error() + 1e-14);
  }
}
