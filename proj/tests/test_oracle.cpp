#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "perron/lyapunov_perron.hpp"
#include "perron/oracle.hpp"

using namespace perron;
using fixtures::vec;

TEST_CASE("stable-point oracle on the quadratic model") {
  const auto q = fixtures::model("P1");
  const double R = q->ladder.R();
  for (double s : {-0.8, 0.3, 1.0}) {
    const ShootingResult r = stable_point_oracle(*q, vec({0, s * R}), 40.0 / q->ladder.lambda, 1e-10);
    CHECK(std::abs(r.solution[0]) <= r.bracket_width);
    CHECK(r.solution[1] == s * R);
  }
  const ShootingResult z = stable_point_oracle(*q, vec({0, 0}), 40.0, 1e-10);
  CHECK(z.solution.norm() <= z.bracket_width);
}

TEST_CASE("stable-point oracle agrees with the stable graph") {
  const auto m = fixtures::model("P2");
  const double R = m->ladder.R();
  for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    CAPTURE(s);
    const Eigen::VectorXd zp = vec({0, s * R});
    const ShootingResult r = stable_point_oracle(*m, zp, 40.0 / m->ladder.lambda, 1e-8);
    CHECK(r.bracket_width <= 1e-8);
    CHECK((r.solution - stable_graph_point(*m, zp)).norm() <= 1e-6);
  }
}

TEST_CASE("stable-point oracle with two unstable directions") {
  const auto m = fixtures::model("P4");
  const Eigen::MatrixXd B = m->split.basis(Subspace::Plus);
  const Eigen::VectorXd zp = 0.5 * m->ladder.R() * (B.col(0) + B.col(1)) / std::sqrt(2.0);
  const ShootingResult r = stable_point_oracle(*m, zp, 40.0 / m->ladder.lambda, 1e-10);
  CHECK((r.solution - stable_graph_point(*m, zp)).norm() <= 1e-6);
}

TEST_CASE("mixed-problem oracle") {
  const auto q = fixtures::model("P1");
  const double T = q->ladder.T0;
  const Eigen::VectorXd zm = vec({0.2, 0.0});
  const ShootingResult r = mixed_bvp_oracle(*q, T, zm, vec({0, 0.5 * q->ladder.R()}));
  CHECK(r.solution[0] == doctest::Approx(std::exp(-T) * 0.2).epsilon(1e-9));

  // z_+ = 0: the oracle trajectory is t -> phi_t z_-^T.
  const ShootingResult r0 = mixed_bvp_oracle(*q, T, zm, vec({0, 0}));
  for (double t : {0.0, 0.25 * T, 0.5 * T, T})
    CHECK(r0.trajectory.evaluate(t)[0] == doctest::Approx(std::exp(t - T) * 0.2).epsilon(1e-9));

  const auto m = fixtures::model("P2");
  const Eigen::VectorXd zm2 = m->split.proj_minus * descending_disk(*m, m->ladder.epsilon, 2).boundary.front();
  for (double T2 : {m->ladder.T0, m->ladder.T0 + 4.0})
    for (double s : {-0.8, 0.0, 0.8}) {
      const Eigen::VectorXd zp = vec({0, s * m->ladder.R()});
      const Curve c = MixedSolver(*m, T2, zm2).solve(zp).curve;
      const ShootingResult o = mixed_bvp_oracle(*m, T2, zm2, zp, 1e-10, 1e-10);
      double sup = 0;
      for (int i = 0; i < c.grid.size(); ++i)
        sup = std::max(sup, (m->ambient(c.at_node(i)) - o.trajectory.evaluate(c.grid.node(i))).norm());
      CHECK(sup <= 1e-6);
    }
}
