#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "perron/error.hpp"
#include "perron/flow.hpp"

using namespace perron;
using fixtures::vec;

TEST_CASE("linear flow is the matrix exponential") {
  const auto q = fixtures::model("P1");
  FlowOptions fo;
  fo.tol = 1e-12;
  const Trajectory tr = integrate_forward(q->problem, vec({0.01, 0.3}), 2.0, fo);
  CHECK(tr.terminal()[0] == doctest::Approx(0.01 * std::exp(2.0)).epsilon(1e-10));
  CHECK(tr.terminal()[1] == doctest::Approx(0.3 * std::exp(-4.0)).epsilon(1e-10));
  // Dense output between steps.
  const Eigen::VectorXd mid = tr.evaluate(0.77);
  CHECK(mid[0] == doctest::Approx(0.01 * std::exp(0.77)).epsilon(1e-8));
  CHECK(mid[1] == doctest::Approx(0.3 * std::exp(-1.54)).epsilon(1e-8));

  const Trajectory rest = integrate_forward(q->problem, vec({0, 0}), 5.0);
  for (const auto& s : rest.states) CHECK(s.norm() == 0.0);
}

TEST_CASE("quartic flow against a finer reference") {
  const auto m = fixtures::model("P2");
  FlowOptions coarse, fine;
  coarse.tol = 1e-8;
  fine.tol = 1e-10;
  const Eigen::VectorXd a = integrate_forward(m->problem, vec({0.1, 0.1}), 1.0, coarse).terminal();
  const Eigen::VectorXd b = integrate_forward(m->problem, vec({0.1, 0.1}), 1.0, fine).terminal();
  CHECK((a - b).norm() <= 1e-7);
}

TEST_CASE("f decreases along trajectories") {
  const auto m = fixtures::model("P3");
  FlowOptions fo;
  fo.tol = 1e-11;
  const Trajectory tr = integrate_forward(m->problem, vec({0.05, 0.2, -0.1}), 3.0, fo);
  for (std::size_t i = 1; i < tr.values.size(); ++i) {
    CHECK(tr.values[i] <= tr.values[i - 1] + 1e-14);
    // f(t_i) - f(t_{i-1}) = -int |grad f|^2, trapezoid with Hermite midpoint (Simpson).
    const double h = tr.times[i] - tr.times[i - 1];
    const Eigen::VectorXd mid = tr.evaluate(tr.times[i - 1] + h / 2);
    const double g0 = tr.velocities[i - 1].squaredNorm(), g1 = tr.velocities[i].squaredNorm();
    const double gm = m->problem.gradient(mid).squaredNorm();
    CHECK(tr.values[i] - tr.values[i - 1] == doctest::Approx(-h * (g0 + 4 * gm + g1) / 6).epsilon(1e-5).scale(1e-12));
  }
}

TEST_CASE("blow-up and invalid horizons are reported") {
  const auto m = fixtures::model("P2");
  try {
    integrate_forward(m->problem, vec({0.5, 0.0}), 100.0);
    FAIL("expected BlowUp");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BlowUp);
  }
  CHECK_THROWS_AS(integrate_forward(m->problem, vec({0.1, 0.0}), -1.0), Error);
}

TEST_CASE("stop predicate and level crossing") {
  const auto q = fixtures::model("P1");
  const Trajectory tr =
      integrate_forward(q->problem, vec({0.01, 0.0}), 10.0, {}, [](double, const Eigen::VectorXd& p) { return p.norm() > 0.1; });
  CHECK(tr.stopped);
  CHECK(tr.end_time() < 10.0);

  // f = -x^2/2 along (0.01 e^t, 0): f = -0.005 when x = 0.1, i.e. t = ln 10.
  const LevelCrossing c = first_level_crossing(q->problem, vec({0.01, 0.0}), -0.005, 10.0);
  CHECK(c.reached);
  CHECK(c.time == doctest::Approx(std::log(10.0)).epsilon(1e-7));
}

TEST_CASE("trajectory CSV layout") {
  const auto q = fixtures::model("P1");
  std::ostringstream os;
  write_trajectory_csv(os, integrate_forward(q->problem, vec({0.01, 0.1}), 0.5));
  const std::string s = os.str();
  CHECK(s.rfind("t,x1,x2,f\n", 0) == 0);
  CHECK(s.find("0.0000000000000000e+00,1.0000000000000000e-02") != std::string::npos);
}

TEST_CASE("algebraic backward flow") {
  const auto q = fixtures::model("P1");
  const Eigen::VectorXd a = vec({0.2, 0.0});
  CHECK((algebraic_backward(*q, a, 1.5) - std::exp(-1.5) * a).norm() <= 1e-14);
  CHECK((algebraic_backward(*q, a, 0.0) - a).norm() == 0.0);
  try {
    algebraic_backward(*q, vec({0.2, 0.1}), 1.0);
    FAIL("expected NotOnUnstableManifold");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotOnUnstableManifold);
  }

  const auto m = fixtures::model("P2");
  const Eigen::VectorXd qpt = unstable_graph_point(*m, vec({0.8 * m->ladder.R(), 0.0}));
  for (double t : {0.5, 2.0, 5.0}) {
    const Eigen::VectorXd back = algebraic_backward(*m, qpt, t);
    FlowOptions fo;
    fo.tol = 1e-12;
    const Trajectory tr = integrate_forward(m->problem, m->ambient(back), t, fo);
    CHECK((tr.terminal() - m->ambient(qpt)).norm() <= 1e-6);
  }
}

TEST_CASE("descending and ascending disks") {
  const auto q = fixtures::model("P1");
  const Disk d = descending_disk(*q, 0.02, 2);
  REQUIRE(d.boundary.size() == 2);
  CHECK(std::abs(d.boundary[0][0]) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(d.boundary[0][0] == doctest::Approx(-d.boundary[1][0]).epsilon(1e-9));
  CHECK(std::abs(d.boundary[0][1]) <= 1e-14);
  CHECK(descending_disk(*q, 1e-8, 2).max_radius() <= 2e-4);
  // Ascending: f = x2^2 = eps.
  CHECK(ascending_disk(*q, 0.01, 2).min_radius() == doctest::Approx(0.1).epsilon(1e-9));

  // Quartic model: sphere points sit on the level and are cross-checked
  // against the stable-point oracle on the unstable side by forward flow.
  const auto m = fixtures::model("P2");
  const double eps = m->ladder.epsilon;
  const Disk dm = descending_disk(*m, eps, 2);
  for (const auto& p : dm.boundary) {
    CHECK(m->level(p) == doctest::Approx(-eps).epsilon(1e-9));
    CHECK((algebraic_backward(*m, p, 0.0) - p).norm() <= 1e-14);
  }
  try {
    descending_disk(*m, 1.0, 2);
    FAIL("expected LevelNotReached");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LevelNotReached);
  }
}

TEST_CASE("sphere directions") {
  const Eigen::MatrixXd line = Eigen::MatrixXd::Identity(3, 1);
  CHECK(sphere_directions(line, 8).size() == 2);
  const Eigen::MatrixXd plane = Eigen::MatrixXd::Identity(4, 2);
  const auto dirs = sphere_directions(plane, 8);
  CHECK(dirs.size() == 8);
  for (const auto& v : dirs) CHECK(v.norm() == doctest::Approx(1.0));
}

TEST_CASE("resolved disk parameters are consistent") {
  const auto m = fixtures::model("P2");
  const RateLadder& L = m->ladder;
  CHECK(L.disks_resolved);
  CHECK(L.epsilon == doctest::Approx(L.varsigma / 2));
  CHECK(L.varkappa <= 1.0);
  CHECK(L.varkappa == doctest::Approx(ascending_disk(*m, L.varsigma, 8).min_radius()).epsilon(1e-9));
}
