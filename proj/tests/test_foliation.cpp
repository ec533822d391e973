#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "fixtures.hpp"
#include "perron/error.hpp"
#include "perron/foliation.hpp"

using namespace perron;
using fixtures::vec;

namespace {

const FoliationAtlas& quartic_atlas() {
  static const FoliationAtlas atlas = [] {
    AtlasSpec spec;
    spec.leaf_points = 9;
    return build_atlas(fixtures::model("P2"), spec);
  }();
  return atlas;
}

const FoliationAtlas& quadratic_atlas() {
  static const FoliationAtlas atlas = [] {
    AtlasSpec spec;
    spec.leaf_points = 9;
    return build_atlas(fixtures::model("P1"), spec);
  }();
  return atlas;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidConfig;
}

}  // namespace

TEST_CASE("Conley pair of the quadratic model in closed form") {
  const auto q = fixtures::model("P1");
  const double eps = 0.02, tau = 2.0;
  // The membership example: f(0.1, 0.1) = -0.005 + 0.01 = 0.005 <= eps, but
  // after time tau the point has dropped far below c - eps.
  const auto f = [](double x, double y) { return -0.5 * x * x + y * y; };
  CHECK(f(0.1, 0.1) == doctest::Approx(0.005));
  CHECK(f(0.1 * std::exp(tau), 0.1 * std::exp(-2 * tau)) < -eps);

  const ConleyPair P = build_pair(*q, eps, tau);
  bool has_origin = false;
  for (std::size_t i = 0; i < P.N.size(); ++i) {
    const double x = P.N[i][0], y = P.N[i][1];
    has_origin = has_origin || P.N[i].norm() == 0.0;
    CHECK(f(x, y) <= eps + 1e-15);
    CHECK(f(x * std::exp(tau), y * std::exp(-2 * tau)) >= -eps - 1e-12);
    const bool exits = f(x * std::exp(2 * tau), y * std::exp(-4 * tau)) <= -eps;
    CHECK(P.in_L[i] == exits);
  }
  CHECK(has_origin);
  CHECK(P.exit_count() > 0);
  CHECK(P.exit_count() < P.N.size());
}

TEST_CASE("Conley pair of the quartic model against a finer integration") {
  const auto m = fixtures::model("P2");
  const double eps = m->ladder.epsilon, tau = m->ladder.T0;
  PairSampling ps;
  ps.points_per_axis = 21;
  const ConleyPair P = build_pair(*m, eps, tau, ps);
  FlowOptions fine;
  fine.tol = ps.flow_tol / 100;
  int checked = 0;
  for (std::size_t i = 0; i < P.N.size(); i += 7, ++checked) {
    const Trajectory tr = integrate_forward(m->problem, m->ambient(P.N[i]), 2 * tau, fine);
    CHECK(m->level(P.N[i]) <= eps);
    CHECK(m->problem.value(tr.evaluate(tau)) - P.c >= -eps - 1e-12);
    const bool exits = m->problem.value(tr.terminal()) - P.c <= -eps;
    CHECK(P.in_L[i] == exits);
  }
  CHECK(checked > 5);

  ps.minus_scale = 0.5;
  CHECK(kind_of([&] { build_pair(*m, eps, tau, ps); }) == ErrorKind::ComponentAmbiguous);
}

TEST_CASE("quadratic leaves are flat") {
  const FoliationAtlas& A = quadratic_atlas();
  const auto& q = *A.model;
  REQUIRE(A.leaves.size() > 1);
  CHECK(A.leaves[0].label.center);
  for (std::size_t i = 1; i < A.leaves.size(); ++i) {
    const Leaf& L = A.leaves[i];
    const Eigen::VectorXd expected = std::exp(-L.label.T) * L.label.alpha;
    CHECK((L.base - expected).norm() <= 1e-15);
    for (const auto& v : L.graph.values) CHECK((v - expected).norm() <= 1e-15);
    for (const auto& s : L.samples) CHECK(q.level(s) <= A.epsilon * (1 + 1e-12));
  }
}

TEST_CASE("minimal atlas") {
  AtlasSpec spec;
  spec.with_pair = false;
  spec.leaf_points = 5;
  const auto q = fixtures::model("P1");
  spec.T_grid = {q->ladder.T0};
  const FoliationAtlas A = build_atlas(q, spec);
  // One leaf per point of the zero-dimensional sphere, plus the center.
  CHECK(A.leaves.size() == 3);

  spec.T_grid = {0.5 * q->ladder.T0};
  CHECK(kind_of([&] { build_atlas(q, spec); }) == ErrorKind::HorizonMismatch);
}

TEST_CASE("leaf disjointness") {
  const FoliationAtlas& Q = quadratic_atlas();
  const DisjointReport rq = check_disjoint(Q, 100);
  CHECK(rq.pass());
  CHECK(rq.skipped > 0);
  for (const auto& row : rq.rows) {
    const Leaf &a = Q.leaves[row.a], &b = Q.leaves[row.b];
    if (a.label.center || b.label.center || a.label.T != b.label.T) continue;
    // (T, alpha) against (T, -alpha).
    CHECK(row.separation == doctest::Approx(2 * std::exp(-a.label.T) * a.label.alpha.norm()).epsilon(1e-12));
  }

  const DisjointReport r = check_disjoint(quartic_atlas(), 100);
  CHECK(r.pass());
  CHECK(r.min_separation() > 0.0);
  CHECK_NOTHROW(require(r));
}

TEST_CASE("induced semi-flow") {
  const FoliationAtlas& Q = quadratic_atlas();
  const int i = 1;
  const Leaf& L = Q.leaves[i];
  const Eigen::VectorXd z = L.samples.back();
  for (double t : {0.0, 0.7, 3.0}) {
    const Eigen::VectorXd th = induced_flow(Q, i, z, t);
    const Eigen::VectorXd expected = L.base + std::exp(-2 * t) * (Q.model->split.proj_plus * z);
    CHECK((th - expected).norm() <= 1e-12);
    CHECK((induced_flow(Q, i, L.base, t) - L.base).norm() <= 1e-15);
  }
  CHECK((induced_flow(Q, i, z, std::numeric_limits<double>::infinity()) - L.base).norm() == 0.0);

  const FoliationAtlas& A = quartic_atlas();
  const auto& lad = A.model->ladder;
  for (std::size_t k = 1; k < A.leaves.size(); k += 3) {
    const Leaf& leaf = A.leaves[k];
    for (const auto& s : leaf.samples) {
      const double t = 3 * lad.T0;
      CHECK((induced_flow(A, int(k), s, t) - leaf.base).norm() <= lad.rho * std::exp(-t * lad.lambda));
    }
  }
  const Eigen::VectorXd far = A.model->split.basis(Subspace::Plus).col(0) * 2 * lad.R();
  CHECK(kind_of([&] { induced_flow(A, 1, far, 1.0); }) == ErrorKind::OutsideLeafDomain);
}

TEST_CASE("leaf invariance and contraction onto the center leaf") {
  const FoliationAtlas& A = quartic_atlas();
  const LeafAudit inv = leaf_invariance(A, {0.25, 0.5});
  CHECK(inv.pass());
  CHECK(!inv.rows.empty());
  const LeafAudit con = contraction_to_center(A);
  CHECK(con.pass());
  for (const auto& row : con.rows)
    if (row.leaf > 0)
      CHECK(row.bound == doctest::Approx(std::exp(-A.leaves[row.leaf].label.T * A.model->ladder.lambda / 8)));
}

TEST_CASE("deformation retract audit") {
  for (const FoliationAtlas* A : {&quadratic_atlas(), &quartic_atlas()}) {
    const RetractReport r = retract_audit(*A);
    CHECK(r.check_i());
    CHECK(r.check_ii());
    CHECK(r.max_fix_error <= 1e-10);
    CHECK(r.check_iii());
    CHECK(r.mu_audit > 0.0);
    CHECK(r.surrogate_ok());
    CHECK(r.max_cocycle_error <= 1e-10);
    CHECK_NOTHROW(require(r));
  }
  RetractReport bad;
  bad.pair_failures = 1;
  CHECK(kind_of([&] { require(bad); }) == ErrorKind::RetractViolation);
}

TEST_CASE("inward pointing on the quadratic center leaf") {
  // d/dt f(phi_t(0, y)) = -|grad f|^2 = -4 y^2 = -4 eps at the boundary y^2 = eps.
  const FoliationAtlas& Q = quadratic_atlas();
  for (const auto& b : Q.leaves[0].boundary) {
    const Eigen::VectorXd g = Q.model->problem.gradient(Q.model->ambient(b));
    CHECK(-g.squaredNorm() == doctest::Approx(-4 * Q.epsilon).epsilon(1e-6));
  }
}

TEST_CASE("shrinking to a box") {
  const auto m = fixtures::model("P2");
  PairSampling ps;
  ps.points_per_axis = 15;
  const double box = 0.5 * m->ladder.R();
  const ShrinkResult r = shrink_to_box(*m, box, m->ladder.epsilon, m->ladder.T0, 20, ps);
  CHECK(r.inside);
  CHECK(r.extent <= box);
}

TEST_CASE("leaf and pair CSV layout") {
  const FoliationAtlas& A = quadratic_atlas();
  std::ostringstream leaf, pair;
  write_leaf_csv(leaf, A, 1);
  write_pair_csv(pair, *A.model, A.pair);
  CHECK(leaf.str().rfind("zp1,x1,x2,f\n", 0) == 0);
  CHECK(pair.str().rfind("set,x1,x2,f\n", 0) == 0);
}
