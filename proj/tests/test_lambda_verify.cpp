#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "perron/error.hpp"
#include "perron/lambda_verify.hpp"

using namespace perron;
using fixtures::vec;

namespace {

SweepSpec sweep(const LocalModel& m, int horizons, int per_axis) {
  SweepSpec s;
  s.T_grid = horizon_grid(m.ladder, horizons, 1.0);
  for (const auto& a : descending_disk(m, m.ladder.epsilon, 2).boundary) s.z_minus.push_back(m.split.proj_minus * a);
  s.z_plus = zplus_samples(m, per_axis);
  return s;
}

}  // namespace

TEST_CASE("horizon grid and samples") {
  const auto m = fixtures::model("P2");
  const auto T = horizon_grid(m->ladder, 5, 1.0);
  REQUIRE(T.size() == 5);
  CHECK(T.front() == std::max(m->ladder.T0, m->ladder.T2));
  CHECK(T.back() == doctest::Approx(T.front() + 4.0));
  for (const auto& z : zplus_samples(*m, 5)) CHECK(z.norm() <= m->ladder.R() * (1 + 1e-15));
}

TEST_CASE("C0 convergence on the quadratic model is the closed form") {
  const auto q = fixtures::model("P1");
  const SweepSpec s = sweep(*q, 5, 3);
  const ConvergenceReport r = c0_convergence(*q, s);
  CHECK(r.pass());
  for (const auto& row : r.rows) CHECK(row.gap == doctest::Approx(std::exp(-row.T) * row.z_minus.norm()).epsilon(1e-12));
  CHECK(r.fitted_rate == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.fitted_rate >= q->ladder.lambda / 8);

  // Doubling the horizon shrinks the gap at least by e^{-T lambda/8}.
  SweepSpec d = s;
  const double T1 = s.T_grid.front();
  d.T_grid = {T1, 2 * T1};
  d.z_plus = {vec({0, 0})};
  d.z_minus.resize(1);
  const ConvergenceReport rd = c0_convergence(*q, d);
  REQUIRE(rd.rows.size() == 2);
  CHECK(rd.rows[1].gap / rd.rows[0].gap <= std::exp(-T1 * q->ladder.lambda / 8));
}

TEST_CASE("C0 convergence on the quartic model") {
  const auto m = fixtures::model("P2");
  const ConvergenceReport r = c0_convergence(*m, sweep(*m, 5, 3));
  CHECK(r.pass());
  CHECK(r.has_rate);
  CHECK(r.fitted_rate >= m->ladder.lambda / 8);
  MESSAGE("fitted rate " << r.fitted_rate << " vs floor " << r.rate_floor);
}

TEST_CASE("C1 convergence") {
  const auto q = fixtures::model("P1");
  SweepSpec s = sweep(*q, 3, 3);
  s.z_plus = zplus_samples(*q, 3, 0.5);
  const double step = 0.05 * q->ladder.R();
  const ConvergenceReport rq = c1_convergence(*q, s, {vec({0, 1})}, step);
  CHECK(rq.pass());
  for (const auto& row : rq.rows) CHECK(row.gap <= 1e-12);
  const ConvergenceReport rz = c1_convergence(*q, s, {vec({0, 0})}, step);
  for (const auto& row : rz.rows) CHECK(row.gap == 0.0);

  const auto m = fixtures::model("P2");
  SweepSpec sm = sweep(*m, 5, 3);
  sm.z_plus = zplus_samples(*m, 3, 0.5);
  const ConvergenceReport r = c1_convergence(*m, sm, {vec({0, 1})}, 0.05 * m->ladder.R());
  CHECK(r.pass());
  for (const auto& row : r.rows) CHECK(row.bound == doctest::Approx(m->ladder.c_star * std::exp(-row.T * m->ladder.lambda / 8)));

  LocalModel rough = *m;
  rough.problem.c21 = false;
  try {
    c1_convergence(rough, sm, {vec({0, 1})}, 0.05 * m->ladder.R());
    FAIL("expected FlagMissing");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FlagMissing);
  }
}

TEST_CASE("Lipschitz dependence on the horizon") {
  const auto q = fixtures::model("P1");
  const SweepSpec s = sweep(*q, 3, 3);
  const ConvergenceReport rq = lipschitz_in_T(*q, s, {1e-2, 1e-3});
  CHECK(rq.pass());
  for (const auto& row : rq.rows) {
    const double tau = row.extra.at(0);
    const double exact = (1 - std::exp(-tau)) * std::exp(-row.T) * row.z_minus.norm() / tau;
    CHECK(row.gap == doctest::Approx(exact).epsilon(1e-8));
    CHECK(row.bound == q->ladder.c1);
  }

  const auto m = fixtures::model("P2");
  const ConvergenceReport r = lipschitz_in_T(*m, sweep(*m, 5, 3), {1e-2, 1e-3});
  CHECK(r.pass());
}

TEST_CASE("endpoint audit") {
  const auto q = fixtures::model("P1");
  const SweepSpec s = sweep(*q, 1, 3);
  const double T = s.T_grid.front();
  const GraphSample g = graph_G_T(*q, T, s.z_minus.front(), 5);
  const ConvergenceReport rq = endpoint_audit(*q, g);
  CHECK(rq.pass());
  for (const auto& row : rq.rows) {
    CHECK(row.gap == doctest::Approx(std::exp(-2 * T) * row.z_plus.norm()).epsilon(1e-9).scale(1e-30));
    CHECK(row.gap <= std::exp(-T * q->ladder.mu) * q->ladder.rho / 2);
    if (row.z_plus.norm() == 0) CHECK(row.gap == 0.0);
  }

  const auto m = fixtures::model("P2");
  const SweepSpec sm = sweep(*m, 1, 3);
  const ConvergenceReport r = endpoint_audit(*m, graph_G_T(*m, sm.T_grid.front(), sm.z_minus.front(), 7));
  CHECK(r.pass());
  for (const auto& row : r.rows) {
    CHECK(row.extra.at(0) <= 1e-12);
    CHECK(row.extra.at(1) <= 1e-12);
  }
}

TEST_CASE("contraction of the mixed operator") {
  const auto m = fixtures::model("P2");
  SweepSpec s = sweep(*m, 5, 3);
  s.z_minus.resize(1);
  s.z_plus = {s.z_plus.back()};
  const ConvergenceReport r = contraction_report(*m, s, 50, 0.5, 0.05);
  // One row per horizon carrying the worst ratio over its 50 pairs.
  REQUIRE(r.rows.size() == 5);
  for (const auto& row : r.rows) CHECK(row.extra.at(0) == 50.0);
  CHECK(r.pass());
  for (const auto& row : r.rows) CHECK(row.gap <= 0.55);
}

TEST_CASE("report CSV layout") {
  const auto q = fixtures::model("P1");
  const ConvergenceReport r = lipschitz_in_T(*q, sweep(*q, 1, 1), {1e-2});
  std::ostringstream os;
  write_report_csv(os, r);
  const std::string head = os.str().substr(0, os.str().find('\n'));
  CHECK(head == "T,zm1,zm2,zp1,zp2,v1,v2,gap,bound,slack,pass," + r.extra_columns.front() + "," + r.extra_columns.back());
}
