#include "perron/flow.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "perron/error.hpp"

namespace perron {

namespace ode = boost::numeric::odeint;
using State = std::vector<double>;

Eigen::VectorXd Trajectory::evaluate(double t) const {
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
  const double h = times[i + 1] - times[i];
  const double s = (t - times[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * states[i] + (s3 - 2 * s2 + s) * h * velocities[i] +
         (-2 * s3 + 3 * s2) * states[i + 1] + (s3 - s2) * h * velocities[i + 1];
}

namespace {

Eigen::Map<const Eigen::VectorXd> view(const State& x) { return {x.data(), static_cast<Eigen::Index>(x.size())}; }

void record(Trajectory& tr, const GradientProblem& problem, double t, const Eigen::VectorXd& p) {
  tr.times.push_back(t);
  tr.states.push_back(p);
  tr.velocities.push_back(-problem.gradient(p));
  tr.values.push_back(problem.value(p));
}

}  // namespace

Trajectory integrate_forward(const GradientProblem& problem, const Eigen::VectorXd& start, double T,
                             const FlowOptions& opts, const StopPredicate& stop) {
  if (!(T >= 0)) throw Error(ErrorKind::HorizonMismatch, "integration time must be non-negative");
  Trajectory tr;
  record(tr, problem, 0.0, start);
  if (T == 0.0) return tr;

  auto rhs = [&problem](const State& x, State& dx, double) {
    const Eigen::VectorXd g = problem.gradient(view(x));
    for (std::size_t i = 0; i < x.size(); ++i) dx[i] = -g[static_cast<Eigen::Index>(i)];
  };
  auto stepper = ode::make_dense_output(opts.tol, opts.tol, ode::runge_kutta_dopri5<State>());
  State x0(start.data(), start.data() + start.size());
  stepper.initialize(x0, 0.0, std::min(opts.initial_step, T));

  State xt(x0.size());
  while (true) {
    stepper.do_step(rhs);
    const double t = stepper.current_time();
    Eigen::VectorXd p;
    if (t >= T) {
      stepper.calc_state(T, xt);
      p = view(xt);
    } else {
      p = view(stepper.current_state());
    }
    if (!p.allFinite() || p.norm() > opts.blowup) {
      std::ostringstream os;
      os << "state norm exceeded " << opts.blowup << " at t = " << std::min(t, T);
      throw Error(ErrorKind::BlowUp, os.str());
    }
    record(tr, problem, std::min(t, T), p);
    if (stop && stop(std::min(t, T), p)) {
      tr.stopped = true;
      return tr;
    }
    if (t >= T) return tr;
  }
}

LevelCrossing first_level_crossing(const GradientProblem& problem, const Eigen::VectorXd& start, double level,
                                   double T_max, const FlowOptions& opts) {
  LevelCrossing out;
  if (problem.value(start) <= level) {
    out.reached = true;
    out.point = start;
    return out;
  }
  const Trajectory tr = integrate_forward(problem, start, T_max, opts,
                                          [&](double, const Eigen::VectorXd& p) { return problem.value(p) <= level; });
  if (!tr.stopped) {
    out.time = tr.end_time();
    out.point = tr.terminal();
    return out;
  }
  double lo = tr.times[tr.times.size() - 2], hi = tr.end_time();
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (problem.value(tr.evaluate(mid)) > level ? lo : hi) = mid;
  }
  out.reached = true;
  out.time = hi;
  out.point = tr.evaluate(hi);
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const int n = tr.states.empty() ? 0 : static_cast<int>(tr.states.front().size());
  os << "t";
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  os << ",f\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.16e", v);
    os << buf;
  };
  for (std::size_t j = 0; j < tr.times.size(); ++j) {
    put(tr.times[j]);
    for (int i = 0; i < n; ++i) {
      os << ',';
      put(tr.states[j][i]);
    }
    os << ',';
    put(tr.values[j]);
    os << '\n';
  }
}

Eigen::VectorXd algebraic_backward(const LocalModel& model, const Eigen::VectorXd& q, double t,
                                   const SolverOptions& opts, double tol) {
  if (t < 0) throw Error(ErrorKind::HorizonMismatch, "backward time must be non-negative");
  const Eigen::VectorXd z_minus = model.split.proj_minus * q;
  const FixedPointResult eta = solve_unstable(model, z_minus, opts, t);
  const double off = (model.split.proj_plus * (q - eta.curve.back())).norm();
  if (off > tol) {
    std::ostringstream os;
    os << "point is " << off << " away from the unstable graph";
    throw Error(ErrorKind::NotOnUnstableManifold, os.str());
  }
  if (t == 0.0) return q;
  return eta.curve.evaluate(-t);
}

double Disk::min_radius() const { return *std::min_element(radii.begin(), radii.end()); }
double Disk::max_radius() const { return *std::max_element(radii.begin(), radii.end()); }

std::vector<Eigen::VectorXd> sphere_directions(const Eigen::MatrixXd& basis, int count) {
  const int m = static_cast<int>(basis.cols());
  std::vector<Eigen::VectorXd> dirs;
  if (m == 1) {
    dirs = {basis.col(0), Eigen::VectorXd(-basis.col(0))};
  } else if (m == 2) {
    count = std::max(count, 4);
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * std::numbers::pi * i / count;
      dirs.push_back(std::cos(a) * basis.col(0) + std::sin(a) * basis.col(1));
    }
  } else {
    for (int i = 0; i < m; ++i) {
      dirs.push_back(basis.col(i));
      dirs.push_back(-basis.col(i));
    }
    for (int mask = 0; mask < (1 << m); ++mask) {
      Eigen::VectorXd c(m);
      for (int i = 0; i < m; ++i) c[i] = (mask >> i & 1) ? -1.0 : 1.0;
      dirs.push_back(basis * c / std::sqrt(static_cast<double>(m)));
    }
  }
  return dirs;
}

namespace {

// Root of g on [0, r_max] along a ray, given g(0) > 0 and g(r_max) < 0.
double ray_root(const std::function<double(double)>& g, double r_max, double level_tol) {
  if (g(r_max) >= 0) throw Error(ErrorKind::LevelNotReached, "level not reached inside the graph domain");
  double lo = 0.0, hi = r_max;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double v = g(mid);
    if (std::abs(v) <= level_tol || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * r_max) return mid;
    (v > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Disk make_disk(const LocalModel& model, double epsilon, int sphere_points, const SolverOptions& opts,
               bool ascending) {
  if (!(epsilon > 0)) throw Error(ErrorKind::LevelNotReached, "epsilon must be positive");
  Disk d;
  d.ascending = ascending;
  d.level_offset = epsilon;
  const Subspace side = ascending ? Subspace::Plus : Subspace::Minus;
  const Eigen::MatrixXd basis = model.split.basis(side);
  d.dimension = static_cast<int>(basis.cols());
  d.directions = sphere_directions(basis, sphere_points);
  const double R = model.ladder.R();
  // Bisection tolerance on the level, relative to epsilon.
  const double level_tol = 1e-10 * epsilon;
  for (const auto& u : d.directions) {
    auto point = [&](double r) -> Eigen::VectorXd {
      return ascending ? stable_graph_point(model, r * u, opts) : unstable_graph_point(model, r * u, opts);
    };
    auto g = [&](double r) {
      const double lv = model.level(point(r));
      return ascending ? epsilon - lv : lv + epsilon;
    };
    const double r = ray_root(g, R, level_tol);
    d.radii.push_back(r);
    d.boundary.push_back(point(r));
  }
  return d;
}

}  // namespace

Disk descending_disk(const LocalModel& model, double epsilon, int sphere_points, const SolverOptions& opts) {
  return make_disk(model, epsilon, sphere_points, opts, false);
}

Disk ascending_disk(const LocalModel& model, double epsilon, int sphere_points, const SolverOptions& opts) {
  return make_disk(model, epsilon, sphere_points, opts, true);
}

RateLadder resolve_disks(const LocalModel& model, const LadderChoices& choices, int sphere_points,
                         const SolverOptions& opts) {
  const double R = model.ladder.R();
  double varsigma = 0.0;
  if (choices.varsigma) {
    varsigma = *choices.varsigma;
  } else {
    // Depth of both graphs at the rim of their domain; half of it (with a
    // margin) keeps the 2-varsigma disks inside the graphs.
    double depth = INFINITY;
    for (const auto& u : sphere_directions(model.split.basis(Subspace::Minus), sphere_points))
      depth = std::min(depth, -model.level(unstable_graph_point(model, R * u, opts)));
    for (const auto& u : sphere_directions(model.split.basis(Subspace::Plus), sphere_points))
      depth = std::min(depth, model.level(stable_graph_point(model, R * u, opts)));
    if (!(depth > 0)) throw Error(ErrorKind::LadderInfeasible, "graphs do not leave the critical level");
    varsigma = 0.45 * depth;
  }
  const double epsilon = choices.epsilon.value_or(0.5 * varsigma);
  double varkappa = 0.0;
  if (choices.varkappa) {
    varkappa = *choices.varkappa;
  } else {
    varkappa = std::min(1.0, ascending_disk(model, varsigma, sphere_points, opts).min_radius());
  }
  return with_disks(model.ladder, varsigma, epsilon, varkappa);
}

LocalModel prepare_model(const ProblemConfig& config, const ModelOptions& options, const SolverOptions& solver) {
  LocalModel m;
  m.problem = config.problem;
  m.problem.validate();
  m.split = split(m.problem.hessian_at(m.problem.critical_point));
  m.kappa = lipschitz_modulus(m.problem, m.split, default_radius_grid(m.problem.trust_radius), options.kappa_samples,
                              options.seed);
  m.ladder = build_ladder(m.split, m.kappa, config.overrides, m.problem.trust_radius);
  if (options.resolve) m.ladder = resolve_disks(m, config.overrides, options.sphere_points, solver);
  return m;
}

}  // namespace perron
