#include "perron/lambda_verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "perron/error.hpp"
#include "perron/io.hpp"
#include "perron/parallel.hpp"

namespace perron {

bool ConvergenceReport::rows_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

std::size_t ConvergenceReport::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return !r.pass; }));
}

double ConvergenceReport::worst_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min(m, r.bound + r.slack - r.gap);
  return m;
}

double ConvergenceReport::worst_ratio() const {
  double m = 0.0;
  for (const auto& r : rows)
    if (r.bound > 0) m = std::max(m, r.gap / r.bound);
  return m;
}

void write_report_csv(std::ostream& os, const ConvergenceReport& r) {
  int n = 0;
  if (!r.rows.empty()) n = static_cast<int>(r.rows.front().z_minus.size());
  os << "T," << coordinate_header("zm", n) << ',' << coordinate_header("zp", n) << ',' << coordinate_header("v", n)
     << ",gap,bound,slack,pass";
  for (const auto& c : r.extra_columns) os << ',' << c;
  os << '\n';
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  for (const auto& row : r.rows) {
    os << format_double(row.T) << ',' << format_vector(row.z_minus) << ',' << format_vector(row.z_plus) << ','
       << format_vector(row.v.size() ? row.v : zero) << ',' << format_double(row.gap) << ','
       << format_double(row.bound) << ',' << format_double(row.slack) << ',' << (row.pass ? 1 : 0);
    for (double e : row.extra) os << ',' << format_double(e);
    os << '\n';
  }
}

std::vector<double> horizon_grid(const RateLadder& ladder, int count, double step) {
  std::vector<double> g;
  const double start = std::max(ladder.T0, ladder.T2);
  for (int i = 0; i < count; ++i) g.push_back(start + i * step);
  return g;
}

std::vector<Eigen::VectorXd> zplus_samples(const LocalModel& model, int per_axis, double shrink) {
  const SubspaceGrid grid{model.split.basis(Subspace::Plus), model.ladder.R(), per_axis};
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < grid.size(); ++i) {
    const Eigen::VectorXd p = grid.point(i);
    if (p.norm() <= model.ladder.R() * (1 + 1e-12)) out.push_back(shrink * p);
  }
  return out;
}

namespace {

struct Task {
  double T;
  int zm;
};

std::vector<Task> tasks_of(const SweepSpec& spec) {
  std::vector<Task> t;
  for (double T : spec.T_grid)
    for (int j = 0; j < static_cast<int>(spec.z_minus.size()); ++j) t.push_back({T, j});
  return t;
}

ReportRow make_row(double T, const Eigen::VectorXd& zm, const Eigen::VectorXd& zp, double gap, double bound,
                   double slack) {
  ReportRow r;
  r.T = T;
  r.z_minus = zm;
  r.z_plus = zp;
  r.v = Eigen::VectorXd::Zero(zm.size());
  r.gap = gap;
  r.bound = bound;
  r.slack = slack;
  r.pass = gap <= bound + slack;
  return r;
}

std::vector<ReportRow> flatten_rows(std::vector<std::vector<ReportRow>>& chunks) {
  std::vector<ReportRow> out;
  for (auto& c : chunks)
    for (auto& r : c) out.push_back(std::move(r));
  return out;
}

}  // namespace

ConvergenceReport c0_convergence(const LocalModel& model, const SweepSpec& spec, const SolverOptions& opts,
                                 int threads) {
  const auto& L = model.ladder;
  const double Tmin = std::max(L.T0, L.T2);
  for (double T : spec.T_grid)
    if (T < Tmin * (1 - 1e-12)) throw Error(ErrorKind::HorizonMismatch, "C0 sweep needs T >= max(T0, T2)");

  std::vector<Eigen::VectorXd> g_inf(spec.z_plus.size());
  std::vector<double> tails(spec.z_plus.size());
  parallel_for(static_cast<int>(spec.z_plus.size()), threads, [&](int i) {
    const FixedPointResult r = solve_stable(model, spec.z_plus[i], opts);
    g_inf[i] = model.split.proj_minus * r.curve.front();
    tails[i] = r.tail_bound + r.residual;
  });

  const auto tasks = tasks_of(spec);
  std::vector<std::vector<ReportRow>> chunks(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), threads, [&](int t) {
    const MixedSolver solver(model, tasks[t].T, spec.z_minus[tasks[t].zm], opts);
    for (std::size_t i = 0; i < spec.z_plus.size(); ++i) {
      const FixedPointResult r = solver.solve(spec.z_plus[i]);
      const Eigen::VectorXd gT = model.split.proj_minus * r.curve.front();
      const double slack = 10 * opts.tol + r.residual + tails[i];
      chunks[t].push_back(make_row(tasks[t].T, solver.z_minus(), spec.z_plus[i], (gT - g_inf[i]).norm(),
                                   std::exp(-tasks[t].T * L.lambda / 8.0), slack));
    }
  });

  ConvergenceReport rep;
  rep.kind = "c0";
  rep.rows = flatten_rows(chunks);

  // Log-linear fit per (z_-, z_+) series; the report keeps the slowest rate.
  std::map<std::pair<int, int>, std::vector<std::pair<double, double>>> series;
  for (std::size_t t = 0; t < tasks.size(); ++t)
    for (std::size_t i = 0; i < spec.z_plus.size(); ++i) {
      const double gap = rep.rows[t * spec.z_plus.size() + i].gap;
      if (gap > 1e3 * std::numeric_limits<double>::min())
        series[{tasks[t].zm, static_cast<int>(i)}].push_back({tasks[t].T, std::log(gap)});
    }
  double rate = std::numeric_limits<double>::infinity();
  for (const auto& [key, pts] : series) {
    if (pts.size() < 2) continue;
    double mt = 0, my = 0;
    for (const auto& [t, y] : pts) {
      mt += t;
      my += y;
    }
    mt /= pts.size();
    my /= pts.size();
    double stt = 0, sty = 0;
    for (const auto& [t, y] : pts) {
      stt += (t - mt) * (t - mt);
      sty += (t - mt) * (y - my);
    }
    if (stt > 0) rate = std::min(rate, -sty / stt);
  }
  if (std::isfinite(rate)) {
    rep.has_rate = true;
    rep.fitted_rate = rate;
    rep.rate_floor = L.lambda / 8.0;
  }
  return rep;
}

ConvergenceReport c1_convergence(const LocalModel& model, const SweepSpec& spec,
                                 const std::vector<Eigen::VectorXd>& directions, double step,
                                 const SolverOptions& opts, int threads) {
  if (!model.problem.c21) throw Error(ErrorKind::FlagMissing, "C1 estimate requires a C^{2,1} objective");
  const auto& L = model.ladder;
  const double R = L.R();
  const auto& Pm = model.split.proj_minus;

  // dG_inf per (z_+, v), shared by every (T, z_-).
  const int nd = static_cast<int>(directions.size());
  const int np = static_cast<int>(spec.z_plus.size());
  std::vector<DerivativeEstimate> d_inf(static_cast<std::size_t>(np * nd));
  parallel_for(np * nd, threads, [&](int idx) {
    const int i = idx / nd, j = idx % nd;
    d_inf[idx] = graph_derivative(
        [&](const Eigen::VectorXd& z) { return Eigen::VectorXd(Pm * stable_graph_point(model, z, opts)); },
        spec.z_plus[i], directions[j], step, R);
  });

  const auto tasks = tasks_of(spec);
  std::vector<std::vector<ReportRow>> chunks(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), threads, [&](int t) {
    const MixedSolver solver(model, tasks[t].T, spec.z_minus[tasks[t].zm], opts);
    auto gT = [&](const Eigen::VectorXd& z) { return Eigen::VectorXd(Pm * solver.graph_point(z)); };
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < nd; ++j) {
        const DerivativeEstimate dT = graph_derivative(gT, spec.z_plus[i], directions[j], step, R);
        const DerivativeEstimate& dI = d_inf[i * nd + j];
        const double noise = 100.0 * opts.tol / step;
        ReportRow row = make_row(tasks[t].T, solver.z_minus(), spec.z_plus[i], (dT.value - dI.value).norm(),
                                 L.c_star * std::exp(-tasks[t].T * L.lambda / 8.0) * directions[j].norm(),
                                 dT.error + dI.error + noise);
        row.v = directions[j];
        row.extra = {dT.error, dI.error};
        chunks[t].push_back(std::move(row));
      }
  });
  ConvergenceReport rep;
  rep.kind = "c1";
  rep.extra_columns = {"fd_error_T", "fd_error_inf"};
  rep.rows = flatten_rows(chunks);
  return rep;
}

ConvergenceReport lipschitz_in_T(const LocalModel& model, const SweepSpec& spec, const std::vector<double>& taus,
                                 const SolverOptions& opts, int threads) {
  const auto& L = model.ladder;
  const auto tasks = tasks_of(spec);
  std::vector<std::vector<ReportRow>> chunks(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), threads, [&](int t) {
    const double T = tasks[t].T;
    const Eigen::VectorXd& zm = spec.z_minus[tasks[t].zm];
    const MixedSolver s0(model, T, zm, opts);
    for (double tau : taus) {
      const MixedSolver s1(model, T + tau, zm, opts);
      const MixedSolver s2(model, T + 2 * tau, zm, opts);
      for (const auto& zp : spec.z_plus) {
        const Eigen::VectorXd g0 = s0.graph_point(zp), g1 = s1.graph_point(zp), g2 = s2.graph_point(zp);
        const double q = (g1 - g0).norm() / tau;
        const double second = (g2 - 2 * g1 + g0).norm() / (tau * tau);
        ReportRow row = make_row(T, s0.z_minus(), zp, q, L.c1, 10 * opts.tol / tau);
        row.extra = {tau, second};
        chunks[t].push_back(std::move(row));
      }
    }
  });
  ConvergenceReport rep;
  rep.kind = "lipschitz_T";
  rep.extra_columns = {"tau", "second_difference"};
  rep.rows = flatten_rows(chunks);
  return rep;
}

ConvergenceReport endpoint_audit(const LocalModel& model, const GraphSample& graph, const SolverOptions& opts,
                                 double boundary_tol) {
  if (graph.kind != GraphKind::GT) throw Error(ErrorKind::HorizonMismatch, "endpoint audit needs a G_T sample");
  const auto& L = model.ladder;
  const MixedSolver solver(model, graph.T, graph.z_minus, opts);
  ConvergenceReport rep;
  rep.kind = "endpoint";
  rep.extra_columns = {"boundary_plus", "boundary_minus"};
  const double bound = L.rho * std::exp(-graph.T * L.lambda);
  for (int i = 0; i < graph.grid.size(); ++i) {
    const Eigen::VectorXd zp = graph.grid.point(i);
    const FixedPointResult r = solver.solve(zp);
    const Eigen::VectorXd end = r.curve.back();
    const double bp = (model.split.proj_plus * (r.curve.front() - zp)).norm();
    const double bm = (model.split.proj_minus * end - solver.z_minus()).norm();
    ReportRow row = make_row(graph.T, solver.z_minus(), zp, (end - solver.z_minus()).norm(), bound, opts.tol);
    row.extra = {bp, bm};
    row.pass = row.pass && bp <= boundary_tol && bm <= boundary_tol;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

ConvergenceReport contraction_report(const LocalModel& model, const SweepSpec& spec, int pairs, double bound,
                                     double slack, std::uint64_t seed, const SolverOptions& opts) {
  const auto& L = model.ladder;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> amp(0.05, 1.0);
  const int n = model.dimension();

  ConvergenceReport rep;
  rep.kind = "contraction";
  for (double T : spec.T_grid)
    for (const auto& zm : spec.z_minus) {
      const MixedSolver solver(model, T, zm, opts);
      const auto& ref = solver.reference();
      const PanelGrid& grid = solver.grid();
      // Random member of Z^T: reference plus e^{-lambda t} times a smooth
      // random curve with pointwise norm at most a random fraction of rho.
      auto random_curve = [&] {
        constexpr int modes = 4;
        Eigen::MatrixXd c(n, 2 * modes + 1);
        for (int i = 0; i < c.size(); ++i) c.data()[i] = unif(rng);
        Curve out = ref;
        Eigen::MatrixXd pert(n, grid.size());
        for (int i = 0; i < grid.size(); ++i) {
          const double s = grid.node(i) / T;
          Eigen::VectorXd v = c.col(0);
          for (int m = 1; m <= modes; ++m)
            v += c.col(2 * m - 1) * std::cos(m * std::numbers::pi * s) + c.col(2 * m) * std::sin(m * std::numbers::pi * s);
          pert.col(i) = v;
        }
        double mx = 0.0;
        for (int i = 0; i < grid.size(); ++i) mx = std::max(mx, pert.col(i).norm());
        const double a = amp(rng) * L.rho / mx;
        for (int i = 0; i < grid.size(); ++i) out.values.col(i) += a * std::exp(-L.lambda * grid.node(i)) * pert.col(i);
        return out;
      };
      for (const auto& zp : spec.z_plus) {
        const MixedOperator op = solver.op(zp);
        double worst = 0.0;
        for (int p = 0; p < pairs; ++p) {
          const Curve a = random_curve(), b = random_curve();
          const double den = exp_distance(a, b);
          if (den == 0.0) continue;
          worst = std::max(worst, exp_distance(op.apply(a), op.apply(b)) / den);
        }
        ReportRow row = make_row(T, solver.z_minus(), zp, worst, bound, slack);
        row.extra = {static_cast<double>(pairs)};
        rep.rows.push_back(std::move(row));
      }
    }
  rep.extra_columns = {"pairs"};
  return rep;
}

}  // namespace perron
