#include "perron/lyapunov_perron.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "perron/error.hpp"
#include "perron/parallel.hpp"

namespace perron {

double SolverOptions::panel_width(const SpectralSplit& s) const {
  const double scale = s.eigenvalues.cwiseAbs().maxCoeff();
  return std::min(0.5, panel_scale / scale);
}

double SolverOptions::infinite_horizon(const RateLadder& l) const {
  if (horizon > 0) return horizon;
  return std::max(3.0 * l.T0, 40.0 / l.lambda);
}

namespace {

constexpr int kQuadraturePoints = 32;

void lagrange_at(const PanelGrid& g, double s, std::vector<double>& ell) {
  const auto& ref = g.reference_nodes();
  const auto& bary = g.barycentric_weights();
  const int p = g.degree();
  ell.assign(p + 1, 0.0);
  for (int j = 0; j <= p; ++j) {
    if (s == ref[j]) {
      ell[j] = 1.0;
      return;
    }
  }
  double denom = 0.0;
  for (int j = 0; j <= p; ++j) {
    ell[j] = bary[j] / (s - ref[j]);
    denom += ell[j];
  }
  for (auto& e : ell) e /= denom;
}

void check_budget(double distance, double rho, const SolverOptions& opts, const char* what) {
  if (!opts.check_budget) return;
  if (distance > rho * (1.0 + opts.budget_slack)) {
    std::ostringstream os;
    os << what << ": weighted distance " << distance << " exceeds rho = " << rho;
    throw Error(ErrorKind::NormBudgetExceeded, os.str());
  }
}

}  // namespace

MixedOperator::MixedOperator(const LocalModel& model, PanelGrid grid, double rate, Eigen::VectorXd z_plus,
                             Eigen::VectorXd z_minus)
    : model_(&model), grid_(std::move(grid)), rate_(rate), z_plus_(std::move(z_plus)), z_minus_(std::move(z_minus)) {
  const auto& s = model.split;
  const int n = s.dimension;
  const Eigen::VectorXd zp = s.proj_plus * z_plus_;
  const Eigen::VectorXd zm = s.proj_minus * z_minus_;
  plus_coords_ = s.eigenvectors.transpose() * zp;
  minus_coords_ = s.eigenvectors.transpose() * zm;

  const int p = grid_.degree();
  const double H = grid_.panel_width();
  std::vector<double> gx, gw, ell;
  gauss_legendre(kQuadraturePoints, gx, gw);
  // Panel-local node offsets from the panel start.
  std::vector<double> offset(p + 1);
  for (int i = 0; i <= p; ++i) offset[i] = 0.5 * H * (grid_.reference_nodes()[i] + 1.0);

  kernels_.resize(n);
  for (int j = 0; j < n; ++j) {
    Kernel& K = kernels_[j];
    K.eigenvalue = s.eigenvalues[j];
    K.plus = j >= s.morse_index;
    K.weights = Eigen::MatrixXd::Zero(p + 1, p + 1);
    K.decay.resize(p + 1);
    const double l = K.eigenvalue;
    for (int i = 0; i <= p; ++i) {
      const double ti = offset[i];
      const double a = K.plus ? 0.0 : ti;
      const double b = K.plus ? ti : H;
      K.decay[i] = K.plus ? std::exp(-ti * l) : std::exp(-(ti - H) * l);
      if (b <= a) continue;
      for (int q = 0; q < kQuadraturePoints; ++q) {
        const double sigma = 0.5 * (a + b) + 0.5 * (b - a) * gx[q];
        const double w = 0.5 * (b - a) * gw[q] * std::exp(-(ti - sigma) * l);
        lagrange_at(grid_, 2.0 * sigma / H - 1.0, ell);
        for (int m = 0; m <= p; ++m) K.weights(i, m) += w * ell[m];
      }
    }
  }
}

Curve MixedOperator::apply(const Curve& xi) const {
  if (!xi.grid.same_layout(grid_)) throw Error(ErrorKind::HorizonMismatch, "curve grid does not match the operator");
  const auto& s = model_->split;
  const int n = s.dimension;
  const int N = grid_.size();
  Eigen::MatrixXd g(n, N);
  for (int i = 0; i < N; ++i) g.col(i) = model_->h(xi.values.col(i));
  const Eigen::MatrixXd G = s.eigenvectors.transpose() * g;
  const Eigen::MatrixXd Y = [&] {
    Eigen::MatrixXd out(n, N);
    const int p = grid_.degree();
    const double t0 = grid_.start(), t1 = grid_.end();
    for (int j = 0; j < n; ++j) {
      const Kernel& K = kernels_[j];
      const double l = K.eigenvalue;
      double carry = 0.0;
      if (K.plus) {
        for (int q = 0; q < grid_.panels(); ++q) {
          const int base = q * p;
          const double start = carry;
          for (int i = 0; i <= p; ++i) {
            const double conv = K.decay[i] * start + K.weights.row(i).dot(G.row(j).segment(base, p + 1));
            out(j, base + i) = std::exp(-(grid_.node(base + i) - t0) * l) * plus_coords_[j] + conv;
            if (i == p) carry = conv;
          }
        }
      } else {
        for (int q = grid_.panels() - 1; q >= 0; --q) {
          const int base = q * p;
          const double start = carry;
          for (int i = p; i >= 0; --i) {
            const double conv = K.decay[i] * start + K.weights.row(i).dot(G.row(j).segment(base, p + 1));
            out(j, base + i) = std::exp(-(grid_.node(base + i) - t1) * l) * minus_coords_[j] - conv;
            if (i == 0) carry = conv;
          }
        }
      }
    }
    return out;
  }();
  Curve result(grid_, n, rate_);
  result.values = s.eigenvectors * Y;
  return result;
}

Curve MixedOperator::linear_part() const {
  const auto& s = model_->split;
  Curve c(grid_, s.dimension, rate_);
  const Eigen::VectorXd zp = s.proj_plus * z_plus_;
  const Eigen::VectorXd zm = s.proj_minus * z_minus_;
  for (int i = 0; i < grid_.size(); ++i) {
    const double t = grid_.node(i);
    c.values.col(i) = restricted_exponential(s, Subspace::Plus, t - grid_.start()) * zp +
                      restricted_exponential(s, Subspace::Minus, t - grid_.end()) * zm;
  }
  return c;
}

FixedPointResult fixed_point(const std::function<Curve(const Curve&)>& op, Curve initial, double tol, int max_iter) {
  FixedPointResult r;
  Curve current = std::move(initial);
  int stalled = 0;
  for (int it = 0; it <= max_iter; ++it) {
    Curve next = op(current);
    const double res = exp_distance(next, current);
    r.history.push_back(res);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * next.exp_norm();
    if (res <= tol || res <= floor) {
      r.curve = std::move(next);
      r.residual = res;
      r.iterations = it;
      return r;
    }
    if (it > 0 && res > 0.9 * r.history[it - 1]) {
      if (++stalled >= 10) {
        std::ostringstream os;
        os << "residual stalled at " << res << " after " << it << " iterations";
        throw Error(ErrorKind::NoConvergence, os.str());
      }
    } else {
      stalled = 0;
    }
    current = std::move(next);
  }
  std::ostringstream os;
  os << "no convergence within " << max_iter << " iterations, residual " << r.history.back();
  throw Error(ErrorKind::NoConvergence, os.str());
}

Curve apply_Phi(const LocalModel& model, const Eigen::VectorXd& z_minus, const Curve& eta, const SolverOptions& opts) {
  if (eta.grid.end() != 0.0 || eta.rate >= 0.0)
    throw Error(ErrorKind::HorizonMismatch, "Phi acts on backward curves on [-H, 0] with negative rate");
  MixedOperator op(model, eta.grid, eta.rate, Eigen::VectorXd::Zero(model.dimension()), z_minus);
  Curve out = op.apply(eta);
  check_budget(out.exp_norm(), model.ladder.rho, opts, "Phi");
  return out;
}

Curve apply_Psi_stable(const LocalModel& model, const Eigen::VectorXd& z_plus, const Curve& xi,
                       const SolverOptions& opts) {
  if (xi.grid.start() != 0.0 || xi.rate <= 0.0)
    throw Error(ErrorKind::HorizonMismatch, "Psi acts on forward curves on [0, H] with positive rate");
  MixedOperator op(model, xi.grid, xi.rate, z_plus, Eigen::VectorXd::Zero(model.dimension()));
  Curve out = op.apply(xi);
  check_budget(out.exp_norm(), model.ladder.rho, opts, "Psi");
  return out;
}

Curve apply_Psi_T(const LocalModel& model, double T, const Eigen::VectorXd& z_minus, const Eigen::VectorXd& z_plus,
                  const Curve& xi, const Curve& reference, const SolverOptions& opts) {
  if (xi.grid.start() != 0.0 || std::abs(xi.grid.end() - T) > 1e-12 * std::max(1.0, T))
    throw Error(ErrorKind::HorizonMismatch, "curve horizon differs from [0, T]");
  MixedOperator op(model, xi.grid, xi.rate, z_plus, z_minus);
  Curve out = op.apply(xi);
  check_budget(exp_distance(out, reference), model.ladder.rho, opts, "Psi^T");
  return out;
}

FixedPointResult solve_unstable(const LocalModel& model, const Eigen::VectorXd& z_minus, const SolverOptions& opts,
                                double min_horizon) {
  const auto& L = model.ladder;
  const double H = std::max(opts.infinite_horizon(L), min_horizon > 0 ? min_horizon + 1.0 : 0.0);
  const PanelGrid grid = PanelGrid::covering(-H, 0.0, opts.panel_width(model.split), opts.degree);
  const Eigen::VectorXd zm = model.split.proj_minus * z_minus;
  MixedOperator op(model, grid, -L.lambda, Eigen::VectorXd::Zero(model.dimension()), zm);
  auto step = [&](const Curve& c) {
    Curve out = op.apply(c);
    check_budget(out.exp_norm(), L.rho, opts, "Phi");
    return out;
  };
  FixedPointResult r = fixed_point(step, op.linear_part(), opts.tol, opts.max_iter);
  r.tail_bound = L.kappa_working * L.rho * std::exp(-H * L.lambda) / (L.lambda + L.mu);
  return r;
}

FixedPointResult solve_stable(const LocalModel& model, const Eigen::VectorXd& z_plus, const SolverOptions& opts) {
  const auto& L = model.ladder;
  const double H = opts.infinite_horizon(L);
  const PanelGrid grid = PanelGrid::covering(0.0, H, opts.panel_width(model.split), opts.degree);
  const Eigen::VectorXd zp = model.split.proj_plus * z_plus;
  MixedOperator op(model, grid, L.lambda, zp, Eigen::VectorXd::Zero(model.dimension()));
  auto step = [&](const Curve& c) {
    Curve out = op.apply(c);
    check_budget(out.exp_norm(), L.rho, opts, "Psi");
    return out;
  };
  FixedPointResult r = fixed_point(step, op.linear_part(), opts.tol, opts.max_iter);
  r.tail_bound = L.kappa_working * L.rho * std::exp(-H * L.lambda) / (L.lambda + L.mu);
  return r;
}

MixedSolver::MixedSolver(const LocalModel& model, double T, Eigen::VectorXd z_minus, SolverOptions opts)
    : model_(&model), T_(T), z_minus_(model.split.proj_minus * z_minus), opts_(opts) {
  if (!(T > 0)) throw Error(ErrorKind::HorizonMismatch, "T must be positive");
  grid_ = PanelGrid::covering(0.0, T, opts_.panel_width(model.split), opts_.degree);
  const FixedPointResult eta = solve_unstable(model, z_minus_, opts_, T);
  reference_ = Curve(grid_, model.dimension(), model.ladder.lambda);
  for (int i = 0; i < grid_.size(); ++i) reference_.values.col(i) = eta.curve.evaluate(grid_.node(i) - T);
}

MixedOperator MixedSolver::op(const Eigen::VectorXd& z_plus) const {
  return MixedOperator(*model_, grid_, model_->ladder.lambda, model_->split.proj_plus * z_plus, z_minus_);
}

double MixedSolver::distance_to_reference(const Curve& xi) const { return exp_distance(xi, reference_); }

Curve MixedSolver::apply(const Eigen::VectorXd& z_plus, const Curve& xi) const {
  return apply_Psi_T(*model_, T_, z_minus_, model_->split.proj_plus * z_plus, xi, reference_, opts_);
}

Curve MixedSolver::initial_guess(const Eigen::VectorXd& z_plus) const {
  Curve c = reference_;
  const Eigen::VectorXd zp = model_->split.proj_plus * z_plus;
  for (int i = 0; i < grid_.size(); ++i)
    c.values.col(i) += restricted_exponential(model_->split, Subspace::Plus, grid_.node(i)) * zp;
  return c;
}

FixedPointResult MixedSolver::solve(const Eigen::VectorXd& z_plus) const {
  const MixedOperator K = op(z_plus);
  auto step = [&](const Curve& c) {
    Curve out = K.apply(c);
    check_budget(exp_distance(out, reference_), model_->ladder.rho, opts_, "Psi^T");
    return out;
  };
  return fixed_point(step, initial_guess(z_plus), opts_.tol, opts_.max_iter);
}

Eigen::VectorXd MixedSolver::graph_point(const Eigen::VectorXd& z_plus) const { return solve(z_plus).curve.front(); }

Eigen::VectorXd unstable_graph_point(const LocalModel& model, const Eigen::VectorXd& z_minus, const SolverOptions& opts) {
  return solve_unstable(model, z_minus, opts).curve.back();
}

Eigen::VectorXd stable_graph_point(const LocalModel& model, const Eigen::VectorXd& z_plus, const SolverOptions& opts) {
  return solve_stable(model, z_plus, opts).curve.front();
}

namespace {

GraphSample tabulate(GraphKind kind, const SubspaceGrid& grid, int threads,
                     const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, double&, int&)>& solve_one) {
  GraphSample g;
  g.kind = kind;
  g.grid = grid;
  const int count = grid.size();
  g.values.resize(count);
  g.residuals.resize(count);
  g.iterations.resize(count);
  parallel_for(count, threads, [&](int i) { solve_one(grid.point(i), g.values[i], g.residuals[i], g.iterations[i]); });
  return g;
}

double domain_half_width(const LocalModel& model, double requested) {
  const double R = model.ladder.R();
  if (requested <= 0) return R;
  if (requested > R * (1 + 1e-12)) throw Error(ErrorKind::OutsideSampledDomain, "graph grid exceeds B^+_R");
  return requested;
}

}  // namespace

GraphSample graph_F_inf(const LocalModel& model, int points_per_axis, const SolverOptions& opts, int threads) {
  const SubspaceGrid grid{model.split.basis(Subspace::Minus), model.ladder.R(), points_per_axis};
  return tabulate(GraphKind::FInf, grid, threads,
                  [&](const Eigen::VectorXd& z, Eigen::VectorXd& value, double& residual, int& iterations) {
                    const FixedPointResult r = solve_unstable(model, z, opts);
                    value = model.split.proj_plus * r.curve.back();
                    residual = r.residual + r.tail_bound;
                    iterations = r.iterations;
                  });
}

GraphSample graph_G_inf(const LocalModel& model, int points_per_axis, const SolverOptions& opts, int threads,
                        double half_width) {
  const SubspaceGrid grid{model.split.basis(Subspace::Plus), domain_half_width(model, half_width), points_per_axis};
  return tabulate(GraphKind::GInf, grid, threads,
                  [&](const Eigen::VectorXd& z, Eigen::VectorXd& value, double& residual, int& iterations) {
                    const FixedPointResult r = solve_stable(model, z, opts);
                    value = model.split.proj_minus * r.curve.front();
                    residual = r.residual + r.tail_bound;
                    iterations = r.iterations;
                  });
}

GraphSample graph_G_T(const LocalModel& model, double T, const Eigen::VectorXd& z_minus, int points_per_axis,
                      const SolverOptions& opts, int threads, double half_width) {
  const auto& L = model.ladder;
  if (L.disks_resolved && T < L.T0 * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "T = " << T << " is below T0 = " << L.T0;
    throw Error(ErrorKind::HorizonMismatch, os.str());
  }
  const MixedSolver solver(model, T, z_minus, opts);
  const SubspaceGrid grid{model.split.basis(Subspace::Plus), domain_half_width(model, half_width), points_per_axis};
  GraphSample g = tabulate(GraphKind::GT, grid, threads,
                           [&](const Eigen::VectorXd& z, Eigen::VectorXd& value, double& residual, int& iterations) {
                             const FixedPointResult r = solver.solve(z);
                             if (L.disks_resolved) {
                               const double miss = (r.curve.back() - solver.z_minus()).norm();
                               if (miss > L.varkappa) {
                                 std::ostringstream os;
                                 os << "|xi(T) - z_-| = " << miss << " exceeds varkappa = " << L.varkappa;
                                 throw Error(ErrorKind::EndpointViolation, os.str());
                               }
                             }
                             value = model.split.proj_minus * r.curve.front();
                             residual = r.residual;
                             iterations = r.iterations;
                           });
  g.T = T;
  g.z_minus = solver.z_minus();
  return g;
}

DerivativeEstimate graph_derivative(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& graph,
                                    const Eigen::VectorXd& base, const Eigen::VectorXd& v, double step,
                                    double domain_radius) {
  if (base.norm() + step * v.norm() > domain_radius * (1.0 + 1e-12))
    throw Error(ErrorKind::StepTooLarge, "finite-difference stencil leaves the domain disk");
  auto central = [&](double h) { return Eigen::VectorXd((graph(base + h * v) - graph(base - h * v)) / (2.0 * h)); };
  const Eigen::VectorXd d1 = central(step);
  const Eigen::VectorXd d2 = central(0.5 * step);
  DerivativeEstimate e;
  e.value = (4.0 * d2 - d1) / 3.0;
  e.error = (d1 - d2).norm() / 3.0;
  return e;
}

}  // namespace perron
