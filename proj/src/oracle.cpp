#include "perron/oracle.hpp"

#include <cmath>
#include <sstream>

#include "perron/error.hpp"

namespace perron {

namespace {

// Sign of the unstable coordinate when the trajectory leaves the rho-ball.
int escape_side(const LocalModel& model, const Eigen::VectorXd& local_start, double horizon, const FlowOptions& fo) {
  const Eigen::VectorXd e = model.split.basis(Subspace::Minus).col(0);
  const Eigen::VectorXd& x = model.problem.critical_point;
  const double rho = model.ladder.rho;
  const Trajectory tr = integrate_forward(model.problem, x + local_start, horizon, fo,
                                          [&](double, const Eigen::VectorXd& p) { return (p - x).norm() > rho; });
  const double w = e.dot(tr.terminal() - x);
  return w > 0 ? 1 : (w < 0 ? -1 : 0);
}

}  // namespace

ShootingResult mixed_bvp_oracle(const LocalModel& model, double T, const Eigen::VectorXd& z_minus,
                                const Eigen::VectorXd& z_plus, double tol, double integration_tol) {
  const auto& s = model.split;
  const int k = s.morse_index;
  const Eigen::MatrixXd Em = s.basis(Subspace::Minus);
  const Eigen::VectorXd zp = s.proj_plus * z_plus;
  const Eigen::VectorXd target = Em.transpose() * z_minus;
  const Eigen::VectorXd& x = model.problem.critical_point;
  FlowOptions fo;
  fo.tol = integration_tol;

  auto shoot = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    const Trajectory tr = integrate_forward(model.problem, x + Em * w + zp, T, fo);
    return Em.transpose() * (tr.terminal() - x) - target;
  };

  // Linear guess: the unstable coordinates propagated back by e^{T lambda_j}.
  Eigen::VectorXd w(k);
  for (int j = 0; j < k; ++j) w[j] = target[j] * std::exp(T * s.eigenvalues[j]);

  ShootingResult out;
  out.integration_tol = integration_tol;
  Eigen::VectorXd F = shoot(w);
  const double scale = std::max(1.0, target.norm());
  int it = 0;
  for (; it < 60; ++it) {
    if (F.norm() <= tol * scale) break;
    Eigen::MatrixXd J(k, k);
    for (int j = 0; j < k; ++j) {
      // Per-coordinate step: direction j is amplified by e^{-T lambda_j}.
      const double h = 1e-6 * std::max(std::abs(w[j]), model.ladder.rho * std::exp(T * s.eigenvalues[j]));
      Eigen::VectorXd wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      J.col(j) = (shoot(wp) - shoot(wm)) / (2 * h);
    }
    const Eigen::VectorXd step = J.fullPivLu().solve(-F);
    double damping = 1.0;
    bool accepted = false;
    for (int d = 0; d < 30; ++d, damping *= 0.5) {
      const Eigen::VectorXd trial = w + damping * step;
      Eigen::VectorXd Ft;
      try {
        Ft = shoot(trial);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::BlowUp) throw;
        continue;
      }
      if (Ft.norm() < F.norm()) {
        w = trial;
        F = Ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(F.norm() <= tol * scale)) {
    std::ostringstream os;
    os << "shooting residual " << F.norm() << " after " << it << " Newton steps";
    throw Error(ErrorKind::NewtonDiverged, os.str());
  }
  out.solution = Em * w + zp;
  out.residual = F.norm();
  out.iterations = it;
  out.trajectory = integrate_forward(model.problem, x + out.solution, T, fo);
  return out;
}

ShootingResult stable_point_oracle(const LocalModel& model, const Eigen::VectorXd& z_plus, double horizon, double tol,
                                   double integration_tol) {
  const auto& s = model.split;
  const Eigen::VectorXd zp = s.proj_plus * z_plus;
  if (s.morse_index > 1) {
    // Long shots amplify the unstable directions beyond what Newton can
    // control; 25/d already puts the endpoint condition far below tolerance.
    const double T = std::min(horizon, 25.0 / s.gap);
    return mixed_bvp_oracle(model, T, Eigen::VectorXd::Zero(s.dimension), zp, tol, integration_tol);
  }
  FlowOptions fo;
  fo.tol = integration_tol;
  const Eigen::VectorXd e = s.basis(Subspace::Minus).col(0);
  double lo = -0.5 * model.ladder.rho, hi = 0.5 * model.ladder.rho;
  const int side_lo = escape_side(model, lo * e + zp, horizon, fo);
  const int side_hi = escape_side(model, hi * e + zp, horizon, fo);
  if (side_lo == side_hi) throw Error(ErrorKind::BracketLost, "both bracket ends leave on the same side");
  ShootingResult out;
  out.integration_tol = integration_tol;
  int it = 0;
  while (hi - lo > tol && it < 200) {
    const double mid = 0.5 * (lo + hi);
    (escape_side(model, mid * e + zp, horizon, fo) == side_lo ? lo : hi) = mid;
    ++it;
  }
  const double w = 0.5 * (lo + hi);
  out.solution = w * e + zp;
  out.bracket_width = hi - lo;
  out.iterations = it;
  const Eigen::VectorXd& x = model.problem.critical_point;
  const double leave = 2.0 * model.ladder.rho;
  out.trajectory = integrate_forward(model.problem, x + out.solution, horizon, fo,
                                     [&](double, const Eigen::VectorXd& p) { return (p - x).norm() > leave; });
  out.residual = (out.trajectory.terminal() - model.problem.critical_point).norm();
  return out;
}

}  // namespace perron
