#pragma once

#include <Eigen/Dense>

#include "perron/flow.hpp"
#include "perron/local_model.hpp"

namespace perron {

/// Outcome of a shooting or bisection solve built on forward integration only.
struct ShootingResult {
  Eigen::VectorXd solution;      // local coordinates
  double bracket_width = 0.0;    // final bisection interval (0 for Newton)
  double residual = 0.0;         // target-condition residual at the solution
  double integration_tol = 0.0;
  int iterations = 0;
  Trajectory trajectory;         // ambient coordinates, starting at the solution
};

/// Point (w, z_+) on the local stable manifold over z_+. For k = 1 the unstable
/// coordinate w is bisected by the side on which the forward trajectory leaves
/// the rho-ball; for k > 1 the mixed problem with z_- = 0 at `horizon` is solved.
ShootingResult stable_point_oracle(const LocalModel& model, const Eigen::VectorXd& z_plus, double horizon,
                                   double tol = 1e-10, double integration_tol = 1e-12);

/// Shoots over the unknown pi_- part w of the initial point: integrate from
/// (w, z_+) for time T and drive pi_- of the endpoint to z_- with damped
/// Newton (Jacobian by finite differences of the flow map).
ShootingResult mixed_bvp_oracle(const LocalModel& model, double T, const Eigen::VectorXd& z_minus,
                                const Eigen::VectorXd& z_plus, double tol = 1e-10, double integration_tol = 1e-12);

}  // namespace perron
