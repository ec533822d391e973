#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "perron/curve.hpp"
#include "perron/graph.hpp"
#include "perron/local_model.hpp"

namespace perron {

/// Discretization and iteration controls shared by the three contraction operators.
struct SolverOptions {
  double tol = 1e-13;          // Picard residual in the weighted norm
  int max_iter = 400;
  int degree = 8;              // polynomial degree per panel
  double panel_scale = 0.5;    // panel width = panel_scale / max|lambda_i|, capped at 0.5
  double horizon = 0.0;        // truncation of infinite horizons, 0 selects max(3 T0, 40/lambda)
  double budget_slack = 1e-9;  // relative slack on the rho-ball check
  bool check_budget = true;

  double panel_width(const SpectralSplit& s) const;
  double infinite_horizon(const RateLadder& l) const;
};

/// Variation-of-constants operator on [t0, t1] shared by Phi, Psi and Psi^T:
///
///   (K xi)(t) = e^{-(t-t0)A} z_+ + int_{t0}^t e^{-(t-s)A} pi_+ h(xi(s)) ds
///             + e^{-(t-t1)A^-} z_- - int_t^{t1} e^{-(t-s)A^-} pi_- h(xi(s)) ds.
///
/// The convolutions run in eigen-coordinates; h o xi is interpolated per panel
/// and integrated against the exponential kernel with precomputed weights, so
/// pi_+ (K xi)(t0) = z_+ and pi_- (K xi)(t1) = z_- hold to rounding.
class MixedOperator {
 public:
  MixedOperator(const LocalModel& model, PanelGrid grid, double rate, Eigen::VectorXd z_plus,
                Eigen::VectorXd z_minus);

  Curve apply(const Curve& xi) const;
  /// The curve with h == 0 (both boundary terms only).
  Curve linear_part() const;

  const PanelGrid& grid() const { return grid_; }
  double rate() const { return rate_; }

 private:
  struct Kernel {
    bool plus = true;
    double eigenvalue = 0.0;
    Eigen::MatrixXd weights;  // (degree+1) x (degree+1), row i = node, col m = basis
    Eigen::VectorXd decay;    // propagator from the panel's anchor node to node i
  };

  const LocalModel* model_;
  PanelGrid grid_;
  double rate_;
  Eigen::VectorXd z_plus_, z_minus_;
  Eigen::VectorXd plus_coords_, minus_coords_;
  std::vector<Kernel> kernels_;
};

struct FixedPointResult {
  Curve curve;
  double residual = 0.0;
  int iterations = 0;
  double tail_bound = 0.0;  // truncation error of an infinite horizon
  std::vector<double> history;
};

/// Picard iteration until the weighted residual drops below `tol` (or to the
/// rounding floor of the iterate). Throws NoConvergence when the residual fails
/// to shrink by 0.9 for 10 consecutive steps or max_iter is exhausted.
FixedPointResult fixed_point(const std::function<Curve(const Curve&)>& op, Curve initial, double tol, int max_iter);

// One application of each operator. Budget violations throw NormBudgetExceeded.
Curve apply_Phi(const LocalModel& model, const Eigen::VectorXd& z_minus, const Curve& eta, const SolverOptions& opts = {});
Curve apply_Psi_stable(const LocalModel& model, const Eigen::VectorXd& z_plus, const Curve& xi,
                       const SolverOptions& opts = {});
Curve apply_Psi_T(const LocalModel& model, double T, const Eigen::VectorXd& z_minus, const Eigen::VectorXd& z_plus,
                  const Curve& xi, const Curve& reference, const SolverOptions& opts = {});

/// Backward flow line eta_{z_-} on [-H, 0] emanating from the critical point.
FixedPointResult solve_unstable(const LocalModel& model, const Eigen::VectorXd& z_minus, const SolverOptions& opts = {},
                                double min_horizon = 0.0);
/// Forward flow line xi_{z_+} on [0, H] converging to the critical point.
FixedPointResult solve_stable(const LocalModel& model, const Eigen::VectorXd& z_plus, const SolverOptions& opts = {});

/// Solver for the mixed boundary problem pi_+ xi(0) = z_+, pi_- xi(T) = z_-.
/// Caches the reference trajectory t -> phi_t z_-^T built from the unstable
/// fixed point, so sweeping z_+ for fixed (T, z_-) is cheap.
class MixedSolver {
 public:
  MixedSolver(const LocalModel& model, double T, Eigen::VectorXd z_minus, SolverOptions opts = {});

  double horizon() const { return T_; }
  const Eigen::VectorXd& z_minus() const { return z_minus_; }
  const Curve& reference() const { return reference_; }
  /// z_-^T = phi_{-T} z_-, the algebraic backward flow of z_-.
  Eigen::VectorXd backward_point() const { return reference_.front(); }
  const PanelGrid& grid() const { return grid_; }

  MixedOperator op(const Eigen::VectorXd& z_plus) const;
  Curve apply(const Eigen::VectorXd& z_plus, const Curve& xi) const;
  /// t -> e^{-tA} z_+ + phi_t z_-^T.
  Curve initial_guess(const Eigen::VectorXd& z_plus) const;
  FixedPointResult solve(const Eigen::VectorXd& z_plus) const;
  /// Graph point G^T_{z_-}(z_+) = xi(0) (full point, pi_+ part equal to z_+).
  Eigen::VectorXd graph_point(const Eigen::VectorXd& z_plus) const;

  double distance_to_reference(const Curve& xi) const;

 private:
  const LocalModel* model_;
  double T_;
  Eigen::VectorXd z_minus_;
  SolverOptions opts_;
  PanelGrid grid_;
  Curve reference_;
};

/// Graph point F_inf: z_- -> (z_-, F^inf(z_-)) and G_inf: z_+ -> (G^inf(z_+), z_+).
Eigen::VectorXd unstable_graph_point(const LocalModel& model, const Eigen::VectorXd& z_minus, const SolverOptions& opts = {});
Eigen::VectorXd stable_graph_point(const LocalModel& model, const Eigen::VectorXd& z_plus, const SolverOptions& opts = {});

/// Tabulations over a tensor grid of half-width R = rho/2 in the domain
/// subspace (or a smaller `half_width` when given).
GraphSample graph_F_inf(const LocalModel& model, int points_per_axis, const SolverOptions& opts = {},
                        int threads = 1);
GraphSample graph_G_inf(const LocalModel& model, int points_per_axis, const SolverOptions& opts = {},
                        int threads = 1, double half_width = 0.0);
/// Requires T >= T0 and, once the disk parameters are known, checks the fiber
/// condition |xi(T) - z_-| <= varkappa (EndpointViolation otherwise).
GraphSample graph_G_T(const LocalModel& model, double T, const Eigen::VectorXd& z_minus, int points_per_axis,
                      const SolverOptions& opts = {}, int threads = 1, double half_width = 0.0);

struct DerivativeEstimate {
  Eigen::VectorXd value;  // Richardson-extrapolated central difference
  double error = 0.0;     // |D_h - D_{h/2}| / 3
};

/// Central difference of `graph` at `base` in direction v, refined once by
/// Richardson extrapolation. StepTooLarge when the stencil leaves the disk of
/// radius `domain_radius`.
DerivativeEstimate graph_derivative(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& graph,
                                    const Eigen::VectorXd& base, const Eigen::VectorXd& v, double step,
                                    double domain_radius);

}  // namespace perron
