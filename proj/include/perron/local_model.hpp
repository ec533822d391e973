#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "perron/graph.hpp"
#include "perron/problem.hpp"
#include "perron/spectral.hpp"

namespace perron {

/// h(xi) = A xi - grad f(x + xi), in local coordinates centred at the critical point.
Eigen::VectorXd nonlinearity(const GradientProblem& problem, const SpectralSplit& split, const Eigen::VectorXd& xi);

/// dh(xi) = A - D(grad f)(x + xi). No trust-region check.
Eigen::MatrixXd nonlinearity_jacobian(const GradientProblem& problem, const SpectralSplit& split,
                                      const Eigen::VectorXd& xi);

/// Sampled Lipschitz modulus kappa(rho) of h on balls B_rho, monotone and
/// inflated by a safety factor. kappa_star is the sampled Lipschitz constant
/// of dh over the trust ball (only meaningful when the problem is C^{2,1}).
struct KappaTable {
  std::vector<double> radii;   // ascending, radii.front() == 0
  std::vector<double> kappa;   // with safety factor, non-decreasing
  std::vector<double> raw;     // sampled suprema before inflation
  double kappa_star = 0.0;
  bool has_kappa_star = false;
  double safety = 1.5;

  /// Value at the smallest tabulated radius >= r (upper estimate).
  double at(double r) const;
};

KappaTable lipschitz_modulus(const GradientProblem& problem, const SpectralSplit& split,
                             std::vector<double> rho_grid, int samples, std::uint64_t seed = 7);

/// Default radius grid {rho_0, rho_0/2, rho_0/4, ...} plus 0, ascending.
std::vector<double> default_radius_grid(double rho0, int levels = 24);

/// Constants of the contraction argument, with the inequalities they must satisfy.
struct RateLadder {
  double d = 0.0;          // spectral gap
  double lambda1 = 0.0;    // smallest eigenvalue (negative)
  double lambda_n = 0.0;   // largest eigenvalue
  double lambda = 0.0;     // decay rate in (0, d)
  double delta = 0.0;
  double mu = 0.0;
  double rho0 = 1.0;
  double rho = 0.0;
  double kappa_rho = 0.0;      // kappa(rho)
  double kappa_working = 0.0;  // kappa(2 rho), covers every curve of Z^T
  double kappa_star = 0.0;
  bool has_kappa_star = false;
  double varkappa = 0.0;
  double epsilon = 0.0;
  double varsigma = 0.0;
  double T1 = 0.0;
  double T2 = 0.0;
  double T0 = 0.0;
  double c1 = 0.0;
  double c_star = 0.0;
  bool disks_resolved = false;

  double R() const { return 0.5 * rho; }
  /// kappa(rho) (4/lambda + 1/delta + 1), must be <= 1/8.
  double smallness() const { return kappa_rho * (4.0 / lambda + 1.0 / delta + 1.0); }
  /// Contraction factor bound kappa (1/delta + 1/(lambda + mu)) of the mixed operator.
  double contraction_bound() const { return kappa_working * (1.0 / delta + 1.0 / (lambda + mu)); }

  /// Human-readable list of violated invariants; empty when all hold.
  std::vector<std::string> violations() const;
};

/// Rates, rho and derived constants. Disk parameters (varsigma, epsilon,
/// varkappa) are taken from `choices` when given; otherwise they are resolved
/// later from the sampled manifolds via with_disks().
RateLadder build_ladder(const SpectralSplit& split, const KappaTable& kappa, const LadderChoices& choices,
                        double rho0 = 1.0);

/// Fills the disk parameters and recomputes T1 and T0.
RateLadder with_disks(RateLadder ladder, double varsigma, double epsilon, double varkappa);

/// Smallest T with e^{-T mu / 4} <= 1/8.
double horizon_T2(double mu);

/// Flattening map theta(x, y) = (x - G_inf(y), y - F_inf(x)) with x = pi_- p, y = pi_+ p.
Eigen::VectorXd flatten(const GraphSample& graph_F, const GraphSample& graph_G, const SpectralSplit& split,
                        const Eigen::VectorXd& point);

/// Everything downstream needs about one critical point.
struct LocalModel {
  GradientProblem problem;
  SpectralSplit split;
  KappaTable kappa;
  RateLadder ladder;

  int dimension() const { return split.dimension; }
  int morse_index() const { return split.morse_index; }
  Eigen::VectorXd h(const Eigen::VectorXd& xi) const { return nonlinearity(problem, split, xi); }
  /// f(x + xi) - f(x).
  double level(const Eigen::VectorXd& xi) const;
  Eigen::VectorXd ambient(const Eigen::VectorXd& xi) const { return problem.critical_point + xi; }
};

}  // namespace perron
