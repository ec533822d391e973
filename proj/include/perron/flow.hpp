#pragma once

#include <Eigen/Dense>
#include <functional>
#include <ostream>
#include <vector>

#include "perron/local_model.hpp"
#include "perron/lyapunov_perron.hpp"
#include "perron/problem.hpp"

namespace perron {

/// Accepted steps of a forward gradient-flow integration. Between steps the
/// state is reconstructed by cubic Hermite interpolation from the stored
/// states and velocities, which matches the integrator's order.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> velocities;
  std::vector<double> values;  // f along the states
  bool stopped = false;        // ended early by a stop predicate

  double end_time() const { return times.back(); }
  const Eigen::VectorXd& terminal() const { return states.back(); }
  Eigen::VectorXd evaluate(double t) const;
};

/// Called after every accepted step; returning true ends the integration.
using StopPredicate = std::function<bool(double t, const Eigen::VectorXd& p)>;

struct FlowOptions {
  double tol = 1e-10;        // absolute and relative local error
  double blowup = 1e3;       // BlowUp once |p| exceeds this
  double initial_step = 1e-3;
};

/// Integrates p' = -grad f(p) from `start` (ambient coordinates) over [0, T].
/// Never runs backwards in time.
Trajectory integrate_forward(const GradientProblem& problem, const Eigen::VectorXd& start, double T,
                             const FlowOptions& opts = {}, const StopPredicate& stop = {});

struct LevelCrossing {
  bool reached = false;
  double time = 0.0;
  Eigen::VectorXd point;  // state at the crossing, or at T_max when not reached
};

/// First time at which f(phi_t start) drops to `level`, located by bisection
/// on the dense output.
LevelCrossing first_level_crossing(const GradientProblem& problem, const Eigen::VectorXd& start, double level,
                                   double T_max, const FlowOptions& opts = {});

/// CSV with columns t, x1..xn, f.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

/// psi_{-t} q for q on the local unstable manifold (local coordinates), read off
/// the backward fixed point of Phi. NotOnUnstableManifold if q is farther than
/// `tol` from the unstable graph.
Eigen::VectorXd algebraic_backward(const LocalModel& model, const Eigen::VectorXd& q, double t,
                                   const SolverOptions& opts = {}, double tol = 1e-8);

/// Descending (or ascending) disk at level offset epsilon, sampled along rays.
struct Disk {
  bool ascending = false;
  double level_offset = 0.0;
  int dimension = 0;                        // k for descending, n - k for ascending
  std::vector<Eigen::VectorXd> directions;  // unit vectors in E^- (or E^+)
  std::vector<double> radii;                // projected radius of the sphere per direction
  std::vector<Eigen::VectorXd> boundary;    // sphere points, local coordinates

  double min_radius() const;
  double max_radius() const;
};
using DescendingDisk = Disk;

/// Deterministic unit directions in span(basis): +-b for a line, `count`
/// equally spaced angles for a plane, axes and diagonals otherwise.
std::vector<Eigen::VectorXd> sphere_directions(const Eigen::MatrixXd& basis, int count);

/// S^u_eps: along each ray in E^- solve f(F_inf point) = c - eps by bisection.
/// LevelNotReached when the level lies beyond the graph domain.
Disk descending_disk(const LocalModel& model, double epsilon, int sphere_points, const SolverOptions& opts = {});
/// S^s_eps: the analogue on the stable graph with f = c + eps.
Disk ascending_disk(const LocalModel& model, double epsilon, int sphere_points, const SolverOptions& opts = {});

/// Resolves varsigma, epsilon and varkappa (honouring overrides) from the
/// sampled manifolds and returns the completed ladder.
RateLadder resolve_disks(const LocalModel& model, const LadderChoices& choices, int sphere_points,
                         const SolverOptions& opts = {});

struct ModelOptions {
  int kappa_samples = 400;
  std::uint64_t seed = 7;
  int sphere_points = 8;
  bool resolve = true;  // run resolve_disks
};

/// Critical point validation, spectral split, Lipschitz table and ladder.
LocalModel prepare_model(const ProblemConfig& config, const ModelOptions& options = {},
                         const SolverOptions& solver = {});

}  // namespace perron
