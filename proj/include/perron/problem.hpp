#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "perron/polynomial.hpp"

namespace perron {

/// Gradient flow problem near a critical point in the Euclidean local model.
struct GradientProblem {
  std::string name;
  Polynomial objective;
  Eigen::VectorXd critical_point;
  double trust_radius = 1.0;  // rho_0, at most 1
  bool c21 = true;            // f is C^{2,1} near the critical point

  int dimension() const { return objective.dimension(); }
  double critical_value() const { return objective.value(critical_point); }

  double value(const Eigen::VectorXd& p) const { return objective.value(p); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& p) const { return objective.gradient(p); }
  Eigen::MatrixXd hessian_at(const Eigen::VectorXd& p) const { return objective.hessian(p); }

  /// Throws InvalidConfig when the stored point is not critical to `tol`.
  void validate(double tol = 1e-10) const;
};

/// User choices for the constants ladder. Anything left empty gets its default.
struct LadderChoices {
  std::optional<double> lambda;
  std::optional<double> varkappa;
  std::optional<double> epsilon;
  std::optional<double> varsigma;
  std::optional<double> rho;
};

/// Parameters of the verification pipeline that a config may set.
struct PipelineSettings {
  std::optional<double> tau;
  int horizons = 5;            // number of T values in sweeps
  double horizon_step = 1.0;   // spacing of the T grid
  int zplus_points = 3;        // per-axis samples in B^+ for sweeps
  int leaf_points = 9;         // per-axis samples on each leaf
  int sphere_points = 8;       // directions on S^u_eps when k >= 2
  int pair_grid = 41;          // per-axis samples for the Conley pair
  int disjoint_pairs = 100;
};

struct ProblemConfig {
  GradientProblem problem;
  LadderChoices overrides;
  PipelineSettings pipeline;
  std::string source_text;
};

/// Parses the JSON problem description (see README for the schema).
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);

}  // namespace perron
