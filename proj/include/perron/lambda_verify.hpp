#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "perron/graph.hpp"
#include "perron/local_model.hpp"
#include "perron/lyapunov_perron.hpp"

namespace perron {

/// One asserted inequality gap <= bound + slack for a (T, z_-, z_+, v) tuple.
struct ReportRow {
  double T = 0.0;
  Eigen::VectorXd z_minus, z_plus, v;
  double gap = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool pass = true;
  std::vector<double> extra;  // report-specific columns, see extra_columns
};

struct ConvergenceReport {
  std::string kind;
  std::vector<std::string> extra_columns;
  std::vector<ReportRow> rows;
  /// Smallest log-linear decay rate over the (z_-, z_+) series (C^0 report only).
  double fitted_rate = 0.0;
  double rate_floor = 0.0;
  bool has_rate = false;

  bool rows_pass() const;
  bool rate_pass() const { return !has_rate || fitted_rate >= rate_floor; }
  bool pass() const { return rows_pass() && rate_pass(); }
  std::size_t failures() const;
  /// min over rows of (bound + slack - gap); negative when something fails.
  double worst_margin() const;
  /// Largest gap / bound ratio over rows with a positive bound.
  double worst_ratio() const;
};

/// Columns: T, zm1..zmn, zp1..zpn, v1..vn, gap, bound, slack, pass, extras.
void write_report_csv(std::ostream& os, const ConvergenceReport& r);

/// Samples (T, z_-, z_+) for the sweeps.
struct SweepSpec {
  std::vector<double> T_grid;
  std::vector<Eigen::VectorXd> z_minus;
  std::vector<Eigen::VectorXd> z_plus;
};

/// count horizons starting at max(T0, T2), spaced by `step`.
std::vector<double> horizon_grid(const RateLadder& ladder, int count, double step);

/// Grid points of B^+_R (per-axis count, points outside the ball dropped),
/// scaled by `shrink`.
std::vector<Eigen::VectorXd> zplus_samples(const LocalModel& model, int per_axis, double shrink = 1.0);

/// C^0: |G^T_{z_-}(z_+) - G^inf(z_+)| <= e^{-T lambda/8}, and the fitted decay rate >= lambda/8.
ConvergenceReport c0_convergence(const LocalModel& model, const SweepSpec& spec, const SolverOptions& opts = {},
                                 int threads = 1);

/// C^1: |dG^T v - dG^inf v| <= c_* e^{-T lambda/8} |v| by Richardson-checked
/// central differences. FlagMissing unless the problem is C^{2,1}.
ConvergenceReport c1_convergence(const LocalModel& model, const SweepSpec& spec,
                                 const std::vector<Eigen::VectorXd>& directions, double step,
                                 const SolverOptions& opts = {}, int threads = 1);

/// |G^{T+tau} - G^T| / tau <= c_1. The second-difference quotient is reported
/// in the extra column and not asserted.
ConvergenceReport lipschitz_in_T(const LocalModel& model, const SweepSpec& spec, const std::vector<double>& taus,
                                 const SolverOptions& opts = {}, int threads = 1);

/// Re-solves every sample of a G_T graph: |xi(T) - z_-| <= rho e^{-T lambda},
/// with the boundary defects |pi_+ xi(0) - z_+| and |pi_- xi(T) - z_-| as
/// extras (asserted <= boundary_tol).
ConvergenceReport endpoint_audit(const LocalModel& model, const GraphSample& graph, const SolverOptions& opts = {},
                                 double boundary_tol = 1e-12);

/// Measured ratio |Psi xi_1 - Psi xi_2|_exp / |xi_1 - xi_2|_exp over random
/// curve pairs in Z^T, asserted <= bound.
ConvergenceReport contraction_report(const LocalModel& model, const SweepSpec& spec, int pairs, double bound,
                                     double slack, std::uint64_t seed = 11, const SolverOptions& opts = {});

}  // namespace perron
