#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "perron/flow.hpp"
#include "perron/graph.hpp"
#include "perron/local_model.hpp"
#include "perron/lyapunov_perron.hpp"

namespace perron {

struct PairSampling {
  int points_per_axis = 41;  // odd, so the critical point is a grid node
  double minus_scale = 3.0;  // box half-width along E^- in units of max |alpha^tau|
  double plus_scale = 1.5;   // along E^+ in units of the ascending-sphere radius
  double flow_tol = 1e-11;
  int threads = 1;
};

/// Grid samples of N = {f <= c + eps, f(phi_tau p) >= c - eps}_x and of its
/// exit set L = {p in N : f(phi_{2tau} p) <= c - eps}, in local coordinates.
struct ConleyPair {
  double epsilon = 0.0;
  double tau = 0.0;
  double c = 0.0;
  Eigen::VectorXd half_widths;  // per eigen-axis
  int points_per_axis = 0;
  int candidates = 0;           // grid nodes satisfying both level conditions
  std::vector<Eigen::VectorXd> N;
  std::vector<bool> in_L;       // parallel to N
  std::vector<double> values;   // f - c on N

  std::size_t exit_count() const;
};

/// Flood-fills the level conditions over an anisotropic eigen-axis grid from
/// the critical point. ComponentAmbiguous when the component reaches the box
/// boundary, i.e. the box cannot resolve it.
ConleyPair build_pair(const LocalModel& model, double epsilon, double tau, const PairSampling& sampling = {},
                      const SolverOptions& opts = {});

/// Columns: set (N or L), x1..xn (ambient), f.
void write_pair_csv(std::ostream& os, const LocalModel& model, const ConleyPair& pair);

struct LeafLabel {
  bool center = true;
  double T = 0.0;
  Eigen::VectorXd alpha;  // point of S^u_eps (local coordinates)
  std::string str() const;
};

/// One leaf: the graph of G^T_alpha (or G^inf for the center) over a B^+ grid,
/// clipped to f <= c + eps.
struct Leaf {
  LeafLabel label;
  Eigen::VectorXd base;                    // alpha^T = G^T_alpha(0); 0 for the center
  GraphSample graph;
  std::vector<int> inside;                 // grid indices with f <= c + eps
  std::vector<Eigen::VectorXd> samples;    // local points over `inside`
  std::vector<Eigen::VectorXd> boundary;   // points on f = c + eps
  double lipschitz = 0.0;                  // largest neighbour slope of the sampled graph
  std::shared_ptr<const MixedSolver> solver;  // null for the center leaf
};

struct AtlasSpec {
  double epsilon = 0.0;            // 0 selects the ladder's epsilon
  double tau = 0.0;                // 0 selects T0
  std::vector<double> T_grid;      // empty selects tau, tau + 1, ..., 2 tau
  int leaf_points = 9;
  /// Half-width of the leaf grids; 0 selects min(R, 1.25 x ascending-sphere radius),
  /// which concentrates samples on the clipped part of B^+.
  double leaf_half_width = 0.0;
  int sphere_points = 8;
  bool with_pair = true;
  PairSampling pair;
  int threads = 1;
};

struct FoliationAtlas {
  std::shared_ptr<const LocalModel> model;
  SolverOptions opts;
  double epsilon = 0.0;
  double tau = 0.0;
  Disk sphere;                            // S^u_eps
  ConleyPair pair;
  std::vector<Leaf> leaves;               // leaves[0] is the center leaf
  std::vector<Eigen::VectorXd> disk_D;    // leaf bases alpha^T (and 0)
  std::vector<int> annulus;               // leaves with tau <= T <= 2 tau

  /// Exact graph point of leaf `i` over z_+ (re-solves the fixed point).
  /// OutsideLeafDomain when z_+ leaves the sampled cube.
  Eigen::VectorXd leaf_point(int i, const Eigen::VectorXd& z_plus) const;
};

FoliationAtlas build_atlas(std::shared_ptr<const LocalModel> model, const AtlasSpec& spec,
                           const SolverOptions& opts = {});

/// Columns: zp1..zpm (eigen-coordinates on E^+), x1..xn (ambient), f.
void write_leaf_csv(std::ostream& os, const FoliationAtlas& atlas, int leaf);

struct DisjointRow {
  int a = 0, b = 0;
  double separation = 0.0;
  double floor = 0.0;
  bool pass = true;
};

struct DisjointReport {
  std::vector<DisjointRow> rows;
  int skipped = 0;  // draws with equal labels
  bool pass() const;
  double min_separation() const;
};

/// Random label pairs compared at equal z_+ over their common clipped samples.
/// The floor Lip(G_a - G_b) h sqrt(m) / 2 + residuals bounds what a grid cell
/// can hide. Use require() to turn a failure into DisjointnessViolation.
DisjointReport check_disjoint(const FoliationAtlas& atlas, int pair_count, std::uint64_t seed = 5);
void require(const DisjointReport& r);

/// theta_t z = G^T_alpha(pi_+ phi_t G^inf(pi_+ z)); t = infinity gives alpha^T.
Eigen::VectorXd induced_flow(const FoliationAtlas& atlas, int leaf, const Eigen::VectorXd& z, double t);

struct LeafAuditRow {
  int leaf = 0;
  double sigma = 0.0;     // invariance: flow time; contraction: unused
  double value = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct LeafAudit {
  std::string kind;
  std::vector<LeafAuditRow> rows;
  bool pass() const;
  double worst() const;  // largest value / bound
};

/// phi_sigma maps leaf (T, alpha) into leaf (T - sigma, alpha) for sigma in
/// [0, T - tau); residual against the exact graph, bound 10 (interpolation
/// error + flow tolerance).
LeafAudit leaf_invariance(const FoliationAtlas& atlas, const std::vector<double>& fractions, double flow_tol = 1e-13);

/// One-sided sample distance of each leaf to the center leaf vs e^{-T lambda/8}.
LeafAudit contraction_to_center(const FoliationAtlas& atlas);

struct RetractReport {
  // (i) theta_inf sends pair samples into D.
  int pair_samples = 0;
  int pair_failures = 0;
  // (ii) theta_t fixes D.
  double max_fix_error = 0.0;
  double fix_tol = 1e-10;
  // surrogate |theta_t z - alpha^T| <= rho e^{-t lambda} at large t.
  double surrogate_time = 0.0;
  double max_surrogate_ratio = 0.0;
  // cocycle theta_t theta_s = theta_{t+s}
  double max_cocycle_error = 0.0;
  // (iii) inward pointing: both difference quotients negative at every boundary sample.
  int boundary_samples = 0;
  int boundary_failures = 0;
  double mu_audit = std::numeric_limits<double>::infinity();
  double quotient_step = 1e-3;

  bool check_i() const { return pair_failures == 0; }
  bool check_ii() const { return max_fix_error <= fix_tol; }
  bool check_iii() const { return boundary_failures == 0 && boundary_samples > 0; }
  bool surrogate_ok() const { return max_surrogate_ratio <= 1.0; }
  bool pass() const { return check_i() && check_ii() && check_iii() && surrogate_ok(); }
};

RetractReport retract_audit(const FoliationAtlas& atlas, const std::vector<double>& times = {0.5, 1.0, 2.0, 5.0});
/// RetractViolation naming the first failed check.
void require(const RetractReport& r);

struct ShrinkResult {
  double epsilon = 0.0;
  double tau = 0.0;
  int halvings = 0;
  double extent = 0.0;  // max |p - x|_inf over the pair
  bool inside = false;
};

/// Halves epsilon until the Conley pair lies in the box |p - x|_inf <= box.
ShrinkResult shrink_to_box(const LocalModel& model, double box, double epsilon, double tau, int max_halvings = 20,
                           PairSampling sampling = {}, const SolverOptions& opts = {});

}  // namespace perron
