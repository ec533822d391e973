#include "perron/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>

#include "perron/error.hpp"
#include "perron/io.hpp"
#include "perron/parallel.hpp"

namespace perron {

std::size_t ConleyPair::exit_count() const { return static_cast<std::size_t>(std::count(in_L.begin(), in_L.end(), true)); }

namespace {

// Multi-index <-> flat index, axis 0 slowest.
std::vector<int> unflatten(int idx, int per_axis, int n) {
  std::vector<int> out(n);
  for (int a = n - 1; a >= 0; --a) {
    out[a] = idx % per_axis;
    idx /= per_axis;
  }
  return out;
}

int flatten_index(const std::vector<int>& m, int per_axis) {
  int idx = 0;
  for (int v : m) idx = idx * per_axis + v;
  return idx;
}

double bisect_level(const std::function<double(double)>& g, double r_max) {
  if (g(r_max) >= 0) throw Error(ErrorKind::LevelNotReached, "leaf does not reach the upper level inside its domain");
  double lo = 0.0, hi = r_max;
  for (int i = 0; i < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * r_max; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ConleyPair build_pair(const LocalModel& model, double epsilon, double tau, const PairSampling& sampling,
                      const SolverOptions& opts) {
  if (sampling.points_per_axis < 3 || sampling.points_per_axis % 2 == 0)
    throw Error(ErrorKind::InvalidConfig, "pair grid needs an odd number of points per axis");
  const auto& s = model.split;
  const int n = s.dimension, k = s.morse_index, m = sampling.points_per_axis;

  // Extent of N: along E^- it is set by phi_{-tau} of the descending sphere,
  // along E^+ by the ascending sphere.
  const Disk down = descending_disk(model, epsilon, 8, opts);
  double a_tau = 0.0;
  for (const auto& a : down.boundary) a_tau = std::max(a_tau, algebraic_backward(model, a, tau, opts).norm());
  const double r_up = ascending_disk(model, epsilon, 8, opts).max_radius();

  ConleyPair P;
  P.epsilon = epsilon;
  P.tau = tau;
  P.c = model.problem.critical_value();
  P.points_per_axis = m;
  P.half_widths.resize(n);
  for (int j = 0; j < n; ++j) P.half_widths[j] = j < k ? sampling.minus_scale * a_tau : sampling.plus_scale * r_up;

  int total = 1;
  for (int j = 0; j < n; ++j) total *= m;
  auto point = [&](int idx) {
    const std::vector<int> mi = unflatten(idx, m, n);
    Eigen::VectorXd c(n);
    for (int j = 0; j < n; ++j) c[j] = P.half_widths[j] * (2.0 * mi[j] / (m - 1) - 1.0);
    return Eigen::VectorXd(s.eigenvectors * c);
  };

  FlowOptions fo;
  fo.tol = sampling.flow_tol;
  const Eigen::VectorXd& x = model.problem.critical_point;
  std::vector<char> member(total, 0), exits(total, 0);
  parallel_for(total, sampling.threads, [&](int idx) {
    const Eigen::VectorXd p = point(idx);
    if (model.level(p) > epsilon) return;
    const LevelCrossing cr = first_level_crossing(model.problem, x + p, P.c - epsilon, 2 * tau, fo);
    if (cr.reached && cr.time < tau) return;
    member[idx] = 1;
    exits[idx] = cr.reached ? 1 : 0;
  });
  P.candidates = static_cast<int>(std::count(member.begin(), member.end(), 1));

  // Component of the critical point under grid adjacency.
  const int origin = flatten_index(std::vector<int>(n, (m - 1) / 2), m);
  std::vector<char> seen(total, 0);
  std::deque<int> queue{origin};
  seen[origin] = 1;
  std::vector<int> component;
  while (!queue.empty()) {
    const int idx = queue.front();
    queue.pop_front();
    component.push_back(idx);
    std::vector<int> mi = unflatten(idx, m, n);
    for (int a = 0; a < n; ++a) {
      if (mi[a] == 0 || mi[a] == m - 1) {
        std::ostringstream os;
        os << "component of the critical point reaches the sampling box along axis " << a;
        throw Error(ErrorKind::ComponentAmbiguous, os.str());
      }
      for (int d : {-1, 1}) {
        mi[a] += d;
        const int nb = flatten_index(mi, m);
        mi[a] -= d;
        if (member[nb] && !seen[nb]) {
          seen[nb] = 1;
          queue.push_back(nb);
        }
      }
    }
  }
  std::sort(component.begin(), component.end());
  for (int idx : component) {
    const Eigen::VectorXd p = point(idx);
    P.N.push_back(p);
    P.in_L.push_back(exits[idx] != 0);
    P.values.push_back(model.level(p));
  }
  return P;
}

void write_pair_csv(std::ostream& os, const LocalModel& model, const ConleyPair& pair) {
  const int n = model.dimension();
  os << "set," << coordinate_header("x", n) << ",f\n";
  for (std::size_t i = 0; i < pair.N.size(); ++i) {
    const std::string coords = format_vector(model.ambient(pair.N[i]));
    const std::string f = format_double(pair.c + pair.values[i]);
    os << "N," << coords << ',' << f << '\n';
    if (pair.in_L[i]) os << "L," << coords << ',' << f << '\n';
  }
}

std::string LeafLabel::str() const {
  if (center) return "center";
  std::ostringstream os;
  os << "T=" << format_double(T) << " alpha=(" << format_vector(alpha) << ")";
  return os.str();
}

Eigen::VectorXd FoliationAtlas::leaf_point(int i, const Eigen::VectorXd& z_plus) const {
  const Leaf& leaf = leaves.at(static_cast<std::size_t>(i));
  const Eigen::VectorXd c = leaf.graph.grid.basis.transpose() * z_plus;
  if (c.cwiseAbs().maxCoeff() > model->ladder.R() * (1 + 1e-12))
    throw Error(ErrorKind::OutsideLeafDomain, "z_+ outside the sampled leaf domain");
  if (leaf.label.center) return stable_graph_point(*model, z_plus, opts);
  return leaf.solver->graph_point(z_plus);
}

FoliationAtlas build_atlas(std::shared_ptr<const LocalModel> model, const AtlasSpec& spec, const SolverOptions& opts) {
  const LocalModel& M = *model;
  const auto& Lad = M.ladder;
  FoliationAtlas A;
  A.model = model;
  A.opts = opts;
  A.epsilon = spec.epsilon > 0 ? spec.epsilon : Lad.epsilon;
  A.tau = spec.tau > 0 ? spec.tau : Lad.T0;
  std::vector<double> T_grid = spec.T_grid;
  if (T_grid.empty())
    for (int j = 0; j <= 4; ++j) T_grid.push_back(A.tau * (1.0 + 0.25 * j));
  for (double T : T_grid)
    if (T < A.tau * (1 - 1e-12)) throw Error(ErrorKind::HorizonMismatch, "leaf horizons must be >= tau");

  A.sphere = descending_disk(M, A.epsilon, spec.sphere_points, opts);
  double half_width = spec.leaf_half_width;
  if (half_width <= 0)
    half_width = std::min(Lad.R(), 1.25 * ascending_disk(M, A.epsilon, spec.sphere_points, opts).max_radius());
  if (spec.with_pair) {
    PairSampling ps = spec.pair;
    ps.threads = spec.threads;
    A.pair = build_pair(M, A.epsilon, A.tau, ps, opts);
  }

  // Labels: the center, then (T, alpha) in T-major order.
  std::vector<LeafLabel> labels(1);
  for (double T : T_grid)
    for (const auto& a : A.sphere.boundary) labels.push_back({false, T, a});

  A.leaves.resize(labels.size());
  const double R = Lad.R();
  const Eigen::MatrixXd Bp = M.split.basis(Subspace::Plus);
  const auto dirs = sphere_directions(Bp, spec.sphere_points);
  parallel_for(static_cast<int>(labels.size()), spec.threads, [&](int i) {
    Leaf& leaf = A.leaves[i];
    leaf.label = labels[i];
    if (leaf.label.center) {
      leaf.graph = graph_G_inf(M, spec.leaf_points, opts, 1, half_width);
      leaf.base = Eigen::VectorXd::Zero(M.dimension());
    } else {
      const Eigen::VectorXd zm = M.split.proj_minus * leaf.label.alpha;
      leaf.graph = graph_G_T(M, leaf.label.T, zm, spec.leaf_points, opts, 1, half_width);
      leaf.solver = std::make_shared<const MixedSolver>(M, leaf.label.T, zm, opts);
      leaf.base = leaf.solver->graph_point(Eigen::VectorXd::Zero(M.dimension()));
    }
    const SubspaceGrid& g = leaf.graph.grid;
    for (int j = 0; j < g.size(); ++j) {
      const Eigen::VectorXd p = leaf.graph.values[j] + g.point(j);
      if (M.level(p) <= A.epsilon) {
        leaf.inside.push_back(j);
        leaf.samples.push_back(p);
      }
    }
    // Largest slope between grid neighbours.
    const int mdim = g.dimension(), ppa = g.points_per_axis;
    for (int j = 0; j < g.size() && ppa > 1; ++j) {
      std::vector<int> mi = unflatten(j, ppa, mdim);
      for (int a = 0; a < mdim; ++a) {
        if (mi[a] + 1 >= ppa) continue;
        ++mi[a];
        const int nb = flatten_index(mi, ppa);
        --mi[a];
        leaf.lipschitz = std::max(leaf.lipschitz, (leaf.graph.values[nb] - leaf.graph.values[j]).norm() / g.spacing());
      }
    }
    auto point_at = [&](const Eigen::VectorXd& zp) -> Eigen::VectorXd {
      return leaf.label.center ? stable_graph_point(M, zp, opts) : leaf.solver->graph_point(zp);
    };
    for (const auto& u : dirs) {
      const double r = bisect_level([&](double t) { return A.epsilon - M.level(point_at(t * u)); }, R);
      leaf.boundary.push_back(point_at(r * u));
    }
  });

  for (std::size_t i = 0; i < A.leaves.size(); ++i) {
    A.disk_D.push_back(A.leaves[i].base);
    const auto& lb = A.leaves[i].label;
    if (!lb.center && lb.T <= 2 * A.tau * (1 + 1e-12)) A.annulus.push_back(static_cast<int>(i));
  }
  return A;
}

void write_leaf_csv(std::ostream& os, const FoliationAtlas& atlas, int leaf) {
  const Leaf& L = atlas.leaves.at(static_cast<std::size_t>(leaf));
  const int m = L.graph.grid.dimension();
  const int n = static_cast<int>(L.graph.grid.basis.rows());
  os << coordinate_header("zp", m) << ',' << coordinate_header("x", n) << ",f\n";
  for (std::size_t s = 0; s < L.inside.size(); ++s) {
    const Eigen::VectorXd c = L.graph.grid.coordinates(L.inside[s]);
    const Eigen::VectorXd amb = atlas.model->ambient(L.samples[s]);
    os << format_vector(c) << ',' << format_vector(amb) << ',' << format_double(atlas.model->problem.value(amb)) << '\n';
  }
}

bool DisjointReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const DisjointRow& r) { return r.pass; });
}

double DisjointReport::min_separation() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min(m, r.separation);
  return m;
}

DisjointReport check_disjoint(const FoliationAtlas& atlas, int pair_count, std::uint64_t seed) {
  DisjointReport rep;
  const int count = static_cast<int>(atlas.leaves.size());
  if (count < 2) return rep;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, count - 1);
  for (int draws = 0; static_cast<int>(rep.rows.size()) < pair_count && draws < 100 * pair_count; ++draws) {
    const int a = pick(rng), b = pick(rng);
    if (a == b) {
      ++rep.skipped;
      continue;
    }
    const Leaf& A = atlas.leaves[a];
    const Leaf& B = atlas.leaves[b];
    DisjointRow row;
    row.a = a;
    row.b = b;
    row.separation = std::numeric_limits<double>::infinity();
    // Both leaves are graphs over the same grid, so they can only meet where
    // the difference D = G_a - G_b vanishes. A zero inside a cell is excluded
    // once |D| at the nodes exceeds Lip(D) times the half cell diagonal.
    const SubspaceGrid& g = A.graph.grid;
    const int mdim = g.dimension(), ppa = g.points_per_axis;
    double lip = 0.0;
    for (int i : A.inside) {
      if (!std::binary_search(B.inside.begin(), B.inside.end(), i)) continue;
      const Eigen::VectorXd D = A.graph.values[i] - B.graph.values[i];
      row.separation = std::min(row.separation, D.norm());
      std::vector<int> mi = unflatten(i, ppa, mdim);
      for (int ax = 0; ax < mdim; ++ax) {
        if (mi[ax] + 1 >= ppa) continue;
        ++mi[ax];
        const int nb = flatten_index(mi, ppa);
        --mi[ax];
        lip = std::max(lip, (A.graph.values[nb] - B.graph.values[nb] - D).norm() / g.spacing());
      }
    }
    row.floor = 0.5 * lip * g.spacing() * std::sqrt(static_cast<double>(mdim)) + A.graph.max_residual() +
                B.graph.max_residual();
    row.pass = row.separation > row.floor;
    rep.rows.push_back(row);
  }
  return rep;
}

void require(const DisjointReport& r) {
  for (const auto& row : r.rows)
    if (!row.pass) {
      std::ostringstream os;
      os << "leaves " << row.a << " and " << row.b << " separated by " << row.separation << " <= floor " << row.floor;
      throw Error(ErrorKind::DisjointnessViolation, os.str());
    }
}

Eigen::VectorXd induced_flow(const FoliationAtlas& atlas, int leaf, const Eigen::VectorXd& z, double t) {
  const LocalModel& M = *atlas.model;
  if (std::isinf(t)) return atlas.leaves.at(static_cast<std::size_t>(leaf)).base;
  if (t < 0) throw Error(ErrorKind::HorizonMismatch, "the induced semi-flow runs forward only");
  const Eigen::VectorXd y = M.split.proj_plus * z;
  const Eigen::VectorXd& c = atlas.leaves.at(static_cast<std::size_t>(leaf)).graph.grid.basis;
  if ((c.transpose() * y).cwiseAbs().maxCoeff() > M.ladder.R() * (1 + 1e-12))
    throw Error(ErrorKind::OutsideLeafDomain, "point outside the leaf domain");
  const Eigen::VectorXd w = stable_graph_point(M, y, atlas.opts);
  FlowOptions fo;
  fo.tol = 1e-13;
  const Eigen::VectorXd p = integrate_forward(M.problem, M.ambient(w), t, fo).terminal() - M.problem.critical_point;
  return atlas.leaf_point(leaf, M.split.proj_plus * p);
}

bool LeafAudit::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const LeafAuditRow& r) { return r.pass; });
}

double LeafAudit::worst() const {
  double w = 0.0;
  for (const auto& r : rows) w = std::max(w, r.bound > 0 ? r.value / r.bound : (r.value > 0 ? INFINITY : 0.0));
  return w;
}

LeafAudit leaf_invariance(const FoliationAtlas& atlas, const std::vector<double>& fractions, double flow_tol) {
  const LocalModel& M = *atlas.model;
  LeafAudit rep;
  rep.kind = "invariance";
  FlowOptions fo;
  fo.tol = flow_tol;
  for (std::size_t i = 1; i < atlas.leaves.size(); ++i) {
    const Leaf& leaf = atlas.leaves[i];
    if (leaf.label.T <= atlas.tau) continue;
    for (double frac : fractions) {
      const double sigma = frac * (leaf.label.T - atlas.tau);
      const MixedSolver target(M, leaf.label.T - sigma, M.split.proj_minus * leaf.label.alpha, atlas.opts);
      LeafAuditRow row;
      row.leaf = static_cast<int>(i);
      row.sigma = sigma;
      for (const auto& z : leaf.samples) {
        const Eigen::VectorXd p =
            integrate_forward(M.problem, M.ambient(z), sigma, fo).terminal() - M.problem.critical_point;
        const Eigen::VectorXd g = target.graph_point(M.split.proj_plus * p);
        row.value = std::max(row.value, (M.split.proj_minus * (p - g)).norm());
      }
      row.bound = 10.0 * (leaf.graph.interpolation_error() + flow_tol);
      row.pass = row.value <= row.bound;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

LeafAudit contraction_to_center(const FoliationAtlas& atlas) {
  LeafAudit rep;
  rep.kind = "contraction";
  const auto& center = atlas.leaves.front().samples;
  const double lambda = atlas.model->ladder.lambda;
  for (std::size_t i = 1; i < atlas.leaves.size(); ++i) {
    const Leaf& leaf = atlas.leaves[i];
    LeafAuditRow row;
    row.leaf = static_cast<int>(i);
    for (const auto& p : leaf.samples) {
      double best = INFINITY;
      for (const auto& q : center) best = std::min(best, (p - q).norm());
      row.value = std::max(row.value, best);
    }
    row.bound = std::exp(-leaf.label.T * lambda / 8.0);
    row.pass = row.value <= row.bound + leaf.graph.max_residual() + atlas.leaves.front().graph.max_residual();
    rep.rows.push_back(row);
  }
  return rep;
}

RetractReport retract_audit(const FoliationAtlas& atlas, const std::vector<double>& times) {
  const LocalModel& M = *atlas.model;
  const auto& Lad = M.ladder;
  const Eigen::VectorXd& x = M.problem.critical_point;
  RetractReport rep;

  // (i) every pair sample reaches the fiber over S^u_eps no sooner than tau
  // (or never, on the stable manifold), so theta_inf lands in D.
  FlowOptions fo;
  fo.tol = 1e-12;
  const std::size_t stride = std::max<std::size_t>(1, atlas.pair.N.size() / 200);
  for (std::size_t i = 0; i < atlas.pair.N.size(); i += stride) {
    ++rep.pair_samples;
    const LevelCrossing cr = first_level_crossing(M.problem, x + atlas.pair.N[i], atlas.pair.c - atlas.epsilon,
                                                  2 * atlas.tau + 40.0 / Lad.lambda, fo);
    if (!cr.reached) continue;
    const Eigen::VectorXd q = cr.point - x;
    bool ok = cr.time >= atlas.tau * (1 - 1e-9) && (M.split.proj_plus * q).norm() <= Lad.varkappa;
    if (ok) {
      const MixedSolver s(M, cr.time, M.split.proj_minus * q, atlas.opts);
      const Eigen::VectorXd aT = s.graph_point(Eigen::VectorXd::Zero(M.dimension()));
      const Eigen::VectorXd on_u = unstable_graph_point(M, M.split.proj_minus * aT, atlas.opts);
      ok = (M.split.proj_plus * (aT - on_u)).norm() <= 1e-9;
    }
    if (!ok) ++rep.pair_failures;
  }

  // (ii) theta_t fixes the leaf bases.
  for (std::size_t l = 0; l < atlas.leaves.size(); ++l)
    for (double t : times)
      rep.max_fix_error = std::max(
          rep.max_fix_error, (induced_flow(atlas, static_cast<int>(l), atlas.leaves[l].base, t) - atlas.leaves[l].base).norm());

  // Large-t surrogate of theta_inf and the cocycle identity, on a few samples per leaf.
  rep.surrogate_time = 3.0 * Lad.T0;
  const double tail = Lad.rho * std::exp(-rep.surrogate_time * Lad.lambda);
  for (std::size_t l = 0; l < atlas.leaves.size(); ++l) {
    const Leaf& leaf = atlas.leaves[l];
    const std::size_t step = std::max<std::size_t>(1, leaf.samples.size() / 4);
    for (std::size_t s = 0; s < leaf.samples.size(); s += step) {
      const Eigen::VectorXd& z = leaf.samples[s];
      const int li = static_cast<int>(l);
      const double d = (induced_flow(atlas, li, z, rep.surrogate_time) - leaf.base).norm();
      rep.max_surrogate_ratio = std::max(rep.max_surrogate_ratio, d / tail);
      const Eigen::VectorXd two_then_one = induced_flow(atlas, li, induced_flow(atlas, li, z, 2.0), 1.0);
      rep.max_cocycle_error = std::max(rep.max_cocycle_error, (two_then_one - induced_flow(atlas, li, z, 3.0)).norm());
    }
  }

  // (iii) f o theta decreases through every leaf boundary sample.
  const double h = rep.quotient_step;
  for (std::size_t l = 0; l < atlas.leaves.size(); ++l)
    for (const auto& z : atlas.leaves[l].boundary) {
      ++rep.boundary_samples;
      const double f0 = M.level(z);
      const int li = static_cast<int>(l);
      const double q1 = (M.level(induced_flow(atlas, li, z, h)) - f0) / h;
      const double q2 = (M.level(induced_flow(atlas, li, z, 0.5 * h)) - f0) / (0.5 * h);
      if (!(q1 < 0 && q2 < 0)) ++rep.boundary_failures;
      rep.mu_audit = std::min(rep.mu_audit, std::min(-q1, -q2));
    }
  return rep;
}

void require(const RetractReport& r) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::RetractViolation, what); };
  if (!r.check_i()) fail("(i) " + std::to_string(r.pair_failures) + " pair samples do not retract into D");
  if (!r.check_ii()) fail("(ii) theta_t moves D by " + std::to_string(r.max_fix_error));
  if (!r.check_iii()) fail("(iii) " + std::to_string(r.boundary_failures) + " boundary samples are not inward pointing");
  if (!r.surrogate_ok()) fail("large-t surrogate misses alpha^T beyond rho e^{-t lambda}");
}

ShrinkResult shrink_to_box(const LocalModel& model, double box, double epsilon, double tau, int max_halvings,
                           PairSampling sampling, const SolverOptions& opts) {
  ShrinkResult r;
  r.tau = tau;
  const Eigen::MatrixXd absV = model.split.eigenvectors.cwiseAbs();
  for (r.halvings = 0; r.halvings <= max_halvings; ++r.halvings, epsilon *= 0.5) {
    const ConleyPair P = build_pair(model, epsilon, tau, sampling, opts);
    // The sampling box contains N; its ambient sup-extent bounds the pair.
    r.extent = (absV * P.half_widths).maxCoeff();
    r.epsilon = epsilon;
    if (r.extent <= box) {
      r.inside = true;
      return r;
    }
  }
  r.halvings = max_halvings;
  return r;
}

}  // namespace perron
