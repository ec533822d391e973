#include "perron/local_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "perron/error.hpp"

namespace perron {

Eigen::VectorXd nonlinearity(const GradientProblem& problem, const SpectralSplit& split, const Eigen::VectorXd& xi) {
  if (xi.norm() > problem.trust_radius * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "|xi| = " << xi.norm() << " exceeds rho_0 = " << problem.trust_radius;
    throw Error(ErrorKind::OutOfTrustRegion, os.str());
  }
  return split.hessian * xi - problem.gradient(problem.critical_point + xi);
}

Eigen::MatrixXd nonlinearity_jacobian(const GradientProblem& problem, const SpectralSplit& split,
                                      const Eigen::VectorXd& xi) {
  return split.hessian - problem.hessian_at(problem.critical_point + xi);
}

double KappaTable::at(double r) const {
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (radii[i] >= r * (1.0 - 1e-12)) return kappa[i];
  return kappa.empty() ? 0.0 : kappa.back();
}

std::vector<double> default_radius_grid(double rho0, int levels) {
  std::vector<double> g{0.0};
  for (int j = levels; j >= 0; --j) g.push_back(rho0 * std::ldexp(1.0, -j));
  return g;
}

namespace {

Eigen::VectorXd random_in_ball(std::mt19937_64& rng, int n, double r) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  v.normalize();
  return v * (r * std::pow(unif(rng), 1.0 / n));
}

double spectral_norm_sym(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

int dense_points_per_axis(int n) {
  switch (n) {
    case 1: return 201;
    case 2: return 41;
    case 3: return 15;
    case 4: return 9;
    default: return 5;
  }
}

// Tensor grid in the cube [-r, r]^n restricted to the ball B_r.
std::vector<Eigen::VectorXd> dense_ball_grid(int n, double r) {
  const int m = dense_points_per_axis(n);
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> idx(n, 0);
  while (true) {
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p[i] = -r + 2.0 * r * idx[i] / (m - 1);
    if (p.norm() <= r) pts.push_back(p);
    int a = n - 1;
    while (a >= 0 && ++idx[a] == m) idx[a--] = 0;
    if (a < 0) break;
  }
  return pts;
}

}  // namespace

KappaTable lipschitz_modulus(const GradientProblem& problem, const SpectralSplit& split,
                             std::vector<double> rho_grid, int samples, std::uint64_t seed) {
  std::sort(rho_grid.begin(), rho_grid.end());
  if (rho_grid.empty() || rho_grid.front() != 0.0) rho_grid.insert(rho_grid.begin(), 0.0);
  const int n = split.dimension;
  std::mt19937_64 rng(seed);

  KappaTable t;
  t.radii = rho_grid;
  for (double r : rho_grid) {
    if (r > problem.trust_radius * (1.0 + 1e-12))
      throw Error(ErrorKind::OutOfTrustRegion, "radius grid exceeds rho_0");
    if (r == 0.0) {
      t.raw.push_back(0.0);
      continue;
    }
    double sup = 0.0;
    for (const auto& p : dense_ball_grid(n, r)) sup = std::max(sup, spectral_norm_sym(nonlinearity_jacobian(problem, split, p)));
    for (int s = 0; s < samples; ++s) {
      const Eigen::VectorXd a = random_in_ball(rng, n, r);
      const Eigen::VectorXd b = random_in_ball(rng, n, r);
      sup = std::max(sup, spectral_norm_sym(nonlinearity_jacobian(problem, split, a)));
      const double dist = (a - b).norm();
      if (dist > 0) sup = std::max(sup, (nonlinearity(problem, split, a) - nonlinearity(problem, split, b)).norm() / dist);
    }
    t.raw.push_back(sup);
  }
  double running = 0.0;
  for (double v : t.raw) {
    running = std::max(running, v);
    t.kappa.push_back(t.safety * running);
  }

  if (problem.c21) {
    const double r0 = problem.trust_radius;
    double ks = 0.0;
    for (int s = 0; s < 4 * samples; ++s) {
      const Eigen::VectorXd a = random_in_ball(rng, n, r0);
      // Mix close and far pairs; close pairs see the local second derivative.
      const double scale = (s % 2 == 0) ? r0 : 1e-3 * r0;
      Eigen::VectorXd b = a + random_in_ball(rng, n, scale);
      if (b.norm() > r0) b *= r0 / b.norm();
      const double dist = (a - b).norm();
      if (dist == 0) continue;
      const Eigen::MatrixXd dd =
          nonlinearity_jacobian(problem, split, a) - nonlinearity_jacobian(problem, split, b);
      ks = std::max(ks, spectral_norm_sym(dd) / dist);
    }
    t.kappa_star = t.safety * ks;
    t.has_kappa_star = true;
  }
  return t;
}

double horizon_T2(double mu) {
  double T = 4.0 * std::log(8.0) / mu;
  while (std::exp(-T * mu / 4.0) > 0.125) T = std::nextafter(T, INFINITY);
  return T;
}

std::vector<std::string> RateLadder::violations() const {
  std::vector<std::string> v;
  auto need = [&](bool ok, const char* what) {
    if (!ok) v.emplace_back(what);
  };
  need(lambda > 0 && lambda < d, "0 < lambda < d");
  need(delta > 0 && delta < std::min(1.0, (d - lambda) / 2.0), "0 < delta < min(1, (d - lambda)/2)");
  need(mu > lambda && mu < (d + lambda) / 2.0, "lambda < mu < (d + lambda)/2");
  need(rho > 0 && rho < 1.0 && rho <= rho0 / 2.0 + 1e-15, "0 < rho <= rho_0/2 < 1");
  need(smallness() <= 0.125, "kappa(rho)(4/lambda + 1/delta + 1) <= 1/8");
  need(T2 > 0 && std::exp(-T2 * mu / 4.0) <= 0.125, "e^{-T2 mu/4} <= 1/8");
  need(std::abs(c1 - 2.0 * (std::abs(lambda1) + 1.0)) == 0.0, "c1 = 2(|lambda_1| + 1)");
  if (disks_resolved) {
    need(varkappa > 0 && varkappa <= 1.0, "0 < varkappa <= 1");
    need(epsilon > 0 && epsilon < varsigma, "0 < epsilon < varsigma");
    need(T0 >= 1.0 && T0 >= T1 && T0 >= T2, "T0 = max{T1, T2, 1}");
    need(std::abs(T1 * lambda + std::log(varkappa)) <= 1e-12 * std::max(1.0, T1 * lambda), "T1 lambda = -ln varkappa");
  }
  return v;
}

RateLadder build_ladder(const SpectralSplit& split, const KappaTable& kappa, const LadderChoices& choices,
                        double rho0) {
  const int k = split.morse_index;
  if (k == 0 || k == split.dimension)
    throw Error(ErrorKind::IndexOutOfRange, "Morse index " + std::to_string(k) + " admits no lambda-Lemma");

  RateLadder L;
  L.d = split.gap;
  L.lambda1 = split.lambda_min();
  L.lambda_n = split.lambda_max();
  L.rho0 = rho0;
  L.lambda = choices.lambda.value_or(0.5 * L.d);
  if (!(L.lambda > 0 && L.lambda < L.d)) throw Error(ErrorKind::LadderInfeasible, "lambda must lie in (0, d)");
  L.delta = 0.9 * std::min(1.0, 0.5 * (L.d - L.lambda));
  L.mu = L.lambda + L.delta;

  const double factor = 4.0 / L.lambda + 1.0 / L.delta + 1.0;
  auto admissible = [&](double r) { return kappa.at(2.0 * r) * factor <= 0.125 && kappa.at(r) * factor <= 0.125; };
  if (choices.rho) {
    L.rho = *choices.rho;
    if (!(L.rho > 0 && L.rho <= 0.5 * rho0) || !admissible(L.rho))
      throw Error(ErrorKind::LadderInfeasible, "rho override violates the smallness condition");
  } else {
    for (int j = 1; j <= 60 && L.rho == 0.0; ++j) {
      const double r = rho0 * std::ldexp(1.0, -j);
      if (admissible(r)) L.rho = r;
    }
    if (L.rho == 0.0) throw Error(ErrorKind::LadderInfeasible, "no sampled rho satisfies the smallness condition");
  }
  L.kappa_rho = kappa.at(L.rho);
  L.kappa_working = kappa.at(2.0 * L.rho);
  L.T2 = horizon_T2(L.mu);
  L.c1 = 2.0 * (std::abs(L.lambda1) + 1.0);
  L.has_kappa_star = kappa.has_kappa_star;
  L.kappa_star = kappa.kappa_star;
  L.c_star = 2.0 * L.kappa_star * (1.0 / L.delta + 1.0 / L.lambda) + 0.25;

  if (choices.varkappa) {
    L.varkappa = *choices.varkappa;
    L.T1 = -std::log(L.varkappa) / L.lambda;
    L.T0 = std::max({L.T1, L.T2, 1.0});
  }
  if (choices.varsigma) L.varsigma = *choices.varsigma;
  if (choices.epsilon) L.epsilon = *choices.epsilon;
  return L;
}

RateLadder with_disks(RateLadder L, double varsigma, double epsilon, double varkappa) {
  if (!(varkappa > 0 && varkappa <= 1.0)) throw Error(ErrorKind::LadderInfeasible, "varkappa must lie in (0, 1]");
  if (!(epsilon > 0 && epsilon < varsigma)) throw Error(ErrorKind::LadderInfeasible, "epsilon must lie in (0, varsigma)");
  L.varsigma = varsigma;
  L.epsilon = epsilon;
  L.varkappa = varkappa;
  L.T1 = -std::log(varkappa) / L.lambda;
  L.T0 = std::max({L.T1, L.T2, 1.0});
  L.disks_resolved = true;
  return L;
}

Eigen::VectorXd flatten(const GraphSample& graph_F, const GraphSample& graph_G, const SpectralSplit& split,
                        const Eigen::VectorXd& point) {
  const Eigen::VectorXd x = split.proj_minus * point;
  const Eigen::VectorXd y = split.proj_plus * point;
  return (x - graph_G.evaluate(y)) + (y - graph_F.evaluate(x));
}

double LocalModel::level(const Eigen::VectorXd& xi) const {
  return problem.value(problem.critical_point + xi) - problem.value(problem.critical_point);
}

}  // namespace perron
