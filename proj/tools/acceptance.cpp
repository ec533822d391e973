// Acceptance run: one PASS/FAIL line per criterion on the reference problems.
// Usage: perron_acceptance [configs-dir] [path-to-perron-cli]
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "perron/error.hpp"
#include "perron/foliation.hpp"
#include "perron/lambda_verify.hpp"
#include "perron/oracle.hpp"

namespace fs = std::filesystem;
using namespace perron;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

class Suite {
 public:
  explicit Suite(fs::path configs) : configs_(std::move(configs)) {}

  std::shared_ptr<const LocalModel> model(const std::string& name) {
    auto& slot = models_[name];
    if (!slot) {
      const ProblemConfig cfg = load_config((configs_ / (name + ".json")).string());
      pipeline_[name] = cfg.pipeline;
      ModelOptions mo;
      mo.sphere_points = cfg.pipeline.sphere_points;
      slot = std::make_shared<const LocalModel>(prepare_model(cfg, mo));
    }
    return slot;
  }

  const PipelineSettings& pipeline(const std::string& name) {
    model(name);
    return pipeline_[name];
  }

  SweepSpec sweep(const std::string& name) {
    const LocalModel& M = *model(name);
    const PipelineSettings& p = pipeline(name);
    SweepSpec s;
    s.T_grid = horizon_grid(M.ladder, std::max(p.horizons, 5), p.horizon_step);
    for (const auto& a : descending_disk(M, M.ladder.epsilon, p.sphere_points).boundary)
      s.z_minus.push_back(M.split.proj_minus * a);
    s.z_plus = zplus_samples(M, p.zplus_points);
    return s;
  }

  const FoliationAtlas& atlas(const std::string& name) {
    auto& slot = atlases_[name];
    if (!slot) {
      const PipelineSettings& p = pipeline(name);
      AtlasSpec spec;
      spec.leaf_points = p.leaf_points;
      spec.sphere_points = p.sphere_points;
      spec.pair.points_per_axis = p.pair_grid;
      slot = std::make_unique<FoliationAtlas>(build_atlas(model(name), spec));
    }
    return *slot;
  }

 private:
  fs::path configs_;
  std::map<std::string, std::shared_ptr<const LocalModel>> models_;
  std::map<std::string, PipelineSettings> pipeline_;
  std::map<std::string, std::unique_ptr<FoliationAtlas>> atlases_;
};

Outcome contraction(Suite& S) {
  const LocalModel& M = *S.model("P2");
  SweepSpec s = S.sweep("P2");
  s.z_minus.resize(1);
  s.z_plus = {s.z_plus.back()};
  const ConvergenceReport r = contraction_report(M, s, 50, 0.5, 0.05);
  bool above_T0 = true;
  for (double T : s.T_grid) above_T0 = above_T0 && T >= M.ladder.T0;
  double worst = 0;
  for (const auto& row : r.rows) worst = std::max(worst, row.gap);
  return {r.pass() && above_T0 && s.T_grid.size() >= 5,
          "P2 worst ratio " + sci(worst) + " <= 0.55 over " + std::to_string(s.T_grid.size()) + " horizons x 50 pairs"};
}

Outcome boundary(Suite& S) {
  double worst_defect = 0, worst_ratio = 0;
  bool ok = true;
  int instances = 0;
  for (const char* name : {"P1", "P2"}) {
    const LocalModel& M = *S.model(name);
    const SweepSpec s = S.sweep(name);
    for (double T : s.T_grid) {
      const GraphSample g = graph_G_T(M, T, s.z_minus.front(), 5);
      const ConvergenceReport r = endpoint_audit(M, g);
      ok = ok && r.pass();
      for (const auto& row : r.rows) {
        ++instances;
        worst_defect = std::max({worst_defect, row.extra.at(0), row.extra.at(1)});
        if (row.bound > 0) worst_ratio = std::max(worst_ratio, row.gap / row.bound);
        // Slack on the endpoint bound may not exceed the solver tolerance.
        ok = ok && row.slack <= SolverOptions{}.tol && row.gap <= row.bound + row.slack;
      }
    }
  }
  ok = ok && worst_defect <= 1e-12;
  return {ok, "P1+P2 " + std::to_string(instances) + " solves, boundary defect " + sci(worst_defect) +
                  " <= 1e-12, |xi(T)-z_-| / rho e^{-T lambda} <= " + sci(worst_ratio)};
}

Outcome c0(Suite& S) {
  bool ok = true;
  std::string detail;
  for (const char* name : {"P1", "P2"}) {
    const SweepSpec s = S.sweep(name);
    const ConvergenceReport r = c0_convergence(*S.model(name), s);
    ok = ok && r.pass() && s.T_grid.size() >= 5;
    detail += std::string(detail.empty() ? "" : "; ") + name + " rate " + sci(r.fitted_rate) + " >= " +
              sci(r.rate_floor) + ", worst gap/bound " + sci(r.worst_ratio());
  }
  return {ok, detail};
}

Outcome c1(Suite& S) {
  const LocalModel& M = *S.model("P2");
  SweepSpec s = S.sweep("P2");
  s.z_plus = zplus_samples(M, S.pipeline("P2").zplus_points, 0.5);
  std::vector<Eigen::VectorXd> dirs;
  const Eigen::MatrixXd B = M.split.basis(Subspace::Plus);
  for (Eigen::Index j = 0; j < B.cols(); ++j) dirs.push_back(B.col(j));
  const ConvergenceReport r = c1_convergence(M, s, dirs, 0.05 * M.ladder.R());
  return {r.pass(), "P2 worst gap/(c_* e^{-T lambda/8}) " + sci(r.worst_ratio()) + ", c_* = " + sci(M.ladder.c_star) +
                        ", " + std::to_string(r.rows.size()) + " samples"};
}

Outcome lipschitz(Suite& S) {
  bool ok = true;
  std::string detail;
  for (const char* name : {"P1", "P2"}) {
    const ConvergenceReport r = lipschitz_in_T(*S.model(name), S.sweep(name), {1e-2, 1e-3});
    ok = ok && r.pass();
    detail += std::string(detail.empty() ? "" : "; ") + name + " worst quotient/c1 " + sci(r.worst_ratio());
  }
  return {ok, detail};
}

Outcome oracle(Suite& S) {
  const LocalModel& M = *S.model("P2");
  const RateLadder& L = M.ladder;
  const SweepSpec s = S.sweep("P2");
  const std::vector<double> Ts = {s.T_grid.front(), s.T_grid[s.T_grid.size() / 2], s.T_grid.back()};
  const Eigen::VectorXd a = s.z_minus.front();
  const Eigen::VectorXd half = M.split.proj_minus * descending_disk(M, 0.5 * L.epsilon, 2).boundary.front();
  const std::vector<Eigen::VectorXd> zms = {a, -a, half};
  const Eigen::VectorXd e = M.split.basis(Subspace::Plus).col(0);
  const std::vector<Eigen::VectorXd> zps = {-0.8 * L.R() * e, 0.0 * e, 0.8 * L.R() * e};
  double worst = 0;
  for (double tol : {1e-8, 1e-10}) {
    SolverOptions lp;
    lp.tol = tol;
    for (double T : Ts)
      for (const auto& zm : zms) {
        const MixedSolver solver(M, T, zm, lp);
        for (const auto& zp : zps) {
          const Curve c = solver.solve(zp).curve;
          const ShootingResult o = mixed_bvp_oracle(M, T, zm, zp, tol, tol);
          for (int i = 0; i < c.grid.size(); ++i)
            worst = std::max(worst, (M.ambient(c.values.col(i)) - o.trajectory.evaluate(c.grid.node(i))).norm());
        }
      }
  }
  return {worst <= 1e-6, "P2 3x3x3 grid at tol 1e-8 and 1e-10, sup distance " + sci(worst) + " <= 1e-6"};
}

Outcome manifolds(Suite& S) {
  const LocalModel& Q = *S.model("P1");
  double flat = 0;
  for (const auto& v : graph_F_inf(Q, 9).values) flat = std::max(flat, v.norm());
  for (const auto& v : graph_G_inf(Q, 9).values) flat = std::max(flat, v.norm());

  const LocalModel& M = *S.model("P2");
  const RateLadder& L = M.ladder;
  FlowOptions fo;
  fo.tol = 1e-12;
  double worst = 0;
  for (const auto& zp : zplus_samples(M, 5)) {
    const Trajectory tr = integrate_forward(M.problem, M.ambient(stable_graph_point(M, zp)), 3 * L.T0, fo);
    for (int i = 0; i <= 60; ++i) {
      const double t = 3 * L.T0 * i / 60.0;
      worst = std::max(worst, (tr.evaluate(t) - M.problem.critical_point).norm() / (L.rho * std::exp(-t * L.lambda)));
    }
  }
  return {flat <= 1e-10 && worst <= 1.0,
          "P1 |F|,|G| " + sci(flat) + " <= 1e-10; P2 |phi_t xi0| / rho e^{-t lambda} <= " + sci(worst)};
}

Outcome foliation(Suite& S) {
  const FoliationAtlas& A = S.atlas("P2");
  const DisjointReport dj = check_disjoint(A, 100);
  const LeafAudit inv = leaf_invariance(A, {0.25, 0.5});
  const LeafAudit con = contraction_to_center(A);
  return {dj.pass() && dj.min_separation() > 0 && inv.pass() && con.pass(),
          "P2 " + std::to_string(dj.rows.size()) + " label pairs, min separation " + sci(dj.min_separation()) +
              "; invariance residual/bound " + sci(inv.worst()) + "; distance to center/e^{-T lambda/8} " +
              sci(con.worst())};
}

Outcome retract(Suite& S) {
  const RetractReport r = retract_audit(S.atlas("P2"));
  return {r.pass(), "P2 fix error " + sci(r.max_fix_error) + " <= 1e-10; theta_inf misses " +
                        std::to_string(r.pair_failures) + "/" + std::to_string(r.pair_samples) +
                        "; surrogate ratio " + sci(r.max_surrogate_ratio) + "; boundary quotients negative at " +
                        std::to_string(r.boundary_samples - r.boundary_failures) + "/" +
                        std::to_string(r.boundary_samples) + ", mu_audit " + sci(r.mu_audit)};
}

Outcome ladder(const fs::path& configs, const std::string& cli) {
  bool ok = true;
  std::string detail;
  for (const char* name : {"P1", "P2", "P3"}) {
    const fs::path out = fs::temp_directory_path() / ("perron_acceptance_" + std::string(name));
    const std::string cmd = cli + " ladder --config " + (configs / (std::string(name) + ".json")).string() +
                            " --out " + out.string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, std::string(name) + ": CLI failed"};
    std::ifstream in(out / "ladder.json");
    const nlohmann::json j = nlohmann::json::parse(in);
    auto g = [&](const char* k) { return j.at(k).get<double>(); };
    const bool exact = g("T1") == -std::log(g("varkappa")) / g("lambda") &&
                       g("T0") == std::max({g("T1"), g("T2"), 1.0}) &&
                       g("c1") == 2.0 * (std::abs(g("lambda1")) + 1.0) &&
                       g("c_star") == 2.0 * g("kappa_star") * (1.0 / g("delta") + 1.0 / g("lambda")) + 0.25;
    ok = ok && exact;
    detail += std::string(detail.empty() ? "" : "; ") + name + (exact ? " exact" : " MISMATCH") + " (T0 " +
              sci(g("T0")) + ")";
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path configs = argc > 1 ? argv[1] : "configs";
  const std::string cli = argc > 2 ? argv[2] : "perron";
  Suite S(configs);

  struct Criterion {
    const char* name;
    double limit;  // seconds, 0 = none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"contraction factor", 60, [&] { return contraction(S); }},
      {"boundary exactness", 0, [&] { return boundary(S); }},
      {"C0 lambda-Lemma rate", 300, [&] { return c0(S); }},
      {"C1 lambda-Lemma rate", 0, [&] { return c1(S); }},
      {"Lipschitz in T", 0, [&] { return lipschitz(S); }},
      {"oracle equivalence", 0, [&] { return oracle(S); }},
      {"manifold graphs", 0, [&] { return manifolds(S); }},
      {"foliation audits", 0, [&] { return foliation(S); }},
      {"dynamical thickening", 0, [&] { return retract(S); }},
      {"ladder arithmetic", 0, [&] { return ladder(configs, cli); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const Error& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0 && secs > c.limit) {
      o.pass = false;
      o.detail += " (over the " + std::to_string(int(c.limit)) + " s budget)";
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %-22s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
