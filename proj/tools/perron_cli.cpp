// Batch front end: runs the pipeline stages on a problem config and writes
// CSV/JSON reports plus a run manifest.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "perron/error.hpp"
#include "perron/flow.hpp"
#include "perron/foliation.hpp"
#include "perron/io.hpp"
#include "perron/lambda_verify.hpp"
#include "perron/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace perron;

namespace {

enum Exit { kPass = 0, kAssertion = 2, kConfig = 3, kSolver = 4 };

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::NotSymmetric:
    case ErrorKind::DegenerateCriticalPoint:
    case ErrorKind::IndexOutOfRange:
    case ErrorKind::OutOfTrustRegion:
    case ErrorKind::LadderInfeasible:
      return kConfig;
    case ErrorKind::NoConvergence:
    case ErrorKind::NewtonDiverged:
    case ErrorKind::BracketLost:
    case ErrorKind::NormBudgetExceeded:
    case ErrorKind::BlowUp:
      return kSolver;
    default:
      return kAssertion;
  }
}

std::string fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return rows;
}

json ladder_json(const RateLadder& L) {
  return {{"d", L.d},           {"lambda1", L.lambda1},   {"lambda_n", L.lambda_n},
          {"lambda", L.lambda}, {"delta", L.delta},       {"mu", L.mu},
          {"rho0", L.rho0},     {"rho", L.rho},           {"R", L.R()},
          {"kappa_rho", L.kappa_rho}, {"kappa_working", L.kappa_working},
          {"kappa_star", L.kappa_star}, {"has_kappa_star", L.has_kappa_star},
          {"varkappa", L.varkappa}, {"epsilon", L.epsilon}, {"varsigma", L.varsigma},
          {"T1", L.T1},         {"T2", L.T2},             {"T0", L.T0},
          {"c1", L.c1},         {"c_star", L.c_star},     {"smallness", L.smallness()},
          {"contraction_bound", L.contraction_bound()}};
}

// Exact arithmetic identities of the ladder, recomputed from the echoed values.
json ladder_identities(const RateLadder& L) {
  const double T1 = -std::log(L.varkappa) / L.lambda;
  return {{"T1 = -ln(varkappa)/lambda", T1 == L.T1},
          {"T0 = max(T1, T2, 1)", L.T0 == std::max({L.T1, L.T2, 1.0})},
          {"c1 = 2(|lambda1| + 1)", L.c1 == 2.0 * (std::abs(L.lambda1) + 1.0)},
          {"c_star = 2 kappa_star (1/delta + 1/lambda) + 1/4",
           L.c_star == 2.0 * L.kappa_star * (1.0 / L.delta + 1.0 / L.lambda) + 0.25},
          {"e^{-T2 mu/4} <= 1/8", std::exp(-L.T2 * L.mu / 4.0) <= 0.125}};
}

bool all_true(const json& j) {
  for (const auto& [k, v] : j.items())
    if (!v.get<bool>()) return false;
  return true;
}

class Run {
 public:
  Run(ProblemConfig cfg, fs::path out, std::uint64_t seed, double tol, int threads)
      : cfg_(std::move(cfg)), out_(std::move(out)), seed_(seed), threads_(threads) {
    opts_.tol = tol;
    fs::create_directories(out_);
  }

  int stage(const std::string& name) {
    const auto t0 = std::chrono::steady_clock::now();
    int code = kPass;
    std::string status = "pass";
    try {
      const bool ok = dispatch(name);
      if (!ok) {
        code = kAssertion;
        status = "fail";
      }
    } catch (const Error& e) {
      code = exit_code_for(e.kind());
      status = "error";
      json rec = {{"stage", name}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()},
                  {"exit_code", code}};
      errors_.push_back(rec);
      std::cerr << rec.dump() << '\n';
    }
    if (status == "pass" && skipped_.count(name)) status = "skipped";
    statuses_[name] = status;
    wall_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return code;
  }

  void write_manifest() {
    json m;
    m["config_hash"] = fnv1a64(cfg_.source_text);
    m["problem"] = cfg_.problem.name;
    m["seed"] = seed_;
    m["tol"] = opts_.tol;
    if (model_) m["ladder_echo"] = ladder_json(model_->ladder);
    m["stage_statuses"] = statuses_;
    m["wall_times"] = wall_;
    m["errors"] = errors_;
    std::vector<std::string> paths = artifacts_;
    paths.push_back("manifest.json");
    m["artifact_paths"] = paths;
    std::ofstream(out_ / "manifest.json") << m.dump(2) << '\n';
  }

 private:
  ProblemConfig cfg_;
  fs::path out_;
  std::uint64_t seed_;
  int threads_;
  SolverOptions opts_;
  std::shared_ptr<LocalModel> model_;
  std::map<std::string, std::string> statuses_;
  std::map<std::string, double> wall_;
  std::map<std::string, bool> skipped_;
  json errors_ = json::array();
  std::vector<std::string> artifacts_;

  std::ofstream open(const std::string& rel) {
    const fs::path p = out_ / rel;
    fs::create_directories(p.parent_path());
    artifacts_.push_back(rel);
    return std::ofstream(p);
  }

  void write_json(const std::string& rel, const json& j) { open(rel) << j.dump(2) << '\n'; }

  template <class F>
  void write_csv(const std::string& rel, F&& body) {
    std::ofstream os = open(rel);
    body(os);
  }

  const LocalModel& model() {
    if (!model_) {
      ModelOptions mo;
      mo.seed = seed_;
      mo.sphere_points = cfg_.pipeline.sphere_points;
      model_ = std::make_shared<LocalModel>(prepare_model(cfg_, mo, opts_));
    }
    return *model_;
  }

  SweepSpec sweep() {
    const LocalModel& M = model();
    SweepSpec s;
    s.T_grid = horizon_grid(M.ladder, cfg_.pipeline.horizons, cfg_.pipeline.horizon_step);
    for (const auto& a : descending_disk(M, M.ladder.epsilon, cfg_.pipeline.sphere_points, opts_).boundary)
      s.z_minus.push_back(M.split.proj_minus * a);
    s.z_plus = zplus_samples(M, cfg_.pipeline.zplus_points);
    return s;
  }

  bool dispatch(const std::string& name) {
    if (name == "spectral") return spectral();
    if (name == "ladder") return ladder();
    if (name == "manifolds") return manifolds();
    if (name == "lambda") return lambda();
    if (name == "foliate") return foliate();
    if (name == "oracle") return oracle();
    throw Error(ErrorKind::InvalidConfig, "unknown stage " + name);
  }

  bool spectral() {
    const SpectralSplit s = split(cfg_.problem.hessian_at(cfg_.problem.critical_point));
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(s.dimension, s.dimension);
    const double defect = std::max({(s.proj_minus + s.proj_plus - I).norm(), (s.proj_minus * s.proj_plus).norm(),
                                    (s.hessian * s.proj_minus - s.proj_minus * s.hessian).norm()});
    write_json("spectral.json", {{"dimension", s.dimension},
                                 {"eigenvalues", to_json(s.eigenvalues)},
                                 {"eigenvectors", to_json(s.eigenvectors)},
                                 {"morse_index", s.morse_index},
                                 {"gap", s.gap},
                                 {"proj_minus", to_json(s.proj_minus)},
                                 {"proj_plus", to_json(s.proj_plus)},
                                 {"projection_defect", defect}});
    return defect <= 1e-10;
  }

  bool ladder() {
    const RateLadder& L = model().ladder;
    const json ids = ladder_identities(L);
    json j = ladder_json(L);
    j["identities"] = ids;
    j["violations"] = L.violations();
    json kt = json::array();
    for (std::size_t i = 0; i < model().kappa.radii.size(); ++i)
      kt.push_back({{"radius", model().kappa.radii[i]}, {"kappa", model().kappa.kappa[i]}, {"raw", model().kappa.raw[i]}});
    j["kappa_table"] = kt;
    write_json("ladder.json", j);
    return all_true(ids) && L.violations().empty();
  }

  bool manifolds() {
    const LocalModel& M = model();
    const auto& L = M.ladder;
    const int ppa = 2 * cfg_.pipeline.zplus_points + 1;
    const GraphSample F = graph_F_inf(M, ppa, opts_, threads_);
    const GraphSample G = graph_G_inf(M, ppa, opts_, threads_);
    write_csv("graph_F_inf.csv", [&](std::ostream& os) { write_graph_csv(os, F); });
    write_csv("graph_G_inf.csv", [&](std::ostream& os) { write_graph_csv(os, G); });

    const Disk down = descending_disk(M, L.epsilon, cfg_.pipeline.sphere_points, opts_);
    const Disk up = ascending_disk(M, L.epsilon, cfg_.pipeline.sphere_points, opts_);
    auto sphere_csv = [&](const Disk& d) {
      return [&d, &M](std::ostream& os) {
        os << coordinate_header("x", M.dimension()) << ",f,radius\n";
        for (std::size_t i = 0; i < d.boundary.size(); ++i) {
          const Eigen::VectorXd p = M.ambient(d.boundary[i]);
          os << format_vector(p) << ',' << format_double(M.problem.value(p)) << ',' << format_double(d.radii[i]) << '\n';
        }
      };
    };
    write_csv("descending_sphere.csv", sphere_csv(down));
    write_csv("ascending_sphere.csv", sphere_csv(up));

    // Origin values and tangency at the critical point.
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(M.dimension());
    const double at_origin = std::max((M.split.proj_plus * unstable_graph_point(M, zero, opts_)).norm(),
                                      (M.split.proj_minus * stable_graph_point(M, zero, opts_)).norm());
    double tangency = 0.0;
    const double step = 0.1 * L.R();
    for (int j = 0; j < M.dimension(); ++j) {
      const Eigen::VectorXd v = M.split.eigenvectors.col(j);
      const bool minus = j < M.morse_index();
      auto g = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
        return minus ? Eigen::VectorXd(M.split.proj_plus * unstable_graph_point(M, z, opts_))
                     : Eigen::VectorXd(M.split.proj_minus * stable_graph_point(M, z, opts_));
      };
      tangency = std::max(tangency, graph_derivative(g, zero, v, step, L.R()).value.norm());
    }

    // Decay along forward-integrated stable graph points.
    bool decay_ok = true;
    write_csv("stable_decay.csv", [&](std::ostream& os) {
      os << coordinate_header("zp", M.dimension()) << ",t,norm,bound,pass\n";
      FlowOptions fo;
      fo.tol = 1e-12;
      for (const auto& zp : zplus_samples(M, cfg_.pipeline.zplus_points)) {
        const Eigen::VectorXd xi0 = stable_graph_point(M, zp, opts_);
        const Trajectory tr = integrate_forward(M.problem, M.ambient(xi0), 3 * L.T0, fo);
        for (int i = 0; i <= 30; ++i) {
          const double t = 3 * L.T0 * i / 30.0;
          const double nrm = (tr.evaluate(t) - M.problem.critical_point).norm();
          const double bound = L.rho * std::exp(-t * L.lambda);
          const bool pass = nrm <= bound * (1 + 1e-9) + 1e-12;
          decay_ok = decay_ok && pass;
          os << format_vector(zp) << ',' << format_double(t) << ',' << format_double(nrm) << ','
             << format_double(bound) << ',' << (pass ? 1 : 0) << '\n';
        }
      }
    });
    {
      FlowOptions fo;
      fo.tol = 1e-12;
      const Eigen::VectorXd start = stable_graph_point(M, zplus_samples(M, 3).back(), opts_);
      write_csv("trajectory_stable.csv",
                [&](std::ostream& os) { write_trajectory_csv(os, integrate_forward(M.problem, M.ambient(start), 3 * L.T0, fo)); });
    }
    write_json("manifolds.json", {{"origin_value", at_origin},
                                  {"tangency", tangency},
                                  {"F_max", max_value(F)},
                                  {"G_max", max_value(G)},
                                  {"F_residual", F.max_residual()},
                                  {"G_residual", G.max_residual()},
                                  {"decay_pass", decay_ok}});
    return at_origin <= 1e-12 && tangency <= 1e-6 && decay_ok;
  }

  static double max_value(const GraphSample& g) {
    double m = 0;
    for (const auto& v : g.values) m = std::max(m, v.norm());
    return m;
  }

  bool report(const std::string& file, const ConvergenceReport& r) {
    write_csv(file, [&](std::ostream& os) { write_report_csv(os, r); });
    return r.pass();
  }

  bool lambda() {
    const LocalModel& M = model();
    const SweepSpec s = sweep();
    bool ok = true;
    json summary;

    const GraphSample g = graph_G_T(M, s.T_grid.front(), s.z_minus.front(), 2 * cfg_.pipeline.zplus_points + 1, opts_,
                                    threads_);
    write_csv("graph_G_T.csv", [&](std::ostream& os) { write_graph_csv(os, g); });

    const ConvergenceReport c0 = c0_convergence(M, s, opts_, threads_);
    ok &= report("c0.csv", c0);
    summary["c0"] = {{"pass", c0.pass()}, {"fitted_rate", c0.fitted_rate}, {"rate_floor", c0.rate_floor},
                     {"worst_ratio", c0.worst_ratio()}};

    if (M.problem.c21) {
      std::vector<Eigen::VectorXd> dirs;
      const Eigen::MatrixXd B = M.split.basis(Subspace::Plus);
      for (Eigen::Index j = 0; j < B.cols(); ++j) dirs.push_back(B.col(j));
      SweepSpec s1 = s;
      s1.z_plus = zplus_samples(M, cfg_.pipeline.zplus_points, 0.5);
      const ConvergenceReport c1 = c1_convergence(M, s1, dirs, 0.05 * M.ladder.R(), opts_, threads_);
      ok &= report("c1.csv", c1);
      summary["c1"] = {{"pass", c1.pass()}, {"worst_ratio", c1.worst_ratio()}};
    } else {
      summary["c1"] = {{"skipped", "objective not declared C^{2,1}"}};
    }

    const ConvergenceReport lip = lipschitz_in_T(M, s, {1e-2, 1e-3}, opts_, threads_);
    ok &= report("lipschitz_T.csv", lip);
    summary["lipschitz_T"] = {{"pass", lip.pass()}, {"worst_ratio", lip.worst_ratio()}};

    const ConvergenceReport ep = endpoint_audit(M, g, opts_);
    ok &= report("endpoint.csv", ep);
    summary["endpoint"] = {{"pass", ep.pass()}, {"worst_ratio", ep.worst_ratio()}};

    SweepSpec sc = s;
    sc.z_minus.resize(1);
    sc.z_plus = {s.z_plus.back()};
    const ConvergenceReport con = contraction_report(M, sc, 50, 0.5, 0.05, seed_, opts_);
    ok &= report("contraction.csv", con);
    summary["contraction"] = {{"pass", con.pass()}, {"worst_factor", con.worst_ratio() * 0.5}};

    write_json("lambda.json", summary);
    return ok;
  }

  bool foliate() {
    const LocalModel& M = model();
    AtlasSpec spec;
    spec.tau = cfg_.pipeline.tau.value_or(0.0);
    spec.leaf_points = cfg_.pipeline.leaf_points;
    spec.sphere_points = cfg_.pipeline.sphere_points;
    spec.pair.points_per_axis = cfg_.pipeline.pair_grid;
    spec.threads = threads_;
    const FoliationAtlas A = build_atlas(model_, spec, opts_);

    write_csv("pair.csv", [&](std::ostream& os) { write_pair_csv(os, M, A.pair); });
    json labels = json::array();
    for (std::size_t i = 0; i < A.leaves.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "leaves/leaf_%03zu.csv", i);
      write_csv(name, [&](std::ostream& os) { write_leaf_csv(os, A, static_cast<int>(i)); });
      const auto& lb = A.leaves[i].label;
      labels.push_back({{"index", i},
                        {"file", name},
                        {"center", lb.center},
                        {"T", lb.T},
                        {"alpha", lb.center ? json(nullptr) : to_json(lb.alpha)},
                        {"base", to_json(A.leaves[i].base)},
                        {"samples", A.leaves[i].samples.size()},
                        {"in_annulus", std::find(A.annulus.begin(), A.annulus.end(), static_cast<int>(i)) != A.annulus.end()}});
    }
    write_json("leaves.json", {{"epsilon", A.epsilon}, {"tau", A.tau}, {"leaves", labels}});

    const DisjointReport dj = check_disjoint(A, cfg_.pipeline.disjoint_pairs, seed_);
    write_csv("disjoint.csv", [&](std::ostream& os) {
      os << "leaf_a,leaf_b,separation,floor,pass\n";
      for (const auto& r : dj.rows)
        os << r.a << ',' << r.b << ',' << format_double(r.separation) << ',' << format_double(r.floor) << ','
           << (r.pass ? 1 : 0) << '\n';
    });
    auto audit_csv = [&](const std::string& file, const LeafAudit& a) {
      write_csv(file, [&](std::ostream& os) {
        os << "leaf,sigma,value,bound,pass\n";
        for (const auto& r : a.rows)
          os << r.leaf << ',' << format_double(r.sigma) << ',' << format_double(r.value) << ','
             << format_double(r.bound) << ',' << (r.pass ? 1 : 0) << '\n';
      });
    };
    const LeafAudit inv = leaf_invariance(A, {0.25, 0.5});
    audit_csv("invariance.csv", inv);
    const LeafAudit con = contraction_to_center(A);
    audit_csv("contraction_center.csv", con);
    const RetractReport rr = retract_audit(A);
    write_json("retract.json", {{"pair_samples", rr.pair_samples},
                                {"pair_failures", rr.pair_failures},
                                {"max_fix_error", rr.max_fix_error},
                                {"surrogate_time", rr.surrogate_time},
                                {"max_surrogate_ratio", rr.max_surrogate_ratio},
                                {"max_cocycle_error", rr.max_cocycle_error},
                                {"boundary_samples", rr.boundary_samples},
                                {"boundary_failures", rr.boundary_failures},
                                {"mu_audit", rr.mu_audit},
                                {"check_i", rr.check_i()},
                                {"check_ii", rr.check_ii()},
                                {"check_iii", rr.check_iii()},
                                {"pass", rr.pass()}});
    write_json("foliation.json", {{"pair_N", A.pair.N.size()},
                                  {"pair_L", A.pair.exit_count()},
                                  {"disjoint_pass", dj.pass()},
                                  {"min_separation", dj.min_separation()},
                                  {"invariance_pass", inv.pass()},
                                  {"invariance_worst", inv.worst()},
                                  {"contraction_pass", con.pass()},
                                  {"contraction_worst", con.worst()},
                                  {"retract_pass", rr.pass()}});
    return dj.pass() && inv.pass() && con.pass() && rr.pass();
  }

  bool oracle() {
    const LocalModel& M = model();
    const auto& L = M.ladder;
    const SweepSpec s = sweep();
    // Three horizons, three fiber points and three z_+ values.
    std::vector<double> Ts = {s.T_grid.front(), s.T_grid[s.T_grid.size() / 2], s.T_grid.back()};
    std::vector<Eigen::VectorXd> zms;
    if (M.morse_index() == 1) {
      const Eigen::VectorXd a = s.z_minus.front();
      const Eigen::VectorXd half = M.split.proj_minus * descending_disk(M, 0.5 * L.epsilon, 2, opts_).boundary.front();
      zms = {a, -a, half};
    } else {
      for (std::size_t i = 0; i < std::min<std::size_t>(3, s.z_minus.size()); ++i) zms.push_back(s.z_minus[i]);
    }
    const Eigen::VectorXd e = M.split.basis(Subspace::Plus).col(0);
    const std::vector<Eigen::VectorXd> zps = {-0.8 * L.R() * e, Eigen::VectorXd::Zero(M.dimension()), 0.8 * L.R() * e};
    SolverOptions lp = opts_;
    lp.tol = std::min(opts_.tol, 1e-10);
    bool ok = true;
    write_csv("oracle_bvp.csv", [&](std::ostream& os) {
      os << "T," << coordinate_header("zm", M.dimension()) << ',' << coordinate_header("zp", M.dimension())
         << ",sup_distance,bound,pass\n";
      for (double T : Ts)
        for (const auto& zm : zms) {
          const MixedSolver solver(M, T, zm, lp);
          for (const auto& zp : zps) {
            const Curve c = solver.solve(zp).curve;
            const ShootingResult o = mixed_bvp_oracle(M, T, zm, zp, 1e-10, 1e-10);
            double sup = 0;
            for (int i = 0; i < c.grid.size(); ++i)
              sup = std::max(sup, (M.ambient(c.values.col(i)) - o.trajectory.evaluate(c.grid.node(i))).norm());
            const bool pass = sup <= 1e-6;
            ok &= pass;
            os << format_double(T) << ',' << format_vector(zm) << ',' << format_vector(zp) << ','
               << format_double(sup) << ',' << format_double(1e-6) << ',' << (pass ? 1 : 0) << '\n';
          }
        }
    });
    write_csv("oracle_stable.csv", [&](std::ostream& os) {
      os << coordinate_header("zp", M.dimension()) << ",distance,bracket,bound,pass\n";
      for (const auto& zp : zplus_samples(M, cfg_.pipeline.zplus_points)) {
        const ShootingResult o = stable_point_oracle(M, zp, 40.0 / L.lambda, 1e-8, 1e-12);
        const double d = (o.solution - stable_graph_point(M, zp, opts_)).norm();
        const bool pass = d <= 1e-6;
        ok &= pass;
        os << format_vector(zp) << ',' << format_double(d) << ',' << format_double(o.bracket_width) << ','
           << format_double(1e-6) << ',' << (pass ? 1 : 0) << '\n';
      }
    });
    return ok;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local invariant manifolds, backward lambda-Lemma and stable foliations near a saddle"};
  std::string stage_pos, stage_flag, config, out = "out";
  std::uint64_t seed = 7;
  double tol = 1e-13;
  int threads = 1;
  app.add_option("command", stage_pos, "spectral | ladder | manifolds | lambda | foliate | oracle | all");
  app.add_option("--stage", stage_flag, "stage to run (alternative to the positional argument)");
  app.add_option("--config", config, "problem config (JSON)")->required();
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "seed for sampling");
  app.add_option("--tol", tol, "fixed-point tolerance");
  app.add_option("--threads", threads, "worker threads");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }
  std::string stage = stage_flag.empty() ? stage_pos : stage_flag;
  if (stage.empty()) stage = "all";
  static const std::vector<std::string> order = {"spectral", "ladder", "manifolds", "lambda", "foliate", "oracle"};
  std::vector<std::string> stages;
  if (stage == "all") {
    stages = order;
  } else if (std::find(order.begin(), order.end(), stage) != order.end()) {
    stages = {stage};
  } else {
    std::cerr << json{{"kind", "InvalidConfig"}, {"message", "unknown stage " + stage}}.dump() << '\n';
    return kConfig;
  }

  ProblemConfig cfg;
  try {
    cfg = load_config(config);
  } catch (const Error& e) {
    std::cerr << json{{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}}.dump() << '\n';
    return kConfig;
  }

  Run run(std::move(cfg), out, seed, tol, threads);
  int worst = kPass;
  for (const auto& s : stages) {
    const int rc = run.stage(s);
    std::cout << s << ": " << (rc == kPass ? "pass" : "exit " + std::to_string(rc)) << '\n';
    // Configuration and solver failures outrank assertion failures.
    if (rc == kConfig || (rc == kSolver && worst != kConfig) || (rc == kAssertion && worst == kPass)) worst = rc;
    if (rc == kConfig) break;
  }
  run.write_manifest();
  return worst;
}
