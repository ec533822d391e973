#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <memory>

#include "perron/error.hpp"
#include "perron/foliation.hpp"
#include "perron/lambda_verify.hpp"
#include "perron/oracle.hpp"

namespace py = pybind11;
using namespace perron;

namespace {

// Graph samples go to Python as (domain points, values) arrays, one row per node.
py::dict graph_to_dict(const GraphSample& g) {
  const int n = g.values.empty() ? 0 : static_cast<int>(g.values.front().size());
  Eigen::MatrixXd points(g.grid.size(), n), values(g.grid.size(), n);
  for (int i = 0; i < g.grid.size(); ++i) {
    points.row(i) = g.grid.point(i).transpose();
    values.row(i) = g.values[i].transpose();
  }
  py::dict d;
  d["kind"] = std::string(to_string(g.kind));
  d["T"] = g.T;
  d["points"] = points;
  d["values"] = values;
  d["residuals"] = g.residuals;
  d["iterations"] = g.iterations;
  return d;
}

py::dict report_to_dict(const ConvergenceReport& r) {
  py::list rows;
  for (const auto& row : r.rows) {
    py::dict d;
    d["T"] = row.T;
    d["z_minus"] = row.z_minus;
    d["z_plus"] = row.z_plus;
    d["v"] = row.v;
    d["gap"] = row.gap;
    d["bound"] = row.bound;
    d["slack"] = row.slack;
    d["pass"] = row.pass;
    d["extra"] = row.extra;
    rows.append(d);
  }
  py::dict d;
  d["kind"] = r.kind;
  d["extra_columns"] = r.extra_columns;
  d["rows"] = rows;
  d["pass"] = r.pass();
  d["worst_ratio"] = r.worst_ratio();
  if (r.has_rate) {
    d["fitted_rate"] = r.fitted_rate;
    d["rate_floor"] = r.rate_floor;
  }
  return d;
}

SweepSpec default_sweep(const LocalModel& m, int horizons, double step, int zplus_points) {
  SweepSpec s;
  s.T_grid = horizon_grid(m.ladder, horizons, step);
  for (const auto& a : descending_disk(m, m.ladder.epsilon, 8).boundary) s.z_minus.push_back(m.split.proj_minus * a);
  s.z_plus = zplus_samples(m, zplus_points);
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Local invariant manifolds, backward lambda-Lemma and stable foliations near a saddle";

  static py::exception<Error> perron_error(m, "PerronError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = perron_error;
      py::object inst = exc(e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(perron_error.ptr(), inst.ptr());
    }
  });

  py::class_<SpectralSplit>(m, "SpectralSplit")
      .def_readonly("dimension", &SpectralSplit::dimension)
      .def_readonly("eigenvalues", &SpectralSplit::eigenvalues)
      .def_readonly("eigenvectors", &SpectralSplit::eigenvectors)
      .def_readonly("morse_index", &SpectralSplit::morse_index)
      .def_readonly("gap", &SpectralSplit::gap)
      .def_readonly("proj_minus", &SpectralSplit::proj_minus)
      .def_readonly("proj_plus", &SpectralSplit::proj_plus);
  m.def("split", &split, py::arg("hessian"), py::arg("tol") = -1.0);
  m.def("flow_exponential", &flow_exponential, py::arg("split"), py::arg("t"));

  py::class_<RateLadder>(m, "RateLadder")
      .def_readonly("d", &RateLadder::d)
      .def_readonly("lambda1", &RateLadder::lambda1)
      .def_readonly("lambda_n", &RateLadder::lambda_n)
      .def_readonly("lam", &RateLadder::lambda)
      .def_readonly("delta", &RateLadder::delta)
      .def_readonly("mu", &RateLadder::mu)
      .def_readonly("rho0", &RateLadder::rho0)
      .def_readonly("rho", &RateLadder::rho)
      .def_readonly("kappa_rho", &RateLadder::kappa_rho)
      .def_readonly("kappa_star", &RateLadder::kappa_star)
      .def_readonly("varkappa", &RateLadder::varkappa)
      .def_readonly("epsilon", &RateLadder::epsilon)
      .def_readonly("varsigma", &RateLadder::varsigma)
      .def_readonly("T1", &RateLadder::T1)
      .def_readonly("T2", &RateLadder::T2)
      .def_readonly("T0", &RateLadder::T0)
      .def_readonly("c1", &RateLadder::c1)
      .def_readonly("c_star", &RateLadder::c_star)
      .def_property_readonly("R", &RateLadder::R)
      .def("violations", &RateLadder::violations);
  m.def("horizon_T2", &horizon_T2, py::arg("mu"));

  py::class_<LocalModel, std::shared_ptr<LocalModel>>(m, "LocalModel")
      .def_readonly("split", &LocalModel::split)
      .def_readonly("ladder", &LocalModel::ladder)
      .def_property_readonly("dimension", &LocalModel::dimension)
      .def_property_readonly("morse_index", &LocalModel::morse_index)
      .def("h", &LocalModel::h, py::arg("xi"))
      .def("level", &LocalModel::level, py::arg("xi"));

  m.def(
      "load_model",
      [](const std::string& path, std::uint64_t seed) {
        const ProblemConfig cfg = load_config(path);
        ModelOptions mo;
        mo.seed = seed;
        mo.sphere_points = cfg.pipeline.sphere_points;
        return std::make_shared<LocalModel>(prepare_model(cfg, mo));
      },
      py::arg("path"), py::arg("seed") = 7, "Read a JSON problem config and prepare its local model.");
  m.def(
      "model_from_json",
      [](const std::string& text, std::uint64_t seed) {
        ModelOptions mo;
        mo.seed = seed;
        return std::make_shared<LocalModel>(prepare_model(parse_config(text), mo));
      },
      py::arg("text"), py::arg("seed") = 7);

  m.def("unstable_graph_point",
        [](const LocalModel& model, const Eigen::VectorXd& z) { return unstable_graph_point(model, z); });
  m.def("stable_graph_point",
        [](const LocalModel& model, const Eigen::VectorXd& z) { return stable_graph_point(model, z); });
  m.def(
      "graph_point_T",
      [](const LocalModel& model, double T, const Eigen::VectorXd& zm, const Eigen::VectorXd& zp) {
        return MixedSolver(model, T, zm).graph_point(zp);
      },
      py::arg("model"), py::arg("T"), py::arg("z_minus"), py::arg("z_plus"));
  m.def(
      "graph_F_inf", [](const LocalModel& model, int ppa) { return graph_to_dict(graph_F_inf(model, ppa)); },
      py::arg("model"), py::arg("points_per_axis") = 9);
  m.def(
      "graph_G_inf", [](const LocalModel& model, int ppa) { return graph_to_dict(graph_G_inf(model, ppa)); },
      py::arg("model"), py::arg("points_per_axis") = 9);
  m.def(
      "graph_G_T",
      [](const LocalModel& model, double T, const Eigen::VectorXd& zm, int ppa) {
        return graph_to_dict(graph_G_T(model, T, zm, ppa));
      },
      py::arg("model"), py::arg("T"), py::arg("z_minus"), py::arg("points_per_axis") = 9);
  m.def(
      "descending_sphere",
      [](const LocalModel& model, double eps, int count) { return descending_disk(model, eps, count).boundary; },
      py::arg("model"), py::arg("epsilon"), py::arg("sphere_points") = 8);

  m.def(
      "integrate_forward",
      [](const LocalModel& model, const Eigen::VectorXd& start, double T, double tol) {
        FlowOptions fo;
        fo.tol = tol;
        const Trajectory tr = integrate_forward(model.problem, start, T, fo);
        Eigen::MatrixXd states(tr.states.size(), model.dimension());
        for (std::size_t i = 0; i < tr.states.size(); ++i) states.row(i) = tr.states[i].transpose();
        return py::make_tuple(tr.times, states);
      },
      py::arg("model"), py::arg("start"), py::arg("T"), py::arg("tol") = 1e-10,
      "Forward gradient flow from an ambient point; returns (times, states).");

  m.def(
      "stable_point_oracle",
      [](const LocalModel& model, const Eigen::VectorXd& zp, double horizon, double tol) {
        return stable_point_oracle(model, zp, horizon, tol).solution;
      },
      py::arg("model"), py::arg("z_plus"), py::arg("horizon"), py::arg("tol") = 1e-10);
  m.def(
      "mixed_bvp_oracle",
      [](const LocalModel& model, double T, const Eigen::VectorXd& zm, const Eigen::VectorXd& zp, double tol) {
        return mixed_bvp_oracle(model, T, zm, zp, tol, tol).solution;
      },
      py::arg("model"), py::arg("T"), py::arg("z_minus"), py::arg("z_plus"), py::arg("tol") = 1e-10);

  m.def(
      "c0_convergence",
      [](const LocalModel& model, int horizons, double step, int zplus_points) {
        return report_to_dict(c0_convergence(model, default_sweep(model, horizons, step, zplus_points)));
      },
      py::arg("model"), py::arg("horizons") = 5, py::arg("step") = 1.0, py::arg("zplus_points") = 3);
  m.def(
      "lipschitz_in_T",
      [](const LocalModel& model, std::vector<double> taus, int horizons) {
        return report_to_dict(lipschitz_in_T(model, default_sweep(model, horizons, 1.0, 3), taus));
      },
      py::arg("model"), py::arg("taus") = std::vector<double>{1e-2, 1e-3}, py::arg("horizons") = 5);

  m.def(
      "foliation_audit",
      [](std::shared_ptr<LocalModel> model, int leaf_points, int pair_grid, int disjoint_pairs) {
        AtlasSpec spec;
        spec.leaf_points = leaf_points;
        spec.pair.points_per_axis = pair_grid;
        const FoliationAtlas A = build_atlas(model, spec);
        const DisjointReport dj = check_disjoint(A, disjoint_pairs);
        const LeafAudit inv = leaf_invariance(A, {0.25, 0.5});
        const LeafAudit con = contraction_to_center(A);
        const RetractReport rr = retract_audit(A);
        py::dict d;
        d["leaves"] = A.leaves.size();
        d["pair_N"] = A.pair.N.size();
        d["pair_L"] = A.pair.exit_count();
        d["disjoint_pass"] = dj.pass();
        d["min_separation"] = dj.min_separation();
        d["invariance_pass"] = inv.pass();
        d["contraction_pass"] = con.pass();
        d["retract_pass"] = rr.pass();
        d["mu_audit"] = rr.mu_audit;
        return d;
      },
      py::arg("model"), py::arg("leaf_points") = 9, py::arg("pair_grid") = 41, py::arg("disjoint_pairs") = 100,
      "Builds the leaf atlas and runs the disjointness, invariance, contraction and retract audits.");
}
