#include "perron/problem.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "perron/error.hpp"

namespace perron {

using nlohmann::json;

void GradientProblem::validate(double tol) const {
  if (critical_point.size() != dimension())
    throw Error(ErrorKind::InvalidConfig, "critical_point has wrong dimension");
  if (!(trust_radius > 0.0 && trust_radius <= 1.0))
    throw Error(ErrorKind::InvalidConfig, "trust_radius must lie in (0, 1]");
  const double g = gradient(critical_point).norm();
  if (g > tol) {
    std::ostringstream os;
    os << "gradient norm " << g << " at critical_point exceeds " << tol;
    throw Error(ErrorKind::InvalidConfig, os.str());
  }
}

namespace {

Monomial parse_monomial(const json& j) {
  Monomial m;
  if (j.is_array() && j.size() == 2) {
    m.powers = j.at(0).get<std::vector<int>>();
    m.coefficient = j.at(1).get<double>();
  } else if (j.is_object()) {
    m.powers = j.at("powers").get<std::vector<int>>();
    m.coefficient = j.at("coef").get<double>();
  } else {
    throw Error(ErrorKind::InvalidConfig, "objective term must be [powers, coef] or {powers, coef}");
  }
  return m;
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

template <class T>
void read_value(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ProblemConfig parse_config(const std::string& text) {
  ProblemConfig cfg;
  cfg.source_text = text;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
  try {
    const int n = j.at("dimension").get<int>();
    std::vector<Monomial> terms;
    for (const auto& t : j.at("objective")) terms.push_back(parse_monomial(t));
    cfg.problem.objective = Polynomial(n, std::move(terms));
    cfg.problem.name = j.value("name", std::string("problem"));

    std::vector<double> x(n, 0.0);
    if (j.contains("critical_point")) x = j.at("critical_point").get<std::vector<double>>();
    if (static_cast<int>(x.size()) != n) throw Error(ErrorKind::InvalidConfig, "critical_point has wrong dimension");
    cfg.problem.critical_point = Eigen::Map<Eigen::VectorXd>(x.data(), n);
    cfg.problem.trust_radius = j.value("trust_radius", 1.0);
    cfg.problem.c21 = j.value("c21", true);

    if (j.contains("ladder_overrides")) {
      const auto& o = j.at("ladder_overrides");
      read_optional(o, "lambda", cfg.overrides.lambda);
      read_optional(o, "varkappa", cfg.overrides.varkappa);
      read_optional(o, "epsilon", cfg.overrides.epsilon);
      read_optional(o, "varsigma", cfg.overrides.varsigma);
      read_optional(o, "rho", cfg.overrides.rho);
    }
    if (j.contains("pipeline")) {
      const auto& p = j.at("pipeline");
      read_optional(p, "tau", cfg.pipeline.tau);
      read_value(p, "horizons", cfg.pipeline.horizons);
      read_value(p, "horizon_step", cfg.pipeline.horizon_step);
      read_value(p, "zplus_points", cfg.pipeline.zplus_points);
      read_value(p, "leaf_points", cfg.pipeline.leaf_points);
      read_value(p, "sphere_points", cfg.pipeline.sphere_points);
      read_value(p, "pair_grid", cfg.pipeline.pair_grid);
      read_value(p, "disjoint_pairs", cfg.pipeline.disjoint_pairs);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
  cfg.problem.validate();
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace perron
