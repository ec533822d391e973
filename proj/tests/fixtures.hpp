#pragma once

#include <map>
#include <memory>
#include <string>

#include "perron/flow.hpp"
#include "perron/problem.hpp"

namespace fixtures {

// Tests run from the source tree (see tests/CMakeLists.txt).
inline std::string config_path(const std::string& name) { return "configs/" + name + ".json"; }

inline perron::ProblemConfig config(const std::string& name) { return perron::load_config(config_path(name)); }

// Models are expensive to prepare (Lipschitz sampling, disk resolution), so
// each test binary builds every reference model at most once.
inline std::shared_ptr<const perron::LocalModel> model(const std::string& name) {
  static std::map<std::string, std::shared_ptr<const perron::LocalModel>> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  const auto cfg = config(name);
  perron::ModelOptions mo;
  mo.sphere_points = cfg.pipeline.sphere_points;
  auto m = std::make_shared<const perron::LocalModel>(perron::prepare_model(cfg, mo));
  cache.emplace(name, m);
  return m;
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace fixtures
