#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path scratch = fs::temp_directory_path() / "perron_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(PERRON_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("ladder echoes T1 for the quadratic config") {
  const fs::path out = scratch / "ladder";
  fs::remove_all(out);
  REQUIRE(run("ladder --config configs/P1.json --out " + out.string()) == 0);
  const json L = read_json(out / "ladder.json");
  CHECK(L["T1"].get<double>() == doctest::Approx(4.605).epsilon(1e-3));
  for (const auto& [name, ok] : L["identities"].items()) CHECK_MESSAGE(ok.get<bool>(), name);
  CHECK(L["violations"].empty());
}

TEST_CASE("lambda stage passes on the quadratic config") {
  const fs::path out = scratch / "lambda";
  fs::remove_all(out);
  CHECK(run("--stage lambda --config configs/P1.json --out " + out.string()) == 0);
  const json s = read_json(out / "lambda.json");
  CHECK(s["c0"]["pass"].get<bool>());
  CHECK(s["contraction"]["pass"].get<bool>());
}

TEST_CASE("full run on the quartic config") {
  const fs::path out = scratch / "all";
  fs::remove_all(out);
  REQUIRE(run("all --config configs/P2.json --out " + out.string()) == 0);
  const json m = read_json(out / "manifest.json");
  for (const auto& [stage, status] : m["stage_statuses"].items()) CHECK_MESSAGE(status == "pass", stage);
  CHECK(m["stage_statuses"].size() == 6);
  CHECK(m["errors"].empty());
  CHECK(m["config_hash"].get<std::string>().size() == 16);
  CHECK(m["ladder_echo"]["T0"].get<double>() >= 1.0);

  std::set<std::string> listed;
  int csv = 0;
  for (const auto& p : m["artifact_paths"]) {
    listed.insert(p.get<std::string>());
    if (fs::path(p.get<std::string>()).extension() == ".csv") ++csv;
  }
  CHECK(csv >= 6);
  // Every file on disk is listed, and every listed file exists.
  for (const auto& e : fs::recursive_directory_iterator(out))
    if (e.is_regular_file()) CHECK_MESSAGE(listed.count(fs::relative(e.path(), out).string()), e.path());
  for (const auto& p : listed) CHECK_MESSAGE(fs::exists(out / p), p);
}

TEST_CASE("identical inputs give byte-identical CSVs") {
  const fs::path a = scratch / "det_a", b = scratch / "det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(run("manifolds --config configs/P2.json --seed 3 --out " + a.string()) == 0);
  REQUIRE(run("manifolds --config configs/P2.json --seed 3 --threads 2 --out " + b.string()) == 0);
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a))
    if (e.path().extension() == ".csv") {
      CHECK_MESSAGE(slurp(e.path()) == slurp(b / e.path().filename()), e.path());
      ++compared;
    }
  CHECK(compared >= 4);
}

TEST_CASE("configuration errors exit with 3") {
  const fs::path out = scratch / "errors";
  CHECK(run("ladder --config configs/missing.json --out " + out.string()) == 3);
  CHECK(run("nonsense --config configs/P1.json --out " + out.string()) == 3);
  CHECK(run("ladder --out " + out.string()) == 3);

  const fs::path bad = scratch / "degenerate.json";
  fs::create_directories(scratch);
  std::ofstream(bad) << R"({"dimension": 2, "objective": [[[2, 0], -0.5], [[0, 4], 1.0]]})";
  CHECK(run("spectral --config " + bad.string() + " --out " + out.string()) == 3);
  const json m = read_json(out / "manifest.json");
  REQUIRE(m["errors"].size() == 1);
  CHECK(m["errors"][0]["kind"] == "DegenerateCriticalPoint");
  CHECK(m["stage_statuses"]["spectral"] == "error");
}
