#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jetlag/error.hpp"
#include "jetlag/runner.hpp"

using namespace jetlag;
using nlohmann::json;

namespace {

json flat_config() {
  return json::parse(R"({
    "p": 2, "n": 2, "space": "flat",
    "points": {"seed": 3, "count": 4},
    "checks": ["metricity", "antisymmetry", "torsion", "curvature", "maxwell", "einstein",
               "conservation", "regularity", "grad-check"]
  })");
}

std::string config_error(const json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    return e.what();
  }
  return "";
}

std::string without_wall_time(json r) {
  r.erase("wall_time_s");
  return to_json_text(r);
}

const json& check_of(const json& report, const std::string& name) {
  for (const json& c : report.at("checks"))
    if (c.at("name") == name) return c;
  throw std::runtime_error("no check " + name);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(JETLAG_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::filesystem::path temp_dir() {
  auto d = std::filesystem::temp_directory_path() / "jetlag_test_cli";
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("config schema errors name the key") {
  json j = flat_config();
  j["colour"] = "red";
  CHECK(config_error(j).find("colour") != std::string::npos);

  j = flat_config();
  j["points"] = {{"seed", 1}};
  CHECK(config_error(j).find("at least one point") != std::string::npos);

  j = flat_config();
  j["tolerances"] = {{"metricity", -1.0}};
  CHECK(config_error(j).find("tolerances.metricity") != std::string::npos);

  j = flat_config();
  j["checks"] = {"metricity", "telepathy"};
  CHECK(config_error(j).find("telepathy") != std::string::npos);

  j = flat_config();
  j["checks"] = {"natural-form"};
  CHECK(config_error(j).find("p > 2 and n > 2, got p=2") != std::string::npos);

  j = flat_config();
  j["p"] = 3;
  j["n"] = 3;
  j["checks"] = {"natural-form"};
  j["einstein_constant"] = 0.0;
  CHECK(config_error(j).find("Einstein constant") != std::string::npos);

  j = flat_config();
  j["points"] = {{"explicit", {{{"t", {0, 0}}, {"x", {0, 0}}, {"xs", {1, 2, 3}}}}}};
  CHECK(config_error(j).find("points.explicit[0].xs") != std::string::npos);

  j = flat_config();
  j["space"] = {{"name", "optic"}, {"parms", json::object()}};
  CHECK(config_error(j).find("space.parms") != std::string::npos);
}

TEST_CASE("expression errors surface when the space is built") {
  json j = flat_config();
  j["space"] = "optic";
  j["params"] = {{"n", "1 + sin(x[1]"}};
  const RunConfig cfg = parse_config(j);
  CHECK_THROWS_AS(build_context(cfg), ParseError);
}

TEST_CASE("explicit points with nested slope rows come first") {
  json j = flat_config();
  j["points"]["explicit"] = {{{"t", {0.5, -0.5}}, {"x", {1, 2}}, {"xs", {{1, 2}, {3, 4}}}}};
  const RunConfig cfg = parse_config(j);
  REQUIRE(cfg.explicit_points.size() == 1);
  CHECK(cfg.explicit_points[0].xs == std::vector<double>{1, 2, 3, 4});
  const json r = run_report(cfg);
  CHECK(r["points"].size() == 5);
  CHECK(r["points"][0]["x"] == json({1.0, 2.0}));
}

TEST_CASE("flat space passes every check") {
  const json r = run_report(parse_config(flat_config()));
  CHECK(r["passed"] == true);
  CHECK(report_passed(r));
  for (const json& c : r["checks"]) {
    CAPTURE(c["name"]);
    CHECK(c["status"] == "pass");
    CHECK(c["max_abs"].get<double>() <= 1e-12);
  }
  CHECK(r["sampling"]["generator"] == "std::mt19937_64");
  CHECK(r["space"]["name"] == "flat");
}

TEST_CASE("report is deterministic across repeats and worker counts") {
  json j = flat_config();
  j["space"] = "optic";
  j["points"]["count"] = 6;
  j["checks"] = {"metricity", "curvature", "maxwell", "einstein", "conservation"};
  j["dump"] = {"metric", "ricci"};
  const RunConfig cfg = parse_config(j);
  const std::string a = without_wall_time(run_report(cfg, {1}));
  CHECK(a == without_wall_time(run_report(cfg, {1})));
  CHECK(a == without_wall_time(run_report(cfg, {3})));
}

TEST_CASE("direction-dependent soft items are flagged, not failed") {
  json j = flat_config();
  j["space"] = "optic";
  j["checks"] = {"conservation"};
  const json r = run_report(parse_config(j));
  CHECK(check_of(r, "conservation")["status"] == "flagged");
  CHECK(r["passed"] == true);
}

TEST_CASE("domain error becomes a failed check with a witness") {
  json j = flat_config();
  j["space"] = "optic";
  j["params"] = {{"n", "0.5"}};
  j["checks"] = {"metricity"};
  const json r = run_report(parse_config(j));
  const json& c = check_of(r, "metricity");
  CHECK(c["status"] == "fail");
  CHECK(c["error"] == "evaluation-domain");
  CHECK(c["witness"]["index"] == 0);
  CHECK_FALSE(report_passed(r));
}

TEST_CASE("reals are written with 17 significant digits") {
  const json j = {{"a", 0.1}, {"b", 1.0 / 3.0}, {"c", 3}, {"d", std::nan("")}, {"e", "s"}};
  const std::string text = to_json_text(j);
  CHECK(text.find("0.10000000000000001") != std::string::npos);
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  CHECK(text.find("\"d\": null") != std::string::npos);
  const json back = json::parse(text);
  CHECK(back["b"].get<double>() == 1.0 / 3.0);
  CHECK(back["c"] == 3);
}

TEST_CASE("atomic write replaces the file and leaves no temporary") {
  const auto dir = temp_dir();
  const auto path = (dir / "report.json").string();
  write_atomic(path, "first\n");
  write_atomic(path, "second\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "second\n");
  for (const auto& e : std::filesystem::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("command line exit codes") {
  const std::string configs = JETLAG_CONFIGS;
  const auto dir = temp_dir();
  CHECK(run_cli("spaces") == 0);
  CHECK(run_cli("validate " + configs + "/flat.json") == 0);
  CHECK(run_cli("validate " + configs + "/quadratic33.json") == 0);
  CHECK(run_cli("run " + configs + "/flat.json --out " + (dir / "flat.json").string()) == 0);
  CHECK(std::filesystem::exists(dir / "flat.json"));
  CHECK(run_cli("run " + configs + "/conformal33.json --out " + (dir / "c.json").string() + " --jobs 4") == 0);
  CHECK(run_cli("validate " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("run " + configs + "/flat.json --jobs 0") == 2);

  {
    json j = flat_config();
    j["checks"] = {"natural-form"};
    std::ofstream(dir / "p2.json") << j.dump();
  }
  CHECK(run_cli("validate " + (dir / "p2.json").string()) == 2);
  {
    json j = flat_config();
    j["space"] = "optic";
    j["params"] = {{"n", "0.5"}};
    j["checks"] = {"metricity"};
    std::ofstream(dir / "domain.json") << j.dump();
  }
  CHECK(run_cli("run " + (dir / "domain.json").string() + " --out " + (dir / "d.json").string()) == 1);

  // --seed and --dump are reflected in the report
  CHECK(run_cli("run " + configs + "/flat.json --seed 17 --dump metric --out " + (dir / "s.json").string()) == 0);
  std::ifstream in(dir / "s.json");
  const json r = json::parse(in);
  CHECK(r["config"]["points"]["seed"] == 17);
  CHECK(r["dump"].size() == r["points"].size());
  CHECK(r["dump"][0].contains("metric"));
}
