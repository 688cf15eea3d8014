#pragma once

// Run configurations and reports for the batch front end.
//
// Config (JSON):
//   p, n                  dimensions
//   space                 built-in name, or {"name": ..., "params": {...}}
//   params                parameter map (strings or string arrays)
//   nlc                   quadratic-canonical | christoffel-of-phi | user-given
//   einstein_constant     K, default 1
//   points                {seed, count, box: {t: [lo, hi], x: ..., xs: ...}, explicit: [{t, x, xs}]}
//   checks                subset of check_names()
//   tolerances            {check: tol}
//   dump                  subset of dump_families()
//   output                report path

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "jetlag/sampling.hpp"
#include "jetlag/spaces.hpp"

namespace jetlag {

const std::vector<std::string>& check_names();
const std::vector<std::string>& dump_families();
double default_tolerance(const std::string& check);

struct RunConfig {
  Dims dims;
  std::string space;
  SpaceParams params;
  std::optional<NlcKind> nlc;
  double einstein_constant = 1.0;
  std::uint64_t seed = 1;
  std::size_t count = 0;
  SampleBox box;
  std::vector<JetPoint> explicit_points;
  std::vector<std::string> checks;
  std::map<std::string, double> tolerances;
  std::vector<std::string> dump;
  std::string output;
  nlohmann::json source;

  double tolerance(const std::string& check) const;
};

/// Schema validation; expression errors surface when the space is built.
/// Throws Error(config) with the offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Builds the space (parsing every expression) and checks cross-field
/// constraints. Throws Error(config) or ParseError.
GeometryContext build_context(const RunConfig& cfg);

struct RunOptions {
  int jobs = 1;
};

/// The report as JSON. Wall time is stored under "wall_time_s".
nlohmann::json run_report(const RunConfig& cfg, const RunOptions& opt = {});

/// True when no check in the report has status fail.
bool report_passed(const nlohmann::json& report);

/// JSON text with every real printed with 17 significant digits.
std::string to_json_text(const nlohmann::json& j);

/// Write via a temporary file in the same directory, then rename.
void write_atomic(const std::string& path, const std::string& text);

}  // namespace jetlag
