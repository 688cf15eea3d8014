#include "jetlag/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jetlag/em_field.hpp"
#include "jetlag/error.hpp"
#include "jetlag/gravity.hpp"
#include "jetlag/parallel.hpp"

namespace jetlag {

using json = nlohmann::json;

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {"metricity",    "antisymmetry", "torsion",      "curvature",
                                                 "maxwell",      "einstein",     "conservation", "natural-form",
                                                 "regularity",   "grad-check"};
  return names;
}

const std::vector<std::string>& dump_families() {
  static const std::vector<std::string> names = {"metric", "connection", "torsion",     "curvature",   "ricci",
                                                 "einstein", "stress-energy", "deflection", "em", "natural-form"};
  return names;
}

double default_tolerance(const std::string& check) {
  static const std::map<std::string, double> tol = {
      {"metricity", 1e-8},    {"antisymmetry", 1e-9}, {"torsion", 1e-9},      {"curvature", 1e-9},
      {"maxwell", 1e-7},      {"einstein", 1e-12},    {"conservation", 1e-6}, {"natural-form", 1e-9},
      {"regularity", 1e-9},   {"grad-check", 1e-5}};
  auto it = tol.find(check);
  if (it == tol.end()) throw Error(ErrorCode::config, "unknown check '" + check + "'");
  return it->second;
}

double RunConfig::tolerance(const std::string& check) const {
  auto it = tolerances.find(check);
  return it != tolerances.end() ? it->second : default_tolerance(check);
}

// ---------------------------------------------------------------- config

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::config, where + ": " + what);
}

bool non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

bool member(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

int get_dim(const json& j, const char* key) {
  if (!j.contains(key)) bad(key, "missing");
  if (!j[key].is_number_integer() || j[key].get<long long>() < 1 || j[key].get<long long>() > 8) {
    bad(key, "must be an integer in 1..8");
  }
  return j[key].get<int>();
}

std::vector<std::string> param_value(const json& v, const std::string& where) {
  if (v.is_string()) return {v.get<std::string>()};
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return {os.str()};
  }
  if (!v.is_array()) bad(where, "must be a string or an array of strings");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const json& e = v[k];
    if (e.is_string()) {
      out.push_back(e.get<std::string>());
    } else if (e.is_number()) {
      std::ostringstream os;
      os.precision(17);
      os << e.get<double>();
      out.push_back(os.str());
    } else if (e.is_array()) {
      // nested rows are flattened row-major
      for (const std::string& s : param_value(e, where + "[" + std::to_string(k) + "]")) out.push_back(s);
    } else {
      bad(where + "[" + std::to_string(k) + "]", "must be a string or number");
    }
  }
  return out;
}

void read_params(const json& j, const std::string& where, SpaceParams& out) {
  if (!j.is_object()) bad(where, "must be an object");
  for (const auto& [k, v] : j.items()) out[k] = param_value(v, where + "." + k);
}

std::vector<double> reals(const json& j, const std::string& where, std::size_t want) {
  if (!j.is_array() || j.size() != want) bad(where, "must be an array of " + std::to_string(want) + " numbers");
  std::vector<double> out;
  for (const json& e : j) {
    if (!e.is_number()) bad(where, "must contain numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

void read_box(const json& j, SampleBox& box) {
  if (!j.is_object()) bad("points.box", "must be an object");
  for (const auto& [k, v] : j.items()) {
    double* dst = k == "t" ? box.t : k == "x" ? box.x : k == "xs" ? box.xs : nullptr;
    if (!dst) bad("points.box." + k, "unknown coordinate family (use t, x, xs)");
    const auto b = reals(v, "points.box." + k, 2);
    if (!(b[0] < b[1])) bad("points.box." + k, "needs lo < hi");
    dst[0] = b[0];
    dst[1] = b[1];
  }
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) bad("config", "must be a JSON object");
  static const std::vector<std::string> keys = {"p",      "n",          "space", "params",          "nlc",
                                                "points", "checks",     "tolerances", "einstein_constant",
                                                "dump",   "output"};
  for (const auto& [k, v] : j.items()) {
    if (!member(keys, k)) bad(k, "unknown key");
  }
  RunConfig c;
  c.source = j;
  c.dims = {get_dim(j, "p"), get_dim(j, "n")};

  if (!j.contains("space")) bad("space", "missing");
  const json& sp = j["space"];
  if (sp.is_string()) {
    c.space = sp.get<std::string>();
  } else if (sp.is_object()) {
    if (!sp.contains("name") || !sp["name"].is_string()) bad("space.name", "missing or not a string");
    c.space = sp["name"].get<std::string>();
    for (const auto& [k, v] : sp.items()) {
      if (k != "name" && k != "params") bad("space." + k, "unknown key");
    }
    if (sp.contains("params")) read_params(sp["params"], "space.params", c.params);
  } else {
    bad("space", "must be a name or an object");
  }
  bool known = false;
  for (const SpaceInfo& s : builtin_spaces()) known = known || s.name == c.space;
  if (!known) bad("space", "unknown space '" + c.space + "'");
  if (j.contains("params")) read_params(j["params"], "params", c.params);

  if (j.contains("nlc")) {
    if (!j["nlc"].is_string()) bad("nlc", "must be a string");
    c.nlc = parse_nlc(j["nlc"].get<std::string>());
    if (!c.nlc) bad("nlc", "unknown nonlinear connection '" + j["nlc"].get<std::string>() + "'");
  }
  if (j.contains("einstein_constant")) {
    if (!j["einstein_constant"].is_number()) bad("einstein_constant", "must be a number");
    c.einstein_constant = j["einstein_constant"].get<double>();
    if (!std::isfinite(c.einstein_constant)) bad("einstein_constant", "must be finite");
  }

  if (j.contains("points")) {
    const json& pj = j["points"];
    if (!pj.is_object()) bad("points", "must be an object");
    for (const auto& [k, v] : pj.items()) {
      if (k == "seed") {
        if (!non_negative_integer(v)) bad("points.seed", "must be a non-negative integer");
        c.seed = v.get<std::uint64_t>();
      } else if (k == "count") {
        if (!non_negative_integer(v)) bad("points.count", "must be a non-negative integer");
        c.count = v.get<std::size_t>();
      } else if (k == "box") {
        read_box(v, c.box);
      } else if (k == "explicit") {
        if (!v.is_array()) bad("points.explicit", "must be an array");
        for (std::size_t q = 0; q < v.size(); ++q) {
          const std::string where = "points.explicit[" + std::to_string(q) + "]";
          const json& e = v[q];
          if (!e.is_object()) bad(where, "must be an object with t, x, xs");
          JetPoint pt = JetPoint::zeros(c.dims);
          const auto p = static_cast<std::size_t>(c.dims.p), n = static_cast<std::size_t>(c.dims.n);
          for (const auto& [ck, cv] : e.items()) {
            if (ck == "t") {
              pt.t = reals(cv, where + ".t", p);
            } else if (ck == "x") {
              pt.x = reals(cv, where + ".x", n);
            } else if (ck == "xs") {
              json flat = json::array();
              for (const json& row : cv) {
                if (row.is_array()) {
                  for (const json& x : row) flat.push_back(x);
                } else {
                  flat.push_back(row);
                }
              }
              pt.xs = reals(cv.is_array() ? flat : cv, where + ".xs", n * p);
            } else {
              bad(where + "." + ck, "unknown key");
            }
          }
          c.explicit_points.push_back(std::move(pt));
        }
      } else {
        bad("points." + k, "unknown key");
      }
    }
  }
  if (c.count == 0 && c.explicit_points.empty()) bad("points", "at least one point is required (count or explicit)");

  if (!j.contains("checks")) bad("checks", "missing");
  if (!j["checks"].is_array() || j["checks"].empty()) bad("checks", "must be a non-empty array");
  for (const json& e : j["checks"]) {
    if (!e.is_string() || !member(check_names(), e.get<std::string>())) {
      bad("checks", "unknown check " + e.dump());
    }
    if (member(c.checks, e.get<std::string>())) bad("checks", "duplicate check " + e.dump());
    c.checks.push_back(e.get<std::string>());
  }
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) bad("tolerances", "must be an object");
    for (const auto& [k, v] : j["tolerances"].items()) {
      if (!member(check_names(), k)) bad("tolerances." + k, "unknown check");
      if (!v.is_number() || !(v.get<double>() > 0.0)) bad("tolerances." + k, "must be a positive number");
      c.tolerances[k] = v.get<double>();
    }
  }
  if (j.contains("dump")) {
    if (!j["dump"].is_array()) bad("dump", "must be an array");
    for (const json& e : j["dump"]) {
      if (!e.is_string() || !member(dump_families(), e.get<std::string>())) bad("dump", "unknown family " + e.dump());
      c.dump.push_back(e.get<std::string>());
    }
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) bad("output", "must be a string");
    c.output = j["output"].get<std::string>();
  }

  if (member(c.checks, "natural-form")) {
    if (c.dims.p <= 2 || c.dims.n <= 2) {
      bad("checks", "natural-form needs p > 2 and n > 2, got p=" + std::to_string(c.dims.p) +
                        ", n=" + std::to_string(c.dims.n));
    }
    if (c.einstein_constant == 0.0) bad("checks", "natural-form divides by the Einstein constant, which is 0");
  }
  if (member(c.dump, "natural-form") && (c.dims.p <= 2 || c.dims.n <= 2 || c.einstein_constant == 0.0)) {
    bad("dump", "natural-form needs p > 2, n > 2 and a nonzero Einstein constant");
  }
  if (member(c.dump, "stress-energy") && c.einstein_constant == 0.0) {
    bad("dump", "stress-energy is undefined for a zero Einstein constant");
  }
  for (const JetPoint& pt : c.explicit_points) pt.check(c.dims);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config, path + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config, path + ": " + e.what());
  }
  return parse_config(j);
}

GeometryContext build_context(const RunConfig& cfg) {
  GeometryContext ctx = make_space(cfg.space, cfg.dims, cfg.params, cfg.nlc);
  ctx.einstein_constant = cfg.einstein_constant;
  return ctx;
}

// ---------------------------------------------------------------- report pieces

namespace {

json point_json(const JetPoint& pt) { return {{"t", pt.t}, {"x", pt.x}, {"xs", pt.xs}}; }

template <class T>
json tensor_json(const DTensor<T>& a) {
  json shape = json::array();
  for (std::size_t k = 0; k < a.rank(); ++k) shape.push_back(a.extent(k));
  json data = json::array();
  for (const T& v : a.data()) {
    if constexpr (std::is_same_v<T, Taylor>) {
      data.push_back(v.value());
    } else {
      data.push_back(v);
    }
  }
  return {{"axes", describe(std::span<const Axis>(a.axes()))}, {"shape", shape}, {"data", data}};
}

enum class Mode { hard, soft, info };

struct Item {
  std::string name;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  std::optional<double> relative;
  std::optional<double> scale;
  std::size_t witness = 0;
  double tolerance = 0.0;
  Mode mode = Mode::hard;
  std::string note;
};

struct Check {
  std::string name;
  double tolerance = 0.0;
  std::vector<Item> items;
  std::string message;
  std::string status;  // forced status, e.g. fail on evaluation errors
  std::optional<std::size_t> witness;
};

std::string item_status(const Item& it) {
  if (it.mode == Mode::info) return "info";
  const double v = it.relative ? *it.relative : it.max_abs;
  if (v <= it.tolerance) return "pass";
  return it.mode == Mode::hard ? "fail" : "flagged";
}

// max and mean over points of a per-point list of named values
std::vector<Item> fold_named(const std::vector<std::vector<NamedValue>>& per, double tol, Mode mode) {
  std::vector<Item> out;
  if (per.empty()) return out;
  for (std::size_t e = 0; e < per[0].size(); ++e) {
    Item it;
    it.name = per[0][e].name;
    it.tolerance = tol;
    it.mode = mode;
    double sum = 0.0;
    for (std::size_t k = 0; k < per.size(); ++k) {
      const double v = per[k][e].value;
      sum += v;
      if (v > it.max_abs) {
        it.max_abs = v;
        it.witness = k;
      }
    }
    it.mean_abs = sum / static_cast<double>(per.size());
    out.push_back(it);
  }
  return out;
}

std::vector<Item> from_report(const ResidualReport& r, double tol, Mode mode) {
  std::vector<Item> out;
  for (const ResidualBlock& b : r.blocks) {
    Item it;
    it.name = b.name;
    it.max_abs = b.max_abs;
    it.mean_abs = b.mean_abs;
    it.relative = b.relative;
    it.scale = b.scale;
    it.witness = b.witness;
    it.tolerance = tol;
    it.mode = mode;
    out.push_back(it);
  }
  return out;
}

template <class Fn>
std::vector<std::vector<NamedValue>> per_point(const GeometryContext& ctx, const std::vector<JetPoint>& pts, int jobs,
                                               int depth, Fn fn) {
  std::vector<std::vector<NamedValue>> per(pts.size());
  parallel_for(pts.size(), jobs, [&](std::size_t k) {
    PointGeometry pg(ctx, pts[k], depth);
    per[k] = fn(pg);
  });
  return per;
}

// Direction-independent when every C coefficient vanishes on the points.
bool direction_independent(const GeometryContext& ctx, const std::vector<JetPoint>& pts, int jobs) {
  std::vector<double> m(pts.size(), 0.0);
  parallel_for(pts.size(), jobs, [&](std::size_t k) {
    PointGeometry pg(ctx, pts[k], depth_connection);
    m[k] = max_value(pg.C());
  });
  return *std::max_element(m.begin(), m.end()) <= 1e-12;
}

ScalarField component(const TensorField& f, std::size_t k) {
  const std::string name = f.count == 1 ? f.name : f.name + "[" + std::to_string(k) + "]";
  return {name, f.deps, [f, k](const FieldArgs& a) { return f.eval(a)[k]; }};
}

std::vector<ScalarField> context_fields(const GeometryContext& ctx) {
  std::vector<ScalarField> out;
  auto add = [&](const TensorField& f) {
    if (!f.eval) return;
    for (std::size_t k = 0; k < f.count; ++k) out.push_back(component(f, k));
  };
  add(ctx.h);
  if (ctx.g_source == GSource::direct) {
    add(ctx.g);
  } else {
    out.push_back(ctx.lagrangian);
  }
  add(ctx.phi);
  add(ctx.user_n);
  for (const auto& [name, f] : ctx.extras) add(f);
  return out;
}

Check run_check(const std::string& name, const RunConfig& cfg, const GeometryContext& ctx,
                const std::vector<JetPoint>& pts, int jobs) {
  Check c;
  c.name = name;
  c.tolerance = cfg.tolerance(name);
  const double tol = c.tolerance;
  const double K = cfg.einstein_constant;

  if (name == "metricity") {
    c.items = fold_named(per_point(ctx, pts, jobs, depth_connection, [](PointGeometry& pg) { return metricity_residuals(pg); }),
                         tol, Mode::hard);
  } else if (name == "antisymmetry") {
    c.items = fold_named(
        per_point(ctx, pts, jobs, depth_curvature, [](PointGeometry& pg) { return antisymmetry_residuals(pg); }), tol,
        Mode::hard);
  } else if (name == "torsion") {
    const Verdict v = nlc_torsion_free_check(ctx, pts, tol);
    Item it;
    it.name = "spatial nonlinear connection symmetric in its vertical Jacobian";
    it.max_abs = v.max_deviation;
    it.mean_abs = v.max_deviation;
    it.witness = v.witness;
    it.tolerance = tol;
    it.note = v.detail;
    if (!v.ok) {
      c.status = "fail";
      c.message = v.detail;
      c.witness = v.witness;
    }
    c.items.push_back(it);
  } else if (name == "curvature") {
    auto deg = fold_named(
        per_point(ctx, pts, jobs, depth_curvature, [](PointGeometry& pg) { return degenerate_block_residuals(pg); }),
        tol, Mode::hard);
    // quoted Bianchi identities come from outside and are reported, not asserted
    auto bi = fold_named(per_point(ctx, pts, jobs, depth_curvature, [](PointGeometry& pg) { return bianchi_residuals(pg); }),
                         tol, Mode::soft);
    auto dd = fold_named(per_point(ctx, pts, jobs, depth_curvature,
                                   [](PointGeometry& pg) { return deflection_identity_residuals(pg, deflection_set(pg)); }),
                         tol, Mode::hard);
    c.items = std::move(deg);
    c.items.insert(c.items.end(), bi.begin(), bi.end());
    c.items.insert(c.items.end(), dd.begin(), dd.end());
  } else if (name == "maxwell") {
    c.items = from_report(maxwell_residuals(ctx, pts, jobs), tol, Mode::hard);
  } else if (name == "einstein") {
    std::vector<std::vector<NamedValue>> per(pts.size());
    parallel_for(pts.size(), jobs, [&](std::size_t k) {
      PointGeometry pg(ctx, pts[k], depth_curvature);
      const EinsteinBlocks e = einstein_blocks(pg);
      std::vector<NamedValue> v = {{"|E tt|", max_value(e.tt)},       {"|E xx|", max_value(e.xx)},
                                   {"|E vv|", max_value(e.vv)},       {"|R_ia|", max_value(e.R_ia)},
                                   {"|P_ib|", max_value(e.P_ib)},     {"|P_i(j)|", max_value(e.P_i_j)},
                                   {"|P_(i)j|", max_value(e.P_ij)}};
      double zero = 0.0;
      for (double z : e.zero_ti.data()) zero = std::max(zero, std::fabs(z));
      for (double z : e.zero_tv.data()) zero = std::max(zero, std::fabs(z));
      v.push_back({"required zero blocks T_ai, T^(b)_a(i)", zero});
      if (K != 0.0) {
        const StressEnergySet t = stress_energy_extract(e, K);
        double inv = 0.0;
        auto diff = [&](const DTensor<Taylor>& a, const DTensor<Taylor>& b) {
          for (std::size_t q = 0; q < a.size(); ++q) {
            const double s = std::max(1.0, std::fabs(b[q].value()));
            inv = std::max(inv, std::fabs(K * a[q].value() - b[q].value()) / s);
          }
        };
        diff(t.tt, e.tt);
        diff(t.xx, e.xx);
        diff(t.vv, e.vv);
        diff(t.R_ia, e.R_ia);
        diff(t.P_ib, e.P_ib);
        diff(t.P_i_j, e.P_i_j);
        diff(t.P_ij, e.P_ij);
        v.push_back({"K T - E (relative to max(1, |E|))", inv});
      }
      per[k] = std::move(v);
    });
    c.items = fold_named(per, tol, Mode::hard);
    for (std::size_t q = 0; q < 7; ++q) c.items[q].mode = Mode::info;
    if (K == 0.0) c.message = "Einstein constant 0 (vacuum): blocks reported without stress-energy";
  } else if (name == "conservation") {
    const bool indep = direction_independent(ctx, pts, jobs);
    c.items = from_report(conservation_residuals(ctx, pts, jobs), tol, indep ? Mode::hard : Mode::soft);
    c.message = indep ? "g independent of the directions: laws asserted"
                      : "g depends on the directions: residuals reported, not asserted";
  } else if (name == "natural-form") {
    std::vector<std::vector<NamedValue>> per(pts.size());
    parallel_for(pts.size(), jobs, [&](std::size_t k) {
      PointGeometry pg(ctx, pts[k], depth_curvature);
      const NaturalForm nf = natural_stress_energy(pg, K);
      per[k] = {{"round trip T -> T~ -> T", nf.round_trip},
                {"H, R, S from the traces of T", nf.trace_solved},
                {"H, R, S from the traces of T~", nf.trace_back},
                {"E1' - K T~", nf.e1_prime_residual}};
    });
    c.items = fold_named(per, tol, Mode::hard);
    c.items[0].tolerance = std::min(tol, 1e-10);
    const bool indep = direction_independent(ctx, pts, jobs);
    const NaturalFormReport r = natural_form_checks(ctx, pts, jobs, tol);
    auto ids = from_report(r.residuals, tol, Mode::hard);
    for (std::size_t q = 1; q < 9; ++q) ids[q].mode = indep ? Mode::hard : Mode::soft;
    for (std::size_t q = 9; q < 12; ++q) {
      if (!r.simple_form_applicable) {
        ids[q].mode = Mode::info;
        ids[q].note = "not applicable: curvature traces do not vanish";
      }
    }
    c.items.insert(c.items.end(), ids.begin(), ids.end());
    std::ostringstream os;
    os.precision(17);
    os << "max |P^{l(m)}_{pi(m)}| = " << r.max_P << ", max |S^{l(a)(m)}_{p(i)(m)}| = " << r.max_S
       << (r.simple_form_applicable ? "; simple form asserted" : "; simple form not applicable");
    c.message = os.str();
  } else if (name == "regularity") {
    const Verdict v = ctx.g_source == GSource::lagrangian
                          ? kronecker_regularity_check(ctx, pts, RegularityTarget::lagrangian, tol)
                          : kronecker_regularity_check(ctx, pts, RegularityTarget::energy, tol);
    Item it;
    it.name = ctx.g_source == GSource::lagrangian ? "Kronecker h-regularity of L" : "Kronecker h-regularity of E";
    it.max_abs = v.max_deviation;
    it.mean_abs = v.max_deviation;
    it.witness = v.witness;
    it.tolerance = tol;
    it.note = v.detail;
    if (!v.ok) {
      c.status = "fail";
      c.message = "irregular: " + v.detail;
      c.witness = v.witness;
    }
    c.items.push_back(it);
  } else if (name == "grad-check") {
    const auto fields = context_fields(ctx);
    std::vector<AgreementReport> reps(fields.size());
    parallel_for(fields.size(), jobs, [&](std::size_t k) { reps[k] = check_grad(fields[k], ctx.dims, pts); });
    for (std::size_t k = 0; k < fields.size(); ++k) {
      Item it;
      it.name = fields[k].name;
      it.max_abs = reps[k].max_rel_deviation;
      it.mean_abs = reps[k].max_rel_deviation;
      it.witness = reps[k].witness_point;
      it.tolerance = tol;
      if (reps[k].evaluation_failed) {
        it.note = reps[k].failure;
        c.status = "fail";
        c.message = fields[k].name + ": " + reps[k].failure;
      }
      c.items.push_back(it);
    }
  }
  return c;
}

json check_json(const Check& c, const std::vector<JetPoint>& pts) {
  std::string status = c.status;
  double worst = 0.0, mean = 0.0, worst_bad = -1.0;
  std::optional<std::size_t> witness = c.witness;
  json items = json::array();
  bool any_fail = false, any_flag = false;
  for (const Item& it : c.items) {
    const std::string s = item_status(it);
    any_fail = any_fail || s == "fail";
    any_flag = any_flag || s == "flagged";
    if (it.mode != Mode::info) {
      worst = std::max(worst, it.max_abs);
      mean = std::max(mean, it.mean_abs);
    }
    const double v = it.relative ? *it.relative : it.max_abs;
    if (!c.witness && (s == "fail" || s == "flagged") && v > worst_bad) {
      worst_bad = v;
      witness = it.witness;
    }
    json ij = {{"name", it.name}, {"status", s}, {"max_abs", it.max_abs}, {"mean_abs", it.mean_abs},
               {"tolerance", it.tolerance}, {"witness", it.witness}};
    if (it.relative) ij["relative"] = *it.relative;
    if (it.scale) ij["scale"] = *it.scale;
    if (!it.note.empty()) ij["note"] = it.note;
    items.push_back(ij);
  }
  if (status.empty()) status = any_fail ? "fail" : any_flag ? "flagged" : "pass";
  json j = {{"name", c.name}, {"status", status}, {"tolerance", c.tolerance}, {"max_abs", worst},
            {"mean_abs", mean}, {"items", items}};
  if (!c.message.empty()) j["message"] = c.message;
  if (status != "pass" && witness && *witness < pts.size()) {
    j["witness"] = {{"index", *witness}, {"point", point_json(pts[*witness])}};
  }
  return j;
}

json dump_point(const RunConfig& cfg, const GeometryContext& ctx, const JetPoint& pt) {
  PointGeometry pg(ctx, pt, depth_curvature);
  json out = json::object();
  for (const std::string& fam : cfg.dump) {
    json f = json::object();
    if (fam == "metric") {
      f = {{"h", tensor_json(pg.h())}, {"h_inv", tensor_json(pg.h_inv())},
           {"g", tensor_json(pg.g())}, {"g_inv", tensor_json(pg.g_inv())}};
    } else if (fam == "connection") {
      f = {{"H", tensor_json(pg.H())}, {"M", tensor_json(pg.M())}, {"N", tensor_json(pg.N())},
           {"G", tensor_json(pg.G())}, {"L", tensor_json(pg.L())}, {"C", tensor_json(pg.C())}};
    } else if (fam == "torsion") {
      f = {{"T", tensor_json(pg.T())},       {"P_Ma", tensor_json(pg.P_Ma())}, {"P_Ni", tensor_json(pg.P_Ni())},
           {"R_tt", tensor_json(pg.R_tt())}, {"R_tx", tensor_json(pg.R_tx())}, {"R_xx", tensor_json(pg.R_xx())},
           {"S_t", tensor_json(pg.S_t())}};
    } else if (fam == "curvature") {
      f = {{"H", tensor_json(pg.Hc())},     {"R_tt", tensor_json(pg.Rc_tt())}, {"R_tx", tensor_json(pg.Rc_tx())},
           {"R_xx", tensor_json(pg.Rc_xx())}, {"P_t", tensor_json(pg.Pc_t())},  {"P_x", tensor_json(pg.Pc_x())},
           {"S", tensor_json(pg.Sc())}};
    } else if (fam == "ricci") {
      f = {{"H", tensor_json(pg.ric_H())},       {"R_ia", tensor_json(pg.ric_R_ia())},
           {"R_ij", tensor_json(pg.ric_R_ij())}, {"P_ib", tensor_json(pg.ric_P_ib())},
           {"P_i(j)", tensor_json(pg.ric_P_i_j())}, {"P_(i)j", tensor_json(pg.ric_P_ij())},
           {"S", tensor_json(pg.ric_S())},       {"scalar_H", pg.scalar_H().value()},
           {"scalar_R", pg.scalar_R().value()},  {"scalar_S", pg.scalar_S().value()}};
    } else if (fam == "einstein" || fam == "stress-energy") {
      const EinsteinBlocks e = einstein_blocks(pg);
      if (fam == "einstein") {
        f = {{"tt", tensor_json(e.tt)},       {"xx", tensor_json(e.xx)},     {"vv", tensor_json(e.vv)},
             {"R_ia", tensor_json(e.R_ia)},   {"P_ib", tensor_json(e.P_ib)}, {"P_i(j)", tensor_json(e.P_i_j)},
             {"P_(i)j", tensor_json(e.P_ij)}, {"zero_ti", tensor_json(e.zero_ti)},
             {"zero_tv", tensor_json(e.zero_tv)}};
      } else {
        const StressEnergySet t = stress_energy_extract(e, cfg.einstein_constant);
        f = {{"K", t.K},
             {"tt", tensor_json(t.tt)},       {"xx", tensor_json(t.xx)},     {"vv", tensor_json(t.vv)},
             {"R_ia", tensor_json(t.R_ia)},   {"P_ib", tensor_json(t.P_ib)}, {"P_i(j)", tensor_json(t.P_i_j)},
             {"P_(i)j", tensor_json(t.P_ij)}, {"zero_ti", tensor_json(t.zero_ti)},
             {"zero_tv", tensor_json(t.zero_tv)}};
      }
    } else if (fam == "deflection") {
      const DeflectionSet ds = deflection_set(pg);
      f = {{"x_low", tensor_json(ds.x_low)}, {"Dbar", tensor_json(ds.Dbar)}, {"D", tensor_json(ds.D)},
           {"d", tensor_json(ds.d)}};
    } else if (fam == "em") {
      const EmSet em = em_tensors(deflection_set(pg));
      f = {{"F", tensor_json(em.F)}, {"f", tensor_json(em.f)}};
    } else if (fam == "natural-form") {
      const NaturalForm nf = natural_stress_energy(pg, cfg.einstein_constant);
      f = {{"tt", tensor_json(nf.tt)}, {"xx", tensor_json(nf.xx)}, {"vv", tensor_json(nf.vv)},
           {"T_T", nf.T_T},            {"T_M", nf.T_M},            {"T_v", nf.T_v}};
    }
    out[fam] = f;
  }
  return out;
}

}  // namespace

json run_report(const RunConfig& cfg, const RunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const GeometryContext ctx = build_context(cfg);
  std::vector<JetPoint> pts = cfg.explicit_points;
  json sampling = {{"generator", sampler_name}, {"procedure", sampler_procedure}, {"seed", cfg.seed},
                   {"requested", cfg.count},     {"explicit", cfg.explicit_points.size()},
                   {"box", {{"t", {cfg.box.t[0], cfg.box.t[1]}}, {"x", {cfg.box.x[0], cfg.box.x[1]}},
                            {"xs", {cfg.box.xs[0], cfg.box.xs[1]}}}},
                   {"max_condition", 1e8}};
  if (cfg.count > 0) {
    const SampleResult s = sample_points(ctx, cfg.count, cfg.seed, cfg.box);
    pts.insert(pts.end(), s.points.begin(), s.points.end());
    sampling["rejected"] = s.rejected;
    sampling["h_negative_eigenvalues"] = s.h_negative;
    sampling["g_negative_eigenvalues"] = s.g_negative;
  }

  json report;
  report["tool"] = "jetlag";
  report["config"] = cfg.source;
  report["space"] = {{"name", ctx.name}, {"p", ctx.dims.p}, {"n", ctx.dims.n}, {"nlc", to_string(ctx.nlc)},
                     {"g_source", ctx.g_source == GSource::direct ? "direct" : "lagrangian"},
                     {"einstein_constant", cfg.einstein_constant}};
  json sources = json::object();
  for (const auto& [k, v] : ctx.sources) sources[k] = v;
  report["space"]["sources"] = sources;
  report["sampling"] = sampling;
  json pj = json::array();
  for (const JetPoint& pt : pts) pj.push_back(point_json(pt));
  report["points"] = pj;

  const int jobs = std::max(1, opt.jobs);
  json checks = json::array();
  for (const std::string& name : cfg.checks) {
    try {
      check_domain(ctx, pts);
      checks.push_back(check_json(run_check(name, cfg, ctx, pts, jobs), pts));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      json j = {{"name", name},
                {"status", "fail"},
                {"tolerance", cfg.tolerance(name)},
                {"error", to_string(e.code())},
                {"message", e.what()}};
      if (const auto* de = dynamic_cast<const DomainError*>(&e); de && de->position() < pts.size()) {
        j["witness"] = {{"index", de->position()}, {"point", point_json(pts[de->position()])}};
      }
      checks.push_back(j);
    }
  }
  report["checks"] = checks;

  if (!cfg.dump.empty()) {
    std::vector<json> per(pts.size());
    parallel_for(pts.size(), jobs, [&](std::size_t k) { per[k] = dump_point(cfg, ctx, pts[k]); });
    report["dump"] = per;
  }
  report["passed"] = report_passed(report);
  report["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

bool report_passed(const json& report) {
  for (const json& c : report.at("checks")) {
    if (c.at("status") == "fail") return false;
  }
  return true;
}

// ---------------------------------------------------------------- output

namespace {

void emit(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + json(k).dump() + ": ";
        emit(v, out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const json& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad_in;
        emit(e, out, indent + 1);
      }
      out += flat ? "]" : "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string to_json_text(const json& j) {
  std::string out;
  emit(j, out, 0);
  out += "\n";
  return out;
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::config, path + ": cannot write");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::config, path + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::config, path + ": rename failed: " + ec.message());
  }
}

}  // namespace jetlag
