#include "jetlag/jet.hpp"

#include "jetlag/error.hpp"

namespace jetlag {

JetPoint JetPoint::zeros(Dims d) {
  JetPoint pt;
  pt.t.assign(static_cast<std::size_t>(d.p), 0.0);
  pt.x.assign(static_cast<std::size_t>(d.n), 0.0);
  pt.xs.assign(static_cast<std::size_t>(d.n * d.p), 0.0);
  return pt;
}

void JetPoint::check(Dims d) const {
  if (t.size() != static_cast<std::size_t>(d.p) || x.size() != static_cast<std::size_t>(d.n) ||
      xs.size() != static_cast<std::size_t>(d.n * d.p)) {
    throw Error(ErrorCode::config, "jet point has coordinate lengths that do not match (p, n) = (" +
                                       std::to_string(d.p) + ", " + std::to_string(d.n) + ")");
  }
}

std::vector<double> JetPoint::flat() const {
  std::vector<double> v(t);
  v.insert(v.end(), x.begin(), x.end());
  v.insert(v.end(), xs.begin(), xs.end());
  return v;
}

int var_index(Dims d, CoordId c) {
  switch (c.kind) {
    case CoordKind::t: return c.i;
    case CoordKind::x: return d.p + c.i;
    case CoordKind::xs: return d.p + d.n + c.i * d.p + c.a;
  }
  return -1;
}

CoordId coord_of(Dims d, int var) {
  if (var < d.p) return coord_t(var);
  if (var < d.p + d.n) return coord_x(var - d.p);
  const int k = var - d.p - d.n;
  return coord_xs(k / d.p, k % d.p);
}

std::string to_string(CoordId c) {
  switch (c.kind) {
    case CoordKind::t: return "t[" + std::to_string(c.i + 1) + "]";
    case CoordKind::x: return "x[" + std::to_string(c.i + 1) + "]";
    case CoordKind::xs: return "xs[" + std::to_string(c.i + 1) + "][" + std::to_string(c.a + 1) + "]";
  }
  return "?";
}

std::string deps_to_string(Deps d) {
  std::string s = "{";
  auto add = [&](const char* name) {
    if (s.size() > 1) s += ",";
    s += name;
  };
  if (d & dep_t) add("t");
  if (d & dep_x) add("x");
  if (d & dep_xs) add("xs");
  return s + "}";
}

ScalarField constant_field(std::string name, double value) {
  return {std::move(name), 0, [value](const FieldArgs&) { return Taylor(value); }};
}

JetVars::JetVars(Dims d, const JetPoint& pt, int order) : dims_(d), order_(order) {
  pt.check(d);
  const std::vector<double> v = pt.flat();
  const int nv = d.nvars();
  seeded_.reserve(v.size());
  exact_.reserve(v.size());
  for (int k = 0; k < nv; ++k) {
    seeded_.push_back(Taylor::variable(nv, order, k, v[static_cast<std::size_t>(k)]));
    exact_.emplace_back(v[static_cast<std::size_t>(k)]);
  }
}

JetVars::JetVars(Dims d, const JetPoint& pt) : dims_(d), order_(Taylor::exact_order) {
  pt.check(d);
  for (double v : pt.flat()) exact_.emplace_back(v);
  seeded_ = exact_;
}

FieldArgs JetVars::args(Deps deps) const {
  const auto p = static_cast<std::size_t>(dims_.p);
  const auto n = static_cast<std::size_t>(dims_.n);
  const std::vector<Taylor>& ts = (deps & dep_t) ? seeded_ : exact_;
  const std::vector<Taylor>& xs = (deps & dep_x) ? seeded_ : exact_;
  const std::vector<Taylor>& ss = (deps & dep_xs) ? seeded_ : exact_;
  return FieldArgs{dims_, std::span<const Taylor>(ts.data(), p), std::span<const Taylor>(xs.data() + p, n),
                   std::span<const Taylor>(ss.data() + p + n, n * p)};
}

Taylor evaluate(const ScalarField& f, const JetVars& vars) { return f.eval(vars.args(f.deps)); }

double evaluate_value(const ScalarField& f, Dims d, const JetPoint& pt) {
  JetVars v(d, pt);
  return f.eval(v.args(0)).value();
}

}  // namespace jetlag
