#include "jetlag/spaces.hpp"

#include <cmath>
#include <sstream>

#include "jetlag/error.hpp"
#include "jetlag/expr.hpp"

namespace jetlag {

namespace {

std::string idx(int k) { return std::to_string(k + 1); }

std::vector<std::string> default_h(int p) {
  std::vector<std::string> h;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      if (a == b) {
        h.push_back("1 + 0.2*t[" + idx((a + 1) % p) + "]^2");
      } else {
        h.push_back("0.05*t[" + idx(std::min(a, b)) + "]*t[" + idx(std::max(a, b)) + "]");
      }
    }
  return h;
}

std::vector<std::string> default_phi(int n) {
  std::vector<std::string> f;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        f.push_back("1 + 0.2*x[" + idx((i + 1) % n) + "]^2");
      } else {
        f.push_back("0.05*x[" + idx(std::min(i, j)) + "]*x[" + idx(std::max(i, j)) + "]");
      }
    }
  return f;
}

std::vector<std::string> default_g_tx(int n) {
  std::vector<std::string> f;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        f.push_back("1 + 0.1*t[1]^2 + 0.2*x[" + idx((i + 1) % n) + "]^2");
      } else {
        f.push_back("0.05*x[" + idx(std::min(i, j)) + "]*x[" + idx(std::max(i, j)) + "]*(1 + 0.1*t[1])");
      }
    }
  return f;
}

std::vector<std::string> identity(int dim) {
  std::vector<std::string> f;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) f.push_back(i == j ? "1" : "0");
  return f;
}

// Parses a parameter list into fields; records the sources on the context.
class Builder {
 public:
  Builder(GeometryContext& ctx, const SpaceParams& params) : ctx_(ctx), params_(params) {}

  bool has(const std::string& key) const { return params_.count(key) != 0; }

  std::vector<ScalarField> fields(const std::string& key, std::size_t count, Deps deps) {
    auto it = params_.find(key);
    if (it == params_.end()) throw Error(ErrorCode::config, "missing parameter '" + key + "'");
    if (it->second.size() != count) {
      throw Error(ErrorCode::config, "parameter '" + key + "' needs " + std::to_string(count) + " entries, got " +
                                         std::to_string(it->second.size()));
    }
    std::vector<ScalarField> out;
    for (std::size_t k = 0; k < count; ++k) {
      const std::string name = count == 1 ? key : key + "[" + std::to_string(k) + "]";
      const std::string& src = it->second[k];
      Expr e;
      try {
        e = parse_field(src, ctx_.dims);
      } catch (const ParseError& err) {
        throw ParseError(err.offset(), err.expected() + " (in parameter " + name + ")", err.excerpt());
      }
      ctx_.sources.emplace_back(name, src);
      out.push_back(expr_field(name, e, deps));
      // Narrow to what the entry uses so derivative work is skipped where possible.
      out.back().deps = deps_of(e);
    }
    return out;
  }

  std::string word(const std::string& key, const std::string& fallback) const {
    auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    if (it->second.size() != 1) throw Error(ErrorCode::config, "parameter '" + key + "' must be a single word");
    return it->second[0];
  }

 private:
  GeometryContext& ctx_;
  const SpaceParams& params_;
};

std::vector<Taylor> eval_all(const std::vector<ScalarField>& fs, const FieldArgs& a) {
  std::vector<Taylor> out;
  out.reserve(fs.size());
  for (const ScalarField& f : fs) out.push_back(f.eval(a));
  return out;
}

Deps union_deps(const std::vector<ScalarField>& fs) {
  Deps d = 0;
  for (const ScalarField& f : fs) d |= f.deps;
  return d;
}

TensorField pack(std::string name, std::vector<ScalarField> fs) { return tensor_field(std::move(name), std::move(fs)); }

std::vector<Taylor> inverse_of(const std::vector<Taylor>& m, int dim) {
  std::vector<double> vals(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) vals[k] = m[k].value();
  detail::check_symmetric_invertible(vals, dim, "metric");
  return detail::gauss_jordan_inverse(m, dim);
}

void apply_user_n(GeometryContext& ctx, Builder& b) {
  if (!b.has("N")) return;
  const auto n = static_cast<std::size_t>(ctx.dims.n), p = static_cast<std::size_t>(ctx.dims.p);
  ctx.user_n = pack("N", b.fields("N", n * p * n, dep_all));
}

SpaceParams merged(const std::string& kind, Dims d, const SpaceParams& params) {
  SpaceParams all = default_params(kind, d);
  const SpaceInfo* info = nullptr;
  for (const SpaceInfo& s : builtin_spaces()) {
    if (s.name == kind) info = &s;
  }
  for (const auto& [k, v] : params) {
    bool known = false;
    for (const auto& pr : info->params) known = known || pr.first == k;
    if (!known) throw Error(ErrorCode::config, "space '" + kind + "' has no parameter '" + k + "'");
    all[k] = v;
  }
  return all;
}

}  // namespace

const std::vector<SpaceInfo>& builtin_spaces() {
  static const std::vector<SpaceInfo> spaces = {
      {"flat", "h = identity, g = identity, quadratic canonical connection", {{"N", "n*p*n, any (optional)"}}},
      {"quadratic",
       "L = h^{ab} g_ij(t,x) xs^i_a xs^j_b + U^{(a)}_{(i)} xs^i_a + F; g from the canonical Kronecker contraction",
       {{"h", "p*p, {t}"}, {"g", "n*n, {t,x}"}, {"U", "n*p, {t,x}"}, {"F", "1, {t,x}"}, {"N", "n*p*n, any (optional)"}}},
      {"conformal",
       "g_ij = exp(2 sigma) phi_ij; sigma (i) U xs, (ii) h^{ab} A_i A_j xs xs, (iii) phi_ij X^a X^b xs xs",
       {{"h", "p*p, {t}"},
        {"phi", "n*n, {x}"},
        {"variant", "i | ii | iii"},
        {"U", "n*p, {t,x} (variant i)"},
        {"A", "n, {x} (variant ii)"},
        {"X", "p, {t} (variant iii)"},
        {"N", "n*p*n, any (optional)"}}},
      {"optic",
       "g_ij = phi_ij + (1 - 1/n) Y_i Y_j, Y_i = phi_im xs^m_a X^a, refraction index n >= 1",
       {{"h", "p*p, {t}"}, {"phi", "n*n, {x}"}, {"n", "1, any"}, {"X", "p, {t}"}, {"N", "n*p*n, any (optional)"}}},
      {"custom",
       "expression-defined h with either g or a Lagrangian L",
       {{"h", "p*p, {t}"},
        {"g", "n*n, any"},
        {"L", "1, any"},
        {"phi", "n*n, {x}"},
        {"N", "n*p*n, any"},
        {"nlc", "quadratic-canonical | christoffel-of-phi | user-given"}}},
  };
  return spaces;
}

SpaceParams default_params(const std::string& kind, Dims d) {
  const int p = d.p, n = d.n;
  if (kind == "flat") return {};
  if (kind == "quadratic") {
    std::vector<std::string> u;
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < p; ++a) u.push_back("0.3*x[" + idx(i) + "]*t[" + idx(a) + "]");
    return {{"h", default_h(p)}, {"g", default_g_tx(n)}, {"U", u}, {"F", {"0.5*x[1]*t[1]"}}};
  }
  if (kind == "conformal") {
    std::vector<std::string> u, a, x;
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < p; ++b) u.push_back("0.2*sin(x[" + idx(i) + "]) + 0.1*t[" + idx(b) + "]");
    for (int i = 0; i < n; ++i) a.push_back("0.3*cos(x[" + idx(i) + "])");
    for (int b = 0; b < p; ++b) x.push_back("0.5 + 0.1*t[" + idx(b) + "]");
    return {{"h", default_h(p)}, {"phi", default_phi(n)}, {"variant", {"i"}}, {"U", u}, {"A", a}, {"X", x}};
  }
  if (kind == "optic") {
    std::vector<std::string> x;
    for (int b = 0; b < p; ++b) x.push_back("0.6 + 0.2*t[" + idx(b) + "]");
    return {{"h", default_h(p)},
            {"phi", default_phi(n)},
            {"n", {"1 + 0.5/(1 + x[1]^2) + 0.2*xs[1][1]^2"}},
            {"X", x}};
  }
  if (kind == "custom") return {{"h", identity(p)}, {"g", identity(n)}};
  throw Error(ErrorCode::config, "unknown space '" + kind + "'");
}

std::optional<NlcKind> parse_nlc(const std::string& name) {
  for (NlcKind k : {NlcKind::quadratic_canonical, NlcKind::christoffel_of_phi, NlcKind::user_given}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

GeometryContext make_flat(int p, int n) {
  if (p < 1 || n < 1) throw Error(ErrorCode::config, "dimensions must be positive");
  GeometryContext ctx;
  ctx.name = "flat";
  ctx.dims = {p, n};
  auto ident = [](std::string name, int dim) {
    TensorField f;
    f.name = std::move(name);
    f.count = static_cast<std::size_t>(dim * dim);
    f.eval = [dim](const FieldArgs&) {
      std::vector<Taylor> v(static_cast<std::size_t>(dim * dim), Taylor(0.0));
      for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i * dim + i)] = Taylor(1.0);
      return v;
    };
    return f;
  };
  ctx.h = ident("h", p);
  ctx.g = ident("g", n);
  ctx.g_source = GSource::direct;
  ctx.nlc = NlcKind::quadratic_canonical;
  return ctx;
}

GeometryContext make_quadratic(Dims d, const SpaceParams& params) {
  const SpaceParams all = merged("quadratic", d, params);
  GeometryContext ctx;
  ctx.name = "quadratic";
  ctx.dims = d;
  Builder b(ctx, all);
  const auto p = static_cast<std::size_t>(d.p), n = static_cast<std::size_t>(d.n);
  auto h = b.fields("h", p * p, dep_t);
  auto g = b.fields("g", n * n, dep_t | dep_x);
  auto u = b.fields("U", n * p, dep_t | dep_x);
  auto f = b.fields("F", 1, dep_t | dep_x);
  ctx.h = pack("h", h);
  ctx.g_source = GSource::lagrangian;
  ctx.lagrangian = {"L", dep_all, [h, g, u, f, d](const FieldArgs& a) {
                      const std::vector<Taylor> hi = inverse_of(eval_all(h, a), d.p);
                      const std::vector<Taylor> gv = eval_all(g, a);
                      Taylor s(0.0);
                      for (int al = 0; al < d.p; ++al)
                        for (int be = 0; be < d.p; ++be) {
                          const Taylor& c = hi[static_cast<std::size_t>(al * d.p + be)];
                          if (is_exact_zero(c)) continue;
                          Taylor q(0.0);
                          for (int i = 0; i < d.n; ++i)
                            for (int j = 0; j < d.n; ++j)
                              q += gv[static_cast<std::size_t>(i * d.n + j)] * a.slope(i, al) * a.slope(j, be);
                          s += c * q;
                        }
                      for (int i = 0; i < d.n; ++i)
                        for (int al = 0; al < d.p; ++al)
                          s += u[static_cast<std::size_t>(i * d.p + al)].eval(a) * a.slope(i, al);
                      return s + f[0].eval(a);
                    }};
  ctx.nlc = NlcKind::quadratic_canonical;
  apply_user_n(ctx, b);
  return ctx;
}

GeometryContext make_conformal(Dims d, const SpaceParams& params) {
  const SpaceParams all = merged("conformal", d, params);
  GeometryContext ctx;
  ctx.name = "conformal";
  ctx.dims = d;
  Builder b(ctx, all);
  const auto p = static_cast<std::size_t>(d.p), n = static_cast<std::size_t>(d.n);
  auto h = b.fields("h", p * p, dep_t);
  auto phi = b.fields("phi", n * n, dep_x);
  const std::string variant = b.word("variant", "i");
  std::function<Taylor(const FieldArgs&)> sigma;
  if (variant == "i") {
    auto u = b.fields("U", n * p, dep_t | dep_x);
    sigma = [u, d](const FieldArgs& a) {
      Taylor s(0.0);
      for (int i = 0; i < d.n; ++i)
        for (int al = 0; al < d.p; ++al) s += u[static_cast<std::size_t>(i * d.p + al)].eval(a) * a.slope(i, al);
      return s;
    };
  } else if (variant == "ii") {
    auto av = b.fields("A", n, dep_x);
    sigma = [h, av, d](const FieldArgs& a) {
      const std::vector<Taylor> hi = inverse_of(eval_all(h, a), d.p);
      const std::vector<Taylor> A = eval_all(av, a);
      std::vector<Taylor> w(static_cast<std::size_t>(d.p), Taylor(0.0));  // A_i xs^i_a
      for (int al = 0; al < d.p; ++al)
        for (int i = 0; i < d.n; ++i) w[static_cast<std::size_t>(al)] += A[static_cast<std::size_t>(i)] * a.slope(i, al);
      Taylor s(0.0);
      for (int al = 0; al < d.p; ++al)
        for (int be = 0; be < d.p; ++be)
          s += hi[static_cast<std::size_t>(al * d.p + be)] * w[static_cast<std::size_t>(al)] *
               w[static_cast<std::size_t>(be)];
      return s;
    };
  } else if (variant == "iii") {
    auto xv = b.fields("X", p, dep_t);
    sigma = [phi, xv, d](const FieldArgs& a) {
      const std::vector<Taylor> ph = eval_all(phi, a);
      const std::vector<Taylor> X = eval_all(xv, a);
      std::vector<Taylor> v(static_cast<std::size_t>(d.n), Taylor(0.0));  // xs^i_a X^a
      for (int i = 0; i < d.n; ++i)
        for (int al = 0; al < d.p; ++al) v[static_cast<std::size_t>(i)] += a.slope(i, al) * X[static_cast<std::size_t>(al)];
      Taylor s(0.0);
      for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.n; ++j)
          s += ph[static_cast<std::size_t>(i * d.n + j)] * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
      return s;
    };
  } else {
    throw Error(ErrorCode::config, "conformal variant must be i, ii or iii, got '" + variant + "'");
  }
  ctx.h = pack("h", h);
  ctx.phi = pack("phi", phi);
  ctx.g_source = GSource::direct;
  ctx.g.name = "g";
  ctx.g.count = n * n;
  ctx.g.deps = dep_all;
  ctx.g.eval = [phi, sigma](const FieldArgs& a) {
    const Taylor e2s = exp(sigma(a) * 2.0);
    std::vector<Taylor> out = eval_all(phi, a);
    for (Taylor& c : out) c = e2s * c;
    return out;
  };
  ctx.extras["sigma"] = {"sigma", dep_all, 1, [sigma](const FieldArgs& a) { return std::vector<Taylor>{sigma(a)}; }};
  ctx.nlc = NlcKind::christoffel_of_phi;
  apply_user_n(ctx, b);
  return ctx;
}

GeometryContext make_optic(Dims d, const SpaceParams& params) {
  const SpaceParams all = merged("optic", d, params);
  GeometryContext ctx;
  ctx.name = "optic";
  ctx.dims = d;
  Builder b(ctx, all);
  const auto p = static_cast<std::size_t>(d.p), n = static_cast<std::size_t>(d.n);
  auto h = b.fields("h", p * p, dep_t);
  auto phi = b.fields("phi", n * n, dep_x);
  auto nf = b.fields("n", 1, dep_all);
  auto xv = b.fields("X", p, dep_t);
  ctx.h = pack("h", h);
  ctx.phi = pack("phi", phi);
  ctx.extras["n"] = pack("n", nf);
  ctx.extras["X"] = pack("X", xv);
  ctx.g_source = GSource::direct;
  ctx.g.name = "g";
  ctx.g.count = n * n;
  ctx.g.deps = dep_all;
  ctx.g.eval = [phi, nf, xv, d](const FieldArgs& a) {
    std::vector<Taylor> out = eval_all(phi, a);
    const std::vector<Taylor> X = eval_all(xv, a);
    const Taylor c = Taylor(1.0) - recip(nf[0].eval(a));
    std::vector<Taylor> v(static_cast<std::size_t>(d.n), Taylor(0.0));  // xs^m_a X^a
    for (int m = 0; m < d.n; ++m)
      for (int al = 0; al < d.p; ++al) v[static_cast<std::size_t>(m)] += a.slope(m, al) * X[static_cast<std::size_t>(al)];
    std::vector<Taylor> y(static_cast<std::size_t>(d.n), Taylor(0.0));
    for (int i = 0; i < d.n; ++i)
      for (int m = 0; m < d.n; ++m) y[static_cast<std::size_t>(i)] += out[static_cast<std::size_t>(i * d.n + m)] * v[static_cast<std::size_t>(m)];
    for (int i = 0; i < d.n; ++i)
      for (int j = 0; j < d.n; ++j)
        out[static_cast<std::size_t>(i * d.n + j)] += c * y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
    return out;
  };
  const ScalarField nfield = nf[0];
  ctx.point_check = [nfield, d](const JetPoint& pt) {
    const double v = evaluate_value(nfield, d, pt);
    if (!(v >= 1.0)) {
      std::ostringstream os;
      os.precision(17);
      os << "refraction index n = " << v << " < 1 at t = (";
      for (std::size_t k = 0; k < pt.t.size(); ++k) os << (k ? ", " : "") << pt.t[k];
      os << "), x = (";
      for (std::size_t k = 0; k < pt.x.size(); ++k) os << (k ? ", " : "") << pt.x[k];
      os << "), xs = (";
      for (std::size_t k = 0; k < pt.xs.size(); ++k) os << (k ? ", " : "") << pt.xs[k];
      os << ")";
      throw DomainError(os.str());
    }
  };
  ctx.nlc = NlcKind::christoffel_of_phi;
  apply_user_n(ctx, b);
  return ctx;
}

GeometryContext make_custom(Dims d, const SpaceParams& params) {
  SpaceParams all = params;
  if (!all.count("h")) all["h"] = identity(d.p);
  if (!all.count("g") && !all.count("L")) all["g"] = identity(d.n);
  for (const auto& [k, v] : all) {
    if (k != "h" && k != "g" && k != "L" && k != "phi" && k != "N" && k != "nlc") {
      throw Error(ErrorCode::config, "space 'custom' has no parameter '" + k + "'");
    }
  }
  if (all.count("g") && all.count("L")) throw Error(ErrorCode::config, "custom space takes g or L, not both");
  GeometryContext ctx;
  ctx.name = "custom";
  ctx.dims = d;
  Builder b(ctx, all);
  const auto p = static_cast<std::size_t>(d.p), n = static_cast<std::size_t>(d.n);
  ctx.h = pack("h", b.fields("h", p * p, dep_t));
  if (all.count("g")) {
    auto g = b.fields("g", n * n, dep_all);
    ctx.g = pack("g", g);
    ctx.g.deps = union_deps(g);
    ctx.g_source = GSource::direct;
  } else {
    ctx.lagrangian = b.fields("L", 1, dep_all)[0];
    ctx.g_source = GSource::lagrangian;
  }
  if (b.has("phi")) ctx.phi = pack("phi", b.fields("phi", n * n, dep_x));
  apply_user_n(ctx, b);
  std::string nlc = b.word("nlc", "");
  if (nlc.empty()) {
    nlc = b.has("N") ? "user-given" : b.has("phi") ? "christoffel-of-phi" : "quadratic-canonical";
  }
  const auto kind = parse_nlc(nlc);
  if (!kind) throw Error(ErrorCode::config, "unknown nonlinear connection '" + nlc + "'");
  ctx.nlc = *kind;
  return ctx;
}

GeometryContext make_space(const std::string& kind, Dims d, const SpaceParams& params, std::optional<NlcKind> nlc) {
  GeometryContext ctx;
  if (kind == "flat") {
    for (const auto& [k, v] : params) {
      if (k != "N") throw Error(ErrorCode::config, "space 'flat' has no parameter '" + k + "'");
    }
    ctx = make_flat(d.p, d.n);
    Builder b(ctx, params);
    apply_user_n(ctx, b);
  } else if (kind == "quadratic") {
    ctx = make_quadratic(d, params);
  } else if (kind == "conformal") {
    ctx = make_conformal(d, params);
  } else if (kind == "optic") {
    ctx = make_optic(d, params);
  } else if (kind == "custom") {
    ctx = make_custom(d, params);
  } else {
    throw Error(ErrorCode::config, "unknown space '" + kind + "'");
  }
  if (nlc) ctx.nlc = *nlc;
  ctx.validate();
  return ctx;
}

DTensor<double> optic_inverse_closed(const GeometryContext& ctx, const JetPoint& pt) {
  if (!ctx.extras.count("n") || !ctx.extras.count("X")) throw Error(ErrorCode::config, "not an optic space");
  const Dims d = ctx.dims;
  const JetVars vars(d, pt);
  auto eval = [&](const TensorField& f) {
    std::vector<double> v;
    for (const Taylor& c : f.eval(vars.args(f.deps))) v.push_back(c.value());
    return v;
  };
  const std::vector<double> ph = eval(ctx.phi);
  const double nv = eval(ctx.extras.at("n"))[0];
  const std::vector<double> X = eval(ctx.extras.at("X"));
  DTensor<double> phm(d.p, d.n, {Slot::Sd, Slot::Sd});
  phm.data() = ph;
  const DTensor<double> phi_inv = sym_inverse(phm);
  std::vector<double> y(static_cast<std::size_t>(d.n), 0.0);
  for (int i = 0; i < d.n; ++i)
    for (int m = 0; m < d.n; ++m)
      for (int a = 0; a < d.p; ++a) y[static_cast<std::size_t>(i)] += phm(i, m) * pt.slope(m, a, d.p) * X[static_cast<std::size_t>(a)];
  std::vector<double> yu(static_cast<std::size_t>(d.n), 0.0);
  for (int i = 0; i < d.n; ++i)
    for (int r = 0; r < d.n; ++r) yu[static_cast<std::size_t>(i)] += phi_inv(i, r) * y[static_cast<std::size_t>(r)];
  double y2 = 0.0;
  for (int m = 0; m < d.n; ++m) y2 += yu[static_cast<std::size_t>(m)] * y[static_cast<std::size_t>(m)];
  const double c = 1.0 - 1.0 / nv;
  const double k = c / (1.0 + c * y2);
  DTensor<double> r(d.p, d.n, {Slot::Su, Slot::Su});
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j) r(i, j) = phi_inv(i, j) + k * yu[static_cast<std::size_t>(i)] * yu[static_cast<std::size_t>(j)];
  return r;
}

}  // namespace jetlag
