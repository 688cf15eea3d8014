#include "jetlag/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "jetlag/error.hpp"

namespace jetlag {

namespace {

using TT = DTensor<Taylor>;

int vt(Dims, int a) { return a; }
int vx(Dims d, int i) { return d.p + i; }
int vs(Dims d, int i, int a) { return d.p + d.n + i * d.p + a; }

bool zero(const Taylor& t) { return is_exact_zero(t); }

std::vector<Taylor> eval_tensor(const TensorField& f, const JetVars& vars) {
  if (!f.eval) throw Error(ErrorCode::config, "field '" + f.name + "' is not set");
  std::vector<Taylor> v = f.eval(vars.args(f.deps));
  if (v.size() != f.count) {
    throw Error(ErrorCode::config, "field '" + f.name + "' produced " + std::to_string(v.size()) +
                                       " components, expected " + std::to_string(f.count));
  }
  return v;
}

TT from_flat(Dims d, std::initializer_list<Slot> slots, std::vector<Taylor> v) {
  TT r(d.p, d.n, slots);
  r.data() = std::move(v);
  return r;
}

// Christoffel symbols of a symmetric spatial metric with x-derivatives only.
TT christoffel_x(Dims d, const TT& g, const TT& ginv) {
  TT dg(d.p, d.n, {Slot::Sd, Slot::Sd, Slot::Sd});
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j)
      for (int k = 0; k < d.n; ++k) dg(i, j, k) = g(i, j).derivative(vx(d, k));
  TT r(d.p, d.n, {Slot::Su, Slot::Sd, Slot::Sd});
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j)
      for (int k = j; k < d.n; ++k) {
        Taylor s(0.0);
        for (int m = 0; m < d.n; ++m) {
          if (zero(ginv(i, m))) continue;
          s += ginv(i, m) * (dg(m, j, k) + dg(m, k, j) - dg(j, k, m));
        }
        r(i, j, k) = s * 0.5;
        r(i, k, j) = r(i, j, k);
      }
  return r;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

TensorField tensor_field(std::string name, std::vector<ScalarField> entries) {
  TensorField f;
  f.name = std::move(name);
  f.count = entries.size();
  for (const ScalarField& e : entries) f.deps |= e.deps;
  f.eval = [entries = std::move(entries)](const FieldArgs& a) {
    std::vector<Taylor> out;
    out.reserve(entries.size());
    for (const ScalarField& e : entries) out.push_back(e.eval(a));
    return out;
  };
  return f;
}

const char* to_string(NlcKind k) {
  switch (k) {
    case NlcKind::quadratic_canonical: return "quadratic-canonical";
    case NlcKind::christoffel_of_phi: return "christoffel-of-phi";
    case NlcKind::user_given: return "user-given";
  }
  return "?";
}

void GeometryContext::validate() const {
  if (dims.p < 1 || dims.n < 1) throw Error(ErrorCode::config, "dimensions must be positive");
  diff.check();
  const auto pp = static_cast<std::size_t>(dims.p), nn = static_cast<std::size_t>(dims.n);
  if (!h.eval || h.count != pp * pp) throw Error(ErrorCode::config, "h must have p*p components");
  if (h.deps & ~dep_t) {
    throw Error(ErrorCode::regularity_violation, "h may depend on t only, declared " + deps_to_string(h.deps));
  }
  if (g_source == GSource::direct) {
    if (!g.eval || g.count != nn * nn) throw Error(ErrorCode::config, "g must have n*n components");
    if (nlc == NlcKind::quadratic_canonical && (g.deps & dep_xs)) {
      throw Error(ErrorCode::regularity_violation,
                  "the quadratic canonical nonlinear connection needs g independent of the directions");
    }
  } else if (!lagrangian.eval) {
    throw Error(ErrorCode::config, "a Lagrangian-derived g needs a Lagrangian field");
  }
  switch (nlc) {
    case NlcKind::quadratic_canonical: break;
    case NlcKind::christoffel_of_phi:
      if (!phi.eval || phi.count != nn * nn) throw Error(ErrorCode::config, "phi must have n*n components");
      if (phi.deps & ~dep_x) {
        throw Error(ErrorCode::regularity_violation, "phi may depend on x only, declared " + deps_to_string(phi.deps));
      }
      break;
    case NlcKind::user_given:
      if (!user_n.eval || user_n.count != nn * pp * nn) {
        throw Error(ErrorCode::config, "a user nonlinear connection needs n*p*n components");
      }
      break;
  }
  if (!std::isfinite(einstein_constant)) throw Error(ErrorCode::config, "Einstein constant must be finite");
}

PointGeometry::PointGeometry(const GeometryContext& ctx, const JetPoint& pt, int depth)
    : ctx_(ctx), pt_(pt), d_(ctx.dims), depth_(depth), vars_(ctx.dims, pt, std::max(depth, 0)) {
  pt_.check(d_);
  if (depth < 0 || depth > ctx.diff.max_order) {
    throw Error(ErrorCode::order_exceeded, "derivative depth " + std::to_string(depth) +
                                               " exceeds the budget " + std::to_string(ctx.diff.max_order));
  }
}

const TT& PointGeometry::h() {
  if (!h_) h_ = from_flat(d_, {Slot::Td, Slot::Td}, eval_tensor(ctx_.h, vars_));
  return *h_;
}

const TT& PointGeometry::h_inv() {
  if (!h_inv_) h_inv_ = sym_inverse(h());
  return *h_inv_;
}

const TT& PointGeometry::g() {
  if (g_) return *g_;
  if (ctx_.g_source == GSource::direct) {
    g_ = from_flat(d_, {Slot::Sd, Slot::Sd}, eval_tensor(ctx_.g, vars_));
    return *g_;
  }
  // g_ij = (1/p) h_mn * 1/2 d2L / dxs^i_m dxs^j_n
  const JetVars lv(d_, pt_, depth_ + 2);
  const Taylor lag = evaluate(ctx_.lagrangian, lv);
  if (!lag.finite()) throw DomainError("Lagrangian is not finite");
  std::vector<Taylor> d1(static_cast<std::size_t>(d_.n * d_.p));
  for (int i = 0; i < d_.n; ++i)
    for (int a = 0; a < d_.p; ++a) d1[static_cast<std::size_t>(i * d_.p + a)] = lag.derivative(vs(d_, i, a));
  const TT& hh = h();
  TT g(d_.p, d_.n, {Slot::Sd, Slot::Sd});
  const double inv_p = 1.0 / d_.p;
  for (int i = 0; i < d_.n; ++i)
    for (int j = i; j < d_.n; ++j) {
      Taylor s(0.0);
      for (int m = 0; m < d_.p; ++m)
        for (int nu = 0; nu < d_.p; ++nu) {
          if (zero(hh(m, nu))) continue;
          s += hh(m, nu) * d1[static_cast<std::size_t>(i * d_.p + m)].derivative(vs(d_, j, nu));
        }
      g(i, j) = s * (0.5 * inv_p);
      g(j, i) = g(i, j);
    }
  g_ = std::move(g);
  return *g_;
}

const TT& PointGeometry::g_inv() {
  if (!g_inv_) g_inv_ = sym_inverse(g());
  return *g_inv_;
}

const TT& PointGeometry::liouville() {
  if (!x_) {
    TT x(d_.p, d_.n, {Slot::Vu});
    for (int i = 0; i < d_.n; ++i)
      for (int a = 0; a < d_.p; ++a) x(i, a) = slope(i, a);
    x_ = std::move(x);
  }
  return *x_;
}

const TT& PointGeometry::H() {
  if (H_) return *H_;
  const TT& hh = h();
  const TT& hi = h_inv();
  const int p = d_.p;
  TT dh(p, d_.n, {Slot::Td, Slot::Td, Slot::Td});
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int c = 0; c < p; ++c) dh(a, b, c) = hh(a, b).derivative(vt(d_, c));
  TT r(p, d_.n, {Slot::Tu, Slot::Td, Slot::Td});
  for (int c = 0; c < p; ++c)
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) {
        Taylor s(0.0);
        for (int e = 0; e < p; ++e) {
          if (zero(hi(c, e))) continue;
          s += hi(c, e) * (dh(e, b, a) + dh(e, a, b) - dh(a, b, e));
        }
        r(c, a, b) = s * 0.5;
        r(c, b, a) = r(c, a, b);
      }
  H_ = std::move(r);
  return *H_;
}

const TT& PointGeometry::M() {
  if (M_) return *M_;
  const TT& hc = H();
  TT r(d_.p, d_.n, {Slot::Vu, Slot::Td});
  for (int i = 0; i < d_.n; ++i)
    for (int a = 0; a < d_.p; ++a)
      for (int b = 0; b < d_.p; ++b) {
        Taylor s(0.0);
        for (int c = 0; c < d_.p; ++c) {
          if (zero(hc(c, a, b))) continue;
          s += hc(c, a, b) * slope(i, c);
        }
        r(i, a, b) = -s;
      }
  M_ = std::move(r);
  return *M_;
}

const TT& PointGeometry::N() {
  if (N_) return *N_;
  const int p = d_.p, n = d_.n;
  TT r(p, n, {Slot::Vu, Slot::Sd});
  switch (ctx_.nlc) {
    case NlcKind::quadratic_canonical: {
      const TT& gg = g();
      if (ctx_.g_source == GSource::direct) {
        if (ctx_.g.deps & dep_xs) {
          throw Error(ErrorCode::regularity_violation,
                      "the quadratic canonical nonlinear connection needs g independent of the directions");
        }
      } else {
        double worst = 0.0, scale = 1.0;
        for (const Taylor& c : gg.data()) scale = std::max(scale, std::fabs(c.value()));
        for (const Taylor& c : gg.data())
          for (int k = 0; k < n; ++k)
            for (int a = 0; a < p; ++a) worst = std::max(worst, std::fabs(c.derivative(vs(d_, k, a)).value()));
        if (worst > 1e-9 * scale) {
          throw Error(ErrorCode::regularity_violation,
                      "the quadratic canonical nonlinear connection needs g independent of the directions "
                      "(max |dg/dxs| = " + std::to_string(worst) + ")");
        }
      }
      const TT& gi = g_inv();
      const TT gam = christoffel_x(d_, gg, gi);
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < p; ++a)
          for (int j = 0; j < n; ++j) {
            Taylor s(0.0);
            for (int m = 0; m < n; ++m) {
              if (!zero(gam(i, j, m))) s += gam(i, j, m) * slope(m, a);
              if (zero(gi(i, m))) continue;
              const Taylor dt_g = gg(j, m).derivative(vt(d_, a));
              if (!zero(dt_g)) s += gi(i, m) * dt_g * 0.5;
            }
            r(i, a, j) = s;
          }
      break;
    }
    case NlcKind::christoffel_of_phi: {
      const TT ph = from_flat(d_, {Slot::Sd, Slot::Sd}, eval_tensor(ctx_.phi, vars_));
      const TT gam = christoffel_x(d_, ph, sym_inverse(ph));
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < p; ++a)
          for (int j = 0; j < n; ++j) {
            Taylor s(0.0);
            for (int m = 0; m < n; ++m) {
              if (!zero(gam(i, j, m))) s += gam(i, j, m) * slope(m, a);
            }
            r(i, a, j) = s;
          }
      break;
    }
    case NlcKind::user_given: r.data() = eval_tensor(ctx_.user_n, vars_); break;
  }
  N_ = std::move(r);
  return *N_;
}

Taylor PointGeometry::dt(const Taylor& f, int beta) {
  if (f.is_exact()) return Taylor(0.0);
  const TT& m = M();
  Taylor r = f.derivative(vt(d_, beta));
  for (int j = 0; j < d_.n; ++j)
    for (int mu = 0; mu < d_.p; ++mu) {
      const Taylor& c = m(j, mu, beta);
      if (zero(c)) continue;
      r -= c * f.derivative(vs(d_, j, mu));
    }
  return r;
}

Taylor PointGeometry::dx(const Taylor& f, int k) {
  if (f.is_exact()) return Taylor(0.0);
  const TT& nn = N();
  Taylor r = f.derivative(vx(d_, k));
  for (int j = 0; j < d_.n; ++j)
    for (int mu = 0; mu < d_.p; ++mu) {
      const Taylor& c = nn(j, mu, k);
      if (zero(c)) continue;
      r -= c * f.derivative(vs(d_, j, mu));
    }
  return r;
}

Taylor PointGeometry::dv(const Taylor& f, int k, int gamma) const {
  if (f.is_exact()) return Taylor(0.0);
  return f.derivative(vs(d_, k, gamma));
}

const TT& PointGeometry::G() {
  if (G_) return *G_;
  const int p = d_.p, n = d_.n;
  const TT& gg = g();
  const TT& gi = g_inv();
  TT dg(p, n, {Slot::Sd, Slot::Sd, Slot::Td});
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int c = 0; c < p; ++c) {
        dg(i, j, c) = dt(gg(i, j), c);
        dg(j, i, c) = dg(i, j, c);
      }
  TT r(p, n, {Slot::Su, Slot::Sd, Slot::Td});
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < p; ++c) {
        Taylor s(0.0);
        for (int i = 0; i < n; ++i) {
          if (zero(gi(k, i)) || zero(dg(i, j, c))) continue;
          s += gi(k, i) * dg(i, j, c);
        }
        r(k, j, c) = s * 0.5;
      }
  G_ = std::move(r);
  return *G_;
}

const TT& PointGeometry::L() {
  if (L_) return *L_;
  const int p = d_.p, n = d_.n;
  const TT& gg = g();
  const TT& gi = g_inv();
  TT dg(p, n, {Slot::Sd, Slot::Sd, Slot::Sd});
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        dg(i, j, k) = dx(gg(i, j), k);
        dg(j, i, k) = dg(i, j, k);
      }
  TT r(p, n, {Slot::Su, Slot::Sd, Slot::Sd});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        Taylor s(0.0);
        for (int m = 0; m < n; ++m) {
          if (zero(gi(i, m))) continue;
          s += gi(i, m) * (dg(m, j, k) + dg(m, k, j) - dg(j, k, m));
        }
        r(i, j, k) = s * 0.5;
        r(i, k, j) = r(i, j, k);
      }
  L_ = std::move(r);
  return *L_;
}

const TT& PointGeometry::C() {
  if (C_) return *C_;
  const int p = d_.p, n = d_.n;
  const TT& gg = g();
  const TT& gi = g_inv();
  // dg(i,j,k,c) = d g_ij / d xs^k_c
  TT dg(p, n, {Slot::Sd, Slot::Sd, Slot::Vd});
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int c = 0; c < p; ++c) {
          dg(i, j, k, c) = dv(gg(i, j), k, c);
          dg(j, i, k, c) = dg(i, j, k, c);
        }
  TT r(p, n, {Slot::Su, Slot::Sd, Slot::Vd});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k)
        for (int c = 0; c < p; ++c) {
          Taylor s(0.0);
          for (int m = 0; m < n; ++m) {
            if (zero(gi(i, m))) continue;
            const Taylor t = dg(m, j, k, c) + dg(m, k, j, c) - dg(j, k, m, c);
            if (!zero(t)) s += gi(i, m) * t;
          }
          r(i, j, k, c) = s * 0.5;
          r(i, k, j, c) = r(i, j, k, c);
        }
  C_ = std::move(r);
  return *C_;
}

TT PointGeometry::cov(const TT& a, DerivKind kind) {
  const std::size_t rank = a.rank();
  std::vector<Axis> axes = a.axes();
  switch (kind) {
    case DerivKind::temporal: axes.push_back({Family::temporal, Variance::down, false}); break;
    case DerivKind::spatial: axes.push_back({Family::spatial, Variance::down, false}); break;
    case DerivKind::vertical:
      axes.push_back({Family::spatial, Variance::down, true});
      axes.push_back({Family::temporal, Variance::up, true});
      break;
  }
  TT r(d_.p, d_.n, axes);
  // Only the coefficient families the derivative needs.
  const TT* hc = nullptr;
  const TT* gc = nullptr;
  const TT* lc = nullptr;
  const TT* cc = nullptr;
  if (kind == DerivKind::temporal) {
    hc = &H();
    gc = &G();
  } else if (kind == DerivKind::spatial) {
    lc = &L();
  } else {
    cc = &C();
  }
  std::vector<int> base(rank);
  for (std::size_t flat = 0; flat < r.size(); ++flat) {
    const std::vector<int> idx = r.unflatten(flat);
    std::copy(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(rank), base.begin());
    const int dir = idx[rank];
    const int gam = kind == DerivKind::vertical ? idx[rank + 1] : 0;
    const Taylor& comp = a.at(base);
    Taylor s = kind == DerivKind::temporal ? dt(comp, dir) : kind == DerivKind::spatial ? dx(comp, dir) : dv(comp, dir, gam);
    for (std::size_t q = 0; q < rank; ++q) {
      const Axis& ax = a.axis(q);
      const int v = base[q];
      const int ext = a.extent(q);
      const bool up = ax.variance == Variance::up;
      std::vector<int> other = base;
      for (int t = 0; t < ext; ++t) {
        const Taylor* coef = nullptr;
        if (ax.family == Family::temporal) {
          if (kind != DerivKind::temporal) break;
          coef = up ? &(*hc)(v, t, dir) : &(*hc)(t, v, dir);
        } else if (kind == DerivKind::temporal) {
          coef = up ? &(*gc)(v, t, dir) : &(*gc)(t, v, dir);
        } else if (kind == DerivKind::spatial) {
          coef = up ? &(*lc)(v, t, dir) : &(*lc)(t, v, dir);
        } else {
          coef = up ? &(*cc)(v, t, dir, gam) : &(*cc)(t, v, dir, gam);
        }
        if (zero(*coef)) continue;
        other[q] = t;
        const Taylor& x = a.at(other);
        if (zero(x)) continue;
        if (up) {
          s += *coef * x;
        } else {
          s -= *coef * x;
        }
      }
    }
    r[flat] = std::move(s);
  }
  return r;
}

TT PointGeometry::T() {
  const TT& gc = G();
  TT r(d_.p, d_.n, {Slot::Su, Slot::Td, Slot::Sd});
  for (int m = 0; m < d_.n; ++m)
    for (int a = 0; a < d_.p; ++a)
      for (int j = 0; j < d_.n; ++j) r(m, a, j) = -gc(m, j, a);
  return r;
}

const TT& PointGeometry::P_Ma() {
  if (PMa_) return *PMa_;
  const int p = d_.p, n = d_.n;
  const TT& mm = M();
  const TT& gc = G();
  const TT& hc = H();
  TT r(p, n, {Slot::Vu, Slot::Td, Slot::Vd});
  for (int m = 0; m < n; ++m)
    for (int mu = 0; mu < p; ++mu)
      for (int a = 0; a < p; ++a)
        for (int j = 0; j < n; ++j)
          for (int b = 0; b < p; ++b) {
            Taylor s = dv(mm(m, mu, a), j, b);
            if (b == mu) s -= gc(m, j, a);
            if (m == j) s += hc(b, mu, a);
            r(m, mu, a, j, b) = std::move(s);
          }
  PMa_ = std::move(r);
  return *PMa_;
}

const TT& PointGeometry::P_Ni() {
  if (PNi_) return *PNi_;
  const int p = d_.p, n = d_.n;
  const TT& nn = N();
  const TT& lc = L();
  TT r(p, n, {Slot::Vu, Slot::Sd, Slot::Vd});
  for (int m = 0; m < n; ++m)
    for (int mu = 0; mu < p; ++mu)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int b = 0; b < p; ++b) {
            Taylor s = dv(nn(m, mu, i), j, b);
            if (b == mu) s -= lc(m, j, i);
            r(m, mu, i, j, b) = std::move(s);
          }
  PNi_ = std::move(r);
  return *PNi_;
}

const TT& PointGeometry::R_tt() {
  if (Rtt_) return *Rtt_;
  const int p = d_.p, n = d_.n;
  const TT& mm = M();
  TT r(p, n, {Slot::Vu, Slot::Td, Slot::Td});
  for (int m = 0; m < n; ++m)
    for (int mu = 0; mu < p; ++mu)
      for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b) {
          r(m, mu, a, b) = dt(mm(m, mu, a), b) - dt(mm(m, mu, b), a);
          r(m, mu, b, a) = -r(m, mu, a, b);
        }
  Rtt_ = std::move(r);
  return *Rtt_;
}

const TT& PointGeometry::R_tx() {
  if (Rtx_) return *Rtx_;
  const int p = d_.p, n = d_.n;
  const TT& mm = M();
  const TT& nn = N();
  TT r(p, n, {Slot::Vu, Slot::Td, Slot::Sd});
  for (int m = 0; m < n; ++m)
    for (int mu = 0; mu < p; ++mu)
      for (int a = 0; a < p; ++a)
        for (int j = 0; j < n; ++j) r(m, mu, a, j) = dx(mm(m, mu, a), j) - dt(nn(m, mu, j), a);
  Rtx_ = std::move(r);
  return *Rtx_;
}

const TT& PointGeometry::R_xx() {
  if (Rxx_) return *Rxx_;
  const int p = d_.p, n = d_.n;
  const TT& nn = N();
  TT r(p, n, {Slot::Vu, Slot::Sd, Slot::Sd});
  for (int m = 0; m < n; ++m)
    for (int mu = 0; mu < p; ++mu)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          r(m, mu, i, j) = dx(nn(m, mu, i), j) - dx(nn(m, mu, j), i);
          r(m, mu, j, i) = -r(m, mu, i, j);
        }
  Rxx_ = std::move(r);
  return *Rxx_;
}

const TT& PointGeometry::S_t() {
  if (St_) return *St_;
  const int p = d_.p, n = d_.n;
  const TT& cc = C();
  TT r(p, n, {Slot::Vu, Slot::Vd, Slot::Vd});
  for (int m = 0; m < n; ++m)
    for (int mu = 0; mu < p; ++mu)
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < p; ++a)
          for (int j = 0; j < n; ++j)
            for (int b = 0; b < p; ++b) {
              Taylor s(0.0);
              if (a == mu) s += cc(m, i, j, b);
              if (b == mu) s -= cc(m, j, i, a);
              r(m, mu, i, a, j, b) = std::move(s);
            }
  St_ = std::move(r);
  return *St_;
}

const TT& PointGeometry::Hc() {
  if (Hc_) return *Hc_;
  const int p = d_.p;
  const TT& hc = H();
  TT r(p, d_.n, {Slot::Tu, Slot::Td, Slot::Td, Slot::Td});
  for (int a = 0; a < p; ++a)
    for (int e = 0; e < p; ++e)
      for (int b = 0; b < p; ++b)
        for (int c = 0; c < p; ++c) {
          if (b == c) continue;
          if (c < b) {
            r(a, e, b, c) = -r(a, e, c, b);
            continue;
          }
          Taylor s = hc(a, e, b).derivative(vt(d_, c)) - hc(a, e, c).derivative(vt(d_, b));
          for (int m = 0; m < p; ++m) s += hc(m, e, b) * hc(a, m, c) - hc(m, e, c) * hc(a, m, b);
          r(a, e, b, c) = std::move(s);
        }
  Hc_ = std::move(r);
  return *Hc_;
}

const TT& PointGeometry::Rc_tt() {
  if (Rctt_) return *Rctt_;
  const int p = d_.p, n = d_.n;
  const TT& gc = G();
  const TT& cc = C();
  const TT& tor = R_tt();
  TT r(p, n, {Slot::Su, Slot::Sd, Slot::Td, Slot::Td});
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < p; ++b)
        for (int c = b + 1; c < p; ++c) {
          Taylor s = dt(gc(l, i, b), c) - dt(gc(l, i, c), b);
          for (int m = 0; m < n; ++m) {
            s += gc(m, i, b) * gc(l, m, c) - gc(m, i, c) * gc(l, m, b);
            for (int mu = 0; mu < p; ++mu) {
              if (zero(cc(l, i, m, mu)) || zero(tor(m, mu, b, c))) continue;
              s += cc(l, i, m, mu) * tor(m, mu, b, c);
            }
          }
          r(l, i, b, c) = s;
          r(l, i, c, b) = -s;
        }
  Rctt_ = std::move(r);
  return *Rctt_;
}

const TT& PointGeometry::Rc_tx() {
  if (Rctx_) return *Rctx_;
  const int p = d_.p, n = d_.n;
  const TT& gc = G();
  const TT& lc = L();
  const TT& cc = C();
  const TT& tor = R_tx();
  TT r(p, n, {Slot::Su, Slot::Sd, Slot::Td, Slot::Sd});
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < p; ++b)
        for (int k = 0; k < n; ++k) {
          Taylor s = dx(gc(l, i, b), k) - dt(lc(l, i, k), b);
          for (int m = 0; m < n; ++m) {
            s += gc(m, i, b) * lc(l, m, k) - lc(m, i, k) * gc(l, m, b);
            for (int mu = 0; mu < p; ++mu) {
              if (zero(cc(l, i, m, mu)) || zero(tor(m, mu, b, k))) continue;
              s += cc(l, i, m, mu) * tor(m, mu, b, k);
            }
          }
          r(l, i, b, k) = std::move(s);
        }
  Rctx_ = std::move(r);
  return *Rctx_;
}

const TT& PointGeometry::Rc_xx() {
  if (Rcxx_) return *Rcxx_;
  const int p = d_.p, n = d_.n;
  const TT& lc = L();
  const TT& cc = C();
  const TT& tor = R_xx();
  TT r(p, n, {Slot::Su, Slot::Sd, Slot::Sd, Slot::Sd});
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          Taylor s = dx(lc(l, i, j), k) - dx(lc(l, i, k), j);
          for (int m = 0; m < n; ++m) {
            s += lc(m, i, j) * lc(l, m, k) - lc(m, i, k) * lc(l, m, j);
            for (int mu = 0; mu < p; ++mu) {
              if (zero(cc(l, i, m, mu)) || zero(tor(m, mu, j, k))) continue;
              s += cc(l, i, m, mu) * tor(m, mu, j, k);
            }
          }
          r(l, i, j, k) = s;
          r(l, i, k, j) = -s;
        }
  Rcxx_ = std::move(r);
  return *Rcxx_;
}

const TT& PointGeometry::Pc_t() {
  if (Pct_) return *Pct_;
  const int p = d_.p, n = d_.n;
  const TT& gc = G();
  const TT& cc = C();
  const TT& pm = P_Ma();
  const TT dC = cov(cc, DerivKind::temporal);  // (l,i,k,c,b)
  TT r(p, n, {Slot::Su, Slot::Sd, Slot::Td, Slot::Vd});
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < p; ++b)
        for (int k = 0; k < n; ++k)
          for (int c = 0; c < p; ++c) {
            Taylor s = dv(gc(l, i, b), k, c) - dC(l, i, k, c, b);
            for (int m = 0; m < n; ++m)
              for (int mu = 0; mu < p; ++mu) {
                if (zero(cc(l, i, m, mu))) continue;
                s += cc(l, i, m, mu) * pm(m, mu, b, k, c);
              }
            r(l, i, b, k, c) = std::move(s);
          }
  Pct_ = std::move(r);
  return *Pct_;
}

const TT& PointGeometry::Pc_x() {
  if (Pcx_) return *Pcx_;
  const int p = d_.p, n = d_.n;
  const TT& lc = L();
  const TT& cc = C();
  const TT& pn = P_Ni();
  const TT dC = cov(cc, DerivKind::spatial);  // (l,i,k,c,j)
  TT r(p, n, {Slot::Su, Slot::Sd, Slot::Sd, Slot::Vd});
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int c = 0; c < p; ++c) {
            Taylor s = dv(lc(l, i, j), k, c) - dC(l, i, k, c, j);
            for (int m = 0; m < n; ++m)
              for (int mu = 0; mu < p; ++mu) {
                if (zero(cc(l, i, m, mu))) continue;
                s += cc(l, i, m, mu) * pn(m, mu, j, k, c);
              }
            r(l, i, j, k, c) = std::move(s);
          }
  Pcx_ = std::move(r);
  return *Pcx_;
}

const TT& PointGeometry::Sc() {
  if (Sc_) return *Sc_;
  const int p = d_.p, n = d_.n;
  const TT& cc = C();
  TT r(p, n, {Slot::Su, Slot::Sd, Slot::Vd, Slot::Vd});
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < p; ++b)
          for (int k = 0; k < n; ++k)
            for (int c = 0; c < p; ++c) {
              Taylor s = dv(cc(l, i, j, b), k, c) - dv(cc(l, i, k, c), j, b);
              for (int m = 0; m < n; ++m) {
                s += cc(m, i, j, b) * cc(l, m, k, c) - cc(m, i, k, c) * cc(l, m, j, b);
              }
              r(l, i, j, b, k, c) = std::move(s);
            }
  Sc_ = std::move(r);
  return *Sc_;
}

TT PointGeometry::ric_H() {
  const TT& hc = Hc();
  TT r(d_.p, d_.n, {Slot::Td, Slot::Td});
  for (int a = 0; a < d_.p; ++a)
    for (int b = 0; b < d_.p; ++b) {
      Taylor s(0.0);
      for (int m = 0; m < d_.p; ++m) s += hc(m, a, b, m);
      r(a, b) = std::move(s);
    }
  return r;
}

TT PointGeometry::ric_P_i_j() {
  const TT& pc = Pc_x();
  TT r(d_.p, d_.n, {Slot::Sd, Slot::Vd});
  for (int i = 0; i < d_.n; ++i)
    for (int j = 0; j < d_.n; ++j)
      for (int a = 0; a < d_.p; ++a) {
        Taylor s(0.0);
        for (int m = 0; m < d_.n; ++m) s += pc(m, i, m, j, a);
        r(i, j, a) = -s;
      }
  return r;
}

TT PointGeometry::ric_P_ij() {
  const TT& pc = Pc_x();
  TT r(d_.p, d_.n, {Slot::Vd, Slot::Sd});
  for (int i = 0; i < d_.n; ++i)
    for (int a = 0; a < d_.p; ++a)
      for (int j = 0; j < d_.n; ++j) {
        Taylor s(0.0);
        for (int m = 0; m < d_.n; ++m) s += pc(m, i, j, m, a);
        r(i, a, j) = std::move(s);
      }
  return r;
}

TT PointGeometry::ric_P_ib() {
  const TT& pc = Pc_t();
  TT r(d_.p, d_.n, {Slot::Vd, Slot::Td});
  for (int i = 0; i < d_.n; ++i)
    for (int a = 0; a < d_.p; ++a)
      for (int b = 0; b < d_.p; ++b) {
        Taylor s(0.0);
        for (int m = 0; m < d_.n; ++m) s += pc(m, i, b, m, a);
        r(i, a, b) = std::move(s);
      }
  return r;
}

TT PointGeometry::ric_S() {
  const TT& sc = Sc();
  TT r(d_.p, d_.n, {Slot::Vd, Slot::Vd});
  for (int i = 0; i < d_.n; ++i)
    for (int a = 0; a < d_.p; ++a)
      for (int j = 0; j < d_.n; ++j)
        for (int b = 0; b < d_.p; ++b) {
          // S^{(a)(b)}_{(i)(j)} = S^{m(b)(a)}_{i(j)(m)}
          Taylor s(0.0);
          for (int m = 0; m < d_.n; ++m) s += sc(m, i, j, b, m, a);
          r(i, a, j, b) = std::move(s);
        }
  return r;
}

TT PointGeometry::ric_R_ia() {
  const TT& rc = Rc_tx();
  TT r(d_.p, d_.n, {Slot::Sd, Slot::Td});
  for (int i = 0; i < d_.n; ++i)
    for (int a = 0; a < d_.p; ++a) {
      Taylor s(0.0);
      for (int m = 0; m < d_.n; ++m) s += rc(m, i, a, m);
      r(i, a) = std::move(s);
    }
  return r;
}

TT PointGeometry::ric_R_ij() {
  const TT& rc = Rc_xx();
  TT r(d_.p, d_.n, {Slot::Sd, Slot::Sd});
  for (int i = 0; i < d_.n; ++i)
    for (int j = 0; j < d_.n; ++j) {
      Taylor s(0.0);
      for (int m = 0; m < d_.n; ++m) s += rc(m, i, j, m);
      r(i, j) = std::move(s);
    }
  return r;
}

Taylor PointGeometry::scalar_H() {
  const TT rh = ric_H();
  const TT& hi = h_inv();
  Taylor s(0.0);
  for (int a = 0; a < d_.p; ++a)
    for (int b = 0; b < d_.p; ++b) s += hi(a, b) * rh(a, b);
  return s;
}

Taylor PointGeometry::scalar_R() {
  const TT rr = ric_R_ij();
  const TT& gi = g_inv();
  Taylor s(0.0);
  for (int i = 0; i < d_.n; ++i)
    for (int j = 0; j < d_.n; ++j) s += gi(i, j) * rr(i, j);
  return s;
}

Taylor PointGeometry::scalar_S() {
  const TT rs = ric_S();
  const TT& gi = g_inv();
  const TT& hh = h();
  Taylor s(0.0);
  for (int i = 0; i < d_.n; ++i)
    for (int j = 0; j < d_.n; ++j) {
      if (zero(gi(i, j))) continue;
      Taylor inner(0.0);
      for (int a = 0; a < d_.p; ++a)
        for (int b = 0; b < d_.p; ++b) inner += hh(a, b) * rs(i, a, j, b);
      s += gi(i, j) * inner;
    }
  return s;
}

TT PointGeometry::half_hessian(const Taylor& f) const {
  const int p = d_.p, n = d_.n;
  TT r(p, n, {Slot::Vd, Slot::Vd});
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a) {
      const Taylor fi = f.derivative(vs(d_, i, a));
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < p; ++b) r(i, a, j, b) = fi.derivative(vs(d_, j, b)) * 0.5;
    }
  // The exact series agree; symmetrize to remove rounding in the last bit.
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a)
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < p; ++b) {
          if (i * p + a >= j * p + b) continue;
          const Taylor avg = (r(i, a, j, b) + r(j, b, i, a)) * 0.5;
          r(i, a, j, b) = avg;
          r(j, b, i, a) = avg;
        }
  return r;
}

Taylor PointGeometry::energy() {
  const TT& hi = h_inv();
  const TT& gg = g();
  Taylor s(0.0);
  for (int mu = 0; mu < d_.p; ++mu)
    for (int nu = 0; nu < d_.p; ++nu) {
      if (zero(hi(mu, nu))) continue;
      Taylor inner(0.0);
      for (int m = 0; m < d_.n; ++m)
        for (int r = 0; r < d_.n; ++r) {
          if (zero(gg(m, r))) continue;
          inner += gg(m, r) * slope(m, mu) * slope(r, nu);
        }
      s += hi(mu, nu) * inner;
    }
  return s;
}

DTensor<double> spatial_christoffel(const GeometryContext& ctx, const JetPoint& pt, bool generalized) {
  PointGeometry pg(ctx, pt, 1);
  const Dims d = ctx.dims;
  if (generalized) {
    const TT& gg = pg.g();
    bool depends = ctx.g_source == GSource::direct ? (ctx.g.deps & dep_xs) != 0 : false;
    if (ctx.g_source == GSource::lagrangian) {
      double scale = 1.0, worst = 0.0;
      for (const Taylor& c : gg.data()) scale = std::max(scale, std::fabs(c.value()));
      for (const Taylor& c : gg.data())
        for (int k = 0; k < d.n; ++k)
          for (int a = 0; a < d.p; ++a) worst = std::max(worst, std::fabs(c.derivative(vs(d, k, a)).value()));
      depends = worst > 1e-9 * scale;
    }
    if (depends) {
      throw Error(ErrorCode::regularity_violation, "generalized Christoffel symbols need g independent of the directions");
    }
    return values(christoffel_x(d, gg, pg.g_inv()));
  }
  if (!ctx.phi.eval) throw Error(ErrorCode::config, "no static spatial metric phi in this space");
  const JetVars vars(d, pt, 1);
  const TT ph = from_flat(d, {Slot::Sd, Slot::Sd}, eval_tensor(ctx.phi, vars));
  return values(christoffel_x(d, ph, sym_inverse(ph)));
}

MetricFromL vertical_metric_from_L(const GeometryContext& ctx, const JetPoint& pt) {
  if (ctx.g_source != GSource::lagrangian) throw Error(ErrorCode::config, "g is not derived from a Lagrangian");
  const Dims d = ctx.dims;
  PointGeometry pg(ctx, pt, 0);
  const JetVars lv(d, pt, 2);
  const TT b = pg.half_hessian(evaluate(ctx.lagrangian, lv));
  MetricFromL out{values(b), DTensor<double>(d.p, d.n, {Slot::Sd, Slot::Sd})};
  const DTensor<double> hv = values(pg.h());
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j) {
      double s = 0.0;
      for (int m = 0; m < d.p; ++m)
        for (int nu = 0; nu < d.p; ++nu) s += hv(m, nu) * out.gvert(i, m, j, nu);
      out.g_canonical(i, j) = s / d.p;
    }
  try {
    detail::check_symmetric_invertible(out.g_canonical.data(), d.n, "canonical g");
  } catch (const SingularMetricError& e) {
    throw Error(ErrorCode::regularity_violation, std::string("canonical g from L is singular: ") + e.what());
  }
  return out;
}

double energy_lagrangian(const GeometryContext& ctx, const JetPoint& pt) {
  PointGeometry pg(ctx, pt, 0);
  return pg.energy().value();
}

double adapted_deriv(const GeometryContext& ctx, const ScalarField& f, const JetPoint& pt, CoordId direction) {
  PointGeometry pg(ctx, pt, 1);
  const Taylor v = evaluate(f, pg.vars());
  switch (direction.kind) {
    case CoordKind::t: return pg.dt(v, direction.i).value();
    case CoordKind::x: return pg.dx(v, direction.i).value();
    case CoordKind::xs: break;
  }
  return pg.dv(v, direction.i, direction.a).value();
}

namespace {

Verdict regularity_from_blocks(Dims d, const std::vector<DTensor<double>>& blocks,
                               const std::vector<DTensor<double>>& hinvs, const std::vector<DTensor<double>>& hs,
                               double tol) {
  Verdict v;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const DTensor<double>& b = blocks[k];
    DTensor<double> ghat(d.p, d.n, {Slot::Sd, Slot::Sd});
    for (int i = 0; i < d.n; ++i)
      for (int j = 0; j < d.n; ++j) {
        double s = 0.0;
        for (int m = 0; m < d.p; ++m)
          for (int nu = 0; nu < d.p; ++nu) s += hs[k](m, nu) * b(i, m, j, nu);
        ghat(i, j) = s / d.p;
      }
    const double scale = std::max(1.0, max_abs(b.data()));
    double worst = 0.0;
    for (int i = 0; i < d.n; ++i)
      for (int a = 0; a < d.p; ++a)
        for (int j = 0; j < d.n; ++j)
          for (int c = 0; c < d.p; ++c)
            worst = std::max(worst, std::fabs(b(i, a, j, c) - hinvs[k](a, c) * ghat(i, j)) / scale);
    if (k == 0) v.extracted = ghat;
    if (worst > v.max_deviation || k == 0) {
      v.max_deviation = worst;
      v.witness = k;
    }
  }
  v.ok = v.max_deviation <= tol;
  v.detail = v.ok ? "Kronecker h-regular" : "half-Hessian blocks are not proportional to h^{ab}";
  return v;
}

}  // namespace

Verdict kronecker_regularity_check(const GeometryContext& ctx, const std::vector<JetPoint>& pts,
                                   RegularityTarget target, double tol) {
  if (target == RegularityTarget::lagrangian) {
    if (!ctx.lagrangian.eval) throw Error(ErrorCode::config, "this space has no Lagrangian");
    return kronecker_regularity_check(ctx, ctx.lagrangian, pts, tol);
  }
  const Dims d = ctx.dims;
  std::vector<DTensor<double>> blocks, hinvs, hs;
  for (const JetPoint& pt : pts) {
    PointGeometry pg(ctx, pt, 2);
    blocks.push_back(values(pg.half_hessian(pg.energy())));
    hinvs.push_back(values(pg.h_inv()));
    hs.push_back(values(pg.h()));
  }
  return regularity_from_blocks(d, blocks, hinvs, hs, tol);
}

Verdict kronecker_regularity_check(const GeometryContext& ctx, const ScalarField& lagrangian,
                                   const std::vector<JetPoint>& pts, double tol) {
  const Dims d = ctx.dims;
  std::vector<DTensor<double>> blocks, hinvs, hs;
  for (const JetPoint& pt : pts) {
    PointGeometry pg(ctx, pt, 0);
    const JetVars lv(d, pt, 2);
    blocks.push_back(values(pg.half_hessian(evaluate(lagrangian, lv))));
    hinvs.push_back(values(pg.h_inv()));
    hs.push_back(values(pg.h()));
  }
  return regularity_from_blocks(d, blocks, hinvs, hs, tol);
}

Verdict nlc_torsion_free_check(const GeometryContext& ctx, const std::vector<JetPoint>& pts, double tol) {
  const Dims d = ctx.dims;
  Verdict v;
  for (std::size_t ip = 0; ip < pts.size(); ++ip) {
    PointGeometry pg(ctx, pts[ip], std::min(2, ctx.diff.max_order));
    const TT& nn = pg.N();
    // dn(i,a,j,k,c) = dN^{(i)}_{(a)j} / dxs^k_c
    DTensor<double> dn(d.p, d.n, {Slot::Vu, Slot::Sd, Slot::Vd});
    for (int i = 0; i < d.n; ++i)
      for (int a = 0; a < d.p; ++a)
        for (int j = 0; j < d.n; ++j)
          for (int k = 0; k < d.n; ++k)
            for (int c = 0; c < d.p; ++c) dn(i, a, j, k, c) = pg.dv(nn(i, a, j), k, c).value();
    const double scale = std::max(1.0, max_abs(dn.data()));
    double worst = 0.0;
    for (int i = 0; i < d.n; ++i)
      for (int a = 0; a < d.p; ++a)
        for (int j = 0; j < d.n; ++j)
          for (int k = j + 1; k < d.n; ++k)
            for (int c = 0; c < d.p; ++c)
              worst = std::max(worst, std::fabs(dn(i, a, j, k, c) - dn(i, a, k, j, c)) / scale);
    if (worst > v.max_deviation || ip == 0) {
      v.max_deviation = worst;
      v.witness = ip;
    }
  }
  v.ok = v.max_deviation <= tol;
  v.detail = v.ok ? "torsion-free" : "dN/dxs is not symmetric in its spatial indices";
  return v;
}

int signature_of(const DTensor<double>& m) {
  int neg = 0;
  for (double e : sym_eigenvalues(m)) neg += e < 0.0 ? 1 : 0;
  return neg;
}

}  // namespace jetlag

namespace jetlag {

namespace {

double max_abs_t(const TT& a) {
  double m = 0.0;
  for (const Taylor& c : a.data()) m = std::max(m, std::fabs(c.value()));
  return m;
}

// Lower the leading upper spatial index of a block with g into position 1:
// out(i, j, rest...) = g_jm a(m, i, rest...), then max |out(i,j,..) + out(j,i,..)|.
double lowered_antisymmetry(const TT& a, const TT& metric) {
  const int ext = a.extent(0);
  const std::size_t rest = a.size() / static_cast<std::size_t>(ext * ext);
  double worst = 0.0;
  auto lowered = [&](int i, int j, std::size_t r) {
    double s = 0.0;
    for (int m = 0; m < ext; ++m) {
      s += metric(j, m).value() * a[static_cast<std::size_t>(m * ext + i) * rest + r].value();
    }
    return s;
  };
  for (int i = 0; i < ext; ++i)
    for (int j = i; j < ext; ++j)
      for (std::size_t r = 0; r < rest; ++r) worst = std::max(worst, std::fabs(lowered(i, j, r) + lowered(j, i, r)));
  return worst;
}

}  // namespace

std::vector<NamedValue> metricity_residuals(PointGeometry& pg) {
  const TT& g = pg.g();
  const TT& h = pg.h();
  return {
      {"g_ij|k", max_abs_t(pg.cov(g, DerivKind::spatial))},
      {"g_ij|(c)(k)", max_abs_t(pg.cov(g, DerivKind::vertical))},
      {"h_ab/c", max_abs_t(pg.cov(h, DerivKind::temporal))},
      {"h_ab|k", max_abs_t(pg.cov(h, DerivKind::spatial))},
      {"h_ab|(c)(k)", max_abs_t(pg.cov(h, DerivKind::vertical))},
      {"g_ij/c", max_abs_t(pg.cov(g, DerivKind::temporal))},
  };
}

std::vector<NamedValue> antisymmetry_residuals(PointGeometry& pg) {
  const TT& g = pg.g();
  return {
      {"H_abcd", lowered_antisymmetry(pg.Hc(), pg.h())},
      {"R_ijbc", lowered_antisymmetry(pg.Rc_tt(), g)},
      {"R_ijbk", lowered_antisymmetry(pg.Rc_tx(), g)},
      {"R_ijkl", lowered_antisymmetry(pg.Rc_xx(), g)},
      {"P_ijb(k)", lowered_antisymmetry(pg.Pc_t(), g)},
      {"P_ijk(l)", lowered_antisymmetry(pg.Pc_x(), g)},
      {"S_ij(k)(l)", lowered_antisymmetry(pg.Sc(), g)},
  };
}

std::vector<NamedValue> degenerate_block_residuals(PointGeometry& pg) {
  const Dims d = pg.dims();
  const int p = d.p, n = d.n, q = n * p;
  const TT& hc = pg.H();
  const TT& gc = pg.G();
  const TT& lc = pg.L();
  const TT& cc = pg.C();
  // Composite index A = (l, a) -> l*p + a.
  auto kt = [&](int A, int B, int b) {
    const int l = A / p, al = A % p, i = B / p, et = B % p;
    Taylor s(0.0);
    if (al == et) s += gc(l, i, b);
    if (l == i) s += hc(al, et, b);
    return s;
  };
  auto kx = [&](int A, int B, int k) {
    return (A % p) == (B % p) ? lc(A / p, B / p, k) : Taylor(0.0);
  };
  auto kv = [&](int A, int B, int m, int mu) {
    return (A % p) == (B % p) ? cc(A / p, B / p, m, mu) : Taylor(0.0);
  };
  const TT& rtt = pg.R_tt();
  const TT& rtx = pg.R_tx();
  const TT& rxx = pg.R_xx();
  double w_tt = 0.0, w_tx = 0.0, w_xx = 0.0, w_vv = 0.0;
  for (int A = 0; A < q; ++A)
    for (int B = 0; B < q; ++B) {
      const int l = A / p, al = A % p, i = B / p, et = B % p;
      for (int b = 0; b < p; ++b)
        for (int c = 0; c < p; ++c) {
          Taylor s = pg.dt(kt(A, B, b), c) - pg.dt(kt(A, B, c), b);
          for (int M = 0; M < q; ++M) s += kt(M, B, b) * kt(A, M, c) - kt(M, B, c) * kt(A, M, b);
          for (int m = 0; m < n; ++m)
            for (int mu = 0; mu < p; ++mu) s += kv(A, B, m, mu) * rtt(m, mu, b, c);
          double expect = 0.0;
          if (al == et) expect += pg.Rc_tt()(l, i, b, c).value();
          if (l == i) expect += pg.Hc()(al, et, b, c).value();
          w_tt = std::max(w_tt, std::fabs(s.value() - expect));
        }
      for (int b = 0; b < p; ++b)
        for (int k = 0; k < n; ++k) {
          Taylor s = pg.dx(kt(A, B, b), k) - pg.dt(kx(A, B, k), b);
          for (int M = 0; M < q; ++M) s += kt(M, B, b) * kx(A, M, k) - kx(M, B, k) * kt(A, M, b);
          for (int m = 0; m < n; ++m)
            for (int mu = 0; mu < p; ++mu) s += kv(A, B, m, mu) * rtx(m, mu, b, k);
          const double expect = al == et ? pg.Rc_tx()(l, i, b, k).value() : 0.0;
          w_tx = std::max(w_tx, std::fabs(s.value() - expect));
        }
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          Taylor s = pg.dx(kx(A, B, j), k) - pg.dx(kx(A, B, k), j);
          for (int M = 0; M < q; ++M) s += kx(M, B, j) * kx(A, M, k) - kx(M, B, k) * kx(A, M, j);
          for (int m = 0; m < n; ++m)
            for (int mu = 0; mu < p; ++mu) s += kv(A, B, m, mu) * rxx(m, mu, j, k);
          const double expect = al == et ? pg.Rc_xx()(l, i, j, k).value() : 0.0;
          w_xx = std::max(w_xx, std::fabs(s.value() - expect));
        }
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < p; ++b)
          for (int k = 0; k < n; ++k)
            for (int c = 0; c < p; ++c) {
              Taylor s = pg.dv(kv(A, B, j, b), k, c) - pg.dv(kv(A, B, k, c), j, b);
              for (int M = 0; M < q; ++M) s += kv(M, B, j, b) * kv(A, M, k, c) - kv(M, B, k, c) * kv(A, M, j, b);
              const double expect = al == et ? pg.Sc()(l, i, j, b, k, c).value() : 0.0;
              w_vv = std::max(w_vv, std::fabs(s.value() - expect));
            }
    }
  return {{"R^(l)(a)_(e)(i)bc", w_tt}, {"R^(l)(a)_(e)(i)bk", w_tx}, {"R^(l)(a)_(e)(i)jk", w_xx},
          {"S^(l)(a)(b)(c)_(e)(i)(j)(k)", w_vv}};
}

}  // namespace jetlag
