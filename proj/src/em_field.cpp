#include "jetlag/em_field.hpp"

#include <algorithm>
#include <cmath>

#include "jetlag/error.hpp"
#include "jetlag/parallel.hpp"

namespace jetlag {

namespace {

using TT = DTensor<Taylor>;
using DT = DTensor<double>;

double val(const Taylor& t) { return t.value(); }

double diff_max(const TT& a, const TT& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k].value() - b[k].value()));
  return m;
}

// G-lowering of a raw deflection whose first two axes are (i, a) of Vu:
// out(i,a,rest) = h^{am} g_{ir} raw(r,m,rest).
TT lower_pair(PointGeometry& pg, const TT& raw) {
  const Dims d = pg.dims();
  std::vector<Axis> axes = raw.axes();
  axes[0].variance = Variance::down;
  axes[1].variance = Variance::up;
  TT out(d.p, d.n, axes);
  const TT& hi = pg.h_inv();
  const TT& g = pg.g();
  const std::size_t tail = raw.size() / static_cast<std::size_t>(d.n * d.p);
  for (int i = 0; i < d.n; ++i)
    for (int a = 0; a < d.p; ++a)
      for (std::size_t q = 0; q < tail; ++q) {
        Taylor s(0.0);
        for (int r = 0; r < d.n; ++r)
          for (int m = 0; m < d.p; ++m) s += hi(a, m) * g(i, r) * raw[static_cast<std::size_t>(r * d.p + m) * tail + q];
        out[static_cast<std::size_t>(i * d.p + a) * tail + q] = std::move(s);
      }
  return out;
}

void fold_scale(double& s, const Taylor& t) { s = std::max(s, std::fabs(t.value())); }
void fold_scale(double& s, double t) { s = std::max(s, std::fabs(t)); }

}  // namespace

DeflectionSet deflection_set(PointGeometry& pg) {
  const Dims d = pg.dims();
  DeflectionSet ds;
  const TT& x = pg.liouville();
  ds.raw_t = pg.cov(x, DerivKind::temporal);
  ds.raw_x = pg.cov(x, DerivKind::spatial);
  ds.raw_v = pg.cov(x, DerivKind::vertical);

  const TT& hi = pg.h_inv();
  const TT& g = pg.g();
  TT xl(d.p, d.n, {Slot::Vd});
  for (int i = 0; i < d.n; ++i)
    for (int a = 0; a < d.p; ++a) {
      Taylor s(0.0);
      for (int m = 0; m < d.p; ++m)
        for (int r = 0; r < d.n; ++r) s += hi(a, m) * g(i, r) * x(r, m);
      xl(i, a) = std::move(s);
    }
  ds.x_low = std::move(xl);
  ds.Dbar = pg.cov(ds.x_low, DerivKind::temporal);
  ds.D = pg.cov(ds.x_low, DerivKind::spatial);
  ds.d = pg.cov(ds.x_low, DerivKind::vertical);
  return ds;
}

std::vector<NamedValue> deflection_path_residuals(PointGeometry& pg, const DeflectionSet& ds) {
  const Dims d = pg.dims();
  const int p = d.p, n = d.n;
  const TT& G = pg.G();
  const TT& L = pg.L();
  const TT& C = pg.C();
  const TT& N = pg.N();
  const TT& x = pg.liouville();
  TT ct(p, n, ds.raw_t.axes()), cx(p, n, ds.raw_x.axes()), cv(p, n, ds.raw_v.axes());
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) {
        Taylor s(0.0);
        for (int m = 0; m < n; ++m) s += G(i, m, b) * x(m, a);
        ct(i, a, b) = std::move(s);
      }
      for (int j = 0; j < n; ++j) {
        Taylor s = -N(i, a, j);
        for (int m = 0; m < n; ++m) s += L(i, m, j) * x(m, a);
        cx(i, a, j) = std::move(s);
        for (int b = 0; b < p; ++b) {
          Taylor v((i == j && a == b) ? 1.0 : 0.0);
          for (int m = 0; m < n; ++m) v += C(i, j, m, b) * x(m, a);
          cv(i, a, j, b) = std::move(v);
        }
      }
    }
  return {
      {"x_/b generic vs closed", diff_max(ds.raw_t, ct)},
      {"x_|j generic vs closed", diff_max(ds.raw_x, cx)},
      {"x|(b)(j) generic vs closed", diff_max(ds.raw_v, cv)},
      {"Dbar vs lowered x_/b", diff_max(ds.Dbar, lower_pair(pg, ds.raw_t))},
      {"D vs lowered x_|j", diff_max(ds.D, lower_pair(pg, ds.raw_x))},
      {"d vs lowered x|(b)(j)", diff_max(ds.d, lower_pair(pg, ds.raw_v))},
  };
}

EmSet em_tensors(const DeflectionSet& ds) {
  const int p = ds.D.p(), n = ds.D.n();
  EmSet em{TT(p, n, ds.D.axes()), TT(p, n, ds.d.axes())};
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a)
      for (int j = 0; j < n; ++j) {
        em.F(i, a, j) = (ds.D(i, a, j) - ds.D(j, a, i)) * 0.5;
        // as displayed: swap i and j, keep the temporal indices in place
        for (int b = 0; b < p; ++b) em.f(i, a, j, b) = (ds.d(i, a, j, b) - ds.d(j, a, i, b)) * 0.5;
      }
  return em;
}

std::vector<NamedValue> deflection_identity_residuals(PointGeometry& pg, const DeflectionSet& ds) {
  const Dims d = pg.dims();
  const int p = d.p, n = d.n;
  const TT T = pg.T();
  const TT& C = pg.C();
  const TT& Rtx = pg.R_tx();
  const TT& Rxx = pg.R_xx();
  const TT& Pma = pg.P_Ma();
  const TT& Pni = pg.P_Ni();
  const TT& St = pg.S_t();
  const TT& Rc_tx = pg.Rc_tx();
  const TT& Rc_xx = pg.Rc_xx();
  const TT& Pc_t = pg.Pc_t();
  const TT& Pc_x = pg.Pc_x();
  const TT& Sc = pg.Sc();
  const TT dbar_x = pg.cov(ds.Dbar, DerivKind::spatial);   // (i,a,b,k)
  const TT dbar_v = pg.cov(ds.Dbar, DerivKind::vertical);  // (i,a,b,k,g)
  const TT D_t = pg.cov(ds.D, DerivKind::temporal);        // (i,a,k,b)
  const TT D_x = pg.cov(ds.D, DerivKind::spatial);         // (i,a,j,k)
  const TT D_v = pg.cov(ds.D, DerivKind::vertical);        // (i,a,j,k,g)
  const TT d_t = pg.cov(ds.d, DerivKind::temporal);        // (i,a,k,g,b)
  const TT d_x = pg.cov(ds.d, DerivKind::spatial);         // (i,a,k,g,j)
  const TT d_v = pg.cov(ds.d, DerivKind::vertical);        // (i,a,j,b,k,g)
  auto xl = [&](int m, int a) { return val(ds.x_low(m, a)); };
  double r1 = 0, r2 = 0, r3 = 0, r4 = 0, r5 = 0;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b)
        for (int k = 0; k < n; ++k) {
          double rhs = 0.0;
          for (int m = 0; m < n; ++m) {
            rhs -= xl(m, a) * val(Rc_tx(m, i, b, k)) + val(ds.D(i, a, m)) * val(T(m, b, k));
            for (int mu = 0; mu < p; ++mu) rhs -= val(ds.d(i, a, m, mu)) * val(Rtx(m, mu, b, k));
          }
          r1 = std::max(r1, std::fabs(val(dbar_x(i, a, b, k)) - val(D_t(i, a, k, b)) - rhs));
          for (int g = 0; g < p; ++g) {
            double r = 0.0;
            for (int m = 0; m < n; ++m) {
              r -= xl(m, a) * val(Pc_t(m, i, b, k, g));
              for (int mu = 0; mu < p; ++mu) r -= val(ds.d(i, a, m, mu)) * val(Pma(m, mu, b, k, g));
            }
            r2 = std::max(r2, std::fabs(val(dbar_v(i, a, b, k, g)) - val(d_t(i, a, k, g, b)) - r));
          }
        }
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double rhs = 0.0;
          for (int m = 0; m < n; ++m) {
            rhs -= xl(m, a) * val(Rc_xx(m, i, j, k));
            for (int mu = 0; mu < p; ++mu) rhs -= val(ds.d(i, a, m, mu)) * val(Rxx(m, mu, j, k));
          }
          r3 = std::max(r3, std::fabs(val(D_x(i, a, j, k)) - val(D_x(i, a, k, j)) - rhs));
          for (int g = 0; g < p; ++g) {
            double r = 0.0;
            for (int m = 0; m < n; ++m) {
              r -= xl(m, a) * val(Pc_x(m, i, j, k, g)) + val(ds.D(i, a, m)) * val(C(m, j, k, g));
              for (int mu = 0; mu < p; ++mu) r -= val(ds.d(i, a, m, mu)) * val(Pni(m, mu, j, k, g));
            }
            r4 = std::max(r4, std::fabs(val(D_v(i, a, j, k, g)) - val(d_x(i, a, k, g, j)) - r));
          }
          for (int b = 0; b < p; ++b)
            for (int g = 0; g < p; ++g) {
              double r = 0.0;
              for (int m = 0; m < n; ++m) {
                r -= xl(m, a) * val(Sc(m, i, j, b, k, g));
                for (int mu = 0; mu < p; ++mu) r -= val(ds.d(i, a, m, mu)) * val(St(m, mu, j, b, k, g));
              }
              r5 = std::max(r5, std::fabs(val(d_v(i, a, j, b, k, g)) - val(d_v(i, a, k, g, j, b)) - r));
            }
        }
    }
  return {{"d'1", r1}, {"d'2", r2}, {"d'3", r3}, {"d'4", r4}, {"d'5", r5}};
}

std::vector<NamedValue> bianchi_residuals(PointGeometry& pg) {
  const Dims d = pg.dims();
  const int p = d.p, n = d.n;
  const TT T = pg.T();
  const TT& C = pg.C();
  const TT& Rtx = pg.R_tx();
  const TT& Rxx = pg.R_xx();
  const TT& Pma = pg.P_Ma();
  const TT& Pni = pg.P_Ni();
  const TT& Rc_tx = pg.Rc_tx();
  const TT& Rc_xx = pg.Rc_xx();
  const TT& Pc_t = pg.Pc_t();
  const TT& Pc_x = pg.Pc_x();
  const TT& Sc = pg.Sc();
  const TT T_x = pg.cov(T, DerivKind::spatial);   // (l,a,j,k)
  const TT T_v = pg.cov(T, DerivKind::vertical);  // (l,a,k,q,e)
  const TT C_t = pg.cov(C, DerivKind::temporal);  // (l,k,q,e,a)
  const TT C_x = pg.cov(C, DerivKind::spatial);   // (l,j,q,e,k)
  double r1 = 0, r2 = 0, r3 = 0, r4 = 0, r5 = 0;
  for (int l = 0; l < n; ++l) {
    auto b1 = [&](int a, int j, int k) {
      double s = val(Rc_tx(l, j, a, k)) + val(T_x(l, a, j, k));
      for (int m = 0; m < n; ++m)
        for (int mu = 0; mu < p; ++mu) s += val(C(l, k, m, mu)) * val(Rtx(m, mu, a, j));
      return s;
    };
    auto b3 = [&](int i, int j, int k) {
      double s = val(Rc_xx(l, i, j, k));
      for (int m = 0; m < n; ++m)
        for (int mu = 0; mu < p; ++mu) s -= val(C(l, k, m, mu)) * val(Rxx(m, mu, i, j));
      return s;
    };
    auto b4 = [&](int j, int k, int q, int e) {
      double s = val(Pc_x(l, j, k, q, e)) + val(C_x(l, j, q, e, k));
      for (int m = 0; m < n; ++m)
        for (int mu = 0; mu < p; ++mu) s += val(C(l, k, m, mu)) * val(Pni(m, mu, j, q, e));
      return s;
    };
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        for (int a = 0; a < p; ++a) r1 = std::max(r1, std::fabs(b1(a, j, k) - b1(a, k, j)));
        for (int i = 0; i < n; ++i) r3 = std::max(r3, std::fabs(b3(i, j, k) + b3(j, k, i) + b3(k, i, j)));
        for (int q = 0; q < n; ++q)
          for (int e = 0; e < p; ++e) r4 = std::max(r4, std::fabs(b4(j, k, q, e) - b4(k, j, q, e)));
      }
    for (int a = 0; a < p; ++a)
      for (int k = 0; k < n; ++k)
        for (int q = 0; q < n; ++q)
          for (int e = 0; e < p; ++e) {
            double s = val(T_v(l, a, k, q, e)) + val(Pc_t(l, k, a, q, e)) - val(C_t(l, k, q, e, a));
            for (int m = 0; m < n; ++m) {
              s -= val(C(l, m, q, e)) * val(T(m, a, k));
              for (int mu = 0; mu < p; ++mu) s -= val(C(l, k, m, mu)) * val(Pma(m, mu, a, q, e));
            }
            r2 = std::max(r2, std::fabs(s));
          }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < p; ++b)
          for (int k = 0; k < n; ++k)
            for (int g = 0; g < p; ++g) {
              double s = val(pg.dv(C(l, i, j, b), k, g)) - val(pg.dv(C(l, i, k, g), j, b));
              for (int m = 0; m < n; ++m)
                s += val(C(m, i, j, b)) * val(C(l, m, k, g)) - val(C(m, i, k, g)) * val(C(l, m, j, b));
              r5 = std::max(r5, std::fabs(val(Sc(l, i, j, b, k, g)) - s));
            }
  }
  return {{"b1", r1}, {"b2", r2}, {"b3", r3}, {"b4", r4}, {"b5", r5}};
}

PointResiduals maxwell_point(PointGeometry& pg) {
  const Dims d = pg.dims();
  const int p = d.p, n = d.n;
  const DeflectionSet ds = deflection_set(pg);
  const EmSet em = em_tensors(ds);
  const TT& C = pg.C();
  const TT T = pg.T();
  const TT Tx = pg.cov(T, DerivKind::spatial);  // (p,b,i,k) = T^p_{bi|k}
  const TT& Rtx = pg.R_tx();
  const TT& Rxx = pg.R_xx();
  const TT& Pma = pg.P_Ma();

  PointResiduals out;
  out.residual.resize(5);
  out.scale.resize(5);
  auto& sc = out.scale;
  // F and f are differences of deflections, so their roundoff follows the
  // deflection magnitudes even where every Maxwell term is tiny.
  double base = 0.0;
  for (const TT* t : {&ds.Dbar, &ds.D, &ds.d})
    for (const Taylor& c : t->data()) fold_scale(base, c);
  std::fill(sc.begin(), sc.end(), base);

  // 1. F^{(a)}_{(i)k/b} = 1/2 A_{i,k}{ Dbar_{(i)b|k} + D_{(i)m} T^m_{bk} + d_{(i)(m)} R^{(m)}_{(mu)bk}
  //                                    - [T^p_{bi|k} + C^{p(mu)}_{k(m)} R^{(m)}_{(mu)bi}] x_(p) }
  {
    const TT lhs = pg.cov(em.F, DerivKind::temporal);   // (i,a,k,b)
    const TT dbar_x = pg.cov(ds.Dbar, DerivKind::spatial);  // (i,a,b,k)
    DT res(p, n, lhs.axes());
    auto X = [&](int i, int a, int k, int b) {
      double s = val(dbar_x(i, a, b, k));
      fold_scale(sc[0], s);
      for (int m = 0; m < n; ++m) {
        const double t = val(ds.D(i, a, m)) * val(T(m, b, k));
        fold_scale(sc[0], t);
        s += t;
        for (int mu = 0; mu < p; ++mu) {
          const double u = val(ds.d(i, a, m, mu)) * val(Rtx(m, mu, b, k));
          fold_scale(sc[0], u);
          s += u;
        }
      }
      for (int q = 0; q < n; ++q) {
        double br = val(Tx(q, b, i, k));
        for (int m = 0; m < n; ++m)
          for (int mu = 0; mu < p; ++mu) br += val(C(q, k, m, mu)) * val(Rtx(m, mu, b, i));
        const double t = br * val(ds.x_low(q, a));
        fold_scale(sc[0], t);
        s -= t;
      }
      return s;
    };
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < p; ++a)
        for (int k = 0; k < n; ++k)
          for (int b = 0; b < p; ++b) {
            fold_scale(sc[0], lhs(i, a, k, b));
            res(i, a, k, b) = val(lhs(i, a, k, b)) - 0.5 * (X(i, a, k, b) - X(k, a, i, b));
          }
    out.residual[0] = std::move(res);
  }

  // 2. f^{(a)(g)}_{(i)(k)/b} = 1/2 A_{i,k}{ Dbar_{(i)b}|^{(g)}_{(k)} + d_{(i)(m)} P^{(m)(g)}_{(mu)b(k)}
  //                                        - [dT^p_{bi}/dx^k_g + C^{p(mu)}_{k(m)} P^{(m)(g)}_{(mu)b(i)}] x_(p) }
  {
    const TT lhs = pg.cov(em.f, DerivKind::temporal);       // (i,a,k,g,b)
    const TT dbar_v = pg.cov(ds.Dbar, DerivKind::vertical);  // (i,a,b,k,g)
    DT res(p, n, lhs.axes());
    auto X = [&](int i, int a, int k, int g, int b) {
      double s = val(dbar_v(i, a, b, k, g));
      fold_scale(sc[1], s);
      for (int m = 0; m < n; ++m)
        for (int mu = 0; mu < p; ++mu) {
          const double u = val(ds.d(i, a, m, mu)) * val(Pma(m, mu, b, k, g));
          fold_scale(sc[1], u);
          s += u;
        }
      for (int q = 0; q < n; ++q) {
        double br = val(pg.dv(T(q, b, i), k, g));
        for (int m = 0; m < n; ++m)
          for (int mu = 0; mu < p; ++mu) br += val(C(q, k, m, mu)) * val(Pma(m, mu, b, i, g));
        const double t = br * val(ds.x_low(q, a));
        fold_scale(sc[1], t);
        s -= t;
      }
      return s;
    };
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < p; ++a)
        for (int k = 0; k < n; ++k)
          for (int g = 0; g < p; ++g)
            for (int b = 0; b < p; ++b) {
              fold_scale(sc[1], lhs(i, a, k, g, b));
              res(i, a, k, g, b) = val(lhs(i, a, k, g, b)) - 0.5 * (X(i, a, k, g, b) - X(k, a, i, g, b));
            }
    out.residual[1] = std::move(res);
  }

  // 3. sum_{ijk} F^{(a)}_{(i)j|k} = -1/2 sum_{ijk} [C^{p(mu)}_{i(m)} x_(p) + d_{(i)(m)}] R^{(m)}_{(mu)jk}
  {
    const TT fx = pg.cov(em.F, DerivKind::spatial);  // (i,a,j,k)
    DT res(p, n, fx.axes());
    auto rhs = [&](int i, int a, int j, int k) {
      double s = 0.0;
      for (int m = 0; m < n; ++m)
        for (int mu = 0; mu < p; ++mu) {
          double br = val(ds.d(i, a, m, mu));
          for (int q = 0; q < n; ++q) br += val(C(q, i, m, mu)) * val(ds.x_low(q, a));
          const double t = br * val(Rxx(m, mu, j, k));
          fold_scale(sc[2], t);
          s += t;
        }
      return s;
    };
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < p; ++a)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double l = 0.0;
            for (const auto& [u, v, w] : {std::array{i, j, k}, std::array{j, k, i}, std::array{k, i, j}}) {
              fold_scale(sc[2], fx(u, a, v, w));
              l += val(fx(u, a, v, w));
            }
            const double r = -0.5 * (rhs(i, a, j, k) + rhs(j, a, k, i) + rhs(k, a, i, j));
            res(i, a, j, k) = l - r;
          }
    out.residual[2] = std::move(res);
  }

  // 4. sum_{ijk} { F^{(a)}_{(i)j}|^{(g)}_{(k)} + f^{(a)(g)}_{(i)(j)|k} } = 0
  {
    const TT fv = pg.cov(em.F, DerivKind::vertical);  // (i,a,j,k,g)
    const TT ff = pg.cov(em.f, DerivKind::spatial);   // (i,a,j,g,k)
    DT res(p, n, fv.axes());
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < p; ++a)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int g = 0; g < p; ++g) {
              double s = 0.0;
              for (const auto& [u, v, w] : {std::array{i, j, k}, std::array{j, k, i}, std::array{k, i, j}}) {
                fold_scale(sc[3], fv(u, a, v, w, g));
                fold_scale(sc[3], ff(u, a, v, g, w));
                s += val(fv(u, a, v, w, g)) + val(ff(u, a, v, g, w));
              }
              res(i, a, j, k, g) = s;
            }
    out.residual[3] = std::move(res);
  }

  // 5. sum_{ijk} f^{(a)(b)}_{(i)(j)}|^{(g)}_{(k)} = 0
  {
    const TT fv = pg.cov(em.f, DerivKind::vertical);  // (i,a,j,b,k,g)
    DT res(p, n, fv.axes());
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < p; ++a)
        for (int j = 0; j < n; ++j)
          for (int b = 0; b < p; ++b)
            for (int k = 0; k < n; ++k)
              for (int g = 0; g < p; ++g) {
                double s = 0.0;
                for (const auto& [u, v, w] : {std::array{i, j, k}, std::array{j, k, i}, std::array{k, i, j}}) {
                  fold_scale(sc[4], fv(u, a, v, b, w, g));
                  s += val(fv(u, a, v, b, w, g));
                }
                res(i, a, j, b, k, g) = s;
              }
    out.residual[4] = std::move(res);
  }
  return out;
}

const std::vector<std::string>& maxwell_names() {
  static const std::vector<std::string> names = {"maxwell-1 F/b", "maxwell-2 f/b", "maxwell-3 cyclic F|k",
                                                 "maxwell-4 cyclic F|v + f|k", "maxwell-5 cyclic f|v"};
  return names;
}

ResidualReport maxwell_residuals(const GeometryContext& ctx, const std::vector<JetPoint>& pts, int jobs) {
  const Verdict tf = nlc_torsion_free_check(ctx, pts);
  if (!tf.ok) {
    throw Error(ErrorCode::precondition, "spatial nonlinear connection has torsion at point " +
                                             std::to_string(tf.witness) + ": " + tf.detail);
  }
  std::vector<PointResiduals> per(pts.size());
  parallel_for(pts.size(), jobs, [&](std::size_t k) {
    PointGeometry pg(ctx, pts[k], depth_curvature);
    per[k] = maxwell_point(pg);
  });
  return fold_residuals(maxwell_names(), per);
}

}  // namespace jetlag
