#pragma once

// Shared fixtures and independent finite-difference oracles for the
// geometry-level tests. Oracles use plain double evaluations of the space's
// fields and never touch the series pipeline.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "jetlag/geometry.hpp"
#include "jetlag/spaces.hpp"

namespace fx {

using namespace jetlag;

inline JetPoint random_point(Dims d, std::mt19937_64& rng, double box = 1.0) {
  std::uniform_real_distribution<double> u(-box, box);
  JetPoint pt = JetPoint::zeros(d);
  for (double& v : pt.t) v = u(rng);
  for (double& v : pt.x) v = u(rng);
  for (double& v : pt.xs) v = u(rng);
  return pt;
}

inline std::vector<JetPoint> random_points(Dims d, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<JetPoint> pts;
  for (std::size_t k = 0; k < count; ++k) pts.push_back(random_point(d, rng));
  return pts;
}

inline double& coord(JetPoint& pt, Dims d, CoordId c) {
  switch (c.kind) {
    case CoordKind::t: return pt.t[static_cast<std::size_t>(c.i)];
    case CoordKind::x: return pt.x[static_cast<std::size_t>(c.i)];
    case CoordKind::xs: break;
  }
  return pt.xs[static_cast<std::size_t>(c.i * d.p + c.a)];
}

/// Fourth-order central difference of a vector-valued function.
inline std::vector<double> fd(const std::function<std::vector<double>(const JetPoint&)>& f, Dims d,
                              const JetPoint& pt, CoordId c, double h = 1e-3) {
  JetPoint q = pt;
  double& u = coord(q, d, c);
  const double u0 = u;
  auto at = [&](double s) {
    u = u0 + s * h;
    return f(q);
  };
  const auto f2 = at(2), f1 = at(1), m1 = at(-1), m2 = at(-2);
  std::vector<double> r(f1.size());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = (-f2[k] + 8 * f1[k] - 8 * m1[k] + m2[k]) / (12 * h);
  return r;
}

inline std::vector<double> field_values(const TensorField& f, Dims d, const JetPoint& pt) {
  const JetVars v(d, pt);
  std::vector<double> out;
  for (const Taylor& c : f.eval(v.args(f.deps))) out.push_back(c.value());
  return out;
}

inline std::vector<double> inverse(std::vector<double> m, int dim) {
  return detail::gauss_jordan_inverse(std::move(m), dim);
}

/// Christoffel symbols (i,j,k) of a metric function of one coordinate family.
inline std::vector<double> christoffel(const std::function<std::vector<double>(const JetPoint&)>& metric, Dims d,
                                       const JetPoint& pt, int dim, CoordId (*coord_of)(int)) {
  const auto m = metric(pt);
  const auto mi = inverse(m, dim);
  std::vector<std::vector<double>> dm;
  for (int k = 0; k < dim; ++k) dm.push_back(fd(metric, d, pt, coord_of(k)));
  auto D = [&](int a, int b, int k) { return dm[static_cast<std::size_t>(k)][static_cast<std::size_t>(a * dim + b)]; };
  std::vector<double> r(static_cast<std::size_t>(dim * dim * dim), 0.0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) {
        double s = 0.0;
        for (int e = 0; e < dim; ++e) s += mi[static_cast<std::size_t>(i * dim + e)] * (D(e, j, k) + D(e, k, j) - D(j, k, e));
        r[static_cast<std::size_t>((i * dim + j) * dim + k)] = 0.5 * s;
      }
  return r;
}

inline CoordId tco(int a) { return coord_t(a); }
inline CoordId xco(int i) { return coord_x(i); }

/// Riemann tensor R^a_{ebc} = d_c G^a_{eb} - d_b G^a_{ec} + G^m_{eb} G^a_{mc} - G^m_{ec} G^a_{mb}
/// of the temporal metric, all derivatives by nested finite differences.
inline std::vector<double> temporal_riemann(const TensorField& h, Dims d, const JetPoint& pt) {
  const int p = d.p;
  auto metric = [&](const JetPoint& q) { return field_values(h, d, q); };
  auto gam = [&](const JetPoint& q) { return christoffel(metric, d, q, p, tco); };
  const auto G = gam(pt);
  std::vector<std::vector<double>> dG;
  for (int c = 0; c < p; ++c) dG.push_back(fd(gam, d, pt, coord_t(c)));
  auto at = [&](int a, int b, int c) { return G[static_cast<std::size_t>((a * p + b) * p + c)]; };
  auto dat = [&](int a, int b, int c, int k) { return dG[static_cast<std::size_t>(k)][static_cast<std::size_t>((a * p + b) * p + c)]; };
  std::vector<double> r(static_cast<std::size_t>(p * p * p * p), 0.0);
  for (int a = 0; a < p; ++a)
    for (int e = 0; e < p; ++e)
      for (int b = 0; b < p; ++b)
        for (int c = 0; c < p; ++c) {
          double s = dat(a, e, b, c) - dat(a, e, c, b);
          for (int m = 0; m < p; ++m) s += at(m, e, b) * at(a, m, c) - at(m, e, c) * at(a, m, b);
          r[static_cast<std::size_t>(((a * p + e) * p + b) * p + c)] = s;
        }
  return r;
}

/// Einstein tensor G_ab of h by nested finite differences, row-major p*p.
inline std::vector<double> einstein_of_h(const TensorField& h, Dims d, const JetPoint& pt) {
  const int p = d.p;
  const auto riem = temporal_riemann(h, d, pt);
  const auto hv = field_values(h, d, pt);
  const auto hi = inverse(hv, p);
  auto R = [&](int a, int e, int b, int c) { return riem[static_cast<std::size_t>(((a * p + e) * p + b) * p + c)]; };
  std::vector<double> ric(static_cast<std::size_t>(p * p), 0.0);
  double sc = 0.0;
  for (int e = 0; e < p; ++e)
    for (int b = 0; b < p; ++b) {
      for (int m = 0; m < p; ++m) ric[static_cast<std::size_t>(e * p + b)] += R(m, e, b, m);
      sc += hi[static_cast<std::size_t>(e * p + b)] * ric[static_cast<std::size_t>(e * p + b)];
    }
  for (std::size_t k = 0; k < ric.size(); ++k) ric[k] -= 0.5 * sc * hv[k];
  return ric;
}

/// G^mu_{b/mu} of h, each derivative a finite difference of step `step`.
inline std::vector<double> einstein_divergence_of_h(const TensorField& h, Dims d, const JetPoint& pt, double step = 1e-2) {
  const int p = d.p;
  auto mixed = [&](const JetPoint& q) {
    const auto g = einstein_of_h(h, d, q);
    const auto hi = inverse(field_values(h, d, q), p);
    std::vector<double> m(static_cast<std::size_t>(p * p), 0.0);
    for (int mu = 0; mu < p; ++mu)
      for (int b = 0; b < p; ++b)
        for (int nu = 0; nu < p; ++nu) m[static_cast<std::size_t>(mu * p + b)] += hi[static_cast<std::size_t>(mu * p + nu)] * g[static_cast<std::size_t>(nu * p + b)];
    return m;
  };
  auto metric = [&](const JetPoint& q) { return field_values(h, d, q); };
  const auto gam = christoffel(metric, d, pt, p, tco);
  auto Gm = [&](int a, int b, int c) { return gam[static_cast<std::size_t>((a * p + b) * p + c)]; };
  const auto m0 = mixed(pt);
  std::vector<double> div(static_cast<std::size_t>(p), 0.0);
  for (int b = 0; b < p; ++b)
    for (int mu = 0; mu < p; ++mu) {
      div[static_cast<std::size_t>(b)] += fd(mixed, d, pt, coord_t(mu), step)[static_cast<std::size_t>(mu * p + b)];
      for (int l = 0; l < p; ++l)
        div[static_cast<std::size_t>(b)] += Gm(mu, mu, l) * m0[static_cast<std::size_t>(l * p + b)] - Gm(l, mu, b) * m0[static_cast<std::size_t>(mu * p + l)];
    }
  return div;
}

inline double max_abs(const DTensor<Taylor>& a) {
  double m = 0.0;
  for (const Taylor& c : a.data()) m = std::max(m, std::fabs(c.value()));
  return m;
}

}  // namespace fx
