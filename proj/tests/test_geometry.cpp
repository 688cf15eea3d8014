#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "jetlag/error.hpp"
#include "jetlag/expr.hpp"

using namespace jetlag;

namespace {

GeometryContext custom(Dims d, SpaceParams params) { return make_space("custom", d, params); }

JetPoint point(Dims d, std::vector<double> t, std::vector<double> x, std::vector<double> xs) {
  JetPoint pt = JetPoint::zeros(d);
  if (!t.empty()) pt.t = t;
  if (!x.empty()) pt.x = x;
  if (!xs.empty()) pt.xs = xs;
  return pt;
}

std::vector<GeometryContext> curved_spaces(Dims d) {
  std::vector<GeometryContext> out;
  out.push_back(make_quadratic(d));
  for (const char* v : {"i", "ii", "iii"}) out.push_back(make_conformal(d, {{"variant", {v}}}));
  out.push_back(make_optic(d));
  return out;
}

}  // namespace

TEST_CASE("temporal Christoffel symbols and M for h = diag(1, t1^2)") {
  const Dims d{2, 1};
  const auto ctx = custom(d, {{"h", {"1", "0", "0", "t[1]^2"}}});
  PointGeometry pg(ctx, point(d, {2.0, 0.3}, {}, {0.0, 3.0}), 1);
  const auto& H = pg.H();
  CHECK(H(1, 1, 0).value() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(H(1, 0, 1).value() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(H(0, 1, 1).value() == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(H(0, 0, 0).value() == 0.0);
  CHECK(H(1, 1, 1).value() == 0.0);
  CHECK(pg.M()(0, 1, 0).value() == doctest::Approx(-1.5).epsilon(1e-14));

  // FD oracle on the same h
  auto metric = [&](const JetPoint& q) { return fx::field_values(ctx.h, d, q); };
  const auto oracle = fx::christoffel(metric, d, pg.point(), 2, fx::tco);
  for (std::size_t k = 0; k < oracle.size(); ++k) CHECK(H[k].value() == doctest::Approx(oracle[k]).epsilon(1e-8));
}

TEST_CASE("flat metric has vanishing H and M") {
  const auto ctx = make_flat(2, 2);
  PointGeometry pg(ctx, point({2, 2}, {0.3, 0.4}, {1, 2}, {1, 2, 3, 4}), 1);
  CHECK(fx::max_abs(pg.H()) == 0.0);
  CHECK(fx::max_abs(pg.M()) == 0.0);
}

TEST_CASE("generalized and static spatial Christoffel symbols") {
  const Dims d{1, 2};
  const auto ctx = custom(d, {{"g", {"1", "0", "0", "x[1]^2"}}});
  const auto gam = spatial_christoffel(ctx, point(d, {}, {3.0, 0.5}, {}), true);
  CHECK(gam(1, 1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(gam(1, 0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(gam(0, 1, 1) == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(gam(0, 0, 0) == 0.0);

  const Dims d1{1, 1};
  const auto e = custom(d1, {{"g", {"exp(2*x[1])"}}});
  CHECK(spatial_christoffel(e, point(d1, {}, {0.7}, {}), true)(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));

  const auto flat = make_flat(2, 3);
  const auto z = spatial_christoffel(flat, JetPoint::zeros({2, 3}), true);
  for (double v : z.data()) CHECK(v == 0.0);

  // a direction-dependent g is refused
  const auto opt = make_optic({2, 2});
  CHECK_THROWS_AS(spatial_christoffel(opt, JetPoint::zeros({2, 2}), true), Error);
  // the static one uses phi
  const auto st = spatial_christoffel(opt, point({2, 2}, {0.1, 0.2}, {0.3, -0.5}, {0.1, 0.2, 0.3, 0.4}), false);
  auto phi = [&](const JetPoint& q) { return fx::field_values(opt.phi, {2, 2}, q); };
  const auto oracle = fx::christoffel(phi, {2, 2}, point({2, 2}, {0.1, 0.2}, {0.3, -0.5}, {0.1, 0.2, 0.3, 0.4}), 2, fx::xco);
  for (std::size_t k = 0; k < oracle.size(); ++k) CHECK(st[k] == doctest::Approx(oracle[k]).epsilon(1e-9));
}

TEST_CASE("spatial nonlinear connections") {
  const Dims d{1, 2};
  const auto q = make_quadratic(d, {{"h", {"1"}}, {"g", {"1", "0", "0", "x[1]^2"}}, {"U", {"0", "0"}}, {"F", {"0"}}});
  PointGeometry pg(q, point(d, {0.0}, {3.0, 0.0}, {0.0, 2.0}), 1);
  CHECK(pg.N()(1, 0, 0).value() == doctest::Approx(2.0 / 3.0).epsilon(1e-13));

  const auto flat = make_flat(2, 2);
  PointGeometry pf(flat, point({2, 2}, {}, {}, {1, 2, 3, 4}), 1);
  CHECK(fx::max_abs(pf.N()) == 0.0);

  const auto opt = make_optic({2, 2}, {{"phi", {"1", "0", "0", "1"}}});
  PointGeometry po(opt, point({2, 2}, {0.2, 0.1}, {0.4, 0.5}, {0.5, -0.2, 0.3, 0.9}), 1);
  CHECK(fx::max_abs(po.N()) == 0.0);

  // quadratic canonical connection refuses a direction-dependent g
  CHECK_THROWS_AS(make_space("optic", {2, 2}, {}, NlcKind::quadratic_canonical), Error);
}

TEST_CASE("adapted derivatives") {
  const Dims d{2, 1};
  const auto ctx = custom(d, {{"h", {"1", "0", "0", "t[1]^2"}}});
  const JetPoint pt = point(d, {2.0, 0.0}, {0.0}, {0.0, 3.0});
  const ScalarField f = expr_field("f", parse_field("xs[1][2]", d));
  CHECK(adapted_deriv(ctx, f, pt, coord_t(0)) == doctest::Approx(0.5 * 3.0).epsilon(1e-14));

  // f = xs^1_1 gives dF/dx^j = -N
  const auto opt = make_optic({2, 2});
  const JetPoint p2 = point({2, 2}, {0.2, -0.1}, {0.4, 0.5}, {0.5, -0.2, 0.3, 0.9});
  const ScalarField s = expr_field("s", parse_field("xs[1][1]", {2, 2}));
  PointGeometry pg(opt, p2, 1);
  for (int j = 0; j < 2; ++j) CHECK(adapted_deriv(opt, s, p2, coord_x(j)) == doctest::Approx(-pg.N()(0, 0, j).value()));

  // flat: adapted = plain
  const auto flat = make_flat(2, 2);
  const ScalarField u = expr_field("u", parse_field("t[1]*xs[2][1]^2 + x[1]", {2, 2}));
  CHECK(adapted_deriv(flat, u, p2, coord_t(0)) == doctest::Approx(0.3 * 0.3));
}

TEST_CASE("Cartan coefficients: symmetries, C oracle and direction-independent C") {
  const Dims d{2, 2};
  const auto opt = make_optic(d);
  const auto pts = fx::random_points(d, 5, 11);
  for (const JetPoint& pt : pts) {
    PointGeometry pg(opt, pt, 1);
    const auto& C = pg.C();
    const auto& L = pg.L();
    // C oracle from FD of g values
    auto g = [&](const JetPoint& q) { return fx::field_values(opt.g, d, q); };
    const auto gi = fx::inverse(g(pt), 2);
    std::vector<std::vector<double>> dg;  // [k*p+c][i*n+j]
    for (int k = 0; k < 2; ++k)
      for (int c = 0; c < 2; ++c) dg.push_back(fx::fd(g, d, pt, coord_xs(k, c)));
    auto D = [&](int i, int j, int k, int c) { return dg[static_cast<std::size_t>(k * 2 + c)][static_cast<std::size_t>(i * 2 + j)]; };
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int c = 0; c < 2; ++c) {
            double s = 0.0;
            for (int m = 0; m < 2; ++m) s += gi[static_cast<std::size_t>(i * 2 + m)] * (D(m, j, k, c) + D(m, k, j, c) - D(j, k, m, c));
            CHECK(std::fabs(C(i, j, k, c).value() - 0.5 * s) < 1e-6);
            CHECK(C(i, j, k, c).value() == C(i, k, j, c).value());
            CHECK(L(i, j, k).value() == L(i, k, j).value());
          }
  }
  const auto quad = make_quadratic(d);
  PointGeometry pq(quad, pts[0], 1);
  CHECK(fx::max_abs(pq.C()) == 0.0);
}

TEST_CASE("metricity on the built-in spaces") {
  for (Dims d : {Dims{2, 2}, Dims{3, 3}, Dims{1, 3}}) {
    for (const auto& ctx : curved_spaces(d)) {
      double worst = 0.0;
      for (const JetPoint& pt : fx::random_points(d, 8, 5)) {
        PointGeometry pg(ctx, pt, 1);
        for (const auto& r : metricity_residuals(pg)) worst = std::max(worst, r.value);
      }
      INFO(ctx.name << " p=" << d.p << " n=" << d.n);
      CHECK(worst < 1e-8);
    }
  }
}

TEST_CASE("Liouville deflection: generic covariant derivative against closed forms") {
  const Dims d{2, 2};
  const auto opt = make_optic(d);
  PointGeometry pg(opt, fx::random_points(d, 1, 3)[0], 1);
  const auto dt = pg.cov(pg.liouville(), DerivKind::temporal);
  const auto dx = pg.cov(pg.liouville(), DerivKind::spatial);
  const auto dv = pg.cov(pg.liouville(), DerivKind::vertical);
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        double s = 0.0;
        for (int m = 0; m < 2; ++m) s += pg.G()(i, m, b).value() * pg.slope(m, a).value();
        CHECK(std::fabs(dt(i, a, b).value() - s) < 1e-12);
      }
      for (int j = 0; j < 2; ++j) {
        double s = -pg.N()(i, a, j).value();
        for (int m = 0; m < 2; ++m) s += pg.L()(i, m, j).value() * pg.slope(m, a).value();
        CHECK(std::fabs(dx(i, a, j).value() - s) < 1e-12);
        for (int b = 0; b < 2; ++b) {
          double v = (i == j && a == b) ? 1.0 : 0.0;
          for (int m = 0; m < 2; ++m) v += pg.C()(i, j, m, b).value() * pg.slope(m, a).value();
          CHECK(std::fabs(dv(i, a, j, b).value() - v) < 1e-12);
        }
      }
    }
}

TEST_CASE("torsion and curvature of the temporal part against an FD Riemann oracle") {
  const Dims d{2, 2};
  const auto ctx = make_quadratic(d);
  for (const JetPoint& pt : fx::random_points(d, 3, 17)) {
    PointGeometry pg(ctx, pt, 2);
    const auto riem = fx::temporal_riemann(ctx.h, d, pt);
    const auto& hc = pg.Hc();
    for (std::size_t k = 0; k < riem.size(); ++k) CHECK(std::fabs(hc[k].value() - riem[k]) < 1e-6);
    // R^{(m)}_{(mu)ab} = -x^m_e H^e_{mu a b} when M = -H x
    const auto& rtt = pg.R_tt();
    for (int m = 0; m < 2; ++m)
      for (int mu = 0; mu < 2; ++mu)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            double s = 0.0;
            for (int e = 0; e < 2; ++e) s -= pt.slope(m, e, 2) * riem[static_cast<std::size_t>(((e * 2 + mu) * 2 + a) * 2 + b)];
            CHECK(std::fabs(rtt(m, mu, a, b).value() - s) < 1e-6);
          }
  }
}

TEST_CASE("flat spaces have vanishing torsion and curvature") {
  for (Dims d : {Dims{2, 2}, Dims{3, 3}, Dims{1, 3}}) {
    const auto ctx = make_flat(d.p, d.n);
    PointGeometry pg(ctx, fx::random_points(d, 1, 2)[0], 2);
    double worst = 0.0;
    for (const DTensor<Taylor>* t : {&pg.H(), &pg.G(), &pg.L(), &pg.C(), &pg.P_Ma(), &pg.P_Ni(), &pg.R_tt(),
                                     &pg.R_tx(), &pg.R_xx(), &pg.S_t(), &pg.Hc(), &pg.Rc_tt(), &pg.Rc_tx(),
                                     &pg.Rc_xx(), &pg.Pc_t(), &pg.Pc_x(), &pg.Sc()})
      worst = std::max(worst, fx::max_abs(*t));
    CHECK(worst == 0.0);
    CHECK(pg.scalar_H().value() == 0.0);
    CHECK(pg.scalar_R().value() == 0.0);
    CHECK(pg.scalar_S().value() == 0.0);
  }
}

TEST_CASE("P^{(m)(b)}_{(mu)i(j)} is symmetric in i, j for a Christoffel-of-phi connection") {
  const Dims d{2, 2};
  const auto ctx = make_conformal(d, {{"variant", {"ii"}}});
  PointGeometry pg(ctx, fx::random_points(d, 1, 9)[0], 2);
  const auto& pn = pg.P_Ni();
  for (int m = 0; m < 2; ++m)
    for (int mu = 0; mu < 2; ++mu)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int b = 0; b < 2; ++b) CHECK(std::fabs(pn(m, mu, i, j, b).value() - pn(m, mu, j, i, b).value()) < 1e-12);
}

TEST_CASE("curvature antisymmetries and degenerate blocks") {
  for (Dims d : {Dims{2, 2}, Dims{3, 3}}) {
    for (const auto& ctx : curved_spaces(d)) {
      double anti = 0.0, degen = 0.0;
      for (const JetPoint& pt : fx::random_points(d, 3, 23)) {
        PointGeometry pg(ctx, pt, 2);
        for (const auto& r : antisymmetry_residuals(pg)) {
          INFO(ctx.name << " " << r.name << " = " << r.value);
          CHECK(r.value < 1e-9);
          anti = std::max(anti, r.value);
        }
        for (const auto& r : degenerate_block_residuals(pg)) degen = std::max(degen, r.value);
      }
      INFO(ctx.name << " p=" << d.p);
      CHECK(degen < 1e-9);
    }
  }
}

TEST_CASE("Ricci contractions agree with the generic contraction kernel") {
  const Dims d{2, 2};
  const auto ctx = make_optic(d);
  PointGeometry pg(ctx, fx::random_points(d, 1, 31)[0], 2);
  const auto rij = values(pg.ric_R_ij());
  const auto oracle = contract(values(pg.Rc_xx()), 0, 3);
  for (std::size_t k = 0; k < rij.size(); ++k) CHECK(rij[k] == doctest::Approx(oracle[k]).epsilon(1e-14));
  const auto rh = values(pg.ric_H());
  const auto oh = contract(values(pg.Hc()), 0, 3);
  for (std::size_t k = 0; k < rh.size(); ++k) CHECK(rh[k] == doctest::Approx(oh[k]).epsilon(1e-14));
}

TEST_CASE("scalar curvature of h against the FD oracle") {
  const Dims d{2, 2};
  for (const char* h : {"t[1]^2", "exp(t[1]*t[2])"}) {
    const auto ctx = custom(d, {{"h", {"1", "0", "0", h}}});
    const JetPoint pt = point(d, {1.3, 0.4}, {0.1, 0.2}, {0.1, 0.2, 0.3, 0.4});
    PointGeometry pg(ctx, pt, 2);
    const auto riem = fx::temporal_riemann(ctx.h, d, pt);
    const auto hv = fx::field_values(ctx.h, d, pt);
    const auto hi = fx::inverse(hv, 2);
    double s = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int m = 0; m < 2; ++m) s += hi[static_cast<std::size_t>(a * 2 + b)] * riem[static_cast<std::size_t>(((m * 2 + a) * 2 + b) * 2 + m)];
    CHECK(std::fabs(pg.scalar_H().value() - s) < 1e-6);
  }
}

TEST_CASE("vertical metric from a Lagrangian") {
  const Dims d{2, 2};
  const auto ctx = custom(d, {{"L", {"xs[1][1]^2 + xs[1][2]^2 + xs[2][1]^2 + xs[2][2]^2"}}});
  const auto vm = vertical_metric_from_L(ctx, fx::random_points(d, 1, 1)[0]);
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a)
      for (int j = 0; j < 2; ++j)
        for (int b = 0; b < 2; ++b) CHECK(vm.gvert(i, a, j, b) == ((i == j && a == b) ? 1.0 : 0.0));
  CHECK(vm.g_canonical(0, 0) == 1.0);
  CHECK(vm.g_canonical(0, 1) == 0.0);

  // linear terms drop out
  const auto lin = custom(d, {{"L", {"xs[1][1]^2 + xs[1][2]^2 + xs[2][1]^2 + xs[2][2]^2 + x[1]*xs[1][2] + 3*t[1]"}}});
  const auto vl = vertical_metric_from_L(lin, fx::random_points(d, 1, 1)[0]);
  for (std::size_t k = 0; k < vl.gvert.size(); ++k) CHECK(vl.gvert[k] == vm.gvert[k]);

  // generic quadratic form against an FD Hessian
  const std::string src =
      "2*xs[1][1]^2 + 0.5*xs[1][1]*xs[2][2] - 0.7*xs[1][2]*xs[2][1] + x[1]*xs[2][1]^2 + 1.5*xs[1][2]^2 + "
      "(1 + t[1]^2)*xs[2][2]^2 + 0.3*xs[1][1]*xs[1][2]";
  const auto gen = custom(d, {{"L", {src}}});
  const JetPoint pt = fx::random_points(d, 1, 4)[0];
  const auto vg = vertical_metric_from_L(gen, pt);
  const ScalarField lf = expr_field("L", parse_field(src, d));
  auto grad = [&](const JetPoint& q) {
    std::vector<double> r;
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < 2; ++a)
        r.push_back(fx::fd([&](const JetPoint& z) { return std::vector<double>{evaluate_value(lf, d, z)}; }, d, q,
                           coord_xs(i, a))[0]);
    return r;
  };
  for (int j = 0; j < 2; ++j)
    for (int b = 0; b < 2; ++b) {
      const auto col = fx::fd(grad, d, pt, coord_xs(j, b));
      for (int i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a) CHECK(std::fabs(vg.gvert(i, a, j, b) - 0.5 * col[static_cast<std::size_t>(i * 2 + a)]) < 1e-6);
    }
}

TEST_CASE("absolute energy Lagrangian") {
  CHECK(energy_lagrangian(make_flat(2, 2), JetPoint::zeros({2, 2})) == 0.0);
  CHECK(energy_lagrangian(make_flat(1, 1), point({1, 1}, {}, {}, {3.0})) == 9.0);
  const Dims d{2, 2};
  const auto opt = make_optic(d);
  const JetPoint pt = fx::random_points(d, 1, 8)[0];
  const auto hv = fx::inverse(fx::field_values(opt.h, d, pt), 2);
  const auto gv = fx::field_values(opt.g, d, pt);
  double e = 0.0;
  for (int mu = 0; mu < 2; ++mu)
    for (int nu = 0; nu < 2; ++nu)
      for (int m = 0; m < 2; ++m)
        for (int r = 0; r < 2; ++r)
          e += hv[static_cast<std::size_t>(mu * 2 + nu)] * gv[static_cast<std::size_t>(m * 2 + r)] * pt.slope(m, mu, 2) * pt.slope(r, nu, 2);
  CHECK(energy_lagrangian(opt, pt) == doctest::Approx(e).epsilon(1e-13));
}

TEST_CASE("Kronecker h-regularity") {
  const Dims d{2, 2};
  const auto q = make_quadratic(d);
  const auto pts = fx::random_points(d, 5, 12);
  const Verdict v = kronecker_regularity_check(q, pts, RegularityTarget::lagrangian);
  CHECK(v.ok);
  REQUIRE(v.extracted);
  // recovered g equals the space's g_{ij}(t,x)
  const auto params = default_params("quadratic", d);
  std::vector<ScalarField> gs;
  for (const auto& s : params.at("g")) gs.push_back(expr_field("g", parse_field(s, d)));
  const auto expect = fx::field_values(tensor_field("g", gs), d, pts[0]);
  for (std::size_t k = 0; k < expect.size(); ++k) CHECK(std::fabs((*v.extracted)[k] - expect[k]) < 1e-9);

  // energy of a direction-independent g
  CHECK(kronecker_regularity_check(q, pts, RegularityTarget::energy).ok);

  // quartic counterexample
  const Dims d1{2, 1};
  const auto flat = make_flat(2, 1);
  const ScalarField quartic = expr_field("L", parse_field("xs[1][1]^4", d1));
  const Verdict bad = kronecker_regularity_check(flat, quartic, fx::random_points(d1, 4, 2));
  CHECK_FALSE(bad.ok);
  CHECK(bad.max_deviation > 1e-3);
}

TEST_CASE("torsion-free spatial nonlinear connections") {
  const Dims d{2, 2};
  const auto pts = fx::random_points(d, 5, 19);
  CHECK(nlc_torsion_free_check(make_conformal(d), pts).ok);
  CHECK(nlc_torsion_free_check(make_optic(d), pts).ok);
  CHECK(nlc_torsion_free_check(make_quadratic(d), pts).ok);
  std::vector<std::string> n(8, "0");
  n[0] = "xs[2][1]*x[1]";  // N^{(1)}_{(1)1}
  const auto crafted = make_space("flat", d, {{"N", n}}, NlcKind::user_given);
  const Verdict v = nlc_torsion_free_check(crafted, pts);
  CHECK_FALSE(v.ok);
  CHECK(v.max_deviation > 0.0);
  CHECK(v.witness < pts.size());
}

TEST_CASE("derivative budget") {
  auto ctx = make_optic({2, 2});
  ctx.diff.max_order = 1;
  CHECK_THROWS_AS(PointGeometry(ctx, JetPoint::zeros({2, 2}), 2), Error);
  PointGeometry pg(make_optic({2, 2}), fx::random_points({2, 2}, 1, 1)[0], 1);
  CHECK_THROWS_AS(pg.Rc_xx(), Error);
}

TEST_CASE("repeated evaluation is bitwise stable") {
  const Dims d{2, 2};
  const auto ctx = make_optic(d);
  const JetPoint pt = fx::random_points(d, 1, 77)[0];
  PointGeometry a(ctx, pt, 2), b(ctx, pt, 2);
  const auto ra = values(a.Rc_tx()), rb = values(b.Rc_tx());
  for (std::size_t k = 0; k < ra.size(); ++k) CHECK(ra[k] == rb[k]);
}
