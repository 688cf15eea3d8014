#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "jetlag/error.hpp"
#include "jetlag/taylor.hpp"

using jetlag::Taylor;

namespace {

double d1(const Taylor& f, int v) {
  const int vars[] = {v};
  return f.partial(vars);
}
double d2(const Taylor& f, int a, int b) {
  const int vars[] = {a, b};
  return f.partial(vars);
}
double d3(const Taylor& f, int a, int b, int c) {
  const int vars[] = {a, b, c};
  return f.partial(vars);
}

}  // namespace

TEST_CASE("seed variables and products") {
  Taylor x = Taylor::variable(2, 3, 0, 0.3);
  Taylor y = Taylor::variable(2, 3, 1, 0.7);
  Taylor f = x * x * y;
  CHECK(f.value() == doctest::Approx(0.063));
  CHECK(d1(f, 0) == doctest::Approx(2 * 0.3 * 0.7));
  CHECK(d2(f, 0, 0) == doctest::Approx(1.4));
  CHECK(d2(f, 0, 1) == doctest::Approx(0.6));
  CHECK(d3(f, 0, 0, 1) == doctest::Approx(2.0));
  CHECK(d3(f, 1, 1, 1) == 0.0);
}

TEST_CASE("mixed partial of exp(t x)") {
  const double t0 = 0.3, x0 = 0.7;
  Taylor t = Taylor::variable(2, 2, 0, t0);
  Taylor x = Taylor::variable(2, 2, 1, x0);
  Taylor f = exp(t * x);
  const double expect = (1 + t0 * x0) * std::exp(t0 * x0);
  CHECK(d2(f, 0, 1) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(d2(f, 1, 0) == d2(f, 0, 1));
}

TEST_CASE("derivative lowers order and order-0 throws") {
  Taylor x = Taylor::variable(1, 2, 0, 2.0);
  Taylor f = x * x * x;
  Taylor df = f.derivative(0);
  CHECK(df.order() == 1);
  CHECK(df.value() == doctest::Approx(12.0));
  Taylor ddf = df.derivative(0);
  CHECK(ddf.value() == doctest::Approx(12.0));
  CHECK_THROWS_AS(ddf.derivative(0), jetlag::Error);
  CHECK(Taylor(5.0).derivative(0).value() == 0.0);
}

TEST_CASE("univariate functions against closed-form derivatives") {
  const double v = 0.4;
  Taylor x = Taylor::variable(1, 3, 0, v);
  struct Case {
    Taylor f;
    double d0, d1, d2, d3;
  };
  const double th = std::tanh(v);
  const double sech2 = 1 - th * th;
  std::vector<Case> cases = {
      {exp(x), std::exp(v), std::exp(v), std::exp(v), std::exp(v)},
      {log(x), std::log(v), 1 / v, -1 / (v * v), 2 / (v * v * v)},
      {sin(x), std::sin(v), std::cos(v), -std::sin(v), -std::cos(v)},
      {cos(x), std::cos(v), -std::sin(v), -std::cos(v), std::sin(v)},
      {sqrt(x), std::sqrt(v), 0.5 / std::sqrt(v), -0.25 * std::pow(v, -1.5), 0.375 * std::pow(v, -2.5)},
      {tanh(x), th, sech2, -2 * th * sech2, sech2 * (6 * th * th - 2)},
      {recip(x), 1 / v, -1 / (v * v), 2 / std::pow(v, 3), -6 / std::pow(v, 4)},
      {pow(x, Taylor(2.5)), std::pow(v, 2.5), 2.5 * std::pow(v, 1.5), 3.75 * std::pow(v, 0.5),
       1.875 * std::pow(v, -0.5)},
      {abs(-x), v, 1, 0, 0},
  };
  for (const auto& c : cases) {
    CHECK(c.f.value() == doctest::Approx(c.d0).epsilon(1e-13));
    CHECK(d1(c.f, 0) == doctest::Approx(c.d1).epsilon(1e-13));
    CHECK(d2(c.f, 0, 0) == doctest::Approx(c.d2).epsilon(1e-13));
    CHECK(d3(c.f, 0, 0, 0) == doctest::Approx(c.d3).epsilon(1e-12));
  }
}

TEST_CASE("integer powers accept negative bases") {
  Taylor x = Taylor::variable(1, 2, 0, -2.0);
  Taylor f = pow(x, Taylor(3.0));
  CHECK(f.value() == doctest::Approx(-8.0));
  CHECK(d1(f, 0) == doctest::Approx(12.0));
  Taylor g = pow(x, Taylor(-2.0));
  CHECK(g.value() == doctest::Approx(0.25));
  CHECK(d1(g, 0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(pow(x, Taylor(0.5)), jetlag::DomainError);
}

TEST_CASE("domain errors") {
  Taylor x = Taylor::variable(1, 2, 0, 0.0);
  CHECK_THROWS_AS(log(x), jetlag::DomainError);
  CHECK_THROWS_AS(recip(x), jetlag::DomainError);
  CHECK_THROWS_AS(abs(x), jetlag::DomainError);
  CHECK_THROWS_AS(Taylor(1.0) / Taylor(0.0), jetlag::DomainError);
  CHECK_THROWS_AS(exp(Taylor(1000.0)), jetlag::DomainError);
}

TEST_CASE("exact constants do not truncate") {
  Taylor x = Taylor::variable(1, 3, 0, 1.5);
  Taylor f = Taylor(2.0) * x + Taylor(1.0);
  CHECK(f.order() == 3);
  CHECK(d1(f, 0) == doctest::Approx(2.0));
  Taylor z = Taylor(0.0) * x;
  CHECK(z.is_exact());
  Taylor c = exp(Taylor(0.0));
  CHECK(c.is_exact());
  CHECK(c.value() == 1.0);
}

TEST_CASE("mixed orders truncate to the lower order") {
  Taylor a = Taylor::variable(2, 3, 0, 1.0);
  Taylor b = Taylor::variable(2, 1, 1, 2.0);
  Taylor f = a * b;
  CHECK(f.order() == 1);
  CHECK(d1(f, 0) == doctest::Approx(2.0));
  CHECK(d1(f, 1) == doctest::Approx(1.0));
}

TEST_CASE("composition agrees with a finite-difference oracle in many variables") {
  const int nv = 6;
  std::vector<double> p0 = {0.1, -0.3, 0.5, 0.2, -0.7, 0.4};
  auto field = [&](auto&& v) {
    return sin(v[0] * v[1] + v[2]) * exp(v[3] - v[4] * v[5]) / (v[0] * v[0] + 2.0);
  };
  std::vector<Taylor> vars;
  for (int i = 0; i < nv; ++i) vars.push_back(Taylor::variable(nv, 2, i, p0[static_cast<std::size_t>(i)]));
  Taylor f = field(vars);
  auto plain = [&](std::vector<double> q) {
    std::vector<Taylor> c(q.begin(), q.end());
    return field(c).value();
  };
  const double h = 1e-4;
  for (int a = 0; a < nv; ++a) {
    for (int b = 0; b < nv; ++b) {
      auto shift = [&](double sa, double sb) {
        auto q = p0;
        q[static_cast<std::size_t>(a)] += sa;
        q[static_cast<std::size_t>(b)] += sb;
        return plain(q);
      };
      const double fd = (shift(h, h) - shift(h, -h) - shift(-h, h) + shift(-h, -h)) / (4 * h * h);
      CHECK(d2(f, a, b) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}
