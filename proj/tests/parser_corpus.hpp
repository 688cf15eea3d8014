#pragma once

// Grammar corpus shared by the parser unit tests and the acceptance run.
// Values are hand-derived closed forms at the fixed point below.

#include <cmath>
#include <string>
#include <vector>

#include "jetlag/jet.hpp"

namespace corpus {

enum class Expect { value, parse_error, domain_error };

struct Case {
  std::string src;
  Expect expect;
  double value;       // expected value for Expect::value
  std::size_t where;  // offset for errors
};

inline jetlag::Dims dims() { return {2, 2}; }

inline jetlag::JetPoint point() {
  jetlag::JetPoint pt;
  pt.t = {0.5, -0.25};
  pt.x = {1.5, 2.0};
  pt.xs = {0.3, -0.4, 0.7, 0.1};
  return pt;
}

inline std::vector<Case> cases() {
  using std::exp;
  const double t1 = 0.5, t2 = -0.25, x1 = 1.5, x2 = 2.0, s11 = 0.3, s21 = 0.7;
  return {
      {"1 + 2*3", Expect::value, 7.0, 0},
      {"(1 + 2)*3", Expect::value, 9.0, 0},
      {"2^3^2", Expect::value, 512.0, 0},
      {"-2^2", Expect::value, -4.0, 0},
      {"(-2)^2", Expect::value, 4.0, 0},
      {"2^-1", Expect::value, 0.5, 0},
      {"8/4/2", Expect::value, 1.0, 0},
      {"10 - 4 - 3", Expect::value, 3.0, 0},
      {"- -3", Expect::value, 3.0, 0},
      {"2*-3", Expect::value, -6.0, 0},
      {"1e3 + .5", Expect::value, 1000.5, 0},
      {"2.5E-1", Expect::value, 0.25, 0},
      {"t[1]*xs[1][1]", Expect::value, t1 * s11, 0},
      {"x[2]^2", Expect::value, x2 * x2, 0},
      {"exp(2*t[1]*x[1])", Expect::value, exp(2 * t1 * x1), 0},
      {"log(x[1])", Expect::value, std::log(x1), 0},
      {"sin(t[2]) + cos(t[2])", Expect::value, std::sin(t2) + std::cos(t2), 0},
      {"sqrt(x[2])", Expect::value, std::sqrt(x2), 0},
      {"tanh(xs[2][1])", Expect::value, std::tanh(s21), 0},
      {"abs(t[2])", Expect::value, 0.25, 0},
      {"x[1]^0.5", Expect::value, std::sqrt(x1), 0},
      {"(-2)^3", Expect::value, -8.0, 0},
      {"-x[1]^2", Expect::value, -x1 * x1, 0},
      {"3 - -x[1]", Expect::value, 3 + x1, 0},
      {"  1+\n2 ", Expect::value, 3.0, 0},
      {"x[1]*x[2]/t[1]", Expect::value, x1 * x2 / t1, 0},
      {"2^0", Expect::value, 1.0, 0},
      {"2*3^2", Expect::value, 18.0, 0},
      {"-(1)-2", Expect::value, -3.0, 0},
      {"", Expect::parse_error, 0, 0},
      {"1 +", Expect::parse_error, 0, 3},
      {"1 + * 2", Expect::parse_error, 0, 4},
      {"(1 + 2", Expect::parse_error, 0, 6},
      {"xs[1][3]", Expect::parse_error, 0, 6},
      {"t[0]", Expect::parse_error, 0, 2},
      {"x[3]", Expect::parse_error, 0, 2},
      {"foo(1)", Expect::parse_error, 0, 0},
      {"sin 1", Expect::parse_error, 0, 4},
      {"1 2", Expect::parse_error, 0, 2},
      {"1e999", Expect::parse_error, 0, 0},
      {"t[1", Expect::parse_error, 0, 3},
      {"x[]", Expect::parse_error, 0, 2},
      {"2 ** 3", Expect::parse_error, 0, 3},
      {")", Expect::parse_error, 0, 0},
      {"xs[1]", Expect::parse_error, 0, 5},
      {"log(t[2])", Expect::domain_error, 0, 0},
      {"1/(x[1]-1.5)", Expect::domain_error, 0, 1},
      {"sqrt(-1)", Expect::domain_error, 0, 0},
      {"(-2)^0.5", Expect::domain_error, 0, 4},
      {"exp(1000)", Expect::domain_error, 0, 0},
      {"log(0)", Expect::domain_error, 0, 0},
  };
}

}  // namespace corpus
