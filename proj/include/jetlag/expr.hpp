#pragma once

// Field expression language.
//
//   expr  := term (("+" | "-") term)*
//   term  := unary (("*" | "/") unary)*
//   unary := "-" unary | power
//   power := atom ("^" unary)?          right associative
//   atom  := number | coord | call | "(" expr ")"
//   coord := "t[" int "]" | "x[" int "]" | "xs[" int "][" int "]"
//   call  := name "(" expr ")"   name in {exp, log, sin, cos, sqrt, tanh, abs}
//
// Unary minus binds looser than "^", so -a^b is -(a^b). Indices are 1-based.

#include <memory>
#include <string>
#include <vector>

#include "jetlag/jet.hpp"

namespace jetlag {

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

enum class ExprKind { number, coord, neg, add, sub, mul, div, pow, call };
enum class Func { exp, log, sin, cos, sqrt, tanh, abs };

struct ExprNode {
  ExprKind kind;
  std::size_t pos;  // byte offset of the node in its source
  double number = 0.0;
  CoordId coord{};
  Func func = Func::exp;
  Expr lhs;  // operand of neg and call, left operand of binaries
  Expr rhs;
};

Expr parse_field(const std::string& src, Dims dims);

/// Fully parenthesized canonical text; numbers printed with 17 significant digits.
std::string print_field(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// Evaluate with derivative propagation. Any non-finite intermediate raises a
/// DomainError carrying the offending node's position.
Taylor eval_field(const Expr& e, const FieldArgs& args);

/// Coordinate groups referenced by the expression.
Deps deps_of(const Expr& e);

struct DepViolation {
  std::size_t pos;
  CoordId coord;
};

/// Every coordinate reference outside `declared`.
std::vector<DepViolation> validate_field(const Expr& e, Deps declared);

/// Wrap an expression as a field; dependencies default to those referenced.
ScalarField expr_field(std::string name, Expr e);
ScalarField expr_field(std::string name, Expr e, Deps deps);

}  // namespace jetlag
