#include "jetlag/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "jetlag/error.hpp"

namespace jetlag {

namespace {

struct FuncName {
  const char* name;
  Func func;
};
constexpr FuncName kFuncs[] = {{"exp", Func::exp},   {"log", Func::log},   {"sin", Func::sin}, {"cos", Func::cos},
                               {"sqrt", Func::sqrt}, {"tanh", Func::tanh}, {"abs", Func::abs}};

const char* func_name(Func f) {
  for (const auto& e : kFuncs) {
    if (e.func == f) return e.name;
  }
  return "?";
}

Expr make(ExprNode node) { return std::make_shared<const ExprNode>(std::move(node)); }

class Parser {
 public:
  Parser(const std::string& src, Dims dims) : s_(src), dims_(dims) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (i_ != s_.size()) fail(i_, "operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& expected) const {
    std::size_t lo = s_.rfind('\n', at == 0 ? 0 : at - 1);
    lo = (lo == std::string::npos || at == 0) ? 0 : lo + 1;
    std::size_t hi = s_.find('\n', at);
    if (hi == std::string::npos) hi = s_.size();
    throw ParseError(at, expected, s_.substr(lo, hi - lo));
  }

  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(i_, std::string("'") + c + "'");
  }

  Expr expr() {
    Expr e = term();
    while (true) {
      skip_ws();
      const std::size_t at = i_;
      if (eat('+')) {
        e = make({ExprKind::add, at, 0.0, {}, Func::exp, e, term()});
      } else if (eat('-')) {
        e = make({ExprKind::sub, at, 0.0, {}, Func::exp, e, term()});
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = unary();
    while (true) {
      skip_ws();
      const std::size_t at = i_;
      if (eat('*')) {
        e = make({ExprKind::mul, at, 0.0, {}, Func::exp, e, unary()});
      } else if (eat('/')) {
        e = make({ExprKind::div, at, 0.0, {}, Func::exp, e, unary()});
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    skip_ws();
    const std::size_t at = i_;
    if (eat('-')) return make({ExprKind::neg, at, 0.0, {}, Func::exp, unary(), nullptr});
    return power();
  }

  Expr power() {
    Expr base = atom();
    skip_ws();
    const std::size_t at = i_;
    if (eat('^')) return make({ExprKind::pow, at, 0.0, {}, Func::exp, base, unary()});
    return base;
  }

  Expr atom() {
    skip_ws();
    const std::size_t at = i_;
    if (i_ >= s_.size()) fail(i_, "number, coordinate, function call or '('");
    const char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++i_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
      const std::string id = s_.substr(i_, j - i_);
      if (id == "t" || id == "x" || id == "xs") {
        i_ = j;
        return coord(id, at);
      }
      for (const auto& f : kFuncs) {
        if (id == f.name) {
          i_ = j;
          expect('(');
          Expr arg = expr();
          expect(')');
          return make({ExprKind::call, at, 0.0, {}, f.func, arg, nullptr});
        }
      }
      fail(at, "coordinate (t, x, xs) or function (exp, log, sin, cos, sqrt, tanh, abs)");
    }
    fail(at, "number, coordinate, function call or '('");
  }

  Expr number() {
    const std::size_t at = i_;
    std::size_t j = i_;
    bool digits = false;
    while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) {
      ++j;
      digits = true;
    }
    if (j < s_.size() && s_[j] == '.') {
      ++j;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) {
        ++j;
        digits = true;
      }
    }
    if (!digits) fail(at, "digits");
    if (j < s_.size() && (s_[j] == 'e' || s_[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
      if (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) {
        while (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) ++k;
        j = k;
      }
    }
    const std::string text = s_.substr(at, j - at);
    const double v = std::strtod(text.c_str(), nullptr);
    if (!std::isfinite(v)) fail(at, "a finite number literal");
    i_ = j;
    return make({ExprKind::number, at, v, {}, Func::exp, nullptr, nullptr});
  }

  int index(int bound, const char* what) {
    expect('[');
    skip_ws();
    const std::size_t at = i_;
    std::size_t j = i_;
    while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
    if (j == at) fail(at, "an integer index");
    if (j - at > 6) fail(at, std::string(what) + " index in 1.." + std::to_string(bound));
    const int v = std::atoi(s_.substr(at, j - at).c_str());
    if (v < 1 || v > bound) fail(at, std::string(what) + " index in 1.." + std::to_string(bound));
    i_ = j;
    expect(']');
    return v - 1;
  }

  Expr coord(const std::string& id, std::size_t at) {
    CoordId c;
    if (id == "t") {
      c = coord_t(index(dims_.p, "temporal"));
    } else if (id == "x") {
      c = coord_x(index(dims_.n, "spatial"));
    } else {
      const int i = index(dims_.n, "spatial");
      const int a = index(dims_.p, "temporal");
      c = coord_xs(i, a);
    }
    return make({ExprKind::coord, at, 0.0, c, Func::exp, nullptr, nullptr});
  }

  const std::string& s_;
  Dims dims_;
  std::size_t i_ = 0;
};

void print(const Expr& e, std::string& out) {
  switch (e->kind) {
    case ExprKind::number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e->number);
      out += buf;
      return;
    }
    case ExprKind::coord: out += to_string(e->coord); return;
    case ExprKind::neg:
      out += "(-";
      print(e->lhs, out);
      out += ")";
      return;
    case ExprKind::call:
      out += func_name(e->func);
      out += "(";
      print(e->lhs, out);
      out += ")";
      return;
    default: break;
  }
  const char* op = e->kind == ExprKind::add   ? " + "
                   : e->kind == ExprKind::sub ? " - "
                   : e->kind == ExprKind::mul ? " * "
                   : e->kind == ExprKind::div ? " / "
                                              : "^";
  out += "(";
  print(e->lhs, out);
  out += op;
  print(e->rhs, out);
  out += ")";
}

Taylor eval_node(const ExprNode& e, const FieldArgs& a) {
  Taylor r;
  try {
    switch (e.kind) {
      case ExprKind::number: return Taylor(e.number);
      case ExprKind::coord:
        switch (e.coord.kind) {
          case CoordKind::t: return a.t[static_cast<std::size_t>(e.coord.i)];
          case CoordKind::x: return a.x[static_cast<std::size_t>(e.coord.i)];
          case CoordKind::xs: return a.slope(e.coord.i, e.coord.a);
        }
        break;
      case ExprKind::neg: r = -eval_node(*e.lhs, a); break;
      case ExprKind::add: r = eval_node(*e.lhs, a) + eval_node(*e.rhs, a); break;
      case ExprKind::sub: r = eval_node(*e.lhs, a) - eval_node(*e.rhs, a); break;
      case ExprKind::mul: r = eval_node(*e.lhs, a) * eval_node(*e.rhs, a); break;
      case ExprKind::div: {
        Taylor num = eval_node(*e.lhs, a);
        Taylor den = eval_node(*e.rhs, a);
        if (den.value() == 0.0) throw DomainError("division by zero", e.pos);
        r = num / den;
        break;
      }
      case ExprKind::pow: r = pow(eval_node(*e.lhs, a), eval_node(*e.rhs, a)); break;
      case ExprKind::call: {
        Taylor u = eval_node(*e.lhs, a);
        switch (e.func) {
          case Func::exp: r = exp(u); break;
          case Func::log: r = log(u); break;
          case Func::sin: r = sin(u); break;
          case Func::cos: r = cos(u); break;
          case Func::sqrt: r = sqrt(u); break;
          case Func::tanh: r = tanh(u); break;
          case Func::abs: r = abs(u); break;
        }
        break;
      }
    }
  } catch (const DomainError& err) {
    if (err.position() != DomainError::npos) throw;
    throw DomainError(std::string(err.what()) + " at offset " + std::to_string(e.pos), e.pos);
  }
  if (!r.finite()) throw DomainError("non-finite value at offset " + std::to_string(e.pos), e.pos);
  return r;
}

void collect(const Expr& e, std::vector<const ExprNode*>& coords) {
  if (!e) return;
  if (e->kind == ExprKind::coord) coords.push_back(e.get());
  collect(e->lhs, coords);
  collect(e->rhs, coords);
}

Deps bit_of(CoordKind k) { return k == CoordKind::t ? dep_t : k == CoordKind::x ? dep_x : dep_xs; }

}  // namespace

Expr parse_field(const std::string& src, Dims dims) { return Parser(src, dims).parse(); }

std::string print_field(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::number: return a->number == b->number;
    case ExprKind::coord: return a->coord == b->coord;
    case ExprKind::call:
      if (a->func != b->func) return false;
      break;
    default: break;
  }
  return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
}

Taylor eval_field(const Expr& e, const FieldArgs& args) { return eval_node(*e, args); }

Deps deps_of(const Expr& e) {
  std::vector<const ExprNode*> coords;
  collect(e, coords);
  Deps d = 0;
  for (const ExprNode* c : coords) d |= bit_of(c->coord.kind);
  return d;
}

std::vector<DepViolation> validate_field(const Expr& e, Deps declared) {
  std::vector<const ExprNode*> coords;
  collect(e, coords);
  std::vector<DepViolation> out;
  for (const ExprNode* c : coords) {
    if (!(declared & bit_of(c->coord.kind))) out.push_back({c->pos, c->coord});
  }
  std::sort(out.begin(), out.end(), [](const DepViolation& a, const DepViolation& b) { return a.pos < b.pos; });
  return out;
}

ScalarField expr_field(std::string name, Expr e) {
  const Deps d = deps_of(e);
  return expr_field(std::move(name), std::move(e), d);
}

ScalarField expr_field(std::string name, Expr e, Deps deps) {
  const auto bad = validate_field(e, deps);
  if (!bad.empty()) {
    throw Error(ErrorCode::regularity_violation, "field '" + name + "' references " + to_string(bad.front().coord) +
                                                     " outside its dependencies " + deps_to_string(deps));
  }
  return {std::move(name), deps, [e](const FieldArgs& a) { return eval_field(e, a); }};
}

}  // namespace jetlag
