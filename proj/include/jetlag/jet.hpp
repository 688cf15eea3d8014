#pragma once

// Points of J1(T,M), coordinate identifiers, and scalar fields.
//
// The jet variables of a point are numbered t^a -> a, x^i -> p + i,
// x^i_a -> p + n + i*p + a (all 0-based).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "jetlag/taylor.hpp"

namespace jetlag {

struct Dims {
  int p = 1;
  int n = 1;
  int nvars() const noexcept { return p + n + n * p; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

struct JetPoint {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> xs;  // row-major [i][a]

  static JetPoint zeros(Dims d);
  double slope(int i, int a, int p) const { return xs[static_cast<std::size_t>(i * p + a)]; }
  /// Throws a config error when the lengths do not match `d`.
  void check(Dims d) const;
  /// All coordinates in jet-variable order.
  std::vector<double> flat() const;
};

enum class CoordKind : std::uint8_t { t, x, xs };

struct CoordId {
  CoordKind kind = CoordKind::t;
  int i = 0;  // temporal index for t, spatial index for x and xs
  int a = 0;  // temporal index of xs
  friend bool operator==(const CoordId&, const CoordId&) = default;
};

inline CoordId coord_t(int a) { return {CoordKind::t, a, 0}; }
inline CoordId coord_x(int i) { return {CoordKind::x, i, 0}; }
inline CoordId coord_xs(int i, int a) { return {CoordKind::xs, i, a}; }

int var_index(Dims d, CoordId c);
CoordId coord_of(Dims d, int var);
/// 1-based rendering, e.g. "xs[2][1]".
std::string to_string(CoordId c);

/// Dependency set as a bit mask.
using Deps = std::uint8_t;
constexpr Deps dep_t = 1;
constexpr Deps dep_x = 2;
constexpr Deps dep_xs = 4;
constexpr Deps dep_all = dep_t | dep_x | dep_xs;
std::string deps_to_string(Deps d);

/// Coordinates handed to a field evaluation. Coordinates outside the field's
/// declared dependencies arrive as exact constants, so they carry no derivative.
struct FieldArgs {
  Dims dims;
  std::span<const Taylor> t;
  std::span<const Taylor> x;
  std::span<const Taylor> xs;
  const Taylor& slope(int i, int a) const { return xs[static_cast<std::size_t>(i * dims.p + a)]; }
};

struct ScalarField {
  std::string name;
  Deps deps = 0;
  std::function<Taylor(const FieldArgs&)> eval;
};

ScalarField constant_field(std::string name, double value);

/// Seeded jet variables of a point at a given truncation order, plus an
/// exact-constant copy used for undeclared coordinates.
class JetVars {
 public:
  JetVars(Dims d, const JetPoint& pt, int order);
  /// Plain values: every coordinate is an exact constant.
  JetVars(Dims d, const JetPoint& pt);

  Dims dims() const noexcept { return dims_; }
  int order() const noexcept { return order_; }
  FieldArgs args(Deps deps) const;
  const Taylor& var(int index) const { return seeded_[static_cast<std::size_t>(index)]; }

 private:
  Dims dims_;
  int order_;
  std::vector<Taylor> seeded_;
  std::vector<Taylor> exact_;
};

Taylor evaluate(const ScalarField& f, const JetVars& vars);
double evaluate_value(const ScalarField& f, Dims d, const JetPoint& pt);

}  // namespace jetlag
