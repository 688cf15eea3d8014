#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Taylor value holds the coefficients of a polynomial in `nvars` seed
// variables, truncated at total degree `order`. Coefficients are stored in
// the scaled form f_a / a! so that multiplication is a plain convolution.
// Monomials are enumerated by degree, and the enumeration of degree <= k is a
// prefix of the enumeration of degree <= k + 1, so truncation is a resize.
//
// Exact constants carry no basis and have infinite order; they mix with any
// series without truncating it. Differentiating a series lowers its order by
// one; differentiating an order-0 series throws order_exceeded.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace jetlag {

class MonomialBasis {
 public:
  /// Shared, immutable basis with at least the requested order. Thread-safe.
  static const MonomialBasis& get(int nvars, int max_order);

  int nvars() const noexcept { return nvars_; }
  int max_order() const noexcept { return max_order_; }
  /// Number of monomials of total degree <= order.
  std::size_t size(int order) const { return count_upto_.at(static_cast<std::size_t>(order)); }
  int degree(std::size_t m) const { return degree_[m]; }
  int exponent(std::size_t m, int var) const {
    return exps_[m * static_cast<std::size_t>(nvars_) + static_cast<std::size_t>(var)];
  }
  /// Index of m + e_var, or -1 when that exceeds max_order.
  std::int32_t raised(std::size_t m, int var) const {
    return raise_[m * static_cast<std::size_t>(nvars_) + static_cast<std::size_t>(var)];
  }
  /// Index of the monomial with the given exponents.
  std::size_t index_of(std::span<const int> exps) const;

  // (a, b) index pairs with a + b == m, for the product coefficient of m.
  std::uint32_t pair_begin(std::size_t m) const { return pair_offset_[m]; }
  std::uint32_t pair_end(std::size_t m) const { return pair_offset_[m + 1]; }
  const std::uint32_t* pair_lhs() const { return pair_a_.data(); }
  const std::uint32_t* pair_rhs() const { return pair_b_.data(); }

  MonomialBasis(int nvars, int max_order);

 private:
  int nvars_;
  int max_order_;
  std::vector<std::size_t> count_upto_;
  std::vector<std::uint8_t> exps_;
  std::vector<std::uint8_t> degree_;
  std::vector<std::int32_t> raise_;
  std::vector<std::uint32_t> pair_offset_;
  std::vector<std::uint32_t> pair_a_;
  std::vector<std::uint32_t> pair_b_;
};

class Taylor {
 public:
  static constexpr int exact_order = std::numeric_limits<int>::max();

  Taylor() = default;
  Taylor(double v) : value_(v) {}  // NOLINT: exact constants convert implicitly

  /// Seed variable `var` at `value`, truncated at `order`.
  static Taylor variable(int nvars, int order, int var, double value);
  /// Series constant (finite order, no derivative content).
  static Taylor constant(int nvars, int order, double value);

  double value() const noexcept { return coef_.empty() ? value_ : coef_[0]; }
  int order() const noexcept { return order_; }
  bool is_exact() const noexcept { return basis_ == nullptr; }
  const MonomialBasis* basis() const noexcept { return basis_; }
  std::span<const double> coefficients() const noexcept { return coef_; }

  /// d/d(var). Lowers the order by one.
  Taylor derivative(int var) const;
  /// Mixed partial derivative value (sum over listed variables, repeats allowed).
  double partial(std::span<const int> vars) const;
  Taylor truncated(int order) const;
  /// True when every coefficient is finite.
  bool finite() const noexcept;

  Taylor& operator+=(const Taylor& o);
  Taylor& operator-=(const Taylor& o);
  Taylor& operator*=(const Taylor& o);
  Taylor& operator/=(const Taylor& o);

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator*(const Taylor& a, const Taylor& b);
  friend Taylor operator/(const Taylor& a, const Taylor& b);
  friend Taylor operator-(Taylor a);

  /// Apply a univariate function given its scaled Taylor coefficients
  /// f(v), f'(v), f''(v)/2!, ... at v = value().
  Taylor compose(std::span<const double> scaled) const;

 private:
  Taylor(const MonomialBasis* basis, int order, std::vector<double> coef)
      : basis_(basis), order_(order), coef_(std::move(coef)) {}

  const MonomialBasis* basis_ = nullptr;
  int order_ = exact_order;
  double value_ = 0.0;  // used only for exact constants
  std::vector<double> coef_;
};

Taylor exp(const Taylor& a);
Taylor log(const Taylor& a);
Taylor sin(const Taylor& a);
Taylor cos(const Taylor& a);
Taylor sqrt(const Taylor& a);
Taylor tanh(const Taylor& a);
Taylor abs(const Taylor& a);
Taylor recip(const Taylor& a);
/// a^b. Integer exact exponents use repeated products and accept negative
/// bases; otherwise the base must be positive.
Taylor pow(const Taylor& a, const Taylor& b);

inline double value_of(double v) { return v; }
inline double value_of(const Taylor& v) { return v.value(); }
inline bool is_exact_zero(double v) { return v == 0.0; }
inline bool is_exact_zero(const Taylor& v) { return v.is_exact() && v.value() == 0.0; }

}  // namespace jetlag
