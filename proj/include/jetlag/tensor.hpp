#pragma once

// Dense d-tensors over a temporal range 1..p and a spatial range 1..n.
//
// A signature is a list of storage axes. A vertical logical index occupies
// two adjacent axes: vertical-up is (spatial-up, temporal-down), vertical-down
// is (spatial-down, temporal-up); both axes carry the `paired` flag.
// Components are stored row-major over the axes. Indices are 0-based here.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "jetlag/error.hpp"
#include "jetlag/taylor.hpp"

namespace jetlag {

enum class Family : std::uint8_t { temporal, spatial };
enum class Variance : std::uint8_t { up, down };

struct Axis {
  Family family;
  Variance variance;
  bool paired = false;
  friend bool operator==(const Axis&, const Axis&) = default;
};

enum class Slot { Tu, Td, Su, Sd, Vu, Vd };

std::vector<Axis> axes_of(std::initializer_list<Slot> slots);
std::vector<Axis> axes_of(std::span<const Slot> slots);
/// Human-readable signature, e.g. "Su Sd Vd".
std::string describe(std::span<const Axis> axes);

template <class T>
class DTensor {
 public:
  DTensor() = default;
  DTensor(int p, int n, std::vector<Axis> axes, T fill = T(0.0))
      : p_(p), n_(n), axes_(std::move(axes)) {
    if (p < 1 || n < 1) throw Error(ErrorCode::contract_mismatch, "tensor dimensions must be positive");
    strides_.assign(axes_.size(), 1);
    std::size_t total = 1;
    for (std::size_t k = axes_.size(); k-- > 0;) {
      strides_[k] = total;
      total *= static_cast<std::size_t>(extent(k));
    }
    data_.assign(total, fill);
  }
  DTensor(int p, int n, std::initializer_list<Slot> slots, T fill = T(0.0))
      : DTensor(p, n, axes_of(slots), std::move(fill)) {}

  int p() const noexcept { return p_; }
  int n() const noexcept { return n_; }
  std::size_t rank() const noexcept { return axes_.size(); }
  const std::vector<Axis>& axes() const noexcept { return axes_; }
  const Axis& axis(std::size_t k) const { return axes_.at(k); }
  int extent(std::size_t k) const { return axes_[k].family == Family::temporal ? p_ : n_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t stride(std::size_t k) const { return strides_[k]; }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }
  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  template <class... I>
  T& operator()(I... idx) {
    return data_[offset(idx...)];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    return data_[offset(idx...)];
  }

  std::size_t offset(std::span<const int> idx) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) off += static_cast<std::size_t>(idx[k]) * strides_[k];
    return off;
  }
  T& at(std::span<const int> idx) { return data_[offset(idx)]; }
  const T& at(std::span<const int> idx) const { return data_[offset(idx)]; }

  /// Multi-index of a flat position.
  std::vector<int> unflatten(std::size_t flat) const {
    std::vector<int> idx(axes_.size());
    for (std::size_t k = 0; k < axes_.size(); ++k) {
      idx[k] = static_cast<int>(flat / strides_[k]);
      flat %= strides_[k];
    }
    return idx;
  }

 private:
  template <class... I>
  std::size_t offset(I... idx) const {
    const std::array<int, sizeof...(I)> a{static_cast<int>(idx)...};
    std::size_t off = 0;
    for (std::size_t k = 0; k < a.size(); ++k) off += static_cast<std::size_t>(a[k]) * strides_[k];
    return off;
  }

  int p_ = 1;
  int n_ = 1;
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::vector<T> data_;
};

/// Values of a tensor of series.
DTensor<double> values(const DTensor<Taylor>& a);
DTensor<Taylor> lift(const DTensor<double>& a);

/// Position of the partner of a paired axis.
std::size_t partner_axis(std::span<const Axis> axes, std::size_t k);

template <class T>
DTensor<T> contract(const DTensor<T>& a, std::size_t axis_up, std::size_t axis_dn) {
  if (axis_up >= a.rank() || axis_dn >= a.rank() || axis_up == axis_dn) {
    throw Error(ErrorCode::contract_mismatch, "contract: axis out of range");
  }
  const Axis& u = a.axis(axis_up);
  const Axis& d = a.axis(axis_dn);
  if (u.family != d.family || u.variance != Variance::up || d.variance != Variance::down) {
    throw Error(ErrorCode::contract_mismatch,
                "contract: axes must share a family and have opposite variance (up, down), got " +
                    describe(std::span<const Axis>(a.axes())));
  }
  std::vector<Axis> out_axes;
  std::vector<std::size_t> keep;
  std::vector<Axis> axes = a.axes();
  for (std::size_t k : {axis_up, axis_dn}) {
    if (axes[k].paired) {
      const std::size_t q = partner_axis(a.axes(), k);
      if (q != axis_up && q != axis_dn) axes[q].paired = false;
    }
  }
  for (std::size_t k = 0; k < a.rank(); ++k) {
    if (k == axis_up || k == axis_dn) continue;
    out_axes.push_back(axes[k]);
    keep.push_back(k);
  }
  const int ext = a.extent(axis_up);
  if (out_axes.empty()) {
    T s(0.0);
    for (int i = 0; i < ext; ++i) {
      s += a[static_cast<std::size_t>(i) * (a.stride(axis_up) + a.stride(axis_dn))];
    }
    DTensor<T> r(a.p(), a.n(), std::vector<Axis>{});
    r[0] = s;
    return r;
  }
  DTensor<T> r(a.p(), a.n(), out_axes);
  for (std::size_t flat = 0; flat < r.size(); ++flat) {
    const std::vector<int> idx = r.unflatten(flat);
    std::size_t base = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) base += static_cast<std::size_t>(idx[k]) * a.stride(keep[k]);
    T s(0.0);
    for (int i = 0; i < ext; ++i) {
      s += a[base + static_cast<std::size_t>(i) * (a.stride(axis_up) + a.stride(axis_dn))];
    }
    r[flat] = s;
  }
  return r;
}

namespace detail {
/// Throws unless the value matrix (row-major, dim x dim) is symmetric and well conditioned.
void check_symmetric_invertible(std::span<const double> m, int dim, const char* what);

template <class T>
std::vector<T> gauss_jordan_inverse(std::vector<T> a, int dim) {
  const auto d = static_cast<std::size_t>(dim);
  std::vector<T> inv(d * d, T(0.0));
  for (std::size_t i = 0; i < d; ++i) inv[i * d + i] = T(1.0);
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < d; ++r) {
      if (std::fabs(value_of(a[r * d + c])) > std::fabs(value_of(a[piv * d + c]))) piv = r;
    }
    if (piv != c) {
      for (std::size_t k = 0; k < d; ++k) {
        std::swap(a[c * d + k], a[piv * d + k]);
        std::swap(inv[c * d + k], inv[piv * d + k]);
      }
    }
    const T rp = T(1.0) / a[c * d + c];
    for (std::size_t k = 0; k < d; ++k) {
      a[c * d + k] = a[c * d + k] * rp;
      inv[c * d + k] = inv[c * d + k] * rp;
    }
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c) continue;
      const T f = a[r * d + c];
      if (is_exact_zero(f)) continue;
      for (std::size_t k = 0; k < d; ++k) {
        a[r * d + k] = a[r * d + k] - f * a[c * d + k];
        inv[r * d + k] = inv[r * d + k] - f * inv[c * d + k];
      }
    }
  }
  return inv;
}
}  // namespace detail

/// Inverse of a symmetric rank-2 tensor with both indices of one family.
/// Down-down gives up-up and vice versa.
template <class T>
DTensor<T> sym_inverse(const DTensor<T>& m) {
  if (m.rank() != 2 || m.axis(0).family != m.axis(1).family || m.axis(0).variance != m.axis(1).variance) {
    throw Error(ErrorCode::contract_mismatch, "sym_inverse: need a rank-2 tensor with matching indices");
  }
  const int dim = m.extent(0);
  std::vector<double> vals(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) vals[k] = value_of(m[k]);
  detail::check_symmetric_invertible(vals, dim, "sym_inverse");
  std::vector<T> a(m.data().begin(), m.data().end());
  std::vector<T> inv = detail::gauss_jordan_inverse(std::move(a), dim);
  const Variance flipped = m.axis(0).variance == Variance::down ? Variance::up : Variance::down;
  std::vector<Axis> axes{{m.axis(0).family, flipped, false}, {m.axis(1).family, flipped, false}};
  DTensor<T> r(m.p(), m.n(), axes);
  const auto d = static_cast<std::size_t>(dim);
  // Symmetrize so the result is exactly symmetric.
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      r(i, j) = i == j ? inv[i * d + j] : (inv[i * d + j] + inv[j * d + i]) * T(0.5);
    }
  }
  return r;
}

/// Flip the variance of `axis` with a metric of the same family. The metric
/// may be given down-down or up-up; it is inverted when the other one is needed.
template <class T>
DTensor<T> raise_lower(const DTensor<T>& a, std::size_t axis, const DTensor<T>& metric) {
  if (axis >= a.rank()) throw Error(ErrorCode::raise_lower_mismatch, "raise_lower: axis out of range");
  if (metric.rank() != 2 || metric.axis(0).family != metric.axis(1).family ||
      metric.axis(0).variance != metric.axis(1).variance) {
    throw Error(ErrorCode::raise_lower_mismatch, "raise_lower: metric must be rank 2 with matching indices");
  }
  const Axis ax = a.axis(axis);
  if (metric.axis(0).family != ax.family) {
    throw Error(ErrorCode::raise_lower_mismatch, "raise_lower: metric family does not match the axis");
  }
  // Raising a down index needs an up-up metric and vice versa.
  const Variance need = ax.variance == Variance::down ? Variance::up : Variance::down;
  const DTensor<T> g = metric.axis(0).variance == need ? metric : sym_inverse(metric);
  if (metric.axis(0).variance == need) {
    std::vector<double> vals(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) vals[k] = value_of(g[k]);
    const int dim = g.extent(0);
    const auto d = static_cast<std::size_t>(dim);
    const double scale = std::max(1.0, [&] {
      double mx = 0.0;
      for (double v : vals) mx = std::max(mx, std::fabs(v));
      return mx;
    }());
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (std::fabs(vals[i * d + j] - vals[j * d + i]) > 1e-12 * scale) {
          throw Error(ErrorCode::raise_lower_mismatch, "raise_lower: metric is not symmetric");
        }
      }
    }
  }
  std::vector<Axis> axes = a.axes();
  axes[axis].variance = need;
  DTensor<T> r(a.p(), a.n(), axes);
  const int ext = a.extent(axis);
  const std::size_t st = a.stride(axis);
  for (std::size_t flat = 0; flat < r.size(); ++flat) {
    const std::vector<int> idx = r.unflatten(flat);
    const std::size_t base = flat - static_cast<std::size_t>(idx[axis]) * st;
    T s(0.0);
    for (int m = 0; m < ext; ++m) s += g(idx[axis], m) * a[base + static_cast<std::size_t>(m) * st];
    r[flat] = s;
  }
  return r;
}

/// Eigenvalues (ascending) of a symmetric rank-2 value tensor.
std::vector<double> sym_eigenvalues(const DTensor<double>& m);

}  // namespace jetlag
