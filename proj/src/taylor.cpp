#include "jetlag/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "jetlag/error.hpp"

namespace jetlag {

namespace {

void enumerate_degree(int nvars, int degree, int var, std::vector<std::uint8_t>& cur,
                      std::vector<std::uint8_t>& out) {
  if (var == nvars - 1) {
    cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(degree);
    out.insert(out.end(), cur.begin(), cur.end());
    cur[static_cast<std::size_t>(var)] = 0;
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(e);
    enumerate_degree(nvars, degree - e, var + 1, cur, out);
  }
  cur[static_cast<std::size_t>(var)] = 0;
}

std::string key_of(const std::uint8_t* e, int nvars) {
  return std::string(reinterpret_cast<const char*>(e), static_cast<std::size_t>(nvars));
}

}  // namespace

MonomialBasis::MonomialBasis(int nvars, int max_order) : nvars_(nvars), max_order_(max_order) {
  if (nvars < 1 || max_order < 0 || max_order > 12) {
    throw Error(ErrorCode::order_exceeded, "taylor basis: unsupported size");
  }
  const auto nv = static_cast<std::size_t>(nvars);
  std::vector<std::uint8_t> cur(nv, 0);
  for (int d = 0; d <= max_order; ++d) {
    enumerate_degree(nvars, d, 0, cur, exps_);
    count_upto_.push_back(exps_.size() / nv);
  }
  const std::size_t count = exps_.size() / nv;
  degree_.resize(count);
  std::map<std::string, std::uint32_t> index;
  for (std::size_t m = 0; m < count; ++m) {
    int d = 0;
    for (std::size_t v = 0; v < nv; ++v) d += exps_[m * nv + v];
    degree_[m] = static_cast<std::uint8_t>(d);
    index.emplace(key_of(&exps_[m * nv], nvars), static_cast<std::uint32_t>(m));
  }

  raise_.assign(count * nv, -1);
  std::vector<std::uint8_t> tmp(nv);
  for (std::size_t m = 0; m < count; ++m) {
    if (degree_[m] >= max_order) continue;
    for (std::size_t v = 0; v < nv; ++v) {
      std::copy_n(&exps_[m * nv], nv, tmp.begin());
      ++tmp[v];
      raise_[m * nv + v] = static_cast<std::int32_t>(index.at(key_of(tmp.data(), nvars)));
    }
  }

  // Product pairs: every sub-monomial a <= m paired with m - a.
  pair_offset_.reserve(count + 1);
  pair_offset_.push_back(0);
  std::vector<std::uint8_t> sub(nv), rest(nv);
  for (std::size_t m = 0; m < count; ++m) {
    const std::uint8_t* em = &exps_[m * nv];
    std::fill(sub.begin(), sub.end(), 0);
    while (true) {
      for (std::size_t v = 0; v < nv; ++v) rest[v] = static_cast<std::uint8_t>(em[v] - sub[v]);
      pair_a_.push_back(index.at(key_of(sub.data(), nvars)));
      pair_b_.push_back(index.at(key_of(rest.data(), nvars)));
      // odometer increment bounded by em
      std::size_t v = 0;
      for (; v < nv; ++v) {
        if (sub[v] < em[v]) {
          ++sub[v];
          break;
        }
        sub[v] = 0;
      }
      if (v == nv) break;
    }
    pair_offset_.push_back(static_cast<std::uint32_t>(pair_a_.size()));
  }
}

std::size_t MonomialBasis::index_of(std::span<const int> exps) const {
  if (exps.size() != static_cast<std::size_t>(nvars_)) {
    throw Error(ErrorCode::order_exceeded, "taylor basis: exponent vector has wrong length");
  }
  int d = 0;
  for (int e : exps) d += e;
  if (d > max_order_) throw Error(ErrorCode::order_exceeded, "taylor basis: degree above basis order");
  // Linear scan of the degree block; only used for extraction, not arithmetic.
  const std::size_t lo = d == 0 ? 0 : count_upto_[static_cast<std::size_t>(d - 1)];
  const std::size_t hi = count_upto_[static_cast<std::size_t>(d)];
  const auto nv = static_cast<std::size_t>(nvars_);
  for (std::size_t m = lo; m < hi; ++m) {
    bool same = true;
    for (std::size_t v = 0; v < nv && same; ++v) same = exps_[m * nv + v] == exps[v];
    if (same) return m;
  }
  throw Error(ErrorCode::order_exceeded, "taylor basis: monomial not found");
}

const MonomialBasis& MonomialBasis::get(int nvars, int max_order) {
  static std::mutex mutex;
  static std::map<int, std::vector<std::unique_ptr<MonomialBasis>>> registry;
  std::lock_guard<std::mutex> lock(mutex);
  auto& list = registry[nvars];
  if (!list.empty() && list.back()->max_order() >= max_order) return *list.back();
  list.push_back(std::make_unique<MonomialBasis>(nvars, std::max(max_order, 2)));
  return *list.back();
}

// ---------------------------------------------------------------------------

Taylor Taylor::variable(int nvars, int order, int var, double value) {
  const MonomialBasis& b = MonomialBasis::get(nvars, order);
  std::vector<double> c(b.size(order), 0.0);
  c[0] = value;
  if (order >= 1) c[1 + static_cast<std::size_t>(var)] = 1.0;
  return Taylor(&b, order, std::move(c));
}

Taylor Taylor::constant(int nvars, int order, double value) {
  const MonomialBasis& b = MonomialBasis::get(nvars, order);
  std::vector<double> c(b.size(order), 0.0);
  c[0] = value;
  return Taylor(&b, order, std::move(c));
}

Taylor Taylor::derivative(int var) const {
  if (is_exact()) return Taylor();
  if (order_ == 0) throw Error(ErrorCode::order_exceeded, "derivative of an order-0 series");
  const int r = order_ - 1;
  const std::size_t count = basis_->size(r);
  std::vector<double> c(count);
  for (std::size_t m = 0; m < count; ++m) {
    const auto up = static_cast<std::size_t>(basis_->raised(m, var));
    c[m] = static_cast<double>(basis_->exponent(m, var) + 1) * coef_[up];
  }
  return Taylor(basis_, r, std::move(c));
}

double Taylor::partial(std::span<const int> vars) const {
  if (vars.empty()) return value();
  if (is_exact()) return 0.0;
  if (static_cast<int>(vars.size()) > order_) {
    throw Error(ErrorCode::order_exceeded, "partial derivative above series order");
  }
  std::vector<int> exps(static_cast<std::size_t>(basis_->nvars()), 0);
  for (int v : vars) ++exps.at(static_cast<std::size_t>(v));
  double factor = 1.0;
  for (int e : exps) {
    for (int k = 2; k <= e; ++k) factor *= k;
  }
  return factor * coef_[basis_->index_of(exps)];
}

Taylor Taylor::truncated(int order) const {
  if (is_exact() || order >= order_) return *this;
  if (order < 0) throw Error(ErrorCode::order_exceeded, "negative truncation order");
  std::vector<double> c(coef_.begin(), coef_.begin() + static_cast<std::ptrdiff_t>(basis_->size(order)));
  return Taylor(basis_, order, std::move(c));
}

bool Taylor::finite() const noexcept {
  if (is_exact()) return std::isfinite(value_);
  return std::all_of(coef_.begin(), coef_.end(), [](double v) { return std::isfinite(v); });
}

Taylor& Taylor::operator+=(const Taylor& o) {
  if (o.is_exact()) {
    if (is_exact()) {
      value_ += o.value_;
    } else {
      coef_[0] += o.value_;
    }
    return *this;
  }
  if (is_exact()) {
    const double v = value_;
    *this = o;
    coef_[0] += v;
    return *this;
  }
  const int r = std::min(order_, o.order_);
  if (o.basis_->max_order() > basis_->max_order()) basis_ = o.basis_;
  const std::size_t count = basis_->size(r);
  coef_.resize(count);
  order_ = r;
  for (std::size_t m = 0; m < count; ++m) coef_[m] += o.coef_[m];
  return *this;
}

Taylor operator-(Taylor a) {
  if (a.is_exact()) {
    a.value_ = -a.value_;
  } else {
    for (double& c : a.coef_) c = -c;
  }
  return a;
}

Taylor& Taylor::operator-=(const Taylor& o) { return *this += -o; }

Taylor operator*(const Taylor& a, const Taylor& b) {
  if (a.is_exact() || b.is_exact()) {
    const Taylor& s = a.is_exact() ? a : b;
    const Taylor& o = a.is_exact() ? b : a;
    if (o.is_exact()) return Taylor(s.value_ * o.value_);
    if (s.value_ == 0.0) return Taylor();
    Taylor r = o;
    for (double& c : r.coef_) c *= s.value_;
    return r;
  }
  const int r = std::min(a.order_, b.order_);
  const MonomialBasis* basis = a.basis_->max_order() >= b.basis_->max_order() ? a.basis_ : b.basis_;
  const std::size_t count = basis->size(r);
  std::vector<double> c(count);
  const std::uint32_t* pa = basis->pair_lhs();
  const std::uint32_t* pb = basis->pair_rhs();
  const double* ca = a.coef_.data();
  const double* cb = b.coef_.data();
  for (std::size_t m = 0; m < count; ++m) {
    double s = 0.0;
    const std::uint32_t end = basis->pair_end(m);
    for (std::uint32_t q = basis->pair_begin(m); q < end; ++q) s += ca[pa[q]] * cb[pb[q]];
    c[m] = s;
  }
  return Taylor(basis, r, std::move(c));
}

Taylor& Taylor::operator*=(const Taylor& o) { return *this = *this * o; }

Taylor operator/(const Taylor& a, const Taylor& b) {
  if (b.is_exact()) {
    if (b.value_ == 0.0) throw DomainError("division by zero");
    return a * Taylor(1.0 / b.value_);
  }
  return a * recip(b);
}

Taylor& Taylor::operator/=(const Taylor& o) { return *this = *this / o; }

Taylor Taylor::compose(std::span<const double> scaled) const {
  if (is_exact()) return Taylor(scaled[0]);
  if (scaled.size() < static_cast<std::size_t>(order_) + 1) {
    throw Error(ErrorCode::order_exceeded, "compose: too few coefficients");
  }
  Taylor u = *this;
  u.coef_[0] = 0.0;
  Taylor res(scaled[static_cast<std::size_t>(order_)]);
  for (int k = order_ - 1; k >= 0; --k) {
    res = res * u;
    res += Taylor(scaled[static_cast<std::size_t>(k)]);
  }
  if (res.is_exact()) return Taylor::constant(basis_->nvars(), order_, res.value_);
  return res;
}

// ---------------------------------------------------------------------------

namespace {

int series_order(const Taylor& a) { return a.is_exact() ? 0 : a.order(); }

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite result");
}

double binom(double c, int k) {
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= (c - j) / (j + 1);
  return r;
}

std::vector<double> power_coefficients(double v, double c, int order) {
  std::vector<double> s(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) s[static_cast<std::size_t>(k)] = binom(c, k) * std::pow(v, c - k);
  return s;
}

Taylor integer_power(const Taylor& a, long long e) {
  if (e == 0) return Taylor(1.0);
  if (e < 0) {
    if (a.value() == 0.0) throw DomainError("zero raised to a negative power");
    return integer_power(recip(a), -e);
  }
  Taylor result(1.0);
  Taylor base = a;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

}  // namespace

Taylor exp(const Taylor& a) {
  const double e = std::exp(a.value());
  require_finite(e, "exp");
  const int r = series_order(a);
  std::vector<double> s(static_cast<std::size_t>(r) + 1);
  double f = 1.0;
  for (int k = 0; k <= r; ++k) {
    if (k > 0) f *= k;
    s[static_cast<std::size_t>(k)] = e / f;
  }
  return a.compose(s);
}

Taylor log(const Taylor& a) {
  const double v = a.value();
  if (!(v > 0.0)) throw DomainError("log of a non-positive value");
  const int r = series_order(a);
  std::vector<double> s(static_cast<std::size_t>(r) + 1);
  s[0] = std::log(v);
  for (int k = 1; k <= r; ++k) {
    s[static_cast<std::size_t>(k)] = ((k % 2 == 1) ? 1.0 : -1.0) / (k * std::pow(v, k));
  }
  return a.compose(s);
}

Taylor sin(const Taylor& a) {
  const double sv = std::sin(a.value()), cv = std::cos(a.value());
  const double cyc[4] = {sv, cv, -sv, -cv};
  const int r = series_order(a);
  std::vector<double> s(static_cast<std::size_t>(r) + 1);
  double f = 1.0;
  for (int k = 0; k <= r; ++k) {
    if (k > 0) f *= k;
    s[static_cast<std::size_t>(k)] = cyc[k % 4] / f;
  }
  return a.compose(s);
}

Taylor cos(const Taylor& a) {
  const double sv = std::sin(a.value()), cv = std::cos(a.value());
  const double cyc[4] = {cv, -sv, -cv, sv};
  const int r = series_order(a);
  std::vector<double> s(static_cast<std::size_t>(r) + 1);
  double f = 1.0;
  for (int k = 0; k <= r; ++k) {
    if (k > 0) f *= k;
    s[static_cast<std::size_t>(k)] = cyc[k % 4] / f;
  }
  return a.compose(s);
}

Taylor sqrt(const Taylor& a) {
  const double v = a.value();
  if (a.is_exact()) {
    if (v < 0.0) throw DomainError("sqrt of a negative value");
    return Taylor(std::sqrt(v));
  }
  if (!(v > 0.0)) throw DomainError("sqrt of a non-positive value");
  return a.compose(power_coefficients(v, 0.5, a.order()));
}

Taylor tanh(const Taylor& a) {
  const double t = std::tanh(a.value());
  const int r = series_order(a);
  // k-th derivative of tanh is a polynomial P_k(T); P_{k+1} = P_k'(T) (1 - T^2).
  std::vector<double> poly{0.0, 1.0};
  std::vector<double> s(static_cast<std::size_t>(r) + 1);
  double f = 1.0;
  for (int k = 0; k <= r; ++k) {
    if (k > 0) {
      f *= k;
      std::vector<double> d(poly.size() > 1 ? poly.size() - 1 : 1, 0.0);
      for (std::size_t j = 1; j < poly.size(); ++j) d[j - 1] = static_cast<double>(j) * poly[j];
      std::vector<double> next(d.size() + 2, 0.0);
      for (std::size_t j = 0; j < d.size(); ++j) {
        next[j] += d[j];
        next[j + 2] -= d[j];
      }
      poly = std::move(next);
    }
    double acc = 0.0;
    for (std::size_t j = poly.size(); j-- > 0;) acc = acc * t + poly[j];
    s[static_cast<std::size_t>(k)] = acc / f;
  }
  return a.compose(s);
}

Taylor abs(const Taylor& a) {
  const double v = a.value();
  if (a.is_exact()) return Taylor(std::fabs(v));
  if (v > 0.0) return a;
  if (v < 0.0) return -a;
  throw DomainError("abs is not differentiable at zero");
}

Taylor recip(const Taylor& a) {
  const double v = a.value();
  if (v == 0.0) throw DomainError("division by zero");
  if (a.is_exact()) return Taylor(1.0 / v);
  const int r = a.order();
  std::vector<double> s(static_cast<std::size_t>(r) + 1);
  double p = 1.0 / v;
  for (int k = 0; k <= r; ++k) {
    s[static_cast<std::size_t>(k)] = (k % 2 == 0 ? p : -p);
    p /= v;
  }
  return a.compose(s);
}

Taylor pow(const Taylor& a, const Taylor& b) {
  const double av = a.value();
  if (b.is_exact()) {
    const double e = b.value();
    if (std::floor(e) == e && std::fabs(e) <= 1e6) {
      Taylor r = integer_power(a, static_cast<long long>(e));
      require_finite(r.value(), "pow");
      return r;
    }
    if (av > 0.0) {
      if (a.is_exact()) {
        const double r = std::pow(av, e);
        require_finite(r, "pow");
        return Taylor(r);
      }
      return a.compose(power_coefficients(av, e, a.order()));
    }
    if (av == 0.0 && a.is_exact() && e > 0.0) return Taylor();
    throw DomainError("non-integer power of a non-positive base");
  }
  if (!(av > 0.0)) throw DomainError("variable exponent requires a positive base");
  return exp(b * log(a));
}

}  // namespace jetlag
