#include "jetlag/tensor.hpp"

#include <Eigen/Dense>
#include <limits>
#include <sstream>

namespace jetlag {

std::vector<Axis> axes_of(std::span<const Slot> slots) {
  std::vector<Axis> out;
  for (Slot s : slots) {
    switch (s) {
      case Slot::Tu: out.push_back({Family::temporal, Variance::up}); break;
      case Slot::Td: out.push_back({Family::temporal, Variance::down}); break;
      case Slot::Su: out.push_back({Family::spatial, Variance::up}); break;
      case Slot::Sd: out.push_back({Family::spatial, Variance::down}); break;
      case Slot::Vu:
        out.push_back({Family::spatial, Variance::up, true});
        out.push_back({Family::temporal, Variance::down, true});
        break;
      case Slot::Vd:
        out.push_back({Family::spatial, Variance::down, true});
        out.push_back({Family::temporal, Variance::up, true});
        break;
    }
  }
  return out;
}

std::vector<Axis> axes_of(std::initializer_list<Slot> slots) {
  return axes_of(std::span<const Slot>(slots.begin(), slots.size()));
}

std::string describe(std::span<const Axis> axes) {
  std::ostringstream os;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    if (k) os << ' ';
    os << (axes[k].family == Family::temporal ? 'T' : 'S') << (axes[k].variance == Variance::up ? 'u' : 'd');
    if (axes[k].paired) os << '*';
  }
  return os.str();
}

std::size_t partner_axis(std::span<const Axis> axes, std::size_t k) {
  // Vertical pairs are stored (spatial, temporal).
  const std::size_t q = axes[k].family == Family::spatial ? k + 1 : k - 1;
  if (!axes[k].paired || q >= axes.size() || !axes[q].paired || axes[q].family == axes[k].family) {
    throw Error(ErrorCode::contract_mismatch, "malformed vertical index pair");
  }
  return q;
}

DTensor<double> values(const DTensor<Taylor>& a) {
  DTensor<double> r(a.p(), a.n(), a.axes());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k].value();
  return r;
}

DTensor<Taylor> lift(const DTensor<double>& a) {
  DTensor<Taylor> r(a.p(), a.n(), a.axes());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = Taylor(a[k]);
  return r;
}

namespace detail {

void check_symmetric_invertible(std::span<const double> m, int dim, const char* what) {
  Eigen::MatrixXd a(dim, dim);
  double scale = 1.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double v = m[static_cast<std::size_t>(i * dim + j)];
      if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite metric component");
      a(i, j) = v;
      scale = std::max(scale, std::fabs(v));
    }
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < i; ++j) {
      if (std::fabs(a(i, j) - a(j, i)) > 1e-12 * scale) {
        throw Error(ErrorCode::contract_mismatch, std::string(what) + ": matrix is not symmetric");
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double mx = ev.cwiseAbs().maxCoeff();
  const double mn = ev.cwiseAbs().minCoeff();
  const double det = ev.prod();
  const double cond = mn > 0.0 ? mx / mn : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e12)) {
    std::ostringstream os;
    os << what << ": singular metric (det estimate " << det << ", condition " << cond << ")";
    throw SingularMetricError(os.str(), det, cond);
  }
}

}  // namespace detail

std::vector<double> sym_eigenvalues(const DTensor<double>& m) {
  const int dim = m.extent(0);
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

}  // namespace jetlag
