#include "jetlag/residuals.hpp"

#include <algorithm>
#include <cmath>

#include "jetlag/error.hpp"

namespace jetlag {

double ResidualReport::worst_relative() const {
  double m = 0.0;
  for (const auto& b : blocks) m = std::max(m, b.relative);
  return m;
}

double ResidualReport::worst_abs() const {
  double m = 0.0;
  for (const auto& b : blocks) m = std::max(m, b.max_abs);
  return m;
}

ResidualReport fold_residuals(const std::vector<std::string>& names, const std::vector<PointResiduals>& pts) {
  ResidualReport r;
  r.blocks.resize(names.size());
  for (std::size_t e = 0; e < names.size(); ++e) {
    ResidualBlock& b = r.blocks[e];
    b.name = names[e];
    double sum = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (pts[k].residual.size() != names.size() || pts[k].scale.size() != names.size()) {
        throw Error(ErrorCode::contract_mismatch, "residual block count does not match its names");
      }
      double m = 0.0;
      for (double v : pts[k].residual[e].data()) {
        m = std::max(m, std::fabs(v));
        sum += std::fabs(v);
      }
      b.count += pts[k].residual[e].size();
      const double sc = pts[k].scale[e];
      b.scale = std::max(b.scale, sc);
      const double rel = m / std::max(sc, 1e-12);
      if (rel > b.relative) {
        b.relative = rel;
        b.witness = k;
      }
      b.max_abs = std::max(b.max_abs, m);
    }
    b.mean_abs = b.count ? sum / static_cast<double>(b.count) : 0.0;
  }
  return r;
}

double max_value(const DTensor<Taylor>& a) {
  double m = 0.0;
  for (const Taylor& c : a.data()) m = std::max(m, std::fabs(c.value()));
  return m;
}

}  // namespace jetlag
