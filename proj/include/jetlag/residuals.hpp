#pragma once

// Residual bookkeeping shared by the identity checks: per-point residual
// tensors with a term scale, folded over a point set in point order.

#include <string>
#include <vector>

#include "jetlag/tensor.hpp"

namespace jetlag {

struct ResidualBlock {
  std::string name;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  double scale = 0.0;     // largest term magnitude seen
  double relative = 0.0;  // max over points of |residual| / max(term scale, 1e-12)
  std::size_t count = 0;  // components times points
  std::size_t witness = 0;
};

struct PointResiduals {
  std::vector<DTensor<double>> residual;  // LHS - RHS, one per block
  std::vector<double> scale;              // largest term magnitude per block
};

struct ResidualReport {
  std::vector<ResidualBlock> blocks;
  double worst_relative() const;
  double worst_abs() const;
};

ResidualReport fold_residuals(const std::vector<std::string>& names, const std::vector<PointResiduals>& pts);

/// Largest |value| of a series tensor.
double max_value(const DTensor<Taylor>& a);

}  // namespace jetlag
