#pragma once

// Partial derivatives of scalar fields: exact (truncated Taylor series) and a
// central finite-difference oracle.

#include <limits>
#include <vector>

#include "jetlag/jet.hpp"

namespace jetlag {

struct DiffConfig {
  enum class Mode { taylor, central_fd };
  Mode mode = Mode::taylor;
  // FD step for order k is fd_step[k-1] * max(1, |coordinate|).
  double fd_step[2] = {1e-5, 1e-4};
  // Derivative budget above the metric (1..3).
  int max_order = 3;

  void check() const;
};

/// Mixed partial d^k f / d wrt[0] ... d wrt[k-1], k = wrt.size() <= 3.
double eval_derivs(const ScalarField& f, Dims d, const JetPoint& pt, const std::vector<CoordId>& wrt,
                   const DiffConfig& cfg = {});

/// Central-difference estimate, k <= 2. Error is O(step^2).
double fd_partial(const ScalarField& f, Dims d, const JetPoint& pt, const std::vector<CoordId>& wrt,
                  const DiffConfig& cfg = {});

struct AgreementReport {
  double max_rel_deviation = 0.0;
  std::size_t comparisons = 0;
  bool evaluation_failed = false;
  std::string failure;
  // Where the largest deviation occurred.
  std::size_t witness_point = 0;
  std::vector<CoordId> witness_wrt;
  double taylor_value = 0.0;
  double fd_value = 0.0;
};

/// Compare Taylor and FD first and second partials over the declared
/// coordinates of `f`. Deviation is |a - b| / max(1, |a|, |b|).
AgreementReport check_grad(const ScalarField& f, Dims d, const std::vector<JetPoint>& pts,
                           const DiffConfig& cfg = {});

/// Jet variables that a dependency set covers.
std::vector<CoordId> declared_coords(Dims d, Deps deps);

}  // namespace jetlag
