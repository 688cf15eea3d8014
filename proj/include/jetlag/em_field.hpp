#pragma once

// Deflection d-tensors of the Liouville field, the electromagnetic components
// F and f, and the residuals of the five Maxwell equations.
//
// Storage:
//   raw_t(i,a,b) = x^i_{a/b}   raw_x(i,a,j) = x^i_{a|j}   raw_v(i,a,j,b) = x^i_a|^{(b)}_{(j)}
//   x_low(i,a)   = x^{(a)}_{(i)} = h^{am} g_{ir} x^r_m
//   Dbar(i,a,b)  D(i,a,j)  d(i,a,j,b)     metrical deflections
//   F(i,a,j)     f(i,a,j,b)

#include <string>
#include <vector>

#include "jetlag/geometry.hpp"
#include "jetlag/residuals.hpp"

namespace jetlag {

struct DeflectionSet {
  DTensor<Taylor> raw_t, raw_x, raw_v;
  DTensor<Taylor> x_low;
  DTensor<Taylor> Dbar, D, d;
};

struct EmSet {
  DTensor<Taylor> F;
  DTensor<Taylor> f;
};

/// Metrical deflections as covariant derivatives of x_low; raw ones through
/// the generic covariant derivative of the Liouville field.
DeflectionSet deflection_set(PointGeometry& pg);

/// Differences between the two computation paths (max abs): raw deflections
/// generic vs closed form, and metrical deflections vs G-lowered raw ones.
std::vector<NamedValue> deflection_path_residuals(PointGeometry& pg, const DeflectionSet& ds);

EmSet em_tensors(const DeflectionSet& ds);

/// The five metrical deflection identities d'1..d'5 (max abs of LHS - RHS).
std::vector<NamedValue> deflection_identity_residuals(PointGeometry& pg, const DeflectionSet& ds);

/// The Bianchi identities b1..b5 as quoted (max abs).
std::vector<NamedValue> bianchi_residuals(PointGeometry& pg);

/// Names of the five residual blocks, in equation order.
const std::vector<std::string>& maxwell_names();

/// The five equations at one point. Needs depth_curvature.
PointResiduals maxwell_point(PointGeometry& pg);

/// Residuals over a point set. Throws precondition when the spatial
/// nonlinear connection has torsion.
ResidualReport maxwell_residuals(const GeometryContext& ctx, const std::vector<JetPoint>& pts, int jobs = 1);

}  // namespace jetlag
