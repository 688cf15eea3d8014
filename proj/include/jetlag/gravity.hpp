#pragma once

// Einstein equation blocks of the Cartan connection with the adapted metric
// h + g + h^{-1}g, stress-energy extraction, the conservation laws and the
// natural (trace-shifted) form available for p, n > 2.
//
// Storage follows the Ricci objects of PointGeometry:
//   tt(a,b)  xx(i,j)  vv(i,a,j,b) = S^{(a)(b)}_{(i)(j)} - Sc/2 h^{ab} g_ij
//   R_ia(i,a)  P_ib(i,a,b)  P_i_j(i,j,a)  P_ij(i,a,j)
//   zero_ti(a,i) = T_{a i},  zero_tv(a,i,b) = T^{(b)}_{a(i)}

#include <string>
#include <vector>

#include "jetlag/geometry.hpp"
#include "jetlag/residuals.hpp"

namespace jetlag {

struct EinsteinBlocks {
  DTensor<Taylor> tt, xx, vv;
  DTensor<Taylor> R_ia, P_ib, P_i_j, P_ij;
  DTensor<double> zero_ti, zero_tv;  // required to vanish; always exact zeros
  Taylor H, R, S;                    // scalar parts, Sc = H + R + S
};

/// Needs depth_curvature.
EinsteinBlocks einstein_blocks(PointGeometry& pg);

struct StressEnergySet {
  double K = 1.0;
  DTensor<Taylor> tt, xx, vv;
  DTensor<Taylor> R_ia, P_ib, P_i_j, P_ij;
  DTensor<double> zero_ti, zero_tv;
};

/// Every block divided by K. Throws vacuum_constant for K = 0.
StressEnergySet stress_energy_extract(const EinsteinBlocks& e, double K);

/// The three conservation laws at one point (residual(b), residual(j),
/// residual(j,b)). Needs depth_divergence.
PointResiduals conservation_point(PointGeometry& pg);
const std::vector<std::string>& conservation_names();
ResidualReport conservation_residuals(const GeometryContext& ctx, const std::vector<JetPoint>& pts, int jobs = 1);

/// Throws natural_form_unavailable unless p > 2 and n > 2.
void require_natural_form(Dims d);

struct NaturalForm {
  double K = 1.0;
  double T_T = 0, T_M = 0, T_v = 0;                 // traces of the stress-energy
  double H = 0, R = 0, S = 0;                       // computed scalars
  double H_solved = 0, R_solved = 0, S_solved = 0;  // from the traces of T
  double H_back = 0, R_back = 0, S_back = 0;        // from the traces of T~
  DTensor<Taylor> tt, xx, vv;                       // T~ blocks
  double e1_residual = 0;         // max |E1 - K T|
  double e1_prime_residual = 0;   // max |E1' - K T~|
  double trace_solved = 0;        // max |solved - computed|
  double trace_back = 0;          // max |back - computed|
  double round_trip = 0;          // max |T - (T~ mapped back)|
};

/// T~ construction, trace solutions and the round trip at one point.
NaturalForm natural_stress_energy(PointGeometry& pg, double K);

/// Einstein identities (3 blocks), the new conservation laws as displayed
/// (3 blocks), the same laws with the trace terms entering with the sign
/// obtained by substitution (3 blocks), and the simple form (3 blocks).
PointResiduals natural_form_point(PointGeometry& pg, double K);
const std::vector<std::string>& natural_form_names();

struct NaturalFormReport {
  ResidualReport residuals;
  double max_P = 0.0;  // max |P^{l(m)}_{pi(m)}| over the points
  double max_S = 0.0;  // max |S^{l(a)(m)}_{p(i)(m)}|
  bool simple_form_applicable = false;
};

NaturalFormReport natural_form_checks(const GeometryContext& ctx, const std::vector<JetPoint>& pts, int jobs = 1,
                                      double vanish_tol = 1e-9);

}  // namespace jetlag
