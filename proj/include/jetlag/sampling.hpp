#pragma once

// Seeded random points on J1(T,M), rejecting points where h or g is badly
// conditioned or changes signature.

#include <cstdint>
#include <string>
#include <vector>

#include "jetlag/geometry.hpp"

namespace jetlag {

struct SampleBox {
  double t[2] = {-1.0, 1.0};
  double x[2] = {-1.0, 1.0};
  double xs[2] = {-1.0, 1.0};
};

struct SampleResult {
  std::vector<JetPoint> points;
  std::size_t rejected = 0;
  int h_negative = 0;  // negative eigenvalues of h and g at the accepted points
  int g_negative = 0;
};

inline constexpr const char* sampler_name = "std::mt19937_64";
inline constexpr const char* sampler_procedure =
    "engine seeded with the 64-bit seed; each candidate draws t, x, then xs (row-major i, a) from "
    "std::uniform_real_distribution<double> over the box";

/// Condition number of a symmetric value matrix (max |eig| / min |eig|).
double condition_number(const DTensor<double>& m);

/// Draw `count` points. Throws config when the box is empty or 1000 * count
/// candidates do not yield enough points.
SampleResult sample_points(const GeometryContext& ctx, std::size_t count, std::uint64_t seed,
                           const SampleBox& box = {}, double max_condition = 1e8);

/// Runs the space's per-point domain check (e.g. refraction index >= 1);
/// throws DomainError naming the point index.
void check_domain(const GeometryContext& ctx, const std::vector<JetPoint>& pts);

}  // namespace jetlag
