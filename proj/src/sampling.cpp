#include "jetlag/sampling.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "jetlag/error.hpp"

namespace jetlag {

double condition_number(const DTensor<double>& m) {
  const std::vector<double> ev = sym_eigenvalues(m);
  double mx = 0.0, mn = std::numeric_limits<double>::infinity();
  for (double v : ev) {
    mx = std::max(mx, std::fabs(v));
    mn = std::min(mn, std::fabs(v));
  }
  return mn > 0.0 ? mx / mn : std::numeric_limits<double>::infinity();
}

SampleResult sample_points(const GeometryContext& ctx, std::size_t count, std::uint64_t seed, const SampleBox& box,
                           double max_condition) {
  for (const double* b : {box.t, box.x, box.xs}) {
    if (!(b[0] < b[1])) throw Error(ErrorCode::config, "sampling box bounds must satisfy lo < hi");
  }
  const Dims d = ctx.dims;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(box.t[0], box.t[1]), ux(box.x[0], box.x[1]), uv(box.xs[0], box.xs[1]);
  SampleResult out;
  bool first = true;
  const std::size_t budget = 1000 * std::max<std::size_t>(count, 1);
  for (std::size_t tries = 0; out.points.size() < count; ++tries) {
    if (tries >= budget) {
      throw Error(ErrorCode::config, "could not sample " + std::to_string(count) + " well-conditioned points in " +
                                         std::to_string(budget) + " attempts");
    }
    JetPoint pt = JetPoint::zeros(d);
    for (double& v : pt.t) v = ut(rng);
    for (double& v : pt.x) v = ux(rng);
    for (double& v : pt.xs) v = uv(rng);
    DTensor<double> h, g;
    try {
      PointGeometry pg(ctx, pt, depth_connection);
      h = values(pg.h());
      g = values(pg.g());
    } catch (const SingularMetricError&) {
      ++out.rejected;
      continue;
    }
    if (condition_number(h) > max_condition || condition_number(g) > max_condition) {
      ++out.rejected;
      continue;
    }
    const int sh = signature_of(h), sg = signature_of(g);
    if (first) {
      out.h_negative = sh;
      out.g_negative = sg;
      first = false;
    } else if (sh != out.h_negative || sg != out.g_negative) {
      ++out.rejected;
      continue;
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

void check_domain(const GeometryContext& ctx, const std::vector<JetPoint>& pts) {
  if (!ctx.point_check) return;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    try {
      ctx.point_check(pts[k]);
    } catch (const DomainError& e) {
      throw DomainError("point " + std::to_string(k) + ": " + e.what(), k);
    }
  }
}

}  // namespace jetlag
