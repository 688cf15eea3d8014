#pragma once

// Built-in spaces. Parameters are expression strings keyed by name; matrix
// parameters are listed row-major:
//   h   p*p, deps {t}        phi n*n, deps {x}
//   g   n*n, deps {t,x} for quadratic, any for custom
//   U   n*p (entry (i,a) at i*p+a), deps {t,x}
//   A   n, deps {x}          X   p, deps {t}
//   F, n, L   one entry      N   n*p*n user nonlinear connection N(i,a,j)
//   variant   "i" | "ii" | "iii" (conformal)

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jetlag/geometry.hpp"

namespace jetlag {

using SpaceParams = std::map<std::string, std::vector<std::string>>;

struct SpaceInfo {
  std::string name;
  std::string summary;
  std::vector<std::pair<std::string, std::string>> params;  // name, shape and dependencies
};

const std::vector<SpaceInfo>& builtin_spaces();

/// Desk-scale defaults for a space kind at the given dimensions.
SpaceParams default_params(const std::string& kind, Dims d);

/// Build a space; missing parameters take their defaults. `nlc` overrides
/// the space's nonlinear connection.
GeometryContext make_space(const std::string& kind, Dims d, const SpaceParams& params = {},
                           std::optional<NlcKind> nlc = std::nullopt);

GeometryContext make_flat(int p, int n);
GeometryContext make_quadratic(Dims d, const SpaceParams& params = {});
GeometryContext make_conformal(Dims d, const SpaceParams& params = {});
GeometryContext make_optic(Dims d, const SpaceParams& params = {});
GeometryContext make_custom(Dims d, const SpaceParams& params);

/// The closed-form inverse of the optic metric as displayed:
///   g^{ij} = phi^{ij} + (1 - 1/n) / (1 + (1 - 1/n) Y^2) Y^i Y^j.
DTensor<double> optic_inverse_closed(const GeometryContext& ctx, const JetPoint& pt);

std::optional<NlcKind> parse_nlc(const std::string& name);

}  // namespace jetlag
