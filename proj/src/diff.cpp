#include "jetlag/diff.hpp"

#include <algorithm>
#include <cmath>

#include "jetlag/error.hpp"

namespace jetlag {

void DiffConfig::check() const {
  if (!(fd_step[0] > 0.0) || !(fd_step[1] > 0.0)) {
    throw Error(ErrorCode::config, "finite-difference steps must be positive");
  }
  if (max_order < 1 || max_order > 3) throw Error(ErrorCode::config, "max_order must be in 1..3");
}

namespace {

void check_wrt(Dims d, const std::vector<CoordId>& wrt) {
  for (const CoordId& c : wrt) {
    const int lim_i = c.kind == CoordKind::t ? d.p : d.n;
    if (c.i < 0 || c.i >= lim_i || (c.kind == CoordKind::xs && (c.a < 0 || c.a >= d.p))) {
      throw Error(ErrorCode::precondition, "coordinate " + to_string(c) + " is out of range");
    }
  }
}

double& coord_ref(JetPoint& pt, Dims d, CoordId c) {
  switch (c.kind) {
    case CoordKind::t: return pt.t[static_cast<std::size_t>(c.i)];
    case CoordKind::x: return pt.x[static_cast<std::size_t>(c.i)];
    case CoordKind::xs: break;
  }
  return pt.xs[static_cast<std::size_t>(c.i * d.p + c.a)];
}

}  // namespace

double eval_derivs(const ScalarField& f, Dims d, const JetPoint& pt, const std::vector<CoordId>& wrt,
                   const DiffConfig& cfg) {
  const int k = static_cast<int>(wrt.size());
  if (k > cfg.max_order || k > 3) {
    throw Error(ErrorCode::order_exceeded,
                "derivative order " + std::to_string(k) + " exceeds the budget " + std::to_string(cfg.max_order));
  }
  check_wrt(d, wrt);
  if (cfg.mode == DiffConfig::Mode::central_fd) return fd_partial(f, d, pt, wrt, cfg);
  JetVars vars(d, pt, k);
  const Taylor v = evaluate(f, vars);
  std::vector<int> idx;
  for (const CoordId& c : wrt) idx.push_back(var_index(d, c));
  return v.partial(idx);
}

double fd_partial(const ScalarField& f, Dims d, const JetPoint& pt, const std::vector<CoordId>& wrt,
                  const DiffConfig& cfg) {
  const std::size_t k = wrt.size();
  if (k > 2) throw Error(ErrorCode::order_exceeded, "finite differences support order <= 2");
  check_wrt(d, wrt);
  auto at = [&](const JetPoint& q) { return evaluate_value(f, d, q); };
  if (k == 0) return at(pt);
  JetPoint q = pt;
  const double c = cfg.fd_step[k - 1];
  if (k == 1) {
    double& u = coord_ref(q, d, wrt[0]);
    const double u0 = u;
    const double h = c * std::max(1.0, std::fabs(u0));
    u = u0 + h;
    const double fp = at(q);
    u = u0 - h;
    const double fm = at(q);
    return (fp - fm) / (2.0 * h);
  }
  if (wrt[0] == wrt[1]) {
    double& u = coord_ref(q, d, wrt[0]);
    const double u0 = u;
    const double h = c * std::max(1.0, std::fabs(u0));
    const double f0 = at(q);
    u = u0 + h;
    const double fp = at(q);
    u = u0 - h;
    const double fm = at(q);
    return (fp - 2.0 * f0 + fm) / (h * h);
  }
  double& u = coord_ref(q, d, wrt[0]);
  double& w = coord_ref(q, d, wrt[1]);
  const double u0 = u, w0 = w;
  const double hu = c * std::max(1.0, std::fabs(u0));
  const double hw = c * std::max(1.0, std::fabs(w0));
  auto shifted = [&](double su, double sw) {
    u = u0 + su;
    w = w0 + sw;
    return at(q);
  };
  const double fpp = shifted(hu, hw), fpm = shifted(hu, -hw), fmp = shifted(-hu, hw), fmm = shifted(-hu, -hw);
  return (fpp - fpm - fmp + fmm) / (4.0 * hu * hw);
}

std::vector<CoordId> declared_coords(Dims d, Deps deps) {
  std::vector<CoordId> out;
  for (int v = 0; v < d.nvars(); ++v) {
    const CoordId c = coord_of(d, v);
    const Deps bit = c.kind == CoordKind::t ? dep_t : c.kind == CoordKind::x ? dep_x : dep_xs;
    if (deps & bit) out.push_back(c);
  }
  return out;
}

AgreementReport check_grad(const ScalarField& f, Dims d, const std::vector<JetPoint>& pts,
                           const DiffConfig& cfg) {
  if (pts.empty()) throw Error(ErrorCode::precondition, "check_grad needs at least one point");
  AgreementReport rep;
  const std::vector<CoordId> coords = declared_coords(d, f.deps);
  DiffConfig fd = cfg;
  fd.mode = DiffConfig::Mode::central_fd;
  for (std::size_t ip = 0; ip < pts.size(); ++ip) {
    try {
      JetVars vars(d, pts[ip], 2);
      const Taylor v = evaluate(f, vars);
      auto compare = [&](const std::vector<CoordId>& wrt) {
        std::vector<int> idx;
        for (const CoordId& c : wrt) idx.push_back(var_index(d, c));
        const double a = v.partial(idx);
        const double b = fd_partial(f, d, pts[ip], wrt, fd);
        const double dev = std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
        ++rep.comparisons;
        if (!std::isfinite(dev)) {
          rep.evaluation_failed = true;
          rep.failure = "non-finite derivative";
          rep.max_rel_deviation = std::numeric_limits<double>::quiet_NaN();
          return;
        }
        if (dev > rep.max_rel_deviation || rep.comparisons == 1) {
          rep.max_rel_deviation = dev;
          rep.witness_point = ip;
          rep.witness_wrt = wrt;
          rep.taylor_value = a;
          rep.fd_value = b;
        }
      };
      for (std::size_t a = 0; a < coords.size(); ++a) {
        compare({coords[a]});
        for (std::size_t b = a; b < coords.size(); ++b) compare({coords[a], coords[b]});
      }
    } catch (const Error& e) {
      rep.evaluation_failed = true;
      rep.failure = e.what();
      rep.witness_point = ip;
      rep.max_rel_deviation = std::numeric_limits<double>::quiet_NaN();
      return rep;
    }
    if (rep.evaluation_failed) return rep;
  }
  return rep;
}

}  // namespace jetlag
