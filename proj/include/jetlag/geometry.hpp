#pragma once

// Nonlinear connections, the Cartan canonical connection, covariant
// derivatives, torsion, curvature and Ricci objects of a generalized metrical
// multi-time Lagrange space, evaluated pointwise on truncated Taylor series.
//
// Index storage (0-based, row-major):
//   h(a,b) g(i,j)                       metrics, inverses h_inv(a,b) g_inv(i,j)
//   H(c,a,b)   = H^c_{ab}               G(k,j,c) = G^k_{jc}
//   L(i,j,k)   = L^i_{jk}               C(i,j,k,c) = C^{i(c)}_{j(k)}
//   M(i,a,b)   = M^{(i)}_{(a)b}         N(i,a,j) = N^{(i)}_{(a)j}
// Vertical pairs are stored (spatial, temporal), e.g. C(i,j,k,c) has axes
// Su Sd (Sd Tu).

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jetlag/diff.hpp"
#include "jetlag/tensor.hpp"

namespace jetlag {

/// A bundle of component fields evaluated together (shared subexpressions).
struct TensorField {
  std::string name;
  Deps deps = 0;
  std::size_t count = 0;
  std::function<std::vector<Taylor>(const FieldArgs&)> eval;
};

/// Row-major collection of scalar fields as one tensor field.
TensorField tensor_field(std::string name, std::vector<ScalarField> entries);

enum class GSource { direct, lagrangian };
enum class NlcKind { quadratic_canonical, christoffel_of_phi, user_given };

const char* to_string(NlcKind k);

struct GeometryContext {
  std::string name;
  Dims dims;
  TensorField h;  // p*p, depends on t only
  GSource g_source = GSource::direct;
  TensorField g;            // n*n, when direct
  ScalarField lagrangian;   // when g comes from L
  NlcKind nlc = NlcKind::quadratic_canonical;
  TensorField phi;          // n*n static metric, for christoffel_of_phi
  TensorField user_n;       // n*p*n entries N(i,a,j), for user_given
  DiffConfig diff;
  double einstein_constant = 1.0;
  // Extra per-point domain check run on sampled points (e.g. n >= 1).
  std::function<void(const JetPoint&)> point_check;
  // Named auxiliary fields of a built-in space (e.g. the refraction index).
  std::map<std::string, TensorField> extras;
  // Expression sources, (field name, text).
  std::vector<std::pair<std::string, std::string>> sources;

  /// Structural validation; throws on violations.
  void validate() const;
};

/// Derivative budget above g needed for a family of objects.
constexpr int depth_connection = 1;
constexpr int depth_curvature = 2;
constexpr int depth_divergence = 3;

enum class DerivKind { temporal, spatial, vertical };

class PointGeometry {
 public:
  PointGeometry(const GeometryContext& ctx, const JetPoint& pt, int depth);

  const GeometryContext& context() const noexcept { return ctx_; }
  Dims dims() const noexcept { return d_; }
  int depth() const noexcept { return depth_; }
  const JetPoint& point() const noexcept { return pt_; }

  const DTensor<Taylor>& h();
  const DTensor<Taylor>& h_inv();
  const DTensor<Taylor>& g();
  const DTensor<Taylor>& g_inv();
  /// Liouville field x^i_a, signature Vu.
  const DTensor<Taylor>& liouville();

  const DTensor<Taylor>& H();
  const DTensor<Taylor>& M();
  const DTensor<Taylor>& N();
  const DTensor<Taylor>& G();
  const DTensor<Taylor>& L();
  const DTensor<Taylor>& C();

  // Adapted derivatives of a component.
  Taylor dt(const Taylor& f, int beta);
  Taylor dx(const Taylor& f, int k);
  Taylor dv(const Taylor& f, int k, int gamma) const;

  /// Covariant derivative with one appended index: Td for temporal, Sd for
  /// spatial, the vertical pair (Sd k, Tu gamma) for vertical.
  DTensor<Taylor> cov(const DTensor<Taylor>& a, DerivKind kind);

  // Torsion blocks.
  DTensor<Taylor> T();                // T(m,a,j) = T^m_{aj}
  const DTensor<Taylor>& P_Ma();      // (m,mu,a,j,b) = P^{(m)(b)}_{(mu)a(j)}
  const DTensor<Taylor>& P_Ni();      // (m,mu,i,j,b) = P^{(m)(b)}_{(mu)i(j)}
  const DTensor<Taylor>& R_tt();      // (m,mu,a,b)
  const DTensor<Taylor>& R_tx();      // (m,mu,a,j)
  const DTensor<Taylor>& R_xx();      // (m,mu,i,j)
  const DTensor<Taylor>& S_t();       // (m,mu,i,a,j,b) = S^{(m)(a)(b)}_{(mu)(i)(j)}

  // Curvature blocks.
  const DTensor<Taylor>& Hc();        // (a,e,b,c) = H^a_{ebc}
  const DTensor<Taylor>& Rc_tt();     // (l,i,b,c) = R^l_{ibc}
  const DTensor<Taylor>& Rc_tx();     // (l,i,b,k) = R^l_{ibk}
  const DTensor<Taylor>& Rc_xx();     // (l,i,j,k) = R^l_{ijk}
  const DTensor<Taylor>& Pc_t();      // (l,i,b,k,c) = P^{l(c)}_{ib(k)}
  const DTensor<Taylor>& Pc_x();      // (l,i,j,k,c) = P^{l(c)}_{ij(k)}
  const DTensor<Taylor>& Sc();        // (l,i,j,b,k,c) = S^{l(b)(c)}_{i(j)(k)}

  // Ricci components and scalars.
  DTensor<Taylor> ric_H();            // H_{ab}
  DTensor<Taylor> ric_P_i_j();        // (i,j,a) = P^{(a)}_{i(j)} (with its minus sign)
  DTensor<Taylor> ric_P_ij();         // (i,a,j) = P^{(a)}_{(i)j}
  DTensor<Taylor> ric_P_ib();         // (i,a,b) = P^{(a)}_{(i)b}
  DTensor<Taylor> ric_S();            // (i,a,j,b) = S^{(a)(b)}_{(i)(j)}
  DTensor<Taylor> ric_R_ia();         // (i,a) = R_{ia}
  DTensor<Taylor> ric_R_ij();         // R_{ij}
  Taylor scalar_H();
  Taylor scalar_R();
  Taylor scalar_S();

  /// Half vertical Hessian of a scalar series: (i,a,j,b) = 1/2 d2 f / dxs^i_a dxs^j_b.
  DTensor<Taylor> half_hessian(const Taylor& f) const;
  /// E = h^{mn} g_{mr} x^m_m x^r_n.
  Taylor energy();
  /// The jet variable of x^i_a (seeded).
  const Taylor& slope(int i, int a) const { return vars_.var(var_index(d_, coord_xs(i, a))); }
  const JetVars& vars() const noexcept { return vars_; }

 private:
  GeometryContext ctx_;
  JetPoint pt_;
  Dims d_;
  int depth_;
  JetVars vars_;

  std::optional<DTensor<Taylor>> h_, h_inv_, g_, g_inv_, x_, H_, M_, N_, G_, L_, C_;
  std::optional<DTensor<Taylor>> dMv_;  // cached dxs derivatives reused by adapted derivatives
  std::optional<DTensor<Taylor>> PMa_, PNi_, Rtt_, Rtx_, Rxx_, St_;
  std::optional<DTensor<Taylor>> Hc_, Rctt_, Rctx_, Rcxx_, Pct_, Pcx_, Sc_;
};

/// Christoffel symbols of a spatial metric field with x-derivatives only.
/// `generalized` refuses metrics that depend on the directions.
DTensor<double> spatial_christoffel(const GeometryContext& ctx, const JetPoint& pt, bool generalized);

struct MetricFromL {
  DTensor<double> gvert;        // (i,a,j,b) = 1/2 d2L/dxs^i_a dxs^j_b
  DTensor<double> g_canonical;  // (1/p) h_{mn} G^{(m)(n)}_{(i)(j)}
};
MetricFromL vertical_metric_from_L(const GeometryContext& ctx, const JetPoint& pt);

double energy_lagrangian(const GeometryContext& ctx, const JetPoint& pt);
double adapted_deriv(const GeometryContext& ctx, const ScalarField& f, const JetPoint& pt, CoordId direction);

struct Verdict {
  bool ok = true;
  double max_deviation = 0.0;
  std::size_t witness = 0;   // index of the worst point
  std::string detail;
  std::optional<DTensor<double>> extracted;  // recovered g for regular Lagrangians
};

enum class RegularityTarget { lagrangian, energy };

/// Kronecker h-regularity of L (or of E): B^{(a)(b)} = h^{ab} ghat at every point.
Verdict kronecker_regularity_check(const GeometryContext& ctx, const std::vector<JetPoint>& pts,
                                   RegularityTarget target, double tol = 1e-9);
/// Same test on an explicit Lagrangian field with the context's h.
Verdict kronecker_regularity_check(const GeometryContext& ctx, const ScalarField& lagrangian,
                                   const std::vector<JetPoint>& pts, double tol = 1e-9);

/// dN^{(i)}_{(a)j}/dxs^k_c symmetric in j, k.
Verdict nlc_torsion_free_check(const GeometryContext& ctx, const std::vector<JetPoint>& pts, double tol = 1e-9);

struct NamedValue {
  std::string name;
  double value;
};

/// |g_{ij|k}|, |g_{ij}|^{(c)}_{(k)}|, |h_{ab/c}|, |h_{ab|k}|, |h_{ab}|^{(c)}_{(k)}|, |g_{ij/c}| (max abs).
std::vector<NamedValue> metricity_residuals(PointGeometry& pg);
/// The seven lowered curvature antisymmetries (max abs of X_{ij..} + X_{ji..}).
std::vector<NamedValue> antisymmetry_residuals(PointGeometry& pg);
/// Composite vertical curvature blocks evaluated from the composite
/// connection against their delta-weighted reconstructions.
std::vector<NamedValue> degenerate_block_residuals(PointGeometry& pg);

/// Number of negative eigenvalues of a symmetric matrix.
int signature_of(const DTensor<double>& m);

}  // namespace jetlag
