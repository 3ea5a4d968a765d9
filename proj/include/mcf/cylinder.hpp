#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace mcf {

/// Generalized cylinder S^{n-k}(rho) x R^k in R^{n+1}.
struct CylinderParams {
  int n = 2;
  int k = 1;
  double rho = 1.4142135623730951;

  int sphere_dim() const { return n - k; }
  /// Dimension of the x-factor R^{n-k+1}.
  int x_dim() const { return n - k + 1; }
};

/// Throws std::domain_error unless 2 <= n and 1 <= k <= n-1.
CylinderParams make_cylinder(int n, int k);

/// Surface area of the unit sphere S^d in R^{d+1}.
double unit_sphere_area(int d);

// Odd, non-decreasing, concave on [0, inf); identity on |s| <= 1/2 and
// sign(s) on |s| >= sqrt 2. C^2 across both junctions.
double chi(double s);
double chi_d1(double s);
double chi_d2(double s);

/// chi(|x| - rho) for an ambient point split as (x, y).
double odist(std::span<const double> x, std::span<const double> y,
             const CylinderParams& params);
double odist_radius(double x_norm, const CylinderParams& params);

/// Graphical-radius thresholds kappa, kappa', kappa''.
inline constexpr double kGraphKappa = 0.1;
/// Constant in the error bound reported by transform_graph.
inline constexpr double kTransformConstant = 2.0;

enum class AxisKind {
  Line,    ///< coordinate s = y.e on [-L, L]; flat in the other k-1 directions
  Radial,  ///< coordinate r = |y| on [0, R]; even at r = 0
};

/// Uniform 1-D grid. Line nodes are -extent + i h, Radial nodes are i h.
struct Grid1D {
  AxisKind kind = AxisKind::Line;
  double extent = 1.0;
  int points = 2;

  double h() const;
  double coord(int i) const;
  double lo() const { return kind == AxisKind::Line ? -extent : 0.0; }
};

/// theta-invariant graph over C_{n,k}: u sampled on a grid, 0-extended outside.
struct GraphPatch {
  CylinderParams params;
  Grid1D grid;
  std::vector<double> u;
  std::vector<double> du;  ///< derivative in the grid coordinate
};

/// Fills du by centred differences (one-sided at Line ends, 0 at r = 0).
GraphPatch make_patch(const CylinderParams& params, const Grid1D& grid,
                      std::vector<double> u);

/// Value and gradient of u at one point of the cylinder. grad_theta is a
/// tangent vector to S^{n-k}(rho) at theta, stored in R^{n-k+1}.
struct GraphSample {
  double u = 0.0;
  std::vector<double> grad_theta;
  std::vector<double> grad_y;
};

struct GraphGeometry {
  std::vector<double> normal;  ///< (x-part, y-part), unit length
  double area_element = 1.0;
  std::vector<double> point;   ///< Phi_u(theta, y)
};

/// Normal, area element and embedded point of the graph of u at (theta_hat, y).
/// Throws std::domain_error when u <= -rho.
GraphGeometry graph_geometry(const CylinderParams& params,
                             std::span<const double> theta_hat,
                             std::span<const double> y,
                             const GraphSample& sample);

/// Convenience form for a theta-invariant patch at grid node i; y is placed
/// along e_1 of the spine.
GraphGeometry graph_geometry(const GraphPatch& patch,
                             std::span<const double> theta_hat, int i);

/// A general graph function u(theta_hat, y) with the norms the
/// transformation law needs.
struct GraphField {
  CylinderParams params;
  std::function<double(std::span<const double>, std::span<const double>)> u;
  double c1_norm = 0.0;          ///< sup |u| + sup |grad u|
  double grad_theta_sup = 0.0;   ///< sup |grad_theta u|
};

/// Cubic interpolation of a patch in its grid coordinate, 0 outside.
GraphField as_field(const GraphPatch& patch);

struct TransformedGraph {
  GraphField field;      ///< exact graph of lambda*Sigma - (xhat, yhat)
  double bound = 0.0;    ///< C (|grad_theta u| + |xhat|) |xhat|
};

/// Graph of lambda*Sigma - (xhat, yhat) over the same cylinder, evaluated
/// exactly by solving for the preimage ray. Throws std::out_of_range when
/// ||u||_{C^1} + |xhat| + |lambda - 1| > kappa'.
TransformedGraph transform_graph(const GraphField& field, double lambda,
                                 std::span<const double> xhat,
                                 std::span<const double> yhat);

/// The linear model -xhat.theta' + rho(lambda-1) + lambda u(theta', (y'+yhat)/lambda).
double transform_model(const GraphField& field, double lambda,
                       std::span<const double> xhat,
                       std::span<const double> yhat,
                       std::span<const double> theta_hat,
                       std::span<const double> y);

}  // namespace mcf
