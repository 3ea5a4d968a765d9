#include "mcf/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mcf {

CylinderParams make_cylinder(int n, int k) {
  if (n < 2 || k < 1 || k > n - 1) {
    throw std::domain_error("cylinder dimensions out of range: n=" +
                            std::to_string(n) + " k=" + std::to_string(k));
  }
  return CylinderParams{n, k, std::sqrt(2.0 * (n - k))};
}

double unit_sphere_area(int d) {
  const double a = 0.5 * (d + 1);
  return 2.0 * std::pow(std::numbers::pi, a) / std::tgamma(a);
}

namespace {

// chi on [1/2, sqrt 2] is sum c_i (s - 1/2)^i; coefficients solve the six
// matching conditions at both ends.
constexpr double kA = 0.5;
const double kB = std::numbers::sqrt2;
constexpr double kC[6] = {0.5, 1.0, 0.0, -0.6351124752956159,
                          -0.2666873420051297, 0.40299679249357934};

double blend(double s, int deriv) {
  const double t = s - kA;
  double acc = 0.0;
  for (int i = 5; i >= deriv; --i) {
    double c = kC[i];
    for (int m = 0; m < deriv; ++m) c *= (i - m);
    acc = acc * t + c;
  }
  return acc;
}

double chi_pos(double a, int deriv) {
  if (a <= kA) return deriv == 0 ? a : (deriv == 1 ? 1.0 : 0.0);
  if (a >= kB) return deriv == 0 ? 1.0 : 0.0;
  return blend(a, deriv);
}

}  // namespace

double chi(double s) { return s < 0 ? -chi_pos(-s, 0) : chi_pos(s, 0); }
double chi_d1(double s) { return chi_pos(std::abs(s), 1); }
double chi_d2(double s) { return s < 0 ? -chi_pos(-s, 2) : chi_pos(s, 2); }

double odist_radius(double x_norm, const CylinderParams& params) {
  return chi(x_norm - params.rho);
}

double odist(std::span<const double> x, std::span<const double>,
             const CylinderParams& params) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return odist_radius(std::sqrt(s), params);
}

double Grid1D::h() const {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  return (kind == AxisKind::Line ? 2.0 * extent : extent) / (points - 1);
}

double Grid1D::coord(int i) const { return lo() + i * h(); }

GraphPatch make_patch(const CylinderParams& params, const Grid1D& grid,
                      std::vector<double> u) {
  if (static_cast<int>(u.size()) != grid.points) {
    throw std::invalid_argument("patch values do not match the grid");
  }
  const int n = grid.points;
  const double h = grid.h();
  std::vector<double> du(n);
  for (int i = 1; i + 1 < n; ++i) du[i] = (u[i + 1] - u[i - 1]) / (2 * h);
  if (grid.kind == AxisKind::Radial) {
    du[0] = 0.0;
  } else {
    du[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h);
  }
  du[n - 1] = (3 * u[n - 1] - 4 * u[n - 2] + u[n - 3]) / (2 * h);
  return GraphPatch{params, grid, std::move(u), std::move(du)};
}

GraphGeometry graph_geometry(const CylinderParams& params,
                             std::span<const double> theta_hat,
                             std::span<const double> y,
                             const GraphSample& sample) {
  const int dx = params.x_dim();
  if (static_cast<int>(theta_hat.size()) != dx ||
      static_cast<int>(y.size()) != params.k) {
    throw std::invalid_argument("location has wrong dimensions");
  }
  if (sample.u <= -params.rho) {
    throw std::domain_error("graph reaches the spine (u <= -rho)");
  }
  // Only the theta part of the gradient is stretched by the radial scaling.
  const double stretch = 1.0 / (1.0 + sample.u / params.rho);
  std::vector<double> g(dx + params.k, 0.0);
  for (int a = 0; a < dx && a < static_cast<int>(sample.grad_theta.size()); ++a) {
    g[a] = stretch * sample.grad_theta[a];
  }
  for (int b = 0; b < params.k && b < static_cast<int>(sample.grad_y.size()); ++b) {
    g[dx + b] = sample.grad_y[b];
  }
  double g2 = 0.0;
  for (double v : g) g2 += v * v;
  const double root = std::sqrt(1.0 + g2);

  GraphGeometry out;
  out.normal.resize(dx + params.k);
  for (int a = 0; a < dx; ++a) out.normal[a] = (theta_hat[a] - g[a]) / root;
  for (int b = 0; b < params.k; ++b) out.normal[dx + b] = -g[dx + b] / root;
  out.area_element = std::pow(1.0 + sample.u / params.rho, params.sphere_dim()) * root;
  out.point.resize(dx + params.k);
  for (int a = 0; a < dx; ++a) out.point[a] = (params.rho + sample.u) * theta_hat[a];
  for (int b = 0; b < params.k; ++b) out.point[dx + b] = y[b];
  return out;
}

GraphGeometry graph_geometry(const GraphPatch& patch,
                             std::span<const double> theta_hat, int i) {
  const auto& p = patch.params;
  std::vector<double> y(p.k, 0.0);
  y[0] = patch.grid.coord(i);
  GraphSample s;
  s.u = patch.u.at(i);
  s.grad_theta.assign(p.x_dim(), 0.0);
  s.grad_y.assign(p.k, 0.0);
  s.grad_y[0] = patch.du.at(i);
  return graph_geometry(p, theta_hat, y, s);
}

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double cubic_sample(const GraphPatch& p, double c) {
  const double h = p.grid.h();
  const double lo = p.grid.lo();
  const int n = p.grid.points;
  const double hi = lo + (n - 1) * h;
  if (c < lo || c > hi) return 0.0;
  const double x = (c - lo) / h;
  int i = std::clamp(static_cast<int>(std::floor(x)) - 1, 0, n - 4);
  if (n < 4) {
    const int j = std::min(static_cast<int>(x), n - 2);
    const double t = x - j;
    return (1 - t) * p.u[j] + t * p.u[j + 1];
  }
  // even reflection keeps the stencil centred near r = 0
  auto val = [&](int m) {
    if (m < 0) return p.u[-m];
    return p.u[m];
  };
  if (p.grid.kind == AxisKind::Radial && x < 1.0) i = -1;
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) w *= (x - (i + b)) / static_cast<double>(a - b);
    }
    acc += w * val(i + a);
  }
  return acc;
}

}  // namespace

GraphField as_field(const GraphPatch& patch) {
  auto shared = std::make_shared<const GraphPatch>(patch);
  GraphField f;
  f.params = patch.params;
  f.u = [shared](std::span<const double>, std::span<const double> y) {
    const double c = shared->grid.kind == AxisKind::Line ? y[0] : norm(y);
    return cubic_sample(*shared, c);
  };
  double su = 0.0, sd = 0.0;
  for (double v : patch.u) su = std::max(su, std::abs(v));
  for (double v : patch.du) sd = std::max(sd, std::abs(v));
  f.c1_norm = su + sd;
  f.grad_theta_sup = 0.0;
  return f;
}

double transform_model(const GraphField& field, double lambda,
                       std::span<const double> xhat,
                       std::span<const double> yhat,
                       std::span<const double> theta_hat,
                       std::span<const double> y) {
  std::vector<double> ys(y.size());
  for (size_t b = 0; b < y.size(); ++b) ys[b] = (y[b] + yhat[b]) / lambda;
  return -dot(xhat, theta_hat) + field.params.rho * (lambda - 1.0) +
         lambda * field.u(theta_hat, ys);
}

TransformedGraph transform_graph(const GraphField& field, double lambda,
                                 std::span<const double> xhat,
                                 std::span<const double> yhat) {
  const auto& p = field.params;
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (static_cast<int>(xhat.size()) != p.x_dim() ||
      static_cast<int>(yhat.size()) != p.k) {
    throw std::invalid_argument("translation has wrong dimensions");
  }
  const double xn = norm(xhat);
  if (field.c1_norm + xn + std::abs(lambda - 1.0) > kGraphKappa) {
    throw std::out_of_range("transform outside the graphical regime");
  }
  auto src = std::make_shared<const GraphField>(field);
  std::vector<double> xh(xhat.begin(), xhat.end());
  std::vector<double> yh(yhat.begin(), yhat.end());

  TransformedGraph out;
  out.field.params = p;
  out.field.u = [src, lambda, xh, yh](std::span<const double> th,
                                      std::span<const double> y) {
    const double rho = src->params.rho;
    std::vector<double> ys(y.size());
    for (size_t b = 0; b < y.size(); ++b) ys[b] = (y[b] + yh[b]) / lambda;
    const double xt = dot(xh, th);
    const double x2 = dot(xh, xh);
    std::vector<double> pre(th.begin(), th.end());
    double s = rho;
    // Fixed point for the preimage direction; contraction for small C^1 norm.
    for (int it = 0; it < 200; ++it) {
      const double r = lambda * (rho + src->u(pre, ys));
      s = -xt + std::sqrt(xt * xt - x2 + r * r);
      double change = 0.0;
      for (size_t a = 0; a < pre.size(); ++a) {
        const double nv = (s * th[a] + xh[a]) / r;
        change = std::max(change, std::abs(nv - pre[a]));
        pre[a] = nv;
      }
      if (change < 1e-15) break;
    }
    return s - rho;
  };
  // Transformed field norms grow by at most the translation and dilation.
  out.field.c1_norm = lambda * field.c1_norm + xn + p.rho * std::abs(lambda - 1.0);
  out.field.grad_theta_sup = lambda * field.grad_theta_sup + xn;
  out.bound = kTransformConstant * (field.grad_theta_sup + xn) * xn;
  return out;
}

}  // namespace mcf
