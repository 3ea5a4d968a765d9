#include "mcf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mcf/quadrature.hpp"

namespace mcf {

namespace {

constexpr double kTailThreshold = 1e-8;
constexpr double kTailLength = 40.0;

// Integrand of a tube quantity at one point of the generating curve, per unit
// of the spine measure: f(y, v) times the sphere area |S^{n-k}| v^{n-k},
// sqrt(1 + v'^2) and the radial Jacobian |S^{k-1}| r^{k-1} when Radial.
struct TubeMeasure {
  const RadialProfile& p;
  int c;
  double sphere_unit;
  double spine_unit;

  explicit TubeMeasure(const RadialProfile& prof)
      : p(prof),
        c(prof.params.sphere_dim()),
        sphere_unit(unit_sphere_area(prof.params.sphere_dim())),
        spine_unit(prof.params.k > 1 ? unit_sphere_area(prof.params.k - 1) : 2.0) {}

  double density(double y, double v, double dv) const {
    double d = sphere_unit * std::pow(v, c) * std::sqrt(1.0 + dv * dv);
    if (p.grid.kind == AxisKind::Radial) {
      // for k = 1 the "sphere" S^0 is two points; the half-line stands for both sides
      d *= p.params.k > 1 ? spine_unit * std::pow(y, p.params.k - 1) : 2.0;
    }
    return d;
  }
};

std::vector<double> node_slopes(const RadialProfile& p) {
  const int n = p.grid.points;
  const double h = p.grid.h();
  std::vector<double> d(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) d[i] = (p.v[i + 1] - p.v[i - 1]) / (2 * h);
  if (n >= 3) {
    d[n - 1] = (3 * p.v[n - 1] - 4 * p.v[n - 2] + p.v[n - 3]) / (2 * h);
    if (p.grid.kind == AxisKind::Line) d[0] = (-3 * p.v[0] + 4 * p.v[1] - p.v[2]) / (2 * h);
  }
  return d;
}

// \int over the spine of f(y, v) dA, split into the sampled part (trapezoid,
// cut exactly at |y| = cut) and the constant far-field tail.
template <class F>
std::pair<double, double> tube_integral(const RadialProfile& p, F f, double cut = INFINITY,
                                        double tail_scale = 1.0) {
  const TubeMeasure m(p);
  const auto slopes = node_slopes(p);
  const auto& g = p.grid;
  const int n = g.points;
  const double h = g.h();
  std::vector<double> q(n);
  for (int i = 0; i < n; ++i) {
    const double y = g.coord(i);
    q[i] = f(y, p.v[i]) * m.density(y, p.v[i], slopes[i]);
  }
  double body = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double a = g.coord(i), b = g.coord(i + 1);
    const double lo = std::max(a, -cut), hi = std::min(b, cut);
    if (hi <= lo) continue;
    const double qa = q[i] + (q[i + 1] - q[i]) * (lo - a) / h;
    const double qb = q[i] + (q[i + 1] - q[i]) * (hi - a) / h;
    body += 0.5 * (hi - lo) * (qa + qb);
  }
  double tail = 0.0;
  if (cut > g.extent) {
    const double vfar = p.far_field.value_or(p.v.back());
    const double end = std::min(cut, g.extent + kTailLength * tail_scale);
    const QuadratureRule rule = composite_gauss_legendre(g.extent, end, 40, 16);
    for (size_t j = 0; j < rule.nodes.size(); ++j) {
      const double y = rule.nodes[j];
      double val = f(y, vfar) * m.density(y, vfar, 0.0);
      if (g.kind == AxisKind::Line) val += f(-y, vfar) * m.density(-y, vfar, 0.0);
      tail += rule.weights[j] * val;
    }
  }
  return {body, tail};
}

SurfaceIntegral finish(const RadialProfile& p, std::pair<double, double> parts) {
  SurfaceIntegral out;
  out.value = parts.first + parts.second;
  out.tail_fraction = out.value != 0.0 ? std::abs(parts.second / out.value) : 0.0;
  out.warning = !p.far_field && out.tail_fraction > kTailThreshold;
  return out;
}

// Gaussian integral over the k-1 flat directions of a Line profile.
double flat_factor(const RadialProfile& p, double scale) {
  if (p.grid.kind != AxisKind::Line || p.params.k == 1) return 1.0;
  return std::pow(4.0 * std::numbers::pi * scale * scale, 0.5 * (p.params.k - 1));
}

}  // namespace

SurfaceIntegral gaussian_area(const RadialProfile& profile, double y0, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  if (y0 != 0.0 && profile.grid.kind == AxisKind::Radial) {
    throw std::invalid_argument("a radial profile only admits y0 = 0");
  }
  const int n = profile.params.n;
  const double norm = std::pow(4.0 * std::numbers::pi, -0.5 * n) * std::pow(scale, -n);
  const double s2 = 4.0 * scale * scale;
  auto f = [&](double y, double v) {
    return norm * std::exp(-(v * v + (y - y0) * (y - y0)) / s2);
  };
  auto parts = tube_integral(profile, f, INFINITY, scale);
  const double flat = flat_factor(profile, scale);
  return finish(profile, {parts.first * flat, parts.second * flat});
}

double gaussian_area_hyperplane() { return 1.0; }

double gaussian_area_sphere(int n, double R) {
  return std::pow(4.0 * std::numbers::pi, -0.5 * n) * unit_sphere_area(n) * std::pow(R, n) *
         std::exp(-R * R / 4.0);
}

double gaussian_area_cylinder(const CylinderParams& params, double R) {
  const int c = params.sphere_dim();
  return std::pow(4.0 * std::numbers::pi, -0.5 * c) * unit_sphere_area(c) * std::pow(R, c) *
         std::exp(-R * R / 4.0);
}

SurfaceIntegral gaussian_density(const RadialProfile& profile, double y0, double t0) {
  if (!(t0 > profile.time)) throw std::invalid_argument("density needs t < t0");
  return gaussian_area(profile, y0, std::sqrt(t0 - profile.time));
}

EntropyEstimate entropy_lower_bound(const RadialProfile& profile) {
  const bool line = profile.grid.kind == AxisKind::Line;
  EntropyEstimate best{-INFINITY, 0.0, 1.0};
  auto probe = [&](double y0, double ls) {
    const double s = std::exp(ls);
    const double F = gaussian_area(profile, y0, s).value;
    if (F > best.lower_bound) best = {F, y0, s};
  };
  double ylo = line ? -0.5 * profile.grid.extent : 0.0;
  double yhi = line ? 0.5 * profile.grid.extent : 0.0;
  double slo = std::log(0.25), shi = std::log(4.0);
  const int cells = 12;
  for (int round = 0; round < 4; ++round) {
    for (int a = 0; a <= (line ? cells : 0); ++a) {
      for (int b = 0; b <= cells; ++b) {
        const double y0 = line ? ylo + (yhi - ylo) * a / cells : 0.0;
        probe(y0, slo + (shi - slo) * b / cells);
      }
    }
    const double dy = (yhi - ylo) / cells, ds = (shi - slo) / cells;
    ylo = best.y0 - dy;
    yhi = best.y0 + dy;
    slo = std::log(best.scale) - ds;
    shi = std::log(best.scale) + ds;
  }
  return best;
}

SurfaceIntegral l2_distance(const RadialProfile& profile, std::optional<double> R) {
  const auto& params = profile.params;
  if (R && profile.grid.kind == AxisKind::Line && params.k > 1) {
    throw std::invalid_argument("restricted distance needs a radial profile when k > 1");
  }
  auto f = [&](double y, double v) {
    if (R && !(v < *R)) return 0.0;
    const double o = odist_radius(v, params);
    return o * o * std::exp(-(v * v + y * y) / 4.0);
  };
  auto parts = tube_integral(profile, f, R.value_or(INFINITY));
  const double flat = flat_factor(profile, 1.0);
  SurfaceIntegral sq = finish(profile, {parts.first * flat, parts.second * flat});
  sq.value = std::sqrt(std::max(sq.value, 0.0));
  return sq;
}

double linearized_norm(const RadialProfile& profile) {
  const auto& g = profile.grid;
  const double rho = profile.params.rho;
  const double far = profile.far_field.value_or(profile.v.back()) - rho;
  RadialProfile cyl = profile;
  cyl.v.assign(g.points, rho);
  cyl.far_field = rho;
  // tube_integral visits grid nodes exactly and tail points beyond the extent
  auto f = [&](double y, double) {
    double u = far;
    if (std::abs(y) <= g.extent * (1.0 + 1e-12)) {
      const int i = static_cast<int>(std::lround((y - g.lo()) / g.h()));
      u = profile.v[std::clamp(i, 0, g.points - 1)] - rho;
    }
    return u * u * std::exp(-(rho * rho + y * y) / 4.0);
  };
  auto parts = tube_integral(cyl, f);
  return std::sqrt(std::max(parts.first + parts.second, 0.0) * flat_factor(profile, 1.0));
}

double weighted_mass(const RadialProfile& profile) {
  auto f = [](double y, double v) { return std::exp(-(v * v + y * y) / 4.0); };
  auto parts = tube_integral(profile, f);
  return (parts.first + parts.second) * flat_factor(profile, 1.0);
}

namespace {

std::optional<size_t> find_tau(const std::vector<double>& taus, double tau) {
  for (size_t i = 0; i < taus.size(); ++i) {
    if (std::abs(taus[i] - tau) <= 1e-9 * std::max(1.0, std::abs(tau))) return i;
  }
  return std::nullopt;
}

}  // namespace

double decay_order(const DecaySeries& series, double tau, bool restricted) {
  const auto& d = restricted ? series.d_R : series.d;
  if (restricted && d.size() != series.tau.size()) {
    throw std::domain_error("series carries no restricted distances");
  }
  const auto i0 = find_tau(series.tau, tau);
  const auto i1 = find_tau(series.tau, tau + 1.0);
  if (!i0 || !i1) throw std::domain_error("decay order needs d at tau and tau + 1");
  if (!(d[*i0] > 0.0) || !(d[*i1] > 0.0)) {
    throw std::domain_error("decay order undefined for zero distance");
  }
  return std::log(d[*i0] / d[*i1]);
}

namespace {

double nonconcentration_lhs(const RadialProfile& p, double tau) {
  const auto& params = p.params;
  const bool flat = p.grid.kind == AxisKind::Line && params.k > 1;
  auto f = [&](double y, double v) {
    const double o = odist_radius(v, params);
    double X2 = v * v + y * y;
    if (flat) X2 += 2.0 * (params.k - 1);  // mean of |z|^2 over the flat directions
    return o * o * (1.0 + tau * X2) * std::exp(-(v * v + y * y) / 4.0);
  };
  auto parts = tube_integral(p, f);
  return (parts.first + parts.second) * flat_factor(p, 1.0);
}

}  // namespace

NonconcentrationReport nonconcentration_check(const std::vector<RadialProfile>& snapshots) {
  if (snapshots.empty()) throw std::invalid_argument("no snapshots");
  const double d0 = l2_distance(snapshots.front()).value;
  if (!(d0 > 0.0)) throw std::domain_error("non-concentration ratio undefined for d(0) = 0");
  NonconcentrationReport rep;
  const double t0 = snapshots.front().time;
  for (const auto& s : snapshots) {
    const double tau = s.time - t0;
    const double lhs = nonconcentration_lhs(s, tau);
    rep.tau.push_back(tau);
    rep.lhs.push_back(lhs);
    rep.ratio.push_back(lhs / (d0 * d0));
  }
  double st = 0, sy = 0, stt = 0, sty = 0, m = 0;
  for (size_t i = 0; i < rep.tau.size(); ++i) {
    if (!(rep.ratio[i] > 0.0)) continue;
    const double y = std::log(rep.ratio[i]);
    st += rep.tau[i];
    sy += y;
    stt += rep.tau[i] * rep.tau[i];
    sty += rep.tau[i] * y;
    m += 1;
  }
  const double den = m * stt - st * st;
  rep.K = (m >= 2 && den > 0.0) ? (m * sty - st * sy) / den : 0.0;
  rep.C = 0.0;
  for (size_t i = 0; i < rep.tau.size(); ++i) {
    rep.C = std::max(rep.C, rep.ratio[i] * std::exp(-rep.K * rep.tau[i]));
  }
  rep.holds = std::isfinite(rep.C) && std::isfinite(rep.K);
  for (size_t i = 0; i < rep.tau.size(); ++i) {
    rep.holds = rep.holds && rep.ratio[i] <= rep.C * std::exp(rep.K * rep.tau[i]) * (1 + 1e-12);
  }
  return rep;
}

namespace {

struct PatchMoments {
  double mass = 0.0;   // weighted measure of the whole cylinder
  double u1 = 0.0;     // <u, 1>
  double uy = 0.0;     // <u, y_1>
  double uu = 0.0;     // <u, u>
};

PatchMoments patch_moments(const GraphPatch& u) {
  const auto& p = u.params;
  const int c = p.sphere_dim();
  const int k = p.k;
  const double sphere = unit_sphere_area(c) * std::pow(p.rho, c) * std::exp(-p.rho * p.rho / 4.0);
  const double pi4 = 4.0 * std::numbers::pi;
  PatchMoments m;
  m.mass = sphere * std::pow(pi4, 0.5 * k);
  const auto& g = u.grid;
  const double h = g.h();
  for (int i = 0; i < g.points; ++i) {
    const double y = g.coord(i);
    double w = (i == 0 || i == g.points - 1) ? 0.5 * h : h;
    w *= sphere * std::exp(-y * y / 4.0);
    if (g.kind == AxisKind::Line) {
      w *= std::pow(pi4, 0.5 * (k - 1));
      m.uy += w * u.u[i] * y;
    } else {
      w *= k > 1 ? unit_sphere_area(k - 1) * std::pow(y, k - 1) : 2.0;
    }
    m.u1 += w * u.u[i];
    m.uu += w * u.u[i] * u.u[i];
  }
  return m;
}

}  // namespace

// With constants projected out, min over s = 1/c > 0 of ||s u~ - l~||^2 is
// ||l~||^2 - <u~, l~>^2 / ||u~||^2 when <u~, l~> > 0 and ||l~||^2 otherwise.
// Directions of yhat outside the patch's axis are orthogonal to every
// function of y_1 and add (1 - yhat_1^2) ||y_1||^2.
double h1_domination(const GraphPatch& u, const std::vector<double>& yhat) {
  if (static_cast<int>(yhat.size()) != u.params.k) {
    throw std::invalid_argument("yhat must have k components");
  }
  double norm = 0.0;
  for (double c : yhat) norm += c * c;
  if (std::abs(norm - 1.0) > 1e-12) throw std::invalid_argument("yhat must be a unit vector");
  const PatchMoments m = patch_moments(u);
  if (!(m.uu > 0.0)) throw std::domain_error("h1 domination undefined for u = 0");
  const double y1sq = 2.0 * m.mass;  // <y_1, y_1>
  const double along = u.grid.kind == AxisKind::Line ? yhat[0] : 0.0;
  const double uu_t = std::max(m.uu - m.u1 * m.u1 / m.mass, 0.0);
  const double ul = along * m.uy;
  double val = along * along * y1sq;
  if (ul > 0.0 && uu_t > 0.0) val -= ul * ul / uu_t;
  val += (1.0 - along * along) * y1sq;
  return std::sqrt(std::max(val, 0.0));
}

double mode_fraction(const GraphPatch& u, double gamma, Relation rel) {
  const Projection pr = weighted_project(u, gamma, rel);
  const double full = pr.full.norm_sq();
  const double r2 = pr.residual * pr.residual;
  if (!(full > 0.0) || r2 >= 1.0) throw std::domain_error("mode fraction undefined for u = 0");
  const double total = full / (1.0 - r2);
  return std::sqrt(pr.component.norm_sq() / total);
}

SweepReport monotonicity_sweep(const DecaySeries& series, const CylinderParams& params,
                               double eps, double closeness, double delta2) {
  SweepReport rep;
  const auto& t = series.tau;
  std::vector<double> gammas;
  for (const auto& lvl : enumerate_spectrum(params, 8.0)) gammas.push_back(lvl.eigenvalue);
  for (size_t i = 0; i < t.size(); ++i) {
    const auto i1 = find_tau(t, t[i] + 1.0);
    const auto i2 = find_tau(t, t[i] + 2.0);
    if (!i1 || !i2) continue;
    if (series.d[i] > closeness || series.d[*i1] > closeness || series.d[*i2] > closeness) {
      rep.truncated = true;
      rep.notice = "trace left the closeness regime at tau = " + std::to_string(t[i]);
      break;
    }
    StepVerdict v;
    v.tau = t[i];
    v.N0 = decay_order(series, t[i]);
    v.N1 = decay_order(series, t[i] + 1.0);
    v.drop = v.N0 - v.N1;
    bool locked = false;
    for (double g : gammas) {
      if (std::abs(v.N0 - g) <= eps && std::abs(v.N1 - g) <= eps) {
        locked = true;
        v.gamma = g;
        break;
      }
    }
    if (locked) {
      v.kind = VerdictKind::SpectrumLocked;
    } else if (v.N1 <= v.N0 - delta2 && v.N1 >= -1.0 - eps) {
      v.kind = VerdictKind::Drop;
    } else {
      v.kind = VerdictKind::Violation;
      ++rep.violations;
    }
    rep.verdicts.push_back(v);
  }
  if (!rep.verdicts.empty()) {
    double drops = 0, locks = 0;
    for (const auto& v : rep.verdicts) {
      drops += v.kind == VerdictKind::Drop;
      locks += v.kind == VerdictKind::SpectrumLocked;
    }
    rep.drop_fraction = drops / rep.verdicts.size();
    rep.locked_fraction = locks / rep.verdicts.size();
  }
  return rep;
}

int surgery_euler_delta(int n, int k) {
  if (n < 2 || k < 1 || k > n - 1) throw std::domain_error("surgery needs 1 <= k <= n-1");
  const int removed = 1 + ((n - k) % 2 == 0 ? 1 : -1);  // chi(S^{n-k})
  const int added = 1 + ((k - 1) % 2 == 0 ? 1 : -1);    // chi(S^{k-1})
  return added - removed;
}

}  // namespace mcf
