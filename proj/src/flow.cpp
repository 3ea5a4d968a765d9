#include "mcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcf/tridiag.hpp"

namespace mcf {

double RadialProfile::min_v() const { return *std::min_element(v.begin(), v.end()); }

int RadialProfile::argmin() const {
  return static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
}

RadialProfile make_profile(const CylinderParams& params, const Grid1D& grid,
                           const std::function<double(double)>& v, double time,
                           TimeKind kind) {
  RadialProfile p{params, grid, std::vector<double>(grid.points), time, kind, std::nullopt};
  for (int i = 0; i < grid.points; ++i) p.v[i] = v(grid.coord(i));
  return p;
}

namespace {

struct Coeffs {
  std::vector<double> A;  // second-derivative coefficient
  std::vector<double> b;  // first-derivative coefficient
};

// Coefficients of A v'' + b v' for the tube operator. `a` is the lagged
// quasilinear factor 1/(1+v'^2); drift collects (k-1)/r, -x/2 and the frame
// term of a growing domain.
Coeffs tube_coeffs(const Grid1D& g, int k, const std::vector<double>& a,
                   bool rescaled, double frame_rate) {
  const int n = g.points;
  const double h = g.h();
  Coeffs c{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    const double x = g.lo() + i * h;
    c.A[i] = a[i];
    double b = frame_rate * x;
    if (rescaled) b -= 0.5 * x;
    if (g.kind == AxisKind::Radial) {
      if (i == 0) {
        c.A[i] += (k - 1);  // (k-1) v'/r -> (k-1) v'' at the origin
        b = 0.0;
      } else {
        b += (k - 1) / x;
      }
    }
    c.b[i] = b;
  }
  return c;
}

std::vector<double> first_derivative(const Grid1D& g, const std::vector<double>& v,
                                     BoundaryMode boundary) {
  const int n = g.points;
  const double h = g.h();
  std::vector<double> d(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2 * h);
  if (boundary == BoundaryMode::PinnedHomothetic) {
    d[n - 1] = (3 * v[n - 1] - 4 * v[n - 2] + v[n - 3]) / (2 * h);
    if (g.kind == AxisKind::Line) d[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h);
  }
  return d;
}

bool left_is_dirichlet(const Grid1D& g, BoundaryMode b) {
  return g.kind == AxisKind::Line && b == BoundaryMode::PinnedHomothetic;
}

// Row i of A v'' + b v' as (lower, centre, upper) weights, with even ghosts
// at Neumann ends and at r = 0.
void stencil_row(const Grid1D& g, const Coeffs& c, int i, double& lo, double& mid,
                 double& up) {
  const int n = g.points;
  const double h = g.h();
  const double h2 = h * h;
  lo = mid = up = 0.0;
  if (i == 0) {
    mid = -2 * c.A[0] / h2;
    up = 2 * c.A[0] / h2;
  } else if (i == n - 1) {
    lo = 2 * c.A[i] / h2;
    mid = -2 * c.A[i] / h2;
  } else {
    lo = c.A[i] / h2 - c.b[i] / (2 * h);
    mid = -2 * c.A[i] / h2;
    up = c.A[i] / h2 + c.b[i] / (2 * h);
  }
}

std::vector<double> lagged_factor(const Grid1D& g, const std::vector<double>& v,
                                  BoundaryMode boundary) {
  const auto d = first_derivative(g, v, boundary);
  std::vector<double> a(v.size());
  for (size_t i = 0; i < v.size(); ++i) a[i] = 1.0 / (1.0 + d[i] * d[i]);
  return a;
}

double trapezoid_weight(const Grid1D& g, int i, int k) {
  const double h = g.h();
  const double x = g.lo() + i * h;
  double w = (i == 0 || i == g.points - 1) ? 0.5 * h : h;
  if (g.kind == AxisKind::Radial) w *= std::pow(x, k - 1);
  return w * std::exp(-x * x / 4.0);
}

// Holds the (-1)-mode of u = v - rho at its slaved value -<Q,1>/<1,1> by a
// dilation, where Q = F(v) - L_h u is the discrete nonlinearity.
void control_constant_mode(RadialProfile& p, BoundaryMode boundary) {
  const auto& g = p.grid;
  const int n = g.points;
  const int k = p.params.k;
  const double rho = p.params.rho;
  const auto F = tube_rhs(p, true, boundary);
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = p.v[i] - rho;
  const std::vector<double> ones(n, 1.0);
  const Coeffs lin = tube_coeffs(g, k, ones, true, 0.0);
  const int first = left_is_dirichlet(g, boundary) ? 1 : 0;
  const int last = boundary == BoundaryMode::PinnedHomothetic ? n - 2 : n - 1;
  double wsum = 0.0, a = 0.0, q = 0.0;
  for (int i = first; i <= last; ++i) {
    double lo, mid, up;
    stencil_row(g, lin, i, lo, mid, up);
    double Lu = mid * u[i] + u[i];
    if (i > 0) Lu += lo * u[i - 1];
    if (i + 1 < n) Lu += up * u[i + 1];
    if (i == 0 && g.kind == AxisKind::Line) Lu = mid * u[0] + up * u[1] + u[0];
    const double w = trapezoid_weight(g, i, k);
    wsum += w;
    a += w * u[i];
    q += w * (F[i] - Lu);
  }
  const double delta = -(q + a) / wsum;
  const auto d = first_derivative(g, p.v, boundary);
  for (int i = first; i <= last; ++i) {
    const double x = g.lo() + i * g.h();
    p.v[i] += delta * (p.v[i] - x * d[i]) / rho;
  }
}

StepResult imex_step(const RadialProfile& prof, const StepperConfig& cfg,
                     bool rescaled) {
  const auto& params = prof.params;
  const double rho = params.rho;
  const double c = params.sphere_dim();
  const double ell = rescaled ? 0.5 : 0.0;
  const double dt = cfg.dt;
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (prof.grid.points < 4) throw std::invalid_argument("profile grid too small");

  StepResult res{prof, StepStatus::Ok, 0.0};
  const double vmin = prof.min_v();
  if (vmin < 1e-6 * rho) {
    res.status = StepStatus::Refused;
    return res;
  }
  const double stiff = ell + c / (vmin * vmin);
  if (dt * stiff > 0.5) {
    res.status = StepStatus::Rejected;
    res.suggested_dt = 0.25 / stiff;
    return res;
  }

  RadialProfile next = prof;
  next.time = prof.time + dt;
  double frame_rate = 0.0;
  if (cfg.growth == DomainGrowth::Parabolic) {
    if (!rescaled) throw std::invalid_argument("parabolic domain needs the rescaled flow");
    if (next.time <= 0.0) throw std::invalid_argument("parabolic domain needs tau > 0");
    next.grid.extent = cfg.growth_factor * std::sqrt(next.time);
    frame_rate = 0.5 / next.time;
  }
  const auto& g = next.grid;
  const int n = g.points;
  const auto a = lagged_factor(prof.grid, prof.v, cfg.boundary);
  const Coeffs co = tube_coeffs(g, params.k, a, rescaled, frame_rate);

  std::vector<double> lower(n, 0.0), diag(n), upper(n, 0.0), rhs(n);
  for (int i = 0; i < n; ++i) {
    double lo, mid, up;
    stencil_row(g, co, i, lo, mid, up);
    const double vi = prof.v[i];
    // -c/v linearized about the old value: -2c/v_old + c v / v_old^2
    lower[i] = -dt * lo;
    upper[i] = -dt * up;
    diag[i] = 1.0 - dt * (mid + ell + c / (vi * vi));
    rhs[i] = vi - 2.0 * c * dt / vi;
  }
  auto pin = [&](int i, double value) {
    lower[i] = upper[i] = 0.0;
    diag[i] = 1.0;
    rhs[i] = value;
  };
  if (cfg.boundary == BoundaryMode::PinnedHomothetic) {
    auto value = [&](double old) {
      if (rescaled) {
        return std::isnan(cfg.pinned_value) ? rho * std::sqrt(1.5) : cfg.pinned_value;
      }
      return std::sqrt(std::max(old * old - 2.0 * c * dt, 0.0));
    };
    pin(n - 1, value(prof.v[n - 1]));
    if (g.kind == AxisKind::Line) pin(0, value(prof.v[0]));
  }
  solve_tridiagonal(lower, diag, upper, rhs);
  next.v = std::move(rhs);

  if (rescaled && cfg.control_unstable_mode) control_constant_mode(next, cfg.boundary);

  res.profile = std::move(next);
  const double new_min = res.profile.min_v();
  if (!(new_min > cfg.v_stop)) {
    res.status = StepStatus::Pinch;
    return res;
  }
  if (rescaled) {
    double dev = 0.0;
    for (double v : res.profile.v) dev = std::max(dev, std::abs(v - rho));
    if (dev > 0.5 * rho) res.status = StepStatus::RegimeExit;
  }
  return res;
}

}  // namespace

StepResult rmcf_step(const RadialProfile& profile, const StepperConfig& cfg) {
  return imex_step(profile, cfg, true);
}

StepResult mcf_step(const RadialProfile& profile, const StepperConfig& cfg) {
  return imex_step(profile, cfg, false);
}

std::vector<double> tube_rhs(const RadialProfile& p, bool rescaled,
                             BoundaryMode boundary) {
  const auto& g = p.grid;
  const int n = g.points;
  const double c = p.params.sphere_dim();
  const auto a = lagged_factor(g, p.v, boundary);
  const Coeffs co = tube_coeffs(g, p.params.k, a, rescaled, 0.0);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double lo, mid, up;
    stencil_row(g, co, i, lo, mid, up);
    double s = mid * p.v[i] - c / p.v[i] + (rescaled ? 0.5 * p.v[i] : 0.0);
    if (i > 0) s += lo * p.v[i - 1];
    if (i + 1 < n) s += up * p.v[i + 1];
    if (i == 0 && g.kind == AxisKind::Line) {
      s = mid * p.v[0] + up * p.v[1] - c / p.v[0] + (rescaled ? 0.5 * p.v[0] : 0.0);
    }
    out[i] = s;
  }
  if (boundary == BoundaryMode::PinnedHomothetic) {
    out[n - 1] = 0.0;
    if (g.kind == AxisKind::Line) out[0] = 0.0;
  }
  return out;
}

std::vector<double> tube_mean_curvature(const RadialProfile& p) {
  const auto& g = p.grid;
  const int n = g.points;
  const double h = g.h();
  const int k = p.params.k;
  const double c = p.params.sphere_dim();
  std::vector<double> H(n);
  for (int i = 0; i < n; ++i) {
    double d1, d2;
    if (i == 0 && g.kind == AxisKind::Radial) {
      d1 = 0.0;
      d2 = 2 * (p.v[1] - p.v[0]) / (h * h);
    } else if (i == 0) {
      d1 = (-3 * p.v[0] + 4 * p.v[1] - p.v[2]) / (2 * h);
      d2 = (2 * p.v[0] - 5 * p.v[1] + 4 * p.v[2] - p.v[3]) / (h * h);
    } else if (i == n - 1) {
      d1 = (3 * p.v[i] - 4 * p.v[i - 1] + p.v[i - 2]) / (2 * h);
      d2 = (2 * p.v[i] - 5 * p.v[i - 1] + 4 * p.v[i - 2] - p.v[i - 3]) / (h * h);
    } else {
      d1 = (p.v[i + 1] - p.v[i - 1]) / (2 * h);
      d2 = (p.v[i + 1] - 2 * p.v[i] + p.v[i - 1]) / (h * h);
    }
    const double root = std::sqrt(1.0 + d1 * d1);
    double val = -d2 / (root * root * root) + c / (p.v[i] * root);
    if (g.kind == AxisKind::Radial) {
      const double x = g.lo() + i * h;
      val -= (i == 0) ? (k - 1) * d2 : (k - 1) * d1 / (x * root);
    }
    H[i] = val;
  }
  return H;
}

JacobiGrid jacobi_step(const JacobiGrid& field, double dt, BoundaryMode boundary) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const auto& g = field.grid;
  const int n = g.points;
  const std::vector<double> ones(n, 1.0);
  const Coeffs co = tube_coeffs(g, field.params.k, ones, true, 0.0);
  const int d = field.params.sphere_dim();
  const double mu = field.sphere_level * (field.sphere_level - 1.0 + d) / (2.0 * d);
  std::vector<double> lower(n, 0.0), diag(n), upper(n, 0.0), rhs = field.v;
  for (int i = 0; i < n; ++i) {
    double lo, mid, up;
    stencil_row(g, co, i, lo, mid, up);
    lower[i] = -dt * lo;
    upper[i] = -dt * up;
    diag[i] = 1.0 - dt * (mid + 1.0 - mu);
  }
  if (boundary == BoundaryMode::PinnedHomothetic) {
    lower[n - 1] = 0.0;
    diag[n - 1] = 1.0;
    if (g.kind == AxisKind::Line) {
      upper[0] = 0.0;
      diag[0] = 1.0;
    }
  }
  solve_tridiagonal(lower, diag, upper, rhs);
  JacobiGrid out = field;
  out.v = std::move(rhs);
  out.tau = field.tau + dt;
  return out;
}

RadialProfile nondegenerate_initial(const CylinderParams& params, double tau0,
                                    int points, double extent) {
  if (tau0 < 10.0) throw std::domain_error("tau0 below the normal-form regime (tau0 >= 10)");
  const double root = std::sqrt(tau0);
  if (extent <= 0.0) extent = root;
  const double rho = params.rho;
  const double far = rho * std::sqrt(1.5);
  const int k = params.k;
  auto v = [&](double r) {
    const double near = rho + rho * (r * r - 2.0 * k) / (4.0 * tau0);
    if (r <= root - 1.0) return near;
    if (r >= root) return far;
    const double t = r - (root - 1.0);
    const double S = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    return (1.0 - S) * near + S * far;
  };
  RadialProfile p = make_profile(params, Grid1D{AxisKind::Radial, extent, points}, v,
                                 tau0, TimeKind::Rescaled);
  p.far_field = far;
  return p;
}

RadialProfile normal_form_mcf_initial(const CylinderParams& params, double tau0,
                                      double extent, int points) {
  if (tau0 <= params.k) throw std::domain_error("tau0 must exceed k");
  const double t0 = -std::exp(-tau0);
  const double rho = params.rho;
  const double k = params.k;
  auto v = [&](double r) {
    return rho * std::sqrt(-t0 * (1.0 - k / tau0) + r * r / (2.0 * tau0));
  };
  return make_profile(params, Grid1D{AxisKind::Radial, extent, points}, v, t0,
                      TimeKind::Flow);
}

RunResult run_flow(const RadialProfile& start, const StepperConfig& cfg,
                   const RunOptions& opts) {
  const bool rescaled = start.time_kind == TimeKind::Rescaled;
  RunResult out{FlowTrace{start.time_kind, {}, {}}, start, StepStatus::Ok, {}};
  RadialProfile cur = start;
  const double c = start.params.sphere_dim();
  const double ell = rescaled ? 0.5 : 0.0;
  const double t_start = start.time;
  long snap_index = 1;
  auto next_snap = [&]() {
    return opts.sample_interval > 0.0 ? t_start + snap_index * opts.sample_interval
                                      : INFINITY;
  };
  auto record = [&](const RadialProfile& p) {
    const int i = p.argmin();
    out.trace.samples.push_back(TraceSample{p.time, p.v[i], p.grid.coord(i)});
  };
  if (opts.record_steps) record(cur);
  if (opts.sample_interval > 0.0) out.trace.snapshots.push_back(cur);

  StepperConfig sc = cfg;
  for (int step = 0; step < cfg.max_steps; ++step) {
    const double remaining = opts.end_time - cur.time;
    if (remaining <= 1e-12 * std::max(1.0, std::abs(opts.end_time))) break;
    double dt = cfg.dt;
    if (opts.adaptive) {
      const double vmin = cur.min_v();
      dt = std::min(dt, opts.adaptive_safety / (ell + c / (vmin * vmin)));
    }
    const double target = std::min(next_snap(), opts.end_time);
    bool hit = false;
    if (cur.time + dt >= target - 1e-12 * std::max(1.0, std::abs(target))) {
      dt = target - cur.time;
      hit = true;
    }
    sc.dt = dt;
    StepResult r = rescaled ? rmcf_step(cur, sc) : mcf_step(cur, sc);
    if (r.status == StepStatus::Rejected) {
      if (!opts.adaptive) {
        out.status = r.status;
        out.message = "step rejected; suggested dt " + std::to_string(r.suggested_dt);
        break;
      }
      sc.dt = r.suggested_dt;
      r = rescaled ? rmcf_step(cur, sc) : mcf_step(cur, sc);
      hit = false;
      if (r.status == StepStatus::Rejected) {
        out.status = r.status;
        out.message = "step rejected twice";
        break;
      }
    }
    if (r.status == StepStatus::Refused) {
      out.status = r.status;
      out.message = "profile left the graphical regime near the spine";
      break;
    }
    cur = std::move(r.profile);
    if (hit) cur.time = target;
    if (opts.record_steps) record(cur);
    if (hit && target == next_snap()) {
      out.trace.snapshots.push_back(cur);
      ++snap_index;
    }
    if (r.status == StepStatus::Pinch || r.status == StepStatus::RegimeExit) {
      out.status = r.status;
      out.message = r.status == StepStatus::Pinch ? "pinch" : "left the graph regime";
      break;
    }
  }
  out.final = std::move(cur);
  return out;
}

PinchEstimate detect_pinch(const FlowTrace& trace) {
  PinchEstimate est;
  const auto& s = trace.samples;
  if (s.size() < 3) return est;
  const double v_end = s.back().min_v;
  if (!(v_end < s.front().min_v)) return est;
  size_t first = s.size() - 1;
  while (first > 0 && s[first - 1].min_v <= 10.0 * v_end) --first;
  if (s.size() - first < 3) first = s.size() - 3;
  // least squares for v^2 = alpha - beta t
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double m = static_cast<double>(s.size() - first);
  const double t_ref = s.back().time;
  for (size_t i = first; i < s.size(); ++i) {
    const double t = s[i].time - t_ref;
    const double y = s[i].min_v * s[i].min_v;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double beta = -(m * sty - st * sy) / (m * stt - st * st);
  const double alpha = (sy + beta * st) / m;
  if (!(beta > 0.0)) return est;
  est.found = true;
  est.time = t_ref + alpha / beta;
  est.coefficient = std::sqrt(beta);
  est.location = s.back().argmin;
  return est;
}

double cusp_profile(double y, const CylinderParams& params) {
  const double a = std::abs(y);
  if (a >= 1.0) throw std::domain_error("cusp profile needs |y| < 1");
  if (a == 0.0) return 0.0;
  return params.rho * a / (2.0 * std::sqrt(-std::log(a)));
}

}  // namespace mcf
