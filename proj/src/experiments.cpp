#include "mcf/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "mcf/spectral.hpp"

namespace mcf::exp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return NAN;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  return fit_slope(lx, ly);
}

double radial_jacobian(const Grid1D& g, int k, double r) {
  return g.kind == AxisKind::Radial ? std::pow(r, k - 1) : 1.0;
}

}  // namespace

SpectrumRun spectrum_run(const CylinderParams& params, std::vector<int> points,
                         double extent) {
  const auto t0 = std::chrono::steady_clock::now();
  SpectrumRun run{params, extent, std::move(points), {}, {}, 0.0, 0.0};
  const double expected[3] = {-1.0, -0.5, 0.0};
  std::vector<double> hs;
  for (int N : run.points) {
    const JacobiOperator op = discretize_jacobi_operator(params, SymmetryClass::Line, extent, N);
    const auto low = op.lowest(3);
    double err = 0.0;
    for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(low[i] - expected[i]));
    run.lowest.push_back(low);
    run.max_error.push_back(err);
    hs.push_back(op.grid.h());
  }
  const size_t m = std::min<size_t>(3, hs.size());
  run.order = loglog_slope(std::vector<double>(hs.begin(), hs.begin() + m),
                           std::vector<double>(run.max_error.begin(), run.max_error.begin() + m));
  run.seconds = seconds_since(t0);
  return run;
}

LinearDecayRun linear_decay_run(std::uint64_t seed, int mixtures) {
  const auto t0 = std::chrono::steady_clock::now();
  const CylinderParams params = make_cylinder(2, 1);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> coeff(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 6), level(0, 2), degree(0, 6);
  LinearDecayRun run;
  run.mixtures = mixtures;
  run.floor = INFINITY;
  run.mean_zero_floor = INFINITY;
  auto make = [&](bool mean_zero) {
    EigenExpansion e{params, SymmetryClass::Full, 6, {}};
    const int terms = count(rng);
    for (int t = 0; t < terms; ++t) {
      int i = level(rng), j = degree(rng);
      if (mean_zero && i == 0 && j == 0) j = 1;
      e.terms.push_back({SpectralMode{i, j, mode_eigenvalue(i, j, params)}, coeff(rng), 1.0});
    }
    return e;
  };
  for (int m = 0; m < mixtures; ++m) {
    const bool mean_zero = m % 2 == 1;
    const EigenExpansion e = make(mean_zero);
    double prev = NAN;
    for (int s = 0; s <= 50; ++s) {
      const double tau = 0.1 * s;
      const double N = linear_decay_order(e, tau);
      if (!std::isnan(prev)) run.worst_increase = std::max(run.worst_increase, N - prev);
      prev = N;
      run.floor = std::min(run.floor, N);
      if (mean_zero) run.mean_zero_floor = std::min(run.mean_zero_floor, N);
      if (m == 0) {
        run.sample_tau.push_back(tau);
        run.sample_N.push_back(N);
      }
    }
    // single mode with the first term's eigenvalue
    EigenExpansion pure{params, SymmetryClass::Full, 6, {e.terms.front()}};
    for (double tau : {0.0, 1.7, 4.2}) {
      run.pure_mode_dev = std::max(
          run.pure_mode_dev, std::abs(linear_decay_order(pure, tau) - pure.terms[0].mode.eigenvalue));
    }
  }
  run.seconds = seconds_since(t0);
  return run;
}

namespace {

std::vector<double> evolve_grid(const JacobiGrid& start, double dt, double tau_end) {
  JacobiGrid g = start;
  const int steps = static_cast<int>(std::lround(tau_end / dt));
  for (int s = 0; s < steps; ++s) g = jacobi_step(g, dt);
  return g.v;
}

double weighted_rel_error(const Grid1D& g, int k, const std::vector<double>& a,
                          const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < g.points; ++i) {
    const double y = g.coord(i);
    const double w = std::exp(-y * y / 4.0) * radial_jacobian(g, k, y);
    num += w * (a[i] - b[i]) * (a[i] - b[i]);
    den += w * b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

JacobiRun jacobi_run(const CylinderParams& params, std::uint64_t seed) {
  JacobiRun run;
  {
    const Grid1D g{AxisKind::Line, 12.0, 601};
    JacobiGrid f{params, g, std::vector<double>(g.points), 0.0, 0};
    for (int i = 0; i < g.points; ++i) f.v[i] = hermite_eval(2, g.coord(i));
    const auto v = evolve_grid(f, 1e-3, 1.0);
    run.h2_drift = weighted_rel_error(g, params.k, v, f.v);
    std::fill(f.v.begin(), f.v.end(), 1.0);
    run.constant_growth = evolve_grid(f, 5e-5, 1.0)[g.points / 2];
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> coeff(0.0, 1.0);
  std::vector<std::pair<int, double>> cs;
  for (int j = 0; j <= 6; ++j) cs.emplace_back(j, coeff(rng) / std::sqrt(std::tgamma(j + 1.0) * std::pow(2.0, j)));
  const EigenExpansion v0 = make_expansion(params, SymmetryClass::Line, cs);
  const EigenExpansion v1 = heat_semigroup_evolve(v0, 1.0);
  for (int N : {101, 201, 401}) {
    const Grid1D g{AxisKind::Line, 10.0, N};
    JacobiGrid f{params, g, std::vector<double>(N), 0.0, 0};
    std::vector<double> exact(N);
    for (int i = 0; i < N; ++i) {
      f.v[i] = v0.evaluate(g.coord(i));
      exact[i] = v1.evaluate(g.coord(i));
    }
    // Richardson in time so the spatial error dominates
    const auto a = evolve_grid(f, 2e-3, 1.0);
    const auto b = evolve_grid(f, 1e-3, 1.0);
    std::vector<double> ext(N);
    for (int i = 0; i < N; ++i) ext[i] = 2.0 * b[i] - a[i];
    run.h.push_back(g.h());
    run.error.push_back(weighted_rel_error(g, params.k, ext, exact));
  }
  run.spatial_order = loglog_slope(run.h, run.error);
  return run;
}

ExactRun exact_run(const CylinderParams& params, int points) {
  ExactRun run;
  const double c = params.sphere_dim();
  {
    // shrinking cylinder R0 = 1, lifespan 1/(2c)
    const double T = 1.0 / (2.0 * c);
    RadialProfile p = make_profile(params, Grid1D{AxisKind::Line, 5.0, points},
                                   [](double) { return 1.0; }, 0.0, TimeKind::Flow);
    StepperConfig sc;
    sc.dt = 1e-5;
    sc.v_stop = 1e-3;
    RunOptions o;
    o.end_time = 0.5 * T;
    o.sample_interval = 0.05 * T;
    o.record_steps = false;
    const RunResult half = run_flow(p, sc, o);
    for (const auto& s : half.trace.snapshots) {
      const double exact = std::sqrt(1.0 - 2.0 * c * s.time);
      for (double v : s.v) run.cylinder_rel_error = std::max(run.cylinder_rel_error, std::abs(v - exact) / exact);
    }
    RunOptions to_pinch;
    to_pinch.end_time = 2.0 * T;
    to_pinch.adaptive = true;
    to_pinch.adaptive_safety = 0.02;
    const RunResult full = run_flow(p, sc, to_pinch);
    run.cylinder_T = detect_pinch(full.trace).time;
    run.cylinder_trace = full.trace;
  }
  {
    const int n = params.n;
    const double T = 1.0 / (2.0 * n);
    PolarProfile sp{n, std::vector<double>(points, 1.0), 0.0};
    FlowTrace trace;
    const double r_probe = 0.8;
    double prev_t = 0.0, prev_r = 1.0;
    bool arrived = false;
    while (true) {
      const double rmin = *std::min_element(sp.R.begin(), sp.R.end());
      const double dt = std::min(1e-5, 0.02 * rmin * rmin / n);
      const PolarStepResult r = polar_mcf_step(sp, dt, 1e-3);
      if (r.status == StepStatus::Rejected || r.status == StepStatus::Refused) break;
      sp = r.profile;
      const double rm = *std::min_element(sp.R.begin(), sp.R.end());
      trace.samples.push_back(TraceSample{sp.time, rm, 0.0});
      if (sp.time <= 0.5 * T) {
        const double exact = std::sqrt(1.0 - 2.0 * n * sp.time);
        for (double v : sp.R) run.sphere_rel_error = std::max(run.sphere_rel_error, std::abs(v - exact) / exact);
      }
      if (!arrived && sp.R[points / 2] <= r_probe) {
        const double t_hit = prev_t + (sp.time - prev_t) * (prev_r - r_probe) / (prev_r - sp.R[points / 2]);
        run.arrival_error = std::abs(t_hit - (1.0 - r_probe * r_probe) / (2.0 * n));
        arrived = true;
      }
      prev_t = sp.time;
      prev_r = sp.R[points / 2];
      if (r.status == StepStatus::Pinch) break;
    }
    run.sphere_T = detect_pinch(trace).time;
  }
  {
    // dumbbell: neck 0.3 at y = 0, bells of radius 1 at the Neumann ends
    const double L = 3.0;
    RadialProfile p = make_profile(
        params, Grid1D{AxisKind::Line, L, points},
        [L](double y) { return 0.3 + 0.35 * (1.0 - std::cos(std::numbers::pi * y / L)); }, 0.0,
        TimeKind::Flow);
    StepperConfig sc;
    sc.dt = 1e-5;
    sc.v_stop = 1e-3;
    RunOptions o;
    o.end_time = 1.0;
    o.adaptive = true;
    o.adaptive_safety = 0.02;
    const RunResult r = run_flow(p, sc, o);
    run.dumbbell_neck_T = detect_pinch(r.trace).time;
    run.dumbbell_bell_min = std::min(r.final.v.front(), r.final.v.back());
  }
  return run;
}

FixedPointRun fixed_point_run(const CylinderParams& params, int steps) {
  FixedPointRun run;
  run.steps = steps;
  RadialProfile p = make_profile(params, Grid1D{AxisKind::Radial, 6.0, 200},
                                 [&](double) { return params.rho; }, 0.0, TimeKind::Rescaled);
  StepperConfig sc;
  sc.dt = 0.01;
  for (int s = 0; s < steps; ++s) {
    const StepResult r = rmcf_step(p, sc);
    for (int i = 0; i < p.grid.points; ++i) {
      run.max_step_change = std::max(run.max_step_change, std::abs(r.profile.v[i] - p.v[i]));
    }
    p = r.profile;
  }
  for (double v : p.v) run.total_drift = std::max(run.total_drift, std::abs(v - params.rho));
  return run;
}

NondegenerateRun nondegenerate_run(const NondegenerateOptions& opts) {
  NondegenerateRun run;
  run.opts = opts;
  const RadialProfile start = nondegenerate_initial(opts.params, opts.tau0, opts.points);
  StepperConfig sc;
  sc.dt = opts.dt;
  sc.boundary = opts.boundary;
  sc.growth = DomainGrowth::Parabolic;
  sc.growth_factor = 1.0;
  sc.control_unstable_mode = true;
  RunOptions o;
  o.end_time = opts.horizon;
  o.sample_interval = 1.0;
  o.record_steps = false;
  RunResult r = run_flow(start, sc, o);
  run.status = r.status;
  run.message = r.message;
  run.snapshots = std::move(r.trace.snapshots);
  run.trace.kind = TimeKind::Rescaled;
  run.restricted.resize(opts.radii.size());
  for (size_t j = 0; j < opts.radii.size(); ++j) run.restricted[j].R = opts.radii[j];
  for (const auto& s : run.snapshots) {
    const double d = l2_distance(s).value;
    run.series.tau.push_back(s.time);
    run.series.d.push_back(d);
    for (size_t j = 0; j < opts.radii.size(); ++j) {
      auto& ser = run.restricted[j];
      ser.tau.push_back(s.time);
      ser.d.push_back(d);
      ser.d_R.push_back(l2_distance(s, opts.radii[j]).value);
    }
    TraceSample ts{s.time, s.min_v(), s.grid.coord(s.argmin())};
    ts.d = d;
    const auto H = tube_mean_curvature(s);
    int last = 0;
    while (last + 1 < s.grid.points && s.grid.coord(last + 1) <= opts.window) ++last;
    ts.h_min = *std::min_element(H.begin(), H.begin() + last + 1);
    RadialProfile window = s;
    window.grid.points = last + 1;
    window.grid.extent = s.grid.coord(last);
    window.v.resize(last + 1);
    try {
      ts.alpha = noncollapse_alpha(window).alpha;
    } catch (const std::domain_error&) {
      ts.alpha = NAN;
    }
    run.trace.samples.push_back(ts);
  }
  return run;
}

NormalFormFit normal_form_fit(const NondegenerateRun& run, double t_lo, double t_hi) {
  NormalFormFit fit;
  const auto& params = run.opts.params;
  const double rho = params.rho;
  const int k = params.k;
  for (const auto& s : run.snapshots) {
    const double tau = s.time;
    if (tau < t_lo - 1e-9 || tau > t_hi + 1e-9) continue;
    const auto& g = s.grid;
    const double h = g.h();
    double sup = 0.0, l2 = 0.0, grad = 0.0;
    auto err = [&](int i) {
      const double r = g.coord(i);
      return s.v[i] - rho - rho * (r * r - 2.0 * k) / (4.0 * tau);
    };
    for (int i = 0; i < g.points; ++i) {
      const double r = g.coord(i);
      if (r <= 2.0) sup = std::max(sup, std::abs(tau * (s.v[i] - rho) - rho / 4.0 * (r * r - 2.0 * k)));
      const double w = (i == 0 || i == g.points - 1 ? 0.5 : 1.0) * h * std::exp(-r * r / 4.0) *
                       radial_jacobian(g, k, r);
      l2 += w * err(i) * err(i);
      if (i + 1 < g.points) {
        const double rm = r + 0.5 * h;
        const double de = (err(i + 1) - err(i)) / h;
        grad += h * std::exp(-rm * rm / 4.0) * radial_jacobian(g, k, rm) * de * de;
      }
    }
    fit.tau.push_back(tau);
    fit.sup_dev.push_back(sup);
    fit.residual.push_back(std::sqrt(l2 + grad));
  }
  fit.slope = loglog_slope(fit.tau, fit.residual);
  fit.sup_decreasing = fit.sup_dev.size() >= 2;
  for (size_t i = 10; i < fit.sup_dev.size(); i += 10) {
    fit.sup_decreasing = fit.sup_decreasing && fit.sup_dev[i] < fit.sup_dev[i - 10];
  }
  return fit;
}

RestrictedFit restricted_fit(const NondegenerateRun& run, std::vector<double> taus) {
  RestrictedFit fit;
  const double t0 = run.opts.tau0;
  for (size_t j = 0; j < run.restricted.size(); ++j) {
    const auto& ser = run.restricted[j];
    const double R = *ser.R;
    double sum = 0.0;
    for (double t : taus) {
      const double gap = std::abs(decay_order(ser, t0 + t, true) - decay_order(ser, t0 + t));
      sum += gap;
      fit.R0 = std::max(fit.R0, gap * t * R * R);
    }
    fit.radii.push_back(R);
    fit.mean_gap.push_back(sum / taus.size());
  }
  fit.exponent = loglog_slope(fit.radii, fit.mean_gap);
  return fit;
}

CuspRun cusp_run(const CylinderParams& params, double tau0, int points) {
  CuspRun run;
  const RadialProfile start = normal_form_mcf_initial(params, tau0, 1.0, points);
  StepperConfig sc;
  sc.dt = 2e-6;
  sc.v_stop = 1e-3;
  sc.boundary = BoundaryMode::PinnedHomothetic;
  RunOptions o;
  o.end_time = 1.0;
  o.adaptive = true;
  o.adaptive_safety = 0.02;
  o.sample_interval = -start.time / 40.0;
  const RunResult r = run_flow(start, sc, o);
  run.trace = r.trace;
  run.T = detect_pinch(r.trace).time;
  run.t_final = r.final.time;
  const double rho = params.rho;
  double sum_w = 0.0, n_w = 0.0, sum_n = 0.0, n_n = 0.0;
  run.min_ratio = INFINITY;
  run.max_ratio = -INFINITY;
  for (int i = 0; i < r.final.grid.points; ++i) {
    const double y = r.final.grid.coord(i);
    if (y < 0.02 - 1e-12 || y > 0.1 + 1e-12) continue;
    const double q = r.final.v[i] * 2.0 * std::sqrt(-std::log(y)) / (rho * y);
    run.y.push_back(y);
    run.ratio.push_back(q);
    run.min_ratio = std::min(run.min_ratio, q);
    run.max_ratio = std::max(run.max_ratio, q);
    sum_w += q;
    n_w += 1;
    if (y <= 0.05 + 1e-12) {
      sum_n += q;
      n_n += 1;
    }
  }
  run.mean_wide = sum_w / n_w;
  run.mean_narrow = sum_n / n_n;
  run.min_H = INFINITY;
  for (auto& s : r.trace.snapshots) {
    const auto H = tube_mean_curvature(s);
    for (int i = 0; i < s.grid.points && s.grid.coord(i) <= 0.5; ++i) run.min_H = std::min(run.min_H, H[i]);
  }
  return run;
}

RestartRun restart_run(const CylinderParams& params, double y_max, int points,
                       double horizon, double dt) {
  RestartRun run;
  DualProfile p = cusp_restart_profile(params, y_max, points);
  run.sample_t.push_back(0.0);
  run.samples.push_back(p);
  run.monotone_failures += !strictly_monotone(p);
  const int steps = static_cast<int>(std::lround(horizon / dt));
  const int every = std::max(1, steps / 10);
  for (int s = 1; s <= steps; ++s) {
    DualStepResult r = post_singular_step(p, dt);
    p = std::move(r.profile);
    run.monotone_failures += !r.monotone;
    if (s % every == 0) {
      run.sample_t.push_back(p.time);
      run.samples.push_back(p);
    }
  }
  run.steps = steps;
  return run;
}

SweepRun sweep_run(const CylinderParams& params, std::uint64_t seed, int runs, double eps) {
  SweepRun out;
  out.runs = runs;
  out.worst_floor = INFINITY;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> coeff(0.0, 1.0);
  const double closeness = 0.25;
  for (int r = 0; r < runs; ++r) {
    // mode masks cycle through: everything, no constant, no constant or linear,
    // a single random degree
    std::vector<double> c(5);
    for (auto& x : c) x = coeff(rng);
    const int mask = r % 4;
    if (mask >= 1) c[0] = 0.0;
    if (mask >= 2) c[1] = 0.0;
    if (mask == 3) {
      const int keep = 2 + static_cast<int>(rng() % 3);
      for (int j = 0; j < 5; ++j) if (j != keep) c[j] = 0.0;
    }
    double scale = 0.0;
    for (int j = 0; j < 5; ++j) scale = std::max(scale, std::abs(c[j]) * std::pow(2.0, j));
    auto u0 = [&](double y) {
      double s = 0.0;
      for (int j = 0; j < 5; ++j) s += c[j] * hermite_eval(j, y);
      return 1e-4 * s / scale * std::exp(-std::pow(y / 5.0, 8));
    };
    const RadialProfile start = make_profile(
        params, Grid1D{AxisKind::Line, 8.0, 641}, [&](double y) { return params.rho + u0(y); }, 0.0,
        TimeKind::Rescaled);
    StepperConfig sc;
    sc.dt = 0.01;
    RunOptions o;
    o.end_time = 8.0;
    o.sample_interval = 1.0;
    o.record_steps = false;
    const RunResult res = run_flow(start, sc, o);
    DecaySeries ser;
    for (const auto& s : res.trace.snapshots) {
      ser.tau.push_back(s.time);
      ser.d.push_back(l2_distance(s).value);
    }
    SweepReport rep = monotonicity_sweep(ser, params, eps, closeness);
    for (const auto& v : rep.verdicts) {
      out.worst_floor = std::min({out.worst_floor, v.N0, v.N1});
      if (v.kind != VerdictKind::SpectrumLocked && std::abs(v.N1 - v.N0) < 0.01) ++out.off_spectrum_locks;
    }
    out.violations += rep.violations;
    out.reports.push_back(std::move(rep));
    out.nonconcentration.push_back(nonconcentration_check(res.trace.snapshots));
  }
  return out;
}

NoncollapseRun noncollapse_run(const CylinderParams& params) {
  NoncollapseRun run;
  run.sphere_alpha = noncollapse_alpha(PolarProfile{params.n, std::vector<double>(201, 1.0), 0.0}).alpha;
  run.cylinder_alpha =
      noncollapse_alpha(make_profile(params, Grid1D{AxisKind::Line, 10.0, 401},
                                     [&](double) { return params.rho; }, 0.0, TimeKind::Flow))
          .alpha;
  auto ellipsoid = [&](int N) {
    PolarProfile p{params.n, std::vector<double>(N), 0.0};
    for (int i = 0; i < N; ++i) p.R[i] = 1.0 + 0.1 * std::cos(2.0 * i * p.h());
    return noncollapse_alpha(p).alpha;
  };
  run.ellipsoid_alpha_coarse = ellipsoid(201);
  run.ellipsoid_alpha_fine = ellipsoid(401);
  return run;
}

BowlRun bowl_run(int m) {
  BowlRun run;
  run.m = m;
  std::vector<double> samples;
  for (int i = 1; i <= 2000; ++i) samples.push_back(0.32 * i);
  const BowlProfile dense = bowl_translator_solve(m, samples);
  run.convex = true;
  for (double d2 : dense.d2U) run.convex = run.convex && d2 > 0.0;
  for (double s = 10.0; s <= 640.0 + 1e-9; s *= 2.0) run.s.push_back(s);
  const BowlProfile b = bowl_translator_solve(m, run.s);
  for (size_t i = 0; i < run.s.size(); ++i) {
    const double s = run.s[i];
    run.gap.push_back(b.U[i] - (s * s / (2.0 * (m - 1)) - std::log(s)));
    run.increment.push_back(i ? run.gap[i] - run.gap[i - 1] : NAN);
  }
  std::vector<double> xs, ys;
  for (size_t i = 1; i < run.s.size(); ++i) {
    xs.push_back(run.s[i]);
    ys.push_back(std::abs(run.increment[i]));
  }
  run.exponent = loglog_slope(xs, ys);
  return run;
}

namespace {

long binomial(int a, int b) {
  long r = 1;
  for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

}  // namespace

int sphere_euler_by_faces(int d) {
  long chi = 0;
  for (int i = 0; i <= d; ++i) chi += (i % 2 ? -1 : 1) * binomial(d + 2, i + 1);
  return static_cast<int>(chi);
}

std::vector<SurgeryRow> surgery_table(int n_max) {
  std::vector<SurgeryRow> rows;
  for (int n = 2; n <= n_max; ++n) {
    for (int k = 1; k <= n - 1; ++k) {
      rows.push_back({n, k, surgery_euler_delta(n, k),
                      sphere_euler_by_faces(k - 1) - sphere_euler_by_faces(n - k)});
    }
  }
  return rows;
}

}  // namespace mcf::exp
