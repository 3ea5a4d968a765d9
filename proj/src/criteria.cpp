#include "mcf/criteria.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>

namespace mcf::criteria {

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

CheckRecord combine(const std::string& name, const std::vector<CheckRecord>& parts) {
  CheckRecord out{name, true, ""};
  for (const auto& p : parts) {
    out.pass = out.pass && p.pass;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += p.detail;
  }
  return out;
}

}  // namespace

CheckRecord spectrum(const exp::SpectrumRun& run) {
  const double err = run.max_error.back();
  const bool pass = err <= 1e-3 && run.order >= 1.8 && run.seconds < 10.0;
  return {"spectrum", pass,
          fmt("(%d,%d) max|err|=%.2e at %d pts, order %.2f, %.2fs", run.params.n, run.params.k,
              err, run.points.back(), run.order, run.seconds)};
}

CheckRecord linear_decay(const exp::LinearDecayRun& run) {
  const bool pass = run.worst_increase <= 1e-9 && run.floor >= -1.0 - 1e-9 &&
                    run.mean_zero_floor >= -0.5 - 1e-9 && run.pure_mode_dev <= 1e-9 &&
                    run.seconds < 5.0;
  return {"linear-decay", pass,
          fmt("%d mixtures: max increase %.1e, floor %.12f, mean-zero floor %.12f, pure-mode "
              "dev %.1e, %.2fs",
              run.mixtures, run.worst_increase, run.floor, run.mean_zero_floor,
              run.pure_mode_dev, run.seconds)};
}

CheckRecord jacobi_grid(const exp::JacobiRun& run) {
  const double growth_err = std::abs(run.constant_growth - std::numbers::e);
  const bool pass = run.h2_drift <= 1e-8 && growth_err <= 1e-4 && run.spatial_order >= 1.8;
  return {"jacobi-grid", pass,
          fmt("h2 drift %.1e, growth error %.1e, spatial order %.2f", run.h2_drift, growth_err,
              run.spatial_order)};
}

CheckRecord exact_solutions(const exp::ExactRun& run) {
  const bool pass = run.cylinder_rel_error <= 1e-4 && run.sphere_rel_error <= 1e-4 &&
                    run.arrival_error <= 1e-4 * 0.09;
  return {"exact-solutions", pass,
          fmt("cylinder rel %.1e, sphere rel %.1e, arrival abs %.1e, T_cyl %.6f, T_sph %.6f",
              run.cylinder_rel_error, run.sphere_rel_error, run.arrival_error, run.cylinder_T,
              run.sphere_T)};
}

CheckRecord dumbbell(const exp::ExactRun& run, const CylinderParams& params) {
  const double c = params.sphere_dim();
  const double inner = 0.09 / (2.0 * c), outer = 1.0 / (2.0 * c);
  const bool pass = run.dumbbell_neck_T >= inner && run.dumbbell_neck_T <= outer &&
                    run.dumbbell_bell_min > 0.0;
  return {"dumbbell", pass,
          fmt("neck T %.6f in [%.4f, %.4f], bell radius at pinch %.4f", run.dumbbell_neck_T,
              inner, outer, run.dumbbell_bell_min)};
}

CheckRecord fixed_point(const exp::FixedPointRun& run) {
  return {"fixed-point", run.max_step_change <= 1e-12,
          fmt("%d steps: max per-step change %.1e, total drift %.1e", run.steps,
              run.max_step_change, run.total_drift)};
}

CheckRecord normal_form(const exp::NormalFormFit& fit) {
  return {"normal-form", fit.sup_decreasing && fit.slope <= -1.5,
          fmt("sup|tau u - model| decreasing: %s; residual log-log slope %.3f over [%g, %g]",
              fit.sup_decreasing ? "yes" : "no", fit.slope, fit.tau.front(), fit.tau.back())};
}

CheckRecord decay_order_limit(const exp::NondegenerateRun& run) {
  double worst = 0.0;
  int count = 0;
  const auto& s = run.series;
  for (size_t i = 0; i + 1 < s.tau.size(); ++i) {
    if (s.tau[i] < 50.0 - 1e-9) continue;
    worst = std::max(worst, std::abs(decay_order(s, s.tau[i])));
    ++count;
  }
  const bool pass = count > 0 && worst < 0.1 && run.status == StepStatus::Ok;
  return {"decay-order", pass, fmt("max |N| = %.4f over %d samples with tau >= 50", worst, count)};
}

CheckRecord cusp(const exp::CuspRun& run) {
  const bool toward = std::abs(run.mean_narrow - 1.0) < std::abs(run.mean_wide - 1.0);
  const bool pass = run.min_ratio >= 0.7 && run.max_ratio <= 1.3 && toward;
  return {"cusp-profile", pass,
          fmt("T %.8f, ratio in [%.4f, %.4f] on [0.02, 0.1], window mean %.4f -> %.4f", run.T,
              run.min_ratio, run.max_ratio, run.mean_wide, run.mean_narrow)};
}

CheckRecord nonconcentration(const std::vector<NonconcentrationReport>& reports) {
  bool pass = !reports.empty();
  double Cmax = 0.0, Kmax = -INFINITY;
  for (const auto& r : reports) {
    pass = pass && r.holds && std::isfinite(r.C) && std::isfinite(r.K);
    Cmax = std::max(Cmax, r.C);
    Kmax = std::max(Kmax, r.K);
  }
  return {"nonconcentration", pass,
          fmt("%zu runs, bound holds at every sample; max C %.4g, max K %.4g", reports.size(),
              Cmax, Kmax)};
}

CheckRecord sweep(const exp::SweepRun& run) {
  int steps = 0, locks = 0;
  for (const auto& r : run.reports) {
    steps += static_cast<int>(r.verdicts.size());
    for (const auto& v : r.verdicts) locks += v.kind == VerdictKind::SpectrumLocked;
  }
  const bool pass = run.runs == 20 && run.violations == 0 && run.off_spectrum_locks == 0 && steps > 0;
  return {"monotonicity", pass,
          fmt("%d runs, %d unit steps: %d drops, %d locked, %d violations, %d off-spectrum "
              "plateaus, min N %.4f",
              run.runs, steps, steps - locks - run.violations, locks, run.violations,
              run.off_spectrum_locks, run.worst_floor)};
}

CheckRecord restricted(const exp::RestrictedFit& fit) {
  std::string gaps;
  for (size_t i = 0; i < fit.radii.size(); ++i) {
    gaps += fmt("%sR=%g:%.2e", i ? " " : "", fit.radii[i], fit.mean_gap[i]);
  }
  return {"restricted-decay", std::abs(fit.exponent + 2.0) <= 0.5,
          fmt("fit exponent %.2f (target -2 +/- 0.5), R0 %.3g, gaps %s", fit.exponent, fit.R0,
              gaps.c_str())};
}

CheckRecord restart(const exp::RestartRun& run) {
  return {"post-singular", run.monotone_failures == 0,
          fmt("%d steps to t = %.2e, monotonicity losses %d, tip height %.4f", run.steps,
              run.sample_t.back(), run.monotone_failures, run.samples.back().w[0])};
}

CheckRecord mean_convex(const exp::NondegenerateRun& run) {
  const double transient = run.opts.tau0 + 5.0;
  double hmin = INFINITY, amin = INFINITY;
  bool finite = true;
  for (const auto& s : run.trace.samples) {
    if (s.time < transient) continue;
    hmin = std::min(hmin, s.h_min);
    finite = finite && std::isfinite(s.alpha);
    amin = std::min(amin, s.alpha);
  }
  return {"mean-convexity", finite && hmin > 0.0 && amin > 0.0,
          fmt("tau >= %g: min H %.4f, min alpha %.4f on |y| <= %g", transient, hmin, amin,
              run.opts.window)};
}

CheckRecord noncollapse(const exp::NoncollapseRun& run, const CylinderParams& params) {
  const double n = params.n, c = params.sphere_dim();
  const double drift = std::abs(run.ellipsoid_alpha_fine / run.ellipsoid_alpha_coarse - 1.0);
  const bool pass = std::abs(run.sphere_alpha - n) <= 1e-3 * n &&
                    std::abs(run.cylinder_alpha - c) <= 1e-3 * c && drift <= 0.05 &&
                    run.ellipsoid_alpha_fine > 0.0;
  return {"noncollapse", pass,
          fmt("sphere %.6f (n=%g), cylinder %.6f (n-k=%g), ellipsoid %.5f -> %.5f", run.sphere_alpha,
              n, run.cylinder_alpha, c, run.ellipsoid_alpha_coarse, run.ellipsoid_alpha_fine)};
}

CheckRecord bowl(const std::vector<exp::BowlRun>& runs) {
  std::vector<CheckRecord> parts;
  for (const auto& r : runs) {
    parts.push_back({"", r.convex && std::abs(r.exponent + 1.0) <= 0.3,
                     fmt("m=%d convex %s, tail exponent %.3f", r.m, r.convex ? "yes" : "no",
                         r.exponent)});
  }
  return combine("bowl", parts);
}

CheckRecord surgery(const std::vector<exp::SurgeryRow>& rows) {
  bool pass = !rows.empty();
  int d21 = 0;
  for (const auto& r : rows) {
    pass = pass && r.delta == r.oracle;
    if (r.n == 2 && r.k == 1) d21 = r.delta;
  }
  pass = pass && d21 == 2;
  return {"surgery", pass, fmt("%zu (n,k) pairs match the face-count oracle; (2,1) gives %+d",
                               rows.size(), d21)};
}

exp::NondegenerateOptions reference_nondegenerate() {
  exp::NondegenerateOptions o;
  o.params = make_cylinder(2, 1);
  o.tau0 = 25.0;
  o.horizon = 200.0;
  return o;
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CheckRecord determinism(const std::string& scratch, std::uint64_t seed) {
  namespace fs = std::filesystem;
  int compared = 0, differing = 0;
  for (const char* name : {"spectrum-validate", "jacobi-decay", "monotonicity-sweep"}) {
    std::vector<RunManifest> ms;
    for (const char* rep : {"a", "b"}) {
      RunConfig cfg;
      cfg.scenario = name;
      cfg.n = 2;
      cfg.k = 1;
      cfg.seed = seed;
      cfg.out_dir = fs::path(scratch) / rep / name;
      fs::remove_all(cfg.out_dir);
      ms.push_back(run_scenario(cfg));
    }
    for (const auto& f : ms[0].files) {
      if (f.path.size() < 4 || f.path.substr(f.path.size() - 4) != ".csv") continue;
      ++compared;
      differing += slurp(ms[0].config.out_dir / f.path) != slurp(ms[1].config.out_dir / f.path);
    }
  }
  return {"determinism", compared > 0 && differing == 0,
          fmt("%d CSV files compared across repeated runs, %d differ", compared, differing)};
}

}  // namespace

CheckRecord run_criterion(int id, const std::string& scratch, std::uint64_t seed) {
  CheckRecord r;
  switch (id) {
    case 1: {
      std::vector<CheckRecord> parts;
      for (auto [n, k] : {std::pair{2, 1}, {3, 1}, {3, 2}, {4, 2}, {7, 3}}) {
        parts.push_back(spectrum(exp::spectrum_run(make_cylinder(n, k), {250, 500, 1000, 2000})));
      }
      r = combine("spectrum", parts);
      break;
    }
    case 2: r = linear_decay(exp::linear_decay_run(seed, 1000)); break;
    case 3: {
      std::vector<CheckRecord> parts;
      for (auto [n, k] : {std::pair{2, 1}, {3, 1}}) {
        parts.push_back(exact_solutions(exp::exact_run(make_cylinder(n, k), 1000)));
      }
      r = combine("exact-solutions", parts);
      break;
    }
    case 4: r = fixed_point(exp::fixed_point_run(make_cylinder(2, 1), 10000)); break;
    case 5: r = normal_form(exp::normal_form_fit(exp::nondegenerate_run(reference_nondegenerate()))); break;
    case 6: r = decay_order_limit(exp::nondegenerate_run(reference_nondegenerate())); break;
    case 7: r = cusp(exp::cusp_run(make_cylinder(2, 1))); break;
    case 8: {
      auto reports = exp::sweep_run(make_cylinder(2, 1), seed).nonconcentration;
      reports.push_back(nonconcentration_check(exp::nondegenerate_run(reference_nondegenerate()).snapshots));
      r = nonconcentration(reports);
      break;
    }
    case 9: r = sweep(exp::sweep_run(make_cylinder(2, 1), seed)); break;
    case 10: r = restricted(exp::restricted_fit(exp::nondegenerate_run(reference_nondegenerate()), {1.0, 2.0})); break;
    case 11: r = restart(exp::restart_run(make_cylinder(2, 1))); break;
    case 12: r = mean_convex(exp::nondegenerate_run(reference_nondegenerate())); break;
    case 13: r = bowl({exp::bowl_run(2), exp::bowl_run(3), exp::bowl_run(6)}); break;
    case 14: r = surgery(exp::surgery_table(7)); break;
    case 15: r = determinism(scratch, seed); break;
    default: throw std::out_of_range("criterion ids run from 1 to 15");
  }
  return r;
}

}  // namespace mcf::criteria
