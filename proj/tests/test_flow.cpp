#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "mcf/experiments.hpp"
#include "mcf/flow.hpp"
#include "mcf/spectral.hpp"

using namespace mcf;
using doctest::Approx;

namespace {

RadialProfile constant_profile(const CylinderParams& p, double v, TimeKind kind, int points = 201,
                               double extent = 8.0) {
  return make_profile(p, Grid1D{AxisKind::Line, extent, points}, [v](double) { return v; }, 0.0, kind);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("shrinker fixed point") {
  for (auto [n, k] : {std::pair{2, 1}, {4, 2}}) {
    const auto p = make_cylinder(n, k);
    StepperConfig sc;
    sc.dt = 0.01;
    RadialProfile v = constant_profile(p, p.rho, TimeKind::Rescaled);
    for (int i = 0; i < 200; ++i) {
      const auto r = rmcf_step(v, sc);
      REQUIRE(r.status == StepStatus::Ok);
      CHECK(max_abs_diff(r.profile.v, v.v) <= 1e-12);
      v = r.profile;
    }
    for (double x : v.v) CHECK(x == Approx(p.rho).epsilon(1e-13));
  }
}

TEST_CASE("tube mean curvature of a round cylinder") {
  const auto p = make_cylinder(3, 1);
  const auto H = tube_mean_curvature(constant_profile(p, 1.7, TimeKind::Flow));
  for (double h : H) CHECK(h == Approx(2.0 / 1.7));
}

TEST_CASE("nonlinear step is consistent with the linearized step") {
  // (rmcf_step(rho + eps w) - rho)/eps - jacobi_step(w) = O(eps)
  const auto p = make_cylinder(2, 1);
  const Grid1D g{AxisKind::Line, 8.0, 321};
  auto w = [](double y) { return std::exp(-y * y / 2.0) * (1.0 + 0.5 * y); };
  StepperConfig sc;
  sc.dt = 0.01;
  JacobiGrid jg{p, g, {}, 0.0, 0};
  for (int i = 0; i < g.points; ++i) jg.v.push_back(w(g.coord(i)));
  const auto lin = jacobi_step(jg, sc.dt).v;
  std::vector<double> gaps;
  for (double eps : {1e-3, 1e-4}) {
    const auto pr = make_profile(p, g, [&](double y) { return p.rho + eps * w(y); }, 0.0, TimeKind::Rescaled);
    const auto r = rmcf_step(pr, sc);
    REQUIRE(r.status == StepStatus::Ok);
    std::vector<double> q(g.points);
    for (int i = 0; i < g.points; ++i) q[i] = (r.profile.v[i] - p.rho) / eps;
    gaps.push_back(max_abs_diff(q, lin));
  }
  CHECK(gaps[0] < 1e-3);
  CHECK(gaps[1] == Approx(gaps[0] / 10.0).epsilon(0.05));
}

TEST_CASE("eigenmode perturbation follows linear theory over unit time") {
  // relative deviation of (v - rho)/eps from the linear grid evolution is O(eps)
  const auto p = make_cylinder(2, 1);
  const Grid1D g{AxisKind::Line, 10.0, 401};
  auto w = [](double y) { return hermite_eval(2, y) * std::exp(-std::pow(y / 6.0, 8)); };
  StepperConfig sc;
  sc.dt = 1e-2;
  JacobiGrid jg{p, g, {}, 0.0, 0};
  for (int i = 0; i < g.points; ++i) jg.v.push_back(w(g.coord(i)));
  for (int i = 0; i < 100; ++i) jg = jacobi_step(jg, sc.dt);
  double scale = 0.0;
  for (double x : jg.v) scale = std::max(scale, std::abs(x));
  std::vector<double> dev;
  for (double eps : {1e-4, 1e-5}) {
    RadialProfile v = make_profile(p, g, [&](double y) { return p.rho + eps * w(y); }, 0.0, TimeKind::Rescaled);
    for (int i = 0; i < 100; ++i) v = rmcf_step(v, sc).profile;
    CHECK(v.time == Approx(1.0));
    std::vector<double> q(g.points);
    for (int i = 0; i < g.points; ++i) q[i] = (v.v[i] - p.rho) / eps;
    dev.push_back(max_abs_diff(q, jg.v) / scale);
  }
  CHECK(dev[0] < 1e-2);
  CHECK(dev[1] == Approx(dev[0] / 10.0).epsilon(0.1));
  // near the origin the neutral mode is left in place
  const int mid = g.points / 2;
  CHECK(jg.v[mid] == Approx(w(0.0)).epsilon(0.05));
}

TEST_CASE("shrinking cylinder radius law") {
  const auto p = make_cylinder(2, 1);
  StepperConfig sc;
  sc.dt = 1e-6;
  RadialProfile v = constant_profile(p, 1.0, TimeKind::Flow, 21, 1.0);
  while (v.time < 0.25 - 1e-12) v = mcf_step(v, sc).profile;
  const double exact = std::sqrt(1.0 - 2.0 * 0.25);
  for (double x : v.v) CHECK(std::abs(x - exact) / exact < 1e-6);
}

TEST_CASE("time-step control") {
  const auto p = make_cylinder(2, 1);
  StepperConfig sc;
  sc.dt = 10.0;
  const auto r = mcf_step(constant_profile(p, 0.1, TimeKind::Flow, 21, 1.0), sc);
  CHECK(r.status == StepStatus::Rejected);
  CHECK(r.suggested_dt > 0.0);
  CHECK(r.suggested_dt < 10.0);
  sc.dt = 1e-3;
  sc.v_stop = 0.5;
  CHECK(mcf_step(constant_profile(p, 0.4, TimeKind::Flow, 21, 1.0), sc).status == StepStatus::Pinch);
  StepperConfig rs;
  rs.dt = 1e-3;
  CHECK(rmcf_step(constant_profile(p, 2.5 * p.rho, TimeKind::Rescaled), rs).status ==
        StepStatus::RegimeExit);
}

TEST_CASE("comparison principle: ordered profiles stay ordered") {
  const auto p = make_cylinder(2, 1);
  const Grid1D g{AxisKind::Line, 2.0, 201};
  RadialProfile inner = make_profile(p, g, [](double y) { return 0.4 + 0.1 * y * y; }, 0.0, TimeKind::Flow);
  RadialProfile outer = make_profile(p, g, [](double y) { return 0.5 + 0.2 * y * y; }, 0.0, TimeKind::Flow);
  StepperConfig sc;
  sc.dt = 1e-5;
  for (int i = 0; i < 4000; ++i) {
    inner = mcf_step(inner, sc).profile;
    outer = mcf_step(outer, sc).profile;
    if (i % 500 == 0) {
      for (int j = 0; j < g.points; ++j) REQUIRE(inner.v[j] < outer.v[j]);
    }
  }
}

TEST_CASE("nondegenerate initial data") {
  const auto p = make_cylinder(2, 1);
  const auto v = nondegenerate_initial(p, 25.0, 2001);
  CHECK(v.grid.kind == AxisKind::Radial);
  CHECK(v.grid.extent == Approx(5.0));
  CHECK(v.v[0] - p.rho == Approx(-std::sqrt(2.0) / 50.0).epsilon(1e-9));
  CHECK(v.v[0] - p.rho == Approx(-0.0282843).epsilon(1e-6));
  // zero of r^2 - 2 at r = sqrt 2
  int i0 = 0;
  while (v.grid.coord(i0) < std::sqrt(2.0)) ++i0;
  CHECK(v.v[i0 - 1] <= p.rho);
  CHECK(v.v[i0] >= p.rho);
  CHECK(v.v.back() == Approx(p.rho * std::sqrt(1.5)));
  REQUIRE(v.far_field);
  CHECK(*v.far_field == Approx(p.rho * std::sqrt(1.5)));
  CHECK_THROWS_AS(nondegenerate_initial(p, 5.0, 100), std::domain_error);
}

TEST_CASE("normal-form ansatz residual decays like tau0^-2") {
  const auto p = make_cylinder(2, 1);
  auto residual = [&](double tau0) {
    const Grid1D g{AxisKind::Line, 2.0, 401};
    auto prof = make_profile(
        p, g,
        [&](double y) { return p.rho * std::sqrt(1.0 + (y * y - 2.0) / (2.0 * tau0)); }, tau0,
        TimeKind::Rescaled);
    const auto rhs = tube_rhs(prof, true, BoundaryMode::Neumann);
    double worst = 0.0;
    for (int i = 0; i < g.points; ++i) {
      const double y = g.coord(i);
      if (std::abs(y) > 1.5) continue;
      // v_tau of the ansatz
      const double vt = -p.rho * (y * y - 2.0) / (4.0 * tau0 * tau0) /
                        std::sqrt(1.0 + (y * y - 2.0) / (2.0 * tau0));
      worst = std::max(worst, std::abs(rhs[i] - vt));
    }
    return worst;
  };
  const double r1 = residual(50.0), r2 = residual(100.0), r3 = residual(200.0);
  const double order = std::log(r1 / r3) / std::log(4.0);
  CHECK(r2 < r1);
  CHECK(order == Approx(2.0).epsilon(0.1));
}

TEST_CASE("pinch detection on an exact trace") {
  FlowTrace t;
  t.kind = TimeKind::Flow;
  for (int i = 0; i <= 4990; ++i) {
    const double time = i * 1e-4;
    t.samples.push_back(TraceSample{time, std::sqrt(1.0 - 2.0 * time), 0.0});
  }
  const auto est = detect_pinch(t);
  REQUIRE(est.found);
  CHECK(est.time == Approx(0.5).epsilon(1e-6));
  CHECK(est.coefficient == Approx(std::sqrt(2.0)).epsilon(1e-4));
  FlowTrace flat;
  for (int i = 0; i < 50; ++i) flat.samples.push_back(TraceSample{i * 0.1, 1.0, 0.0});
  CHECK_FALSE(detect_pinch(flat).found);
}

TEST_CASE("cusp profile") {
  const auto p = make_cylinder(2, 1);
  CHECK(cusp_profile(0.05, p) == Approx(0.020427).epsilon(1e-5));
  CHECK(cusp_profile(-0.05, p) == Approx(0.020427).epsilon(1e-5));
  CHECK(cusp_profile(1e-12, p) < 1e-12);
  double prev = 0.0;
  for (double y = 1e-4; y < 0.5; y += 1e-3) {
    CHECK(cusp_profile(y, p) > prev);
    prev = cusp_profile(y, p);
  }
  CHECK_THROWS_AS(cusp_profile(1.0, p), std::domain_error);
}

TEST_CASE("round sphere radius law in the polar solver") {
  PolarProfile s{2, std::vector<double>(201, 1.0), 0.0};
  while (s.time < 0.1 - 1e-12) s = polar_mcf_step(s, 1e-5, 1e-3).profile;
  for (double r : s.R) CHECK(r == Approx(std::sqrt(1.0 - 4.0 * s.time)).epsilon(1e-4));
}

TEST_CASE("post-singular sheet") {
  const auto p = make_cylinder(2, 1);
  SUBCASE("hyperplane is stationary") {
    DualProfile flat{p, Grid1D{AxisKind::Radial, 1.0, 101}, std::vector<double>(101, 0.3), 0.0};
    for (int i = 0; i < 100; ++i) flat = post_singular_step(flat, 1e-4).profile;
    for (double w : flat.w) CHECK(w == Approx(0.3).epsilon(1e-13));
  }
  SUBCASE("inverted cusp stays monotone") {
    auto w = cusp_restart_profile(p, 0.2, 400);
    CHECK(w.w[0] == 0.0);
    CHECK(strictly_monotone(w));
    for (int i = 1; i < w.grid.points; ++i) {
      CHECK(cusp_profile(w.w[i], p) == Approx(w.grid.coord(i)).epsilon(1e-10));
    }
    for (int i = 0; i < 200; ++i) {
      const auto r = post_singular_step(w, 1e-6);
      CHECK(r.monotone);
      w = r.profile;
    }
    CHECK(w.w[0] > 0.0);
  }
  SUBCASE("k >= 2 needs a positive sheet") {
    const auto p42 = make_cylinder(4, 2);
    DualProfile w{p42, Grid1D{AxisKind::Radial, 1.0, 51}, std::vector<double>(51, 0.0), 0.0};
    CHECK_THROWS_AS(post_singular_step(w, 1e-4), std::domain_error);
  }
}

TEST_CASE("bowl translator") {
  for (int m : {2, 3, 6}) {
    const auto b = bowl_translator_solve(m, 20.0, 400);
    for (size_t i = 0; i < b.s.size(); ++i) CHECK(b.d2U[i] > 0.0);
    // near the tip U ~ s^2/(2m)
    CHECK(bowl_translator_solve(m, std::vector<double>{0.01}).U[0] ==
          Approx(1e-4 / (2.0 * m)).epsilon(1e-6));
  }
}

TEST_CASE("Jacobi grid against the semigroup") {
  const auto r = exp::jacobi_run(make_cylinder(2, 1), 20240601);
  CHECK(r.h2_drift < 1e-8);
  CHECK(r.constant_growth == Approx(std::numbers::e).epsilon(1e-4));
  CHECK(r.spatial_order >= 1.8);
}
