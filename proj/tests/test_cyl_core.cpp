#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mcf/cylinder.hpp"
#include "mcf/quadrature.hpp"
#include "mcf/tridiag.hpp"

using namespace mcf;
using doctest::Approx;

TEST_CASE("cylinder radius and parameter range") {
  CHECK(make_cylinder(2, 1).rho == Approx(1.4142135623).epsilon(1e-10));
  CHECK(make_cylinder(7, 3).rho == Approx(2.8284271247).epsilon(1e-10));
  CHECK_THROWS_AS(make_cylinder(2, 2), std::domain_error);
  CHECK_THROWS_AS(make_cylinder(3, 0), std::domain_error);
  CHECK_THROWS_AS(make_cylinder(1, 1), std::domain_error);
  for (int n = 2; n <= 7; ++n) {
    for (int k = 1; k < n; ++k) {
      const auto p = make_cylinder(n, k);
      CHECK(p.rho * p.rho == Approx(2.0 * (n - k)));
    }
  }
}

TEST_CASE("unit sphere areas") {
  CHECK(unit_sphere_area(0) == Approx(2.0));
  CHECK(unit_sphere_area(1) == Approx(2.0 * std::numbers::pi));
  CHECK(unit_sphere_area(2) == Approx(4.0 * std::numbers::pi));
  CHECK(unit_sphere_area(3) == Approx(2.0 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("cutoff values") {
  CHECK(chi(0.3) == 0.3);
  CHECK(chi(2.0) == 1.0);
  CHECK(chi(-2.0) == -1.0);
  CHECK(chi(0.5) == Approx(0.5));
  CHECK(chi(std::sqrt(2.0)) == Approx(1.0));
}

TEST_CASE("cutoff is odd, monotone and concave on the half line") {
  double prev = chi(0.0), prev_d1 = chi_d1(0.0);
  for (int i = 1; i <= 4000; ++i) {
    const double s = 2.0 * i / 4000.0;
    CHECK(chi(-s) == Approx(-chi(s)).epsilon(1e-15));
    CHECK(chi(s) >= prev - 1e-15);
    CHECK(chi_d1(s) <= prev_d1 + 1e-12);
    CHECK(chi_d2(s) <= 1e-12);
    prev = chi(s);
    prev_d1 = chi_d1(s);
  }
}

TEST_CASE("cutoff is C2 across both junctions") {
  const double eps = 1e-7;
  for (double s0 : {0.5, std::sqrt(2.0)}) {
    CHECK(chi(s0 - eps) == Approx(chi(s0 + eps)).epsilon(1e-6));
    CHECK(chi_d1(s0 - eps) == Approx(chi_d1(s0 + eps)).epsilon(1e-5));
    CHECK(std::abs(chi_d2(s0 - eps) - chi_d2(s0 + eps)) < 1e-5);
  }
  // derivatives agree with finite differences away from the junctions
  for (double s : {0.7, 0.9, 1.2}) {
    const double h = 1e-5;
    CHECK(chi_d1(s) == Approx((chi(s + h) - chi(s - h)) / (2 * h)).epsilon(1e-7));
    CHECK(chi_d2(s) == Approx((chi_d1(s + h) - chi_d1(s - h)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("cutoff distance to the cylinder") {
  const auto p = make_cylinder(2, 1);
  CHECK(odist_radius(p.rho, p) == 0.0);
  CHECK(odist_radius(p.rho + 0.3, p) == Approx(0.3));
  CHECK(odist_radius(p.rho + 5.0, p) == 1.0);
  const std::vector<double> x = {0.0, p.rho + 0.3}, y = {17.0};
  CHECK(odist(x, y, p) == Approx(0.3));
}

TEST_CASE("graph geometry of the flat and the constant graph") {
  const auto p = make_cylinder(2, 1);
  const std::vector<double> th = {std::cos(0.4), std::sin(0.4)}, y = {0.7};
  GraphSample flat{0.0, {0.0, 0.0}, {0.0}};
  const auto g0 = graph_geometry(p, th, y, flat);
  CHECK(g0.area_element == Approx(1.0));
  REQUIRE(g0.normal.size() == 3);
  CHECK(g0.normal[0] == Approx(th[0]));
  CHECK(g0.normal[1] == Approx(th[1]));
  CHECK(g0.normal[2] == Approx(0.0));
  CHECK(g0.point[0] == Approx(p.rho * th[0]));
  CHECK(g0.point[2] == Approx(0.7));

  for (double c : {-0.3, 0.2, 0.9}) {
    GraphSample s{c, {0.0, 0.0}, {0.0}};
    CHECK(graph_geometry(p, th, y, s).area_element == Approx(1.0 + c / p.rho));
  }
  GraphSample bad{-p.rho, {0.0, 0.0}, {0.0}};
  CHECK_THROWS_AS(graph_geometry(p, th, y, bad), std::domain_error);
}

TEST_CASE("graph normal is a unit vector orthogonal to the tangent plane") {
  const auto p = make_cylinder(2, 1);
  const std::vector<double> th = {1.0, 0.0}, y = {0.2};
  GraphSample s{0.1, {0.0, 0.05}, {0.3}};
  const auto g = graph_geometry(p, th, y, s);
  double nn = 0.0;
  for (double c : g.normal) nn += c * c;
  CHECK(nn == Approx(1.0));
  // tangent along the spine: (u_y theta, 1)
  CHECK(g.normal[0] * 0.3 + g.normal[2] == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("transformation law: translation, dilation, small x-shift") {
  const auto p = make_cylinder(2, 1);
  const Grid1D grid{AxisKind::Line, 10.0, 401};
  std::vector<double> u(grid.points);
  for (int i = 0; i < grid.points; ++i) u[i] = 0.01 * std::sin(grid.coord(i));
  const GraphField field = as_field(make_patch(p, grid, u));
  const std::vector<double> th = {std::cos(1.1), std::sin(1.1)}, zero2 = {0.0, 0.0};

  SUBCASE("pure spine translation") {
    const std::vector<double> b = {0.3};
    const auto t = transform_graph(field, 1.0, zero2, b);
    for (double yp : {-2.0, 0.0, 1.5}) {
      const std::vector<double> y1 = {yp}, y2 = {yp + 0.3};
      CHECK(t.field.u(th, y1) == Approx(field.u(th, y2)).epsilon(1e-10));
    }
  }
  SUBCASE("dilation of the cylinder") {
    const GraphField flat = as_field(make_patch(p, grid, std::vector<double>(grid.points, 0.0)));
    const std::vector<double> y0 = {0.0};
    const auto t = transform_graph(flat, 1.01, zero2, y0);
    for (double yp : {-1.0, 0.0, 2.0}) {
      const std::vector<double> y1 = {yp};
      CHECK(t.field.u(th, y1) == Approx(p.rho * 0.01).epsilon(1e-10));
    }
  }
  SUBCASE("x-shift of the round cylinder against the circle oracle") {
    const GraphField flat = as_field(make_patch(p, grid, std::vector<double>(grid.points, 0.0)));
    const std::vector<double> y0 = {0.0}, y1 = {0.4};
    for (double a : {0.002, 0.004, 0.008}) {
      const std::vector<double> xhat = {a * 0.6, a * 0.8};
      const auto t = transform_graph(flat, 1.0, xhat, y0);
      // ray r theta meets |x + xhat| = rho
      const double xt = xhat[0] * th[0] + xhat[1] * th[1];
      const double exact = -xt + std::sqrt(xt * xt - a * a + p.rho * p.rho) - p.rho;
      CHECK(t.field.u(th, y1) == Approx(exact).epsilon(1e-10));
      const double model = transform_model(flat, 1.0, xhat, y0, th, y1);
      CHECK(model == Approx(-xt).epsilon(1e-12));
      CHECK(std::abs(exact - model) <= t.bound);
      CHECK(std::abs(exact - model) <= kTransformConstant * a * a);
    }
  }
  SUBCASE("out of regime") {
    const std::vector<double> y0 = {0.0};
    CHECK_THROWS_AS(transform_graph(field, 1.5, zero2, y0), std::out_of_range);
  }
}

TEST_CASE("Gauss-Legendre integrates polynomials to degree 2m-1") {
  for (int m : {2, 5, 16}) {
    const auto q = gauss_legendre(m);
    for (int d = 0; d < 2 * m; ++d) {
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      CHECK(q.integrate([d](double x) { return std::pow(x, d); }) ==
            Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
  const auto c = composite_gauss_legendre(0.0, 3.0, 6);
  CHECK(c.integrate([](double x) { return std::exp(-x); }) == Approx(1.0 - std::exp(-3.0)).epsilon(1e-14));
}

TEST_CASE("tridiagonal eigenvalues, Sturm counts and solves") {
  // second-difference matrix: eigenvalues 2 - 2 cos(j pi/(n+1))
  const int n = 40;
  SymTridiagonal m{std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0)};
  const auto ev = eigenvalues_ql(m);
  const auto low = lowest_eigenvalues(m, 3);
  for (int j = 1; j <= n; ++j) {
    CHECK(ev[j - 1] == Approx(2.0 - 2.0 * std::cos(j * std::numbers::pi / (n + 1))).epsilon(1e-12));
  }
  for (int j = 0; j < 3; ++j) CHECK(low[j] == Approx(ev[j]).epsilon(1e-12));
  CHECK(sturm_count(m, 0.5 * (ev[9] + ev[10])) == 10);

  const auto vec = eigenvector(m, ev[0]);
  double norm = 0.0;
  for (double x : vec) norm += x * x;
  CHECK(norm == Approx(1.0));

  std::vector<double> lower(n, -1.0), diag(n, 2.0), upper(n, -1.0), x(n), rhs(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(0.3 * i) + 0.1 * i;
  for (int i = 0; i < n; ++i) {
    rhs[i] = 2.0 * x[i] - (i ? x[i - 1] : 0.0) - (i + 1 < n ? x[i + 1] : 0.0);
  }
  solve_tridiagonal(lower, diag, upper, rhs);
  for (int i = 0; i < n; ++i) CHECK(rhs[i] == Approx(x[i]).epsilon(1e-12));
}
