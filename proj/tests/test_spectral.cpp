#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "mcf/spectral.hpp"

using namespace mcf;
using doctest::Approx;

namespace {

double factorial(int j) { return j <= 1 ? 1.0 : j * factorial(j - 1); }

double coeff_of(const EigenExpansion& e, int j) {
  double c = 0.0;
  for (const auto& t : e.terms) {
    if (t.mode.j == j) c += t.coeff;
  }
  return c;
}

}  // namespace

TEST_CASE("Hermite values") {
  for (double y : {-1.3, 0.0, 0.7, 2.5}) {
    CHECK(hermite_eval(0, y) == 1.0);
    CHECK(hermite_eval(1, y) == y);
    CHECK(hermite_eval(2, y) == Approx(y * y - 2.0));
  }
  CHECK(hermite_eval(3, 2.0) == Approx(-4.0));
  CHECK(hermite_eval(4, 1.0) == Approx(1.0 - 12.0 + 12.0));  // y^4 - 12 y^2 + 12
  for (double r : {0.3, 1.1}) CHECK(radial_basis_eval(2, 1, r) == Approx(hermite_eval(2, r)));
}

TEST_CASE("Hermite polynomials are orthogonal under the Gaussian weight") {
  const auto p = make_cylinder(2, 1);
  const auto q = weighted_quadrature(p, SymmetryClass::Line, 8);
  auto h = [](int j) { return [j](double y) { return hermite_eval(j, y); }; };
  const double n0 = q.inner(h(0), h(0));
  for (int i = 0; i <= 6; ++i) {
    for (int j = 0; j < i; ++j) CHECK(std::abs(q.inner(h(i), h(j))) < 1e-10 * n0 * std::pow(2.0, i));
    CHECK(q.inner(h(i), h(i)) / n0 == Approx(std::pow(2.0, i) * factorial(i)).epsilon(1e-10));
  }
}

TEST_CASE("radial basis is orthogonal against r^{k-1} e^{-r^2/4}") {
  const auto p = make_cylinder(4, 3);
  const auto q = weighted_quadrature(p, SymmetryClass::Radial, 6);
  auto b = [](int j) { return [j](double r) { return radial_basis_eval(j, 3, r); }; };
  const double n0 = q.inner(b(0), b(0));
  CHECK(std::abs(q.inner(b(0), b(2))) < 1e-10 * n0);
  CHECK(std::abs(q.inner(b(2), b(4))) < 1e-8 * n0);
}

TEST_CASE("sphere mode eigenvalues") {
  const auto p21 = make_cylinder(2, 1), p31 = make_cylinder(3, 1);
  CHECK(sphere_mode_eigenvalue(0, p21) == 0.0);
  CHECK(sphere_mode_eigenvalue(1, p21) == Approx(0.5));
  CHECK(sphere_mode_eigenvalue(1, make_cylinder(7, 3)) == Approx(0.5));
  CHECK(sphere_mode_eigenvalue(2, p31) == Approx(1.5));
  CHECK(mode_eigenvalue(0, 0, p21) == Approx(-1.0));
  CHECK(mode_eigenvalue(1, 1, p21) == Approx(0.0));
  CHECK(sphere_harmonic_dim(1, 0) == 1);
  CHECK(sphere_harmonic_dim(1, 3) == 2);
  CHECK(sphere_harmonic_dim(2, 2) == 5);
  CHECK(hermite_multiplicity(3, 2) == 6);
}

TEST_CASE("lowest levels of the spectrum") {
  for (auto [n, k] : {std::pair{2, 1}, {3, 1}, {3, 2}, {4, 2}, {7, 3}}) {
    const auto p = make_cylinder(n, k);
    auto lv = enumerate_spectrum(p, -0.9);
    REQUIRE(lv.size() == 1);
    CHECK(lv[0].eigenvalue == -1.0);
    CHECK(lv[0].multiplicity == 1);
    lv = enumerate_spectrum(p, -0.4);
    REQUIRE(lv.size() == 2);
    CHECK(lv[1].eigenvalue == Approx(-0.5));
    CHECK(lv[1].multiplicity == n + 1);  // theta_i and y_j
    lv = enumerate_spectrum(p, 0.0);
    REQUIRE(lv.size() == 3);
    CHECK(lv[2].eigenvalue == Approx(0.0));
    CHECK(lv[2].multiplicity == (n - k + 1) * k + k * (k + 1) / 2);
    CHECK(in_spectrum(p, -0.5, 1e-12));
    CHECK_FALSE(in_spectrum(p, -0.75, 1e-3));
  }
}

TEST_CASE("weighted projection onto eigenspaces") {
  const auto p = make_cylinder(2, 1);
  auto pr = weighted_project([](double y) { return y * y - 2.0; }, p, SymmetryClass::Line, 0.0,
                             Relation::Equal);
  CHECK(coeff_of(pr.component, 2) == Approx(1.0).epsilon(1e-10));
  CHECK_FALSE(pr.warning);
  pr = weighted_project([](double y) { return 3.0 + y; }, p, SymmetryClass::Line, -1.0, Relation::Equal);
  CHECK(pr.component.evaluate(0.7) == Approx(3.0).epsilon(1e-10));
  CHECK(pr.component.evaluate(-2.0) == Approx(3.0).epsilon(1e-10));
  pr = weighted_project([](double y) { return y; }, p, SymmetryClass::Line, 0.0, Relation::Equal);
  CHECK(pr.component.norm_sq() < 1e-20);
  pr = weighted_project([](double y) { return 1.0 + y + y * y; }, p, SymmetryClass::Line, -0.5,
                        Relation::AtMost);
  // 1 + y + y^2 = 3 h_0 + h_1 + h_2
  CHECK(pr.component.evaluate(1.0) == Approx(4.0).epsilon(1e-10));
  pr = weighted_project([](double y) { return std::exp(y * y / 16.0); }, p, SymmetryClass::Line,
                        0.0, Relation::AtMost, 2);
  CHECK(pr.warning);
}

TEST_CASE("heat semigroup on eigenmodes") {
  const auto p = make_cylinder(2, 1);
  const auto h2 = make_expansion(p, SymmetryClass::Line, {{2, 1.0}});
  CHECK(heat_semigroup_evolve(h2, 3.0).evaluate(1.3) == Approx(h2.evaluate(1.3)));
  const auto lin = make_expansion(p, SymmetryClass::Line, {{1, 1.0}});
  CHECK(heat_semigroup_evolve(lin, 2.0).evaluate(1.0) == Approx(std::exp(1.0)));
  const auto one = make_expansion(p, SymmetryClass::Line, {{0, 1.0}});
  CHECK(heat_semigroup_evolve(one, 1.0).evaluate(0.0) == Approx(std::numbers::e));
}

TEST_CASE("heat semigroup property e^{sL} e^{tL} = e^{(s+t)L}") {
  const auto p = make_cylinder(3, 1);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<int, double>> c;
    for (int j = 0; j <= 6; ++j) c.push_back({j, g(rng)});
    const auto v = make_expansion(p, SymmetryClass::Line, c);
    const double s = 0.3 + 0.1 * trial, t = 0.7;
    const auto a = heat_semigroup_evolve(heat_semigroup_evolve(v, s), t);
    const auto b = heat_semigroup_evolve(v, s + t);
    CHECK(a.norm_sq() == Approx(b.norm_sq()).epsilon(1e-12));
    CHECK(a.evaluate(0.9) == Approx(b.evaluate(0.9)).epsilon(1e-12));
  }
}

TEST_CASE("linear decay order") {
  const auto p = make_cylinder(2, 1);
  for (int j = 0; j <= 5; ++j) {
    const auto v = make_expansion(p, SymmetryClass::Line, {{j, 1.0}});
    for (double tau : {0.0, 1.0, 4.0}) CHECK(linear_decay_order(v, tau) == Approx(0.5 * j - 1.0));
  }
  const auto mix = make_expansion(p, SymmetryClass::Line, {{0, 0.2}, {2, 1.0}});
  double prev = linear_decay_order(mix, 0.0);
  CHECK(prev < 0.0);
  CHECK(prev > -1.0);
  for (double tau = 0.5; tau <= 6.0; tau += 0.5) {
    const double N = linear_decay_order(mix, tau);
    CHECK(N < prev);
    CHECK(N > -1.0);
    prev = N;
  }
  const auto zero = make_expansion(p, SymmetryClass::Line, {{1, 0.0}});
  CHECK_THROWS_AS(linear_decay_order(zero, 0.0), std::domain_error);
}

TEST_CASE("discrete Jacobi operator") {
  const auto p = make_cylinder(2, 1);
  CHECK_THROWS_AS(discretize_jacobi_operator(p, SymmetryClass::Line, 12.0, 15), std::domain_error);
  CHECK_THROWS_AS(discretize_jacobi_operator(p, SymmetryClass::Full, 12.0, 200), std::domain_error);

  const auto op = discretize_jacobi_operator(p, SymmetryClass::Line, 12.0, 2000);
  const auto low = op.lowest(3);
  CHECK(low[0] == Approx(-1.0).epsilon(1e-3));
  CHECK(low[1] == Approx(-0.5).epsilon(1e-3));
  CHECK(std::abs(low[2]) < 1e-3);
  const auto all = op.all_eigenvalues();
  for (int i = 0; i < 3; ++i) CHECK(all[i] == Approx(low[i]).epsilon(1e-9));
  for (size_t i = 1; i < all.size(); ++i) CHECK(all[i] >= all[i - 1]);

  // L h2 = 0 up to O(h^2) away from the truncation
  auto residual = [&](int points) {
    const auto o = discretize_jacobi_operator(p, SymmetryClass::Line, 12.0, points);
    std::vector<double> f(points);
    for (int i = 0; i < points; ++i) f[i] = hermite_eval(2, o.grid.coord(i));
    const auto Lf = o.apply(f);
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      if (std::abs(o.grid.coord(i)) < 4.0) worst = std::max(worst, std::abs(Lf[i]));
    }
    return worst;
  };
  const double r1 = residual(401), r2 = residual(801);
  CHECK(r1 < 1e-2);
  CHECK(r2 < r1 / 3.0);

  const auto ef = op.eigenfunction(low[1]);
  CHECK(op.inner(ef, ef) == Approx(1.0));
}

TEST_CASE("Radial class operator keeps -1 and 0") {
  const auto p = make_cylinder(4, 2);
  const auto low = discretize_jacobi_operator(p, SymmetryClass::Radial, 12.0, 2000).lowest(2);
  CHECK(low[0] == Approx(-1.0).epsilon(1e-3));
  CHECK(std::abs(low[1]) < 1e-3);
}

TEST_CASE("shifted sphere level") {
  const auto p = make_cylinder(3, 1);
  const auto low = discretize_jacobi_operator(p, SymmetryClass::Line, 12.0, 2000, 1).lowest(1);
  CHECK(low[0] == Approx(mode_eigenvalue(1, 0, p)).epsilon(1e-3));
}
