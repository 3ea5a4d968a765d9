#include "mcf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mcf {

double hermite_eval(int j, double y) {
  if (j < 0) throw std::invalid_argument("negative Hermite degree");
  if (j == 0) return 1.0;
  double h0 = 1.0, h1 = y;
  for (int m = 1; m < j; ++m) {
    const double h2 = y * h1 - 2.0 * m * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double radial_basis_eval(int j, int k, double r) {
  if (j < 0 || j % 2 != 0) throw std::invalid_argument("radial degree must be even");
  const int m = j / 2;
  const double r2 = r * r;
  if (m == 0) return 1.0;
  // Rescaled Laguerre L_m^{(k/2-1)}(r^2/4), normalized to leading term r^{2m}.
  double p0 = 1.0, p1 = r2 - 2.0 * k;
  for (int q = 1; q < m; ++q) {
    const double p2 = (r2 - 8.0 * q - 2.0 * k) * p1 - 8.0 * q * (2.0 * q + k - 2.0) * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double sphere_mode_eigenvalue(int i, const CylinderParams& params) {
  const int d = params.sphere_dim();
  return i * (i - 1.0 + d) / (2.0 * d);
}

double mode_eigenvalue(int i, int j, const CylinderParams& params) {
  return sphere_mode_eigenvalue(i, params) + 0.5 * j - 1.0;
}

namespace {

long binom(long a, long b) {
  if (b < 0 || a < b || a < 0) return 0;
  b = std::min(b, a - b);
  long r = 1;
  for (long t = 1; t <= b; ++t) r = r * (a - b + t) / t;
  return r;
}

double sphere_factor(const CylinderParams& p) {
  const int d = p.sphere_dim();
  return unit_sphere_area(d) * std::pow(p.rho, d) * std::exp(-p.rho * p.rho / 4.0);
}

double class_density(const CylinderParams& p, SymmetryClass cls, double c) {
  if (cls == SymmetryClass::Line) {
    return std::pow(4.0 * std::numbers::pi, 0.5 * (p.k - 1)) * std::exp(-c * c / 4.0);
  }
  return unit_sphere_area(p.k - 1) * std::pow(c, p.k - 1) * std::exp(-c * c / 4.0);
}

std::vector<int> class_degrees(SymmetryClass cls, int max_degree) {
  std::vector<int> out;
  for (int j = 0; j <= max_degree; ++j) {
    if (cls == SymmetryClass::Radial && j % 2 != 0) continue;
    out.push_back(j);
  }
  return out;
}

}  // namespace

long sphere_harmonic_dim(int d, int i) {
  return binom(d + i, d) - binom(d + i - 2, d);
}

long hermite_multiplicity(int k, int j) { return binom(j + k - 1, k - 1); }

std::vector<SpectrumLevel> enumerate_spectrum(const CylinderParams& params,
                                              double cutoff, SymmetryClass cls) {
  struct Entry {
    SpectralMode mode;
    long mult;
  };
  std::vector<Entry> entries;
  const int max_i = cls == SymmetryClass::Full ? 1000 : 0;
  for (int i = 0; i <= max_i; ++i) {
    if (mode_eigenvalue(i, 0, params) > cutoff + 1e-12) break;
    for (int j = 0;; ++j) {
      const double ev = mode_eigenvalue(i, j, params);
      if (ev > cutoff + 1e-12) break;
      long mult = 1;
      if (cls == SymmetryClass::Full) {
        mult = sphere_harmonic_dim(params.sphere_dim(), i) * hermite_multiplicity(params.k, j);
      } else if (cls == SymmetryClass::Radial && j % 2 != 0) {
        continue;
      }
      entries.push_back({SpectralMode{i, j, ev}, mult});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.mode.eigenvalue != b.mode.eigenvalue) return a.mode.eigenvalue < b.mode.eigenvalue;
    if (a.mode.i != b.mode.i) return a.mode.i < b.mode.i;
    return a.mode.j < b.mode.j;
  });
  std::vector<SpectrumLevel> levels;
  for (const auto& e : entries) {
    if (levels.empty() || std::abs(levels.back().eigenvalue - e.mode.eigenvalue) > 1e-12) {
      levels.push_back(SpectrumLevel{e.mode.eigenvalue, 0, {}});
    }
    levels.back().multiplicity += e.mult;
    levels.back().modes.push_back(e.mode);
  }
  return levels;
}

bool in_spectrum(const CylinderParams& params, double gamma, double tol) {
  if (gamma < -1.0 - tol) return false;
  for (const auto& l : enumerate_spectrum(params, gamma + tol)) {
    if (std::abs(l.eigenvalue - gamma) <= tol) return true;
  }
  return false;
}

double class_basis_eval(SymmetryClass cls, int k, int j, double coord) {
  return cls == SymmetryClass::Radial ? radial_basis_eval(j, k, coord)
                                      : hermite_eval(j, coord);
}

double WeightedQuadrature::inner(const std::function<double(double)>& f,
                                 const std::function<double(double)>& g) const {
  double s = 0.0;
  for (size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]) * g(nodes[i]);
  return s;
}

WeightedQuadrature weighted_quadrature(const CylinderParams& params,
                                       SymmetryClass cls, int max_degree) {
  if (cls == SymmetryClass::Full) {
    throw std::invalid_argument("weighted quadrature needs a theta-invariant class");
  }
  int top = max_degree;
  if (cls == SymmetryClass::Radial && top % 2 != 0) --top;
  auto b2 = [&](double c) {
    const double b = class_basis_eval(cls, params.k, top, c);
    return b * b * class_density(params, cls, c);
  };
  const double total = composite_gauss_legendre(0.0, 80.0, 160).integrate(b2);
  double L = 6.0;
  for (; L < 60.0; L += 0.5) {
    const double tail = composite_gauss_legendre(L, L + 40.0, 80).integrate(b2);
    if (tail < 1e-12 * total) break;
  }
  WeightedQuadrature q;
  q.params = params;
  q.cls = cls;
  q.extent = L;
  const double lo = cls == SymmetryClass::Line ? -L : 0.0;
  const int panels = static_cast<int>(std::ceil(2.0 * (L - lo)));
  const QuadratureRule rule = composite_gauss_legendre(lo, L, panels);
  const double sf = sphere_factor(params);
  q.nodes = rule.nodes;
  q.weights.resize(rule.nodes.size());
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    q.weights[i] = rule.weights[i] * sf * class_density(params, cls, rule.nodes[i]);
  }
  return q;
}

double EigenExpansion::norm_sq() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.coeff * t.coeff * t.norm_sq;
  return s;
}

double EigenExpansion::evaluate(double coord) const {
  if (cls == SymmetryClass::Full) {
    throw std::invalid_argument("pointwise evaluation needs a theta-invariant class");
  }
  double s = 0.0;
  for (const auto& t : terms) s += t.coeff * class_basis_eval(cls, params.k, t.mode.j, coord);
  return s;
}

EigenExpansion make_expansion(const CylinderParams& params, SymmetryClass cls,
                              const std::vector<std::pair<int, double>>& coeffs) {
  int top = 0;
  for (const auto& [j, c] : coeffs) top = std::max(top, j);
  const WeightedQuadrature q = weighted_quadrature(params, cls, top);
  EigenExpansion e;
  e.params = params;
  e.cls = cls;
  e.truncation_degree = top;
  for (const auto& [j, c] : coeffs) {
    if (cls == SymmetryClass::Radial && j % 2 != 0) {
      throw std::invalid_argument("radial class has even degrees only");
    }
    auto b = [&, j = j](double x) { return class_basis_eval(cls, params.k, j, x); };
    e.terms.push_back({SpectralMode{0, j, mode_eigenvalue(0, j, params)}, c, q.inner(b, b)});
  }
  return e;
}

namespace {

bool relation_holds(double ev, double gamma, Relation rel) {
  constexpr double tol = 1e-12;
  switch (rel) {
    case Relation::Equal: return std::abs(ev - gamma) <= tol;
    case Relation::AtMost: return ev <= gamma + tol;
    case Relation::AtLeast: return ev >= gamma - tol;
  }
  return false;
}

}  // namespace

Projection weighted_project(const std::function<double(double)>& v,
                            const CylinderParams& params, SymmetryClass cls,
                            double gamma, Relation rel, int truncation_degree,
                            double residual_threshold) {
  const WeightedQuadrature q = weighted_quadrature(params, cls, truncation_degree);
  Projection out;
  out.full.params = out.component.params = params;
  out.full.cls = out.component.cls = cls;
  out.full.truncation_degree = out.component.truncation_degree = truncation_degree;

  const size_t nq = q.nodes.size();
  std::vector<double> vv(nq), rem(nq);
  for (size_t i = 0; i < nq; ++i) rem[i] = vv[i] = v(q.nodes[i]);
  double vnorm = 0.0;
  for (size_t i = 0; i < nq; ++i) vnorm += q.weights[i] * vv[i] * vv[i];

  for (int j : class_degrees(cls, truncation_degree)) {
    double num = 0.0, den = 0.0;
    std::vector<double> b(nq);
    for (size_t i = 0; i < nq; ++i) {
      b[i] = class_basis_eval(cls, params.k, j, q.nodes[i]);
      num += q.weights[i] * vv[i] * b[i];
      den += q.weights[i] * b[i] * b[i];
    }
    const double c = num / den;
    for (size_t i = 0; i < nq; ++i) rem[i] -= c * b[i];
    const ExpansionTerm term{SpectralMode{0, j, mode_eigenvalue(0, j, params)}, c, den};
    out.full.terms.push_back(term);
    if (relation_holds(term.mode.eigenvalue, gamma, rel)) out.component.terms.push_back(term);
  }
  double rnorm = 0.0;
  for (size_t i = 0; i < nq; ++i) rnorm += q.weights[i] * rem[i] * rem[i];
  out.residual = vnorm > 0.0 ? std::sqrt(rnorm / vnorm) : 0.0;
  out.warning = out.residual > residual_threshold;
  return out;
}

Projection weighted_project(const GraphPatch& v, double gamma, Relation rel,
                            int truncation_degree, double residual_threshold) {
  const GraphField f = as_field(v);
  const SymmetryClass cls =
      v.grid.kind == AxisKind::Line ? SymmetryClass::Line : SymmetryClass::Radial;
  const int k = v.params.k;
  auto fn = [&](double c) {
    std::vector<double> y(k, 0.0), th(v.params.x_dim(), 0.0);
    y[0] = c;
    th[0] = 1.0;
    return f.u(th, y);
  };
  return weighted_project(fn, v.params, cls, gamma, rel, truncation_degree,
                          residual_threshold);
}

EigenExpansion heat_semigroup_evolve(const EigenExpansion& v0, double tau) {
  EigenExpansion out = v0;
  for (auto& t : out.terms) t.coeff *= std::exp(-t.mode.eigenvalue * tau);
  return out;
}

namespace {

// log ||e^{tau L} v0||^2, stable for widely separated eigenvalues.
double log_norm_sq(const EigenExpansion& v0, double tau) {
  double top = -INFINITY;
  for (const auto& t : v0.terms) {
    if (t.coeff == 0.0) continue;
    top = std::max(top, std::log(t.coeff * t.coeff * t.norm_sq) - 2.0 * t.mode.eigenvalue * tau);
  }
  if (top == -INFINITY) return top;
  double s = 0.0;
  for (const auto& t : v0.terms) {
    if (t.coeff == 0.0) continue;
    s += std::exp(std::log(t.coeff * t.coeff * t.norm_sq) - 2.0 * t.mode.eigenvalue * tau - top);
  }
  return top + std::log(s);
}

}  // namespace

double linear_decay_order(const EigenExpansion& v0, double tau) {
  const double a = log_norm_sq(v0, tau);
  const double b = log_norm_sq(v0, tau + 1.0);
  if (a == -INFINITY || b == -INFINITY) {
    throw std::domain_error("decay order undefined for the zero field");
  }
  return 0.5 * (a - b);
}

JacobiOperator discretize_jacobi_operator(const CylinderParams& params,
                                          SymmetryClass cls, double extent,
                                          int points, int sphere_level) {
  if (points < 16) throw std::domain_error("grid too coarse (fewer than 16 points)");
  if (cls == SymmetryClass::Full) {
    throw std::domain_error("discretization needs a theta-invariant class");
  }
  JacobiOperator op;
  op.params = params;
  op.cls = cls;
  op.sphere_level = sphere_level;
  op.grid = Grid1D{cls == SymmetryClass::Line ? AxisKind::Line : AxisKind::Radial,
                   extent, points};
  const double h = op.grid.h();
  const int k = params.k;
  auto w = [&](double c) {
    if (cls == SymmetryClass::Line) return std::exp(-c * c / 4.0);
    return std::pow(c, k - 1) * std::exp(-c * c / 4.0);
  };
  std::vector<double> vol(points), face(points + 1);
  for (int i = 0; i < points; ++i) vol[i] = h * w(op.grid.coord(i));
  if (cls == SymmetryClass::Radial) vol[0] = std::pow(0.5 * h, k) / k;
  // face[i] sits between nodes i-1 and i
  for (int i = 0; i <= points; ++i) face[i] = w(op.grid.lo() + (i - 0.5) * h);
  if (cls == SymmetryClass::Radial) face[0] = 0.0;

  const double shift = 1.0 - sphere_mode_eigenvalue(sphere_level, params);
  op.sqrt_vol.resize(points);
  for (int i = 0; i < points; ++i) op.sqrt_vol[i] = std::sqrt(vol[i]);
  op.sym.diag.resize(points);
  op.sym.off.resize(points - 1);
  for (int i = 0; i < points; ++i) {
    op.sym.diag[i] = -(face[i] + face[i + 1]) / (h * vol[i]) + shift;
    if (i + 1 < points) op.sym.off[i] = face[i + 1] / (h * op.sqrt_vol[i] * op.sqrt_vol[i + 1]);
  }
  return op;
}

std::vector<double> JacobiOperator::apply(const std::vector<double>& f) const {
  const int n = grid.points;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    // Unsymmetrize: (D^{-1} S D f)_i
    double s = sym.diag[i] * f[i];
    if (i > 0) s += sym.off[i - 1] * sqrt_vol[i - 1] / sqrt_vol[i] * f[i - 1];
    if (i + 1 < n) s += sym.off[i] * sqrt_vol[i + 1] / sqrt_vol[i] * f[i + 1];
    out[i] = s;
  }
  return out;
}

namespace {

SymTridiagonal negate(const SymTridiagonal& m) {
  SymTridiagonal r = m;
  for (double& v : r.diag) v = -v;
  for (double& v : r.off) v = -v;
  return r;
}

}  // namespace

std::vector<double> JacobiOperator::lowest(int count) const {
  return lowest_eigenvalues(negate(sym), count);
}

std::vector<double> JacobiOperator::all_eigenvalues() const {
  return eigenvalues_ql(negate(sym));
}

std::vector<double> JacobiOperator::eigenfunction(double eigenvalue) const {
  std::vector<double> v = eigenvector(negate(sym), eigenvalue);
  for (size_t i = 0; i < v.size(); ++i) v[i] /= sqrt_vol[i];
  return v;
}

double JacobiOperator::inner(const std::vector<double>& f,
                             const std::vector<double>& g) const {
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += sqrt_vol[i] * sqrt_vol[i] * f[i] * g[i];
  return s;
}

}  // namespace mcf
