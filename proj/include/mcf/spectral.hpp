#pragma once

#include <functional>
#include <vector>

#include "mcf/cylinder.hpp"
#include "mcf/quadrature.hpp"
#include "mcf/tridiag.hpp"

namespace mcf {

/// Function classes on C_{n,k}. Line and Radial are theta-invariant; Full is
/// used only for spectrum bookkeeping.
enum class SymmetryClass {
  Full,
  Line,    ///< functions of the single linear coordinate y.e
  Radial,  ///< functions of |y|
};

/// Eigenmode of -L: level i on the sphere factor, degree j on the spine.
struct SpectralMode {
  int i = 0;
  int j = 0;
  double eigenvalue = -1.0;
};

/// h_0 = 1, h_1 = y, h_{j+1} = y h_j - 2j h_{j-1}.
double hermite_eval(int j, double y);

/// Radial eigenfunction of degree j (even) on R^k, monic in r^2; equals
/// hermite_eval(j, r) when k = 1.
double radial_basis_eval(int j, int k, double r);

double sphere_mode_eigenvalue(int i, const CylinderParams& params);
double mode_eigenvalue(int i, int j, const CylinderParams& params);

/// Dimension of degree-i spherical harmonics on S^d.
long sphere_harmonic_dim(int d, int i);
/// Number of degree-j monomials in k variables.
long hermite_multiplicity(int k, int j);

struct SpectrumLevel {
  double eigenvalue = 0.0;
  long multiplicity = 0;
  std::vector<SpectralMode> modes;
};

/// Eigenvalues of -L up to `cutoff`, ascending, grouped with multiplicities.
std::vector<SpectrumLevel> enumerate_spectrum(const CylinderParams& params,
                                              double cutoff,
                                              SymmetryClass cls = SymmetryClass::Full);

/// True when gamma is within tol of an eigenvalue of -L (any class).
bool in_spectrum(const CylinderParams& params, double gamma, double tol);

/// Gaussian-weighted quadrature on the cylinder for a theta-invariant class.
/// Weights carry the whole measure e^{-|X|^2/4} dH^n, including the sphere
/// factor |S^{n-k}| rho^{n-k} e^{-rho^2/4}.
struct WeightedQuadrature {
  CylinderParams params;
  SymmetryClass cls = SymmetryClass::Line;
  double extent = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  double inner(const std::function<double(double)>& f,
               const std::function<double(double)>& g) const;
};

/// Domain chosen so the highest basis mode has relative tail mass below 1e-12.
WeightedQuadrature weighted_quadrature(const CylinderParams& params,
                                       SymmetryClass cls, int max_degree);

/// Basis function of degree j in the class (Hermite or radial).
double class_basis_eval(SymmetryClass cls, int k, int j, double coord);

struct ExpansionTerm {
  SpectralMode mode;
  double coeff = 0.0;
  double norm_sq = 1.0;  ///< weighted squared norm of the basis function
};

struct EigenExpansion {
  CylinderParams params;
  SymmetryClass cls = SymmetryClass::Line;
  int truncation_degree = 0;
  std::vector<ExpansionTerm> terms;

  /// Plancherel norm squared.
  double norm_sq() const;
  /// Pointwise value; Line and Radial classes only.
  double evaluate(double coord) const;
};

/// Expansion sum_j c_j b_j in a theta-invariant class; norms by quadrature.
EigenExpansion make_expansion(const CylinderParams& params, SymmetryClass cls,
                              const std::vector<std::pair<int, double>>& coeffs);

enum class Relation { Equal, AtMost, AtLeast };

struct Projection {
  EigenExpansion component;  ///< modes with eigenvalue ~ gamma
  EigenExpansion full;       ///< all modes up to the truncation degree
  double residual = 0.0;     ///< ||v - full|| / ||v||
  bool warning = false;
};

Projection weighted_project(const std::function<double(double)>& v,
                            const CylinderParams& params, SymmetryClass cls,
                            double gamma, Relation rel,
                            int truncation_degree = 12,
                            double residual_threshold = 1e-8);

Projection weighted_project(const GraphPatch& v, double gamma, Relation rel,
                            int truncation_degree = 12,
                            double residual_threshold = 1e-8);

EigenExpansion heat_semigroup_evolve(const EigenExpansion& v0, double tau);

/// log(||v(tau)|| / ||v(tau+1)||) for v(tau) = e^{tau L} v0.
/// Throws std::domain_error for the zero field.
double linear_decay_order(const EigenExpansion& v0, double tau);

/// Finite-volume discretization of L (shifted by -mu_i for sphere level i)
/// on a grid, symmetrized by the square root of the cell weights.
struct JacobiOperator {
  CylinderParams params;
  SymmetryClass cls = SymmetryClass::Line;
  Grid1D grid;
  int sphere_level = 0;
  SymTridiagonal sym;              ///< D L D^{-1}, D = diag(sqrt_vol)
  std::vector<double> sqrt_vol;

  /// L f on grid samples, with f = 0 beyond the last node.
  std::vector<double> apply(const std::vector<double>& f) const;
  /// Lowest `count` eigenvalues of -L (bisection).
  std::vector<double> lowest(int count) const;
  /// All eigenvalues of -L (implicit QL).
  std::vector<double> all_eigenvalues() const;
  /// Grid eigenfunction of -L for the given eigenvalue, unit weighted norm.
  std::vector<double> eigenfunction(double eigenvalue) const;
  /// Weighted inner product with the cell volumes.
  double inner(const std::vector<double>& f, const std::vector<double>& g) const;
};

/// Throws std::domain_error for fewer than 16 points or the Full class.
JacobiOperator discretize_jacobi_operator(const CylinderParams& params,
                                          SymmetryClass cls, double extent,
                                          int points, int sphere_level = 0);

}  // namespace mcf
