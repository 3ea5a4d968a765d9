#pragma once

#include <vector>

namespace mcf {

/// Symmetric tridiagonal matrix; off[i] couples rows i and i+1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  int size() const { return static_cast<int>(diag.size()); }
};

/// All eigenvalues, ascending, by implicit-shift QL.
std::vector<double> eigenvalues_ql(const SymTridiagonal& m);

/// Number of eigenvalues strictly below x (Sturm sequence).
int sturm_count(const SymTridiagonal& m, double x);

/// The lowest `count` eigenvalues, ascending, by bisection on the Sturm count.
std::vector<double> lowest_eigenvalues(const SymTridiagonal& m, int count,
                                       double tol = 1e-13);

/// Unit eigenvector for an (already accurate) eigenvalue via inverse iteration.
std::vector<double> eigenvector(const SymTridiagonal& m, double lambda);

/// Solves a general tridiagonal system in place of rhs. lower[i] multiplies
/// x[i-1] in row i, upper[i] multiplies x[i+1]; lower[0], upper[n-1] unused.
/// Throws std::runtime_error on a zero pivot.
void solve_tridiagonal(const std::vector<double>& lower,
                       const std::vector<double>& diag,
                       const std::vector<double>& upper,
                       std::vector<double>& rhs);

}  // namespace mcf
