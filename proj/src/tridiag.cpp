#include "mcf/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcf {

std::vector<double> eigenvalues_ql(const SymTridiagonal& m) {
  const int n = m.size();
  std::vector<double> d = m.diag;
  std::vector<double> e(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) e[i] = m.off[i];

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int mm;
    do {
      for (mm = l; mm < n - 1; ++mm) {
        const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
        if (std::abs(e[mm]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (mm != l) {
        if (++iter > 60) throw std::runtime_error("QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = mm - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[mm] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[mm] = 0.0;
      }
    } while (mm != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

int sturm_count(const SymTridiagonal& m, double x) {
  const int n = m.size();
  int count = 0;
  // A zero pivot is read as -tiny both when counting and when dividing.
  const double tiny = std::numeric_limits<double>::min() * 1e10;
  double q = m.diag[0] - x;
  for (int i = 0;;) {
    if (std::abs(q) < tiny) q = -tiny;
    if (q < 0) ++count;
    if (++i == n) break;
    q = m.diag[i] - x - m.off[i - 1] * m.off[i - 1] / q;
  }
  return count;
}

std::vector<double> lowest_eigenvalues(const SymTridiagonal& m, int count,
                                       double tol) {
  const int n = m.size();
  count = std::min(count, n);
  // Gershgorin bounds
  double lo = m.diag[0], hi = m.diag[0];
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(m.off[i - 1]);
    if (i + 1 < n) r += std::abs(m.off[i]);
    lo = std::min(lo, m.diag[i] - r);
    hi = std::max(hi, m.diag[i] + r);
  }
  std::vector<double> out;
  out.reserve(count);
  for (int j = 0; j < count; ++j) {
    double a = lo, b = hi;
    // smallest x with sturm_count(x) > j
    while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
      const double mid = 0.5 * (a + b);
      if (sturm_count(m, mid) > j) b = mid; else a = mid;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

std::vector<double> eigenvector(const SymTridiagonal& m, double lambda) {
  const int n = m.size();
  // Perturb the shift slightly so the shifted matrix is invertible.
  const double shift = lambda + 1e-10 * std::max(1.0, std::abs(lambda));
  std::vector<double> lower(n, 0.0), diag(n), upper(n, 0.0);
  for (int i = 0; i < n; ++i) {
    diag[i] = m.diag[i] - shift;
    if (i > 0) lower[i] = m.off[i - 1];
    if (i + 1 < n) upper[i] = m.off[i];
  }
  std::vector<double> x(n, 1.0);
  for (int i = 0; i < n; ++i) x[i] = 1.0 + 0.001 * ((i * 7919) % 13);
  for (int it = 0; it < 4; ++it) {
    solve_tridiagonal(lower, diag, upper, x);
    double s = 0.0;
    for (double v : x) s += v * v;
    s = std::sqrt(s);
    for (double& v : x) v /= s;
  }
  return x;
}

void solve_tridiagonal(const std::vector<double>& lower,
                       const std::vector<double>& diag,
                       const std::vector<double>& upper,
                       std::vector<double>& rhs) {
  const size_t n = diag.size();
  std::vector<double> c(n);
  double b = diag[0];
  if (b == 0.0) throw std::runtime_error("zero pivot in tridiagonal solve");
  c[0] = upper[0] / b;
  rhs[0] /= b;
  for (size_t i = 1; i < n; ++i) {
    b = diag[i] - lower[i] * c[i - 1];
    if (b == 0.0) throw std::runtime_error("zero pivot in tridiagonal solve");
    c[i] = (i + 1 < n) ? upper[i] / b : 0.0;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / b;
  }
  for (size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

}  // namespace mcf
