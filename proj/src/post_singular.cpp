#include <cmath>
#include <stdexcept>

#include "mcf/flow.hpp"
#include "mcf/tridiag.hpp"

namespace mcf {

DualProfile cusp_restart_profile(const CylinderParams& params, double y_max, int points) {
  if (!(y_max > 0.0 && y_max < 1.0)) throw std::domain_error("y_max must lie in (0, 1)");
  if (points < 8) throw std::invalid_argument("restart grid needs at least 8 points");
  const double s_max = cusp_profile(y_max, params);
  DualProfile p{params, Grid1D{AxisKind::Radial, s_max, points}, std::vector<double>(points), 0.0};
  p.w[0] = 0.0;
  p.w[points - 1] = y_max;
  // cusp_profile is increasing on (0, 1), so bisection inverts it
  for (int i = 1; i + 1 < points; ++i) {
    const double s = p.grid.coord(i);
    double lo = 0.0, hi = y_max;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * y_max; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cusp_profile(mid, params) < s ? lo : hi) = mid;
    }
    p.w[i] = 0.5 * (lo + hi);
  }
  return p;
}

bool strictly_monotone(const DualProfile& p) {
  for (size_t i = 1; i < p.w.size(); ++i) {
    if (!(p.w[i] > p.w[i - 1])) return false;
  }
  return true;
}

// Even reflection at s = 0, where (n-k) w'/s -> (n-k) w''.
DualStepResult post_singular_step(const DualProfile& p, double dt,
                                  const std::function<double(double)>& boundary) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const int N = p.grid.points;
  const double h = p.grid.h();
  const int c = p.params.n - p.params.k;
  const int km1 = p.params.k - 1;
  const auto& w = p.w;
  if (km1 > 0) {
    for (double v : w) {
      if (!(v > 0.0)) throw std::domain_error("dual sphere factor needs w > 0 for k >= 2");
    }
  }
  std::vector<double> lower(N, 0.0), diag(N), upper(N, 0.0), rhs(N);
  for (int i = 0; i + 1 < N; ++i) {
    double lo, mid, up;
    if (i == 0) {
      const double A = 1.0 + c;
      lo = 0.0;
      mid = -2 * A / (h * h);
      up = 2 * A / (h * h);
    } else {
      const double d = (w[i + 1] - w[i - 1]) / (2 * h);
      const double A = 1.0 / (1.0 + d * d);
      const double b = c / (i * h);
      lo = A / (h * h) - b / (2 * h);
      mid = -2 * A / (h * h);
      up = A / (h * h) + b / (2 * h);
    }
    lower[i] = -dt * lo;
    upper[i] = -dt * up;
    diag[i] = 1.0 - dt * mid;
    rhs[i] = w[i];
    if (km1 > 0) {
      // -(k-1)/w linearized about the old value
      diag[i] -= dt * km1 / (w[i] * w[i]);
      rhs[i] -= 2.0 * km1 * dt / w[i];
    }
  }
  diag[N - 1] = 1.0;
  rhs[N - 1] = boundary ? boundary(p.time + dt) : w[N - 1];
  solve_tridiagonal(lower, diag, upper, rhs);
  DualStepResult res{p, true};
  res.profile.w = std::move(rhs);
  res.profile.time = p.time + dt;
  res.monotone = strictly_monotone(res.profile);
  return res;
}

}  // namespace mcf
