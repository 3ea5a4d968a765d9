#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mcf/flow.hpp"
#include "mcf/tridiag.hpp"

namespace mcf {

double PolarProfile::h() const {
  return std::numbers::pi / static_cast<double>(R.size() - 1);
}

// R_t = R''/(R^2+R'^2) - (R^2+2R'^2)/(R(R^2+R'^2)) - (n-1)/R + (n-1) R' cot(phi)/R^2.
// At the poles R' = 0 and cot(phi) R' -> R'', so the diffusion coefficient
// there is n/R^2.
PolarStepResult polar_mcf_step(const PolarProfile& p, double dt, double r_stop) {
  const int N = static_cast<int>(p.R.size());
  if (N < 5) throw std::invalid_argument("polar profile needs at least 5 nodes");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const double h = p.h();
  const int n = p.n;
  const auto& R = p.R;

  PolarStepResult res{p, StepStatus::Ok, 0.0};
  const double rmin = *std::min_element(R.begin(), R.end());
  if (!(rmin > 0.0)) {
    res.status = StepStatus::Refused;
    return res;
  }

  std::vector<double> lower(N, 0.0), diag(N), upper(N, 0.0), rhs(N);
  double stiff = 0.0;
  for (int i = 0; i < N; ++i) {
    const double Ri = R[i];
    const bool pole = i == 0 || i == N - 1;
    double dR = 0.0, A, b = 0.0;
    if (pole) {
      A = n / (Ri * Ri);
    } else {
      dR = (R[i + 1] - R[i - 1]) / (2 * h);
      const double phi = i * h;
      A = 1.0 / (Ri * Ri + dR * dR);
      b = (n - 1) / (std::tan(phi) * Ri * Ri);
    }
    const double S2 = Ri * Ri + dR * dR;
    const double c_eff = (Ri * Ri + 2 * dR * dR) / S2 + (n - 1);
    stiff = std::max(stiff, c_eff / (Ri * Ri));
    double lo, mid, up;
    if (i == 0) {
      lo = 0.0;
      mid = -2 * A / (h * h);
      up = 2 * A / (h * h);
    } else if (i == N - 1) {
      lo = 2 * A / (h * h);
      mid = -2 * A / (h * h);
      up = 0.0;
    } else {
      lo = A / (h * h) - b / (2 * h);
      mid = -2 * A / (h * h);
      up = A / (h * h) + b / (2 * h);
    }
    lower[i] = -dt * lo;
    upper[i] = -dt * up;
    diag[i] = 1.0 - dt * (mid + c_eff / (Ri * Ri));
    rhs[i] = Ri - 2.0 * c_eff * dt / Ri;
  }
  if (dt * stiff > 0.5) {
    res.status = StepStatus::Rejected;
    res.suggested_dt = 0.25 / stiff;
    return res;
  }
  solve_tridiagonal(lower, diag, upper, rhs);
  res.profile.R = std::move(rhs);
  res.profile.time = p.time + dt;
  const double new_min = *std::min_element(res.profile.R.begin(), res.profile.R.end());
  if (!(new_min > r_stop)) res.status = StepStatus::Pinch;
  return res;
}

}  // namespace mcf
