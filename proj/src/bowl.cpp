#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>

#include "mcf/flow.hpp"

namespace mcf {

namespace {

using State = std::array<double, 2>;  // (U, U')

double second_derivative(int m, double s, double p) {
  if (s == 0.0) return 1.0 / m;
  return (1.0 + p * p) * (1.0 - (m - 1) * p / s);
}

}  // namespace

// Regular at s = 0 with U = s^2/(2m) + s^4/(4 m^3 (m+2)) + O(s^6); the series
// supplies the state at a small s0 and dopri5 integrates from there.
BowlProfile bowl_translator_solve(int m, const std::vector<double>& samples) {
  if (m < 2) throw std::domain_error("bowl dimension m must be at least 2");
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] < 0.0 || (i > 0 && samples[i] < samples[i - 1])) {
      throw std::invalid_argument("bowl samples must be ascending and non-negative");
    }
  }
  const double md = m;
  auto series = [md](double s) {
    const double c4 = 1.0 / (4.0 * md * md * md * (md + 2.0));
    return State{s * s / (2.0 * md) + c4 * std::pow(s, 4),
                 s / md + 4.0 * c4 * std::pow(s, 3)};
  };
  const double s0 = 1e-3;

  BowlProfile out{m, samples, std::vector<double>(samples.size()),
                  std::vector<double>(samples.size()), std::vector<double>(samples.size())};
  auto rhs = [m](const State& x, State& dx, double s) {
    dx[0] = x[1];
    dx[1] = second_derivative(m, s, x[1]);
  };
  auto stepper = boost::numeric::odeint::make_controlled<
      boost::numeric::odeint::runge_kutta_dopri5<State>>(1e-13, 1e-13);

  State x = series(s0);
  double s = s0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double target = samples[i];
    State val;
    if (target <= s0) {
      val = series(target);
    } else {
      if (target > s) {
        boost::numeric::odeint::integrate_adaptive(stepper, rhs, x, s, target,
                                                   std::min(1e-3, target - s));
        s = target;
      }
      val = x;
    }
    out.U[i] = val[0];
    out.dU[i] = val[1];
    out.d2U[i] = second_derivative(m, target, val[1]);
  }
  return out;
}

BowlProfile bowl_translator_solve(int m, double s_max, int points) {
  if (!(s_max > 0.0) || points < 2) throw std::invalid_argument("bad bowl sampling");
  std::vector<double> samples(points);
  for (int i = 0; i < points; ++i) samples[i] = s_max * i / (points - 1);
  return bowl_translator_solve(m, samples);
}

}  // namespace mcf
