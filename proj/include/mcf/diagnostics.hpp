#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcf/cylinder.hpp"
#include "mcf/flow.hpp"
#include "mcf/spectral.hpp"

namespace mcf {

/// A surface integral with the share of it contributed beyond the sampled
/// domain (far field, or the last value held constant when none is given).
struct SurfaceIntegral {
  double value = 0.0;
  double tail_fraction = 0.0;
  bool warning = false;  ///< tail_fraction > 1e-8 without a declared far field
};

/// Gaussian area (4 pi)^{-n/2} \int e^{-|X|^2/4} of (M - (0, y0)) / scale for
/// the tube {|x| = v}. y0 shifts along the first spine axis (Line kind only).
SurfaceIntegral gaussian_area(const RadialProfile& profile, double y0 = 0.0,
                              double scale = 1.0);

/// Closed forms: hyperplane through 0, round sphere S^n(R), cylinder of
/// radius R over R^k.
double gaussian_area_hyperplane();
double gaussian_area_sphere(int n, double R);
double gaussian_area_cylinder(const CylinderParams& params, double R);

/// Density ratio at the spacetime point ((0, y0), t0) of the MCF slice
/// `profile` at time t < t0.
SurfaceIntegral gaussian_density(const RadialProfile& profile, double y0, double t0);

/// Coarse grid over (center, scale) refined around the best cell. A lower
/// bound for the entropy, never an upper one.
struct EntropyEstimate {
  double lower_bound = 0.0;
  double y0 = 0.0;
  double scale = 1.0;
};
EntropyEstimate entropy_lower_bound(const RadialProfile& profile);

/// d(M) with d^2 = \int odist^2 e^{-|X|^2/4} (no (4 pi) factor). With R, only
/// the part inside Q_R = {|x| < R, |y| < R} counts.
SurfaceIntegral l2_distance(const RadialProfile& profile,
                            std::optional<double> R = std::nullopt);

/// Weighted L^2 norm of u = v - rho over the cylinder itself, far field
/// included. Its ratio to d measures the Jacobi-field comparison constant.
double linearized_norm(const RadialProfile& profile);

/// Weighted mass \int e^{-|X|^2/4} of the tube, the saturation level of d^2.
double weighted_mass(const RadialProfile& profile);

struct DecaySeries {
  std::vector<double> tau;
  std::vector<double> d;
  std::optional<double> R;
  std::vector<double> d_R;  ///< empty, or one per tau
};

/// log(d(tau)/d(tau+1)); restricted uses d_R. Times must match to 1e-9.
/// Throws std::domain_error when a value is missing or not positive.
double decay_order(const DecaySeries& series, double tau, bool restricted = false);

struct NonconcentrationReport {
  std::vector<double> tau;    ///< time since the first snapshot
  std::vector<double> lhs;    ///< \int odist^2 (1 + tau |X|^2) e^{-|X|^2/4}
  std::vector<double> ratio;  ///< lhs / d(0)^2
  double C = 0.0;
  double K = 0.0;
  bool holds = false;         ///< ratio <= C e^{K tau} at every sample
};

/// Least-squares (log C, K) on log ratio, then C raised so the bound holds at
/// every sample. Throws std::domain_error when d(0) = 0.
NonconcentrationReport nonconcentration_check(const std::vector<RadialProfile>& snapshots);

/// inf over c > 0, c' of ||u/c - c' - y.yhat||. Closed form from the weighted
/// moments of u; yhat is a unit vector in R^k. Throws std::domain_error for
/// u = 0.
double h1_domination(const GraphPatch& u, const std::vector<double>& yhat);

/// ||Pi_{~gamma} u|| / ||u||.
double mode_fraction(const GraphPatch& u, double gamma, Relation rel);

enum class VerdictKind { Drop, SpectrumLocked, Violation };

struct StepVerdict {
  double tau = 0.0;
  VerdictKind kind = VerdictKind::Violation;
  double N0 = 0.0;
  double N1 = 0.0;
  double drop = 0.0;    ///< N(tau) - N(tau+1)
  double gamma = 0.0;   ///< lock value when SpectrumLocked
};

struct SweepReport {
  std::vector<StepVerdict> verdicts;
  double drop_fraction = 0.0;
  double locked_fraction = 0.0;
  int violations = 0;
  bool truncated = false;
  std::string notice;
};

/// Unit-step verdicts over a unit-spaced DecaySeries. A step (N(tau) ->
/// N(tau+1)) is a drop when N(tau+1) <= N(tau) - delta2 and N(tau+1) >=
/// -1 - eps, spectrum-locked when both values lie within eps of one
/// eigenvalue, and a violation otherwise. Steps after d first exceeds
/// `closeness` are cut off.
SweepReport monotonicity_sweep(const DecaySeries& series, const CylinderParams& params,
                               double eps, double closeness, double delta2 = 0.0);

struct NoncollapseReport {
  std::vector<double> H;
  std::vector<double> z_sup;
  std::vector<double> z_inf;
  double alpha = 0.0;
  int argmin = 0;
};

/// O(N^2) Andrews-constant scan. The extremes of Z over a rotation orbit sit
/// at the two mirror points, so each sample is paired with every sample and
/// its reflections. Throws std::domain_error when H <= 0 somewhere.
NoncollapseReport noncollapse_alpha(const PolarProfile& closed);
NoncollapseReport noncollapse_alpha(const RadialProfile& tube);

/// chi(B^{n-k+1} x S^{k-1}) - chi(S^{n-k} x B^k). Throws std::domain_error
/// outside 1 <= k <= n-1.
int surgery_euler_delta(int n, int k);

}  // namespace mcf
