#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mcf/cylinder.hpp"

namespace mcf {

enum class TimeKind { Flow, Rescaled };

/// The hypersurface {|x| = v} over a Line or Radial grid.
struct RadialProfile {
  CylinderParams params;
  Grid1D grid;
  std::vector<double> v;
  double time = 0.0;
  TimeKind time_kind = TimeKind::Rescaled;
  /// Radius assumed beyond the grid when integrating against the weight.
  std::optional<double> far_field;

  double min_v() const;
  int argmin() const;
};

RadialProfile make_profile(const CylinderParams& params, const Grid1D& grid,
                           const std::function<double(double)>& v, double time,
                           TimeKind kind);

enum class BoundaryMode {
  PinnedHomothetic,  ///< Dirichlet value following the homothetic annulus
  Neumann,
};

enum class DomainGrowth {
  Fixed,
  Parabolic,  ///< extent = growth_factor * sqrt(tau); rescaled flow only
};

struct StepperConfig {
  double dt = 1e-3;
  BoundaryMode boundary = BoundaryMode::Neumann;
  double v_stop = 1e-3;
  int max_steps = 10'000'000;
  DomainGrowth growth = DomainGrowth::Fixed;
  double growth_factor = 1.0;
  /// Rescaled pinned value; NaN means rho sqrt(3/2).
  double pinned_value = std::numeric_limits<double>::quiet_NaN();
  /// Hold the constant (-1) mode on its slaved value after each rescaled step.
  bool control_unstable_mode = false;
};

enum class StepStatus {
  Ok,
  Pinch,       ///< min v at or below v_stop (or non-positive)
  Rejected,    ///< stability limit; see suggested_dt
  Refused,     ///< min v < 1e-6 rho before stepping
  RegimeExit,  ///< |v - rho| > rho/2 in the rescaled flow
};

struct StepResult {
  RadialProfile profile;
  StepStatus status = StepStatus::Ok;
  double suggested_dt = 0.0;
};

StepResult rmcf_step(const RadialProfile& profile, const StepperConfig& cfg);
StepResult mcf_step(const RadialProfile& profile, const StepperConfig& cfg);

/// Spatial right-hand side of the rescaled (or unrescaled) tube equation at
/// every node, with the ghost conventions of the given boundary mode.
std::vector<double> tube_rhs(const RadialProfile& profile, bool rescaled,
                             BoundaryMode boundary);

/// Mean curvature of the tube at each node (outward normal, cylinder H > 0).
std::vector<double> tube_mean_curvature(const RadialProfile& profile);

/// Grid solution of dv/dtau = L v (with sphere level shift 1 - mu_i).
struct JacobiGrid {
  CylinderParams params;
  Grid1D grid;
  std::vector<double> v;
  double tau = 0.0;
  int sphere_level = 0;
};

/// Backward Euler step with the tube stencils linearized at v = rho.
JacobiGrid jacobi_step(const JacobiGrid& field, double dt,
                       BoundaryMode boundary = BoundaryMode::Neumann);

/// Radial profile rho + rho (r^2 - 2k)/(4 tau0) blended to rho sqrt(3/2)
/// over [sqrt(tau0) - 1, sqrt(tau0)]. Extent defaults to sqrt(tau0).
/// Throws std::domain_error for tau0 < 10.
RadialProfile nondegenerate_initial(const CylinderParams& params, double tau0,
                                    int points, double extent = 0.0);

/// Unrescaled slice at t0 = -e^{-tau0} of the square-root normal-form
/// profile: v^2 = rho^2 (-t0 (1 - k/tau0) + r^2/(2 tau0)).
RadialProfile normal_form_mcf_initial(const CylinderParams& params, double tau0,
                                      double extent, int points);

struct TraceSample {
  double time = 0.0;
  double min_v = 0.0;
  double argmin = 0.0;  ///< grid coordinate of the minimum
  double d = std::numeric_limits<double>::quiet_NaN();
  double h_min = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
};

struct FlowTrace {
  TimeKind kind = TimeKind::Rescaled;
  std::vector<TraceSample> samples;         ///< one per accepted step
  std::vector<RadialProfile> snapshots;     ///< at the requested sample times
};

struct RunOptions {
  double end_time = 1.0;
  double sample_interval = 0.0;   ///< 0 disables snapshots
  bool adaptive = false;          ///< shrink dt to safety * v_min^2/(n-k) near pinch
  double adaptive_safety = 0.25;
  bool record_steps = true;
};

struct RunResult {
  FlowTrace trace;
  RadialProfile final;
  StepStatus status = StepStatus::Ok;
  std::string message;
};

/// Steps until end_time, a pinch, a refusal or a regime exit. Snapshot times
/// are hit exactly.
RunResult run_flow(const RadialProfile& start, const StepperConfig& cfg,
                   const RunOptions& opts);

struct PinchEstimate {
  bool found = false;
  double time = 0.0;
  double location = 0.0;
  double coefficient = 0.0;  ///< c in min v = c sqrt(T - t)
};

/// Fits min v^2 = c^2 (T - t) over the last decade of decrease.
PinchEstimate detect_pinch(const FlowTrace& trace);

/// rho |y| / (2 sqrt(-log|y|)); throws std::domain_error for |y| >= 1.
double cusp_profile(double y, const CylinderParams& params);

/// Closed rotationally symmetric hypersurface in R^{n+1}, radius R(phi)
/// about the origin, phi in [0, pi] from the symmetry axis.
struct PolarProfile {
  int n = 2;
  std::vector<double> R;
  double time = 0.0;

  double h() const;
};

struct PolarStepResult {
  PolarProfile profile;
  StepStatus status = StepStatus::Ok;
  double suggested_dt = 0.0;
};

PolarStepResult polar_mcf_step(const PolarProfile& p, double dt, double r_stop);

/// Sheet {|y| = w(|x|)}, x in R^{n-k+1}, on s in [0, s_max]; even at s = 0.
struct DualProfile {
  CylinderParams params;
  Grid1D grid;  ///< Radial kind
  std::vector<double> w;
  double time = 0.0;
};

/// Inverts cusp_profile by bisection on (0, y_max]; w(0) = 0.
DualProfile cusp_restart_profile(const CylinderParams& params, double y_max,
                                 int points);

bool strictly_monotone(const DualProfile& p);

struct DualStepResult {
  DualProfile profile;
  bool monotone = true;
};

/// One backward Euler step of w_t = w''/(1+w'^2) + (n-k) w'/s - (k-1)/w with
/// a Dirichlet value at s_max (held unless `boundary` is given, in which case
/// it is evaluated at the new time).
DualStepResult post_singular_step(const DualProfile& p, double dt,
                                  const std::function<double(double)>& boundary = {});

struct BowlProfile {
  int m = 2;
  std::vector<double> s, U, dU, d2U;
};

/// Rotational translator U''/(1+U'^2) + (m-1) U'/s = 1, U(0) = U'(0) = 0,
/// sampled at the given abscissae (ascending, >= 0).
BowlProfile bowl_translator_solve(int m, const std::vector<double>& samples);
BowlProfile bowl_translator_solve(int m, double s_max, int points);

}  // namespace mcf
