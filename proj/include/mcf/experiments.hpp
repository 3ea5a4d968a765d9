#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcf/cylinder.hpp"
#include "mcf/diagnostics.hpp"
#include "mcf/flow.hpp"

// Experiment drivers shared by the scenario harness and the acceptance
// binary. Each returns raw measurements; thresholds live with the callers.
namespace mcf::exp {

struct SpectrumRun {
  CylinderParams params;
  double extent = 12.0;
  std::vector<int> points;
  std::vector<std::vector<double>> lowest;  ///< three lowest per resolution
  std::vector<double> max_error;            ///< vs {-1, -1/2, 0}
  double order = 0.0;                       ///< from the three coarsest grids
  double seconds = 0.0;
};

/// Line-class discretization at each resolution.
SpectrumRun spectrum_run(const CylinderParams& params, std::vector<int> points,
                         double extent = 12.0);

struct LinearDecayRun {
  int mixtures = 0;
  double worst_increase = 0.0;   ///< max N(tau + 0.1) - N(tau)
  double floor = 0.0;            ///< min N over all mixtures
  double mean_zero_floor = 0.0;  ///< min N over mixtures without the -1 mode
  double pure_mode_dev = 0.0;    ///< max |N - gamma| for single modes
  double seconds = 0.0;
  std::vector<double> sample_tau, sample_N;  ///< one mixture for the CSV
};

LinearDecayRun linear_decay_run(std::uint64_t seed, int mixtures = 1000);

struct JacobiRun {
  double h2_drift = 0.0;        ///< max weighted change of h2 over tau = 1
  double constant_growth = 0.0; ///< growth factor of v = 1 over tau = 1
  std::vector<double> h, error; ///< grid vs semigroup at tau = 1
  double spatial_order = 0.0;
};

JacobiRun jacobi_run(const CylinderParams& params, std::uint64_t seed);

struct ExactRun {
  double cylinder_rel_error = 0.0;  ///< max over sampled t <= T/2
  double sphere_rel_error = 0.0;
  double arrival_error = 0.0;       ///< |t(r) - (R0^2 - r^2)/(2n)|
  double cylinder_T = 0.0;          ///< detect_pinch estimate, exact 1/2
  double sphere_T = 0.0;            ///< exact 1/(2n) for R0 = 1
  double dumbbell_neck_T = 0.0;
  double dumbbell_bell_min = 0.0;   ///< bell radius when the neck pinches
  FlowTrace cylinder_trace;
};

ExactRun exact_run(const CylinderParams& params, int points = 1000);

struct FixedPointRun {
  int steps = 0;
  double max_step_change = 0.0;
  double total_drift = 0.0;
};

FixedPointRun fixed_point_run(const CylinderParams& params, int steps = 10000);

struct NondegenerateOptions {
  CylinderParams params;
  double tau0 = 25.0;
  double horizon = 200.0;  ///< final tau
  int points = 400;
  double dt = 0.01;
  BoundaryMode boundary = BoundaryMode::PinnedHomothetic;
  std::vector<double> radii = {4.0, 6.0, 8.0, 12.0};
  double window = 2.0;     ///< tracked window |y| <= window for H and alpha
};

struct NondegenerateRun {
  NondegenerateOptions opts;
  std::vector<RadialProfile> snapshots;        ///< unit spaced in tau
  DecaySeries series;                          ///< full distance
  std::vector<DecaySeries> restricted;         ///< one per radius
  FlowTrace trace;                             ///< per snapshot, with d, H_min, alpha
  StepStatus status = StepStatus::Ok;
  std::string message;
};

NondegenerateRun nondegenerate_run(const NondegenerateOptions& opts);

struct NormalFormFit {
  std::vector<double> tau;
  std::vector<double> sup_dev;   ///< sup_{|y|<=2} |tau u - (rho/4)(y^2 - 2)|
  std::vector<double> residual;  ///< weighted H^1 norm of u - rho(y^2-2)/(4 tau)
  double slope = 0.0;            ///< log-log over [t_lo, t_hi]
  bool sup_decreasing = false;   ///< over [t_lo, t_hi]
};

NormalFormFit normal_form_fit(const NondegenerateRun& run, double t_lo = 50.0,
                              double t_hi = 200.0);

struct RestrictedFit {
  std::vector<double> radii;
  std::vector<double> mean_gap;  ///< mean over tau of |N_R - N|
  double exponent = 0.0;
  double R0 = 0.0;               ///< smallest R0 with |N_R - N| <= R0/(tau R^2)
};

/// Uses tau measured from the start of the run.
RestrictedFit restricted_fit(const NondegenerateRun& run, std::vector<double> taus);

struct CuspRun {
  double T = 0.0;
  double t_final = 0.0;
  std::vector<double> y, ratio;  ///< at the final slice
  double min_ratio = 0.0, max_ratio = 0.0;
  double mean_wide = 0.0;        ///< window [0.02, 0.1]
  double mean_narrow = 0.0;      ///< window [0.02, 0.05]
  double min_H = 0.0;            ///< min over the window |y| <= 0.5, all samples
  FlowTrace trace;
};

CuspRun cusp_run(const CylinderParams& params, double tau0 = 3.0, int points = 4000);

struct RestartRun {
  int steps = 0;
  int monotone_failures = 0;
  std::vector<double> sample_t;
  std::vector<DualProfile> samples;
};

RestartRun restart_run(const CylinderParams& params, double y_max = 0.2, int points = 2000,
                       double horizon = 5e-4, double dt = 1e-6);

struct SweepRun {
  int runs = 0;
  std::vector<SweepReport> reports;
  std::vector<NonconcentrationReport> nonconcentration;
  int violations = 0;
  int off_spectrum_locks = 0;
  double worst_floor = 0.0;
};

SweepRun sweep_run(const CylinderParams& params, std::uint64_t seed, int runs = 20,
                   double eps = 0.05);

struct NoncollapseRun {
  double sphere_alpha = 0.0;
  double cylinder_alpha = 0.0;
  double ellipsoid_alpha_coarse = 0.0;
  double ellipsoid_alpha_fine = 0.0;
};

NoncollapseRun noncollapse_run(const CylinderParams& params);

struct BowlRun {
  int m = 2;
  bool convex = false;
  std::vector<double> s, gap, increment;  ///< gap = U - (s^2/(2(m-1)) - log s)
  double exponent = 0.0;                  ///< fit of |increment| vs s
};

BowlRun bowl_run(int m);

struct SurgeryRow {
  int n = 0, k = 0;
  int delta = 0;
  int oracle = 0;
};

/// chi(S^d) from the face counts of the boundary of a (d+1)-simplex.
int sphere_euler_by_faces(int d);
std::vector<SurgeryRow> surgery_table(int n_max = 7);

}  // namespace mcf::exp
