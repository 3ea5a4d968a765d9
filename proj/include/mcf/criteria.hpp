#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcf/experiments.hpp"
#include "mcf/harness.hpp"

// Acceptance thresholds applied to experiment results. The harness uses them
// for scenario verdicts and the acceptance binary for its criterion lines.
namespace mcf::criteria {

CheckRecord spectrum(const exp::SpectrumRun& run);
CheckRecord linear_decay(const exp::LinearDecayRun& run);
CheckRecord jacobi_grid(const exp::JacobiRun& run);
CheckRecord exact_solutions(const exp::ExactRun& run);
CheckRecord dumbbell(const exp::ExactRun& run, const CylinderParams& params);
CheckRecord fixed_point(const exp::FixedPointRun& run);
CheckRecord normal_form(const exp::NormalFormFit& fit);
CheckRecord decay_order_limit(const exp::NondegenerateRun& run);
CheckRecord cusp(const exp::CuspRun& run);
CheckRecord nonconcentration(const std::vector<NonconcentrationReport>& reports);
CheckRecord sweep(const exp::SweepRun& run);
CheckRecord restricted(const exp::RestrictedFit& fit);
CheckRecord restart(const exp::RestartRun& run);
CheckRecord mean_convex(const exp::NondegenerateRun& run);
CheckRecord noncollapse(const exp::NoncollapseRun& run, const CylinderParams& params);
CheckRecord bowl(const std::vector<exp::BowlRun>& runs);
CheckRecord surgery(const std::vector<exp::SurgeryRow>& rows);

/// Nondegenerate (2,1) run with tau0 = 25 to tau = 200.
exp::NondegenerateOptions reference_nondegenerate();

/// Criterion 1..15 at the fixed acceptance parameters. `scratch` is a
/// writable directory used by the determinism check.
CheckRecord run_criterion(int id, const std::string& scratch, std::uint64_t seed = 20240601);

}  // namespace mcf::criteria
