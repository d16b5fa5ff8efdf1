#pragma once

#include <vector>

#include "covfluid/stepper.hpp"

namespace covfluid {

struct DiagnosticsRecord {
  int step = 0;
  double time = 0;
  double kinetic_energy = 0;  // volume averaged
  double max_abs_divergence = 0;
  double total_circulation = 0;
  int cg_iterations = 0;
  double cg_residual = 0;
  double wall_ms = 0;
};

/// Per-row curl ([G u_y]_x - [G u_x]_y) / V, with free-surface facets dropped.
ScalarField compute_vorticity(const DiscreteOperators& ops, const VectorField& u);

double kinetic_energy(const DiscreteOperators& ops, const VectorField& u);
double total_circulation(const DiscreteOperators& ops, const ScalarField& vorticity);

/// Record for the current state; the step-dependent fields come from `report`.
DiagnosticsRecord diagnose(const SimState& state, const StepReport& report, double wall_ms);

/// Rows that are local maxima of |omega| over their two-ring fluid
/// neighborhood and exceed half of max |omega|, strongest first.
std::vector<int> vortex_extrema(const VoronoiDiagram& diagram, const DiscreteOperators& ops,
                                const ScalarField& vorticity);

/// Volume-weighted Gaussian average of vorticity, kernel exp(-r^2/radius^2)
/// cut off at 3 radius.
ScalarField smooth_vorticity(const VoronoiDiagram& diagram, const DiscreteOperators& ops,
                             const ScalarField& vorticity, double radius);

/// Vortices resolved at scale `radius`: rows whose smoothed |omega| exceeds
/// half its maximum and every other row within `radius`, strongest first.
std::vector<int> distinct_vortices(const VoronoiDiagram& diagram, const DiscreteOperators& ops,
                                   const ScalarField& vorticity, double radius);

/// Distance between the two strongest extrema, or 0 when fewer than two exist.
double strongest_pair_distance(const VoronoiDiagram& diagram, const DiscreteOperators& ops,
                               const ScalarField& vorticity);

}  // namespace covfluid
