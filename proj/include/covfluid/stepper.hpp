#pragma once

#include <optional>
#include <stdexcept>

#include "covfluid/flow_map.hpp"
#include "covfluid/operators.hpp"
#include "covfluid/poisson.hpp"

namespace covfluid {

enum class SchemeMode {
  Base,      // long-range map, Lambda solve warm-started from the accumulated buffer
  Boundary,  // long-range map fused to one-step advection, standard Poisson
  Baseline,  // one-step advection and projection
};

/// How Boundary mode treats the free surface.
enum class SurfaceTreatment {
  Fusion,  // near-surface particles use one-step advection; interior is fused
  Naive,   // long-range map everywhere with the integral surface condition
};

enum class JacobianMethod { LeastSquares, Ode };

/// How gravity enters the step.
enum class GravityTreatment {
  Potential,  // folded into the pressure as -g.x; acts through free-surface values
  BodyForce,  // added to the velocity (g dt, or accumulated on the flow map)
};

const char* to_string(SchemeMode m);

struct StepperOptions {
  SchemeMode mode = SchemeMode::Boundary;
  SurfaceTreatment surface = SurfaceTreatment::Fusion;
  JacobianMethod jacobian = JacobianMethod::LeastSquares;
  int reinit_period = 20;
  int surface_layers = 0;
  bool sticky_flags = true;
  Vec2 gravity = Vec2::Zero();
  GravityTreatment gravity_treatment = GravityTreatment::Potential;
  bool lloyd = true;
  bool air = false;              // resample ghost air around the fluid every step
  double air_band = 2.0;         // spacings
  double air_exclusion = 0.8;    // spacings
  double wall_margin = 0.05;     // spacings
  bool check_warm_start = false; // Base mode: run the warm-start equivalence check each step
  CgOptions cg;
};

struct SimState {
  Particles particles;
  Box fluid_box;  // interior of the solid walls
  Box domain;     // diagram box, includes the wall layer
  double spacing = 0;
  double time = 0;
  int step = 0;
  int map_steps = 0;  // steps since the last flow-map reinitialization
  bool map_started = false;

  // Post-projection, pre-regularization results of the last step.
  std::optional<VoronoiDiagram> diagram;
  DiscreteOperators ops;
  // p (Baseline/Boundary) or Lambda (Base/naive), per fluid row. Under the
  // potential gravity treatment p is the reduced pressure p - g.x.
  ScalarField pressure;
};

struct StepReport {
  double dt = 0;
  int cg_iterations = 0;
  double cg_residual = 0;
  SolveStatus status = SolveStatus::Converged;
  double max_abs_divergence = 0;
  std::optional<EquivalenceReport> warm_start;

  bool ok() const { return status == SolveStatus::Converged; }
};

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds the diagram of all particles and the fluid operators.
void rebuild_geometry(SimState& state);

StepReport step_base(SimState& state, double dt, const StepperOptions& options);
StepReport step_boundary(SimState& state, double dt, const StepperOptions& options);
StepReport step_baseline(SimState& state, double dt, const StepperOptions& options);

/// Dispatches on options.mode.
StepReport step(SimState& state, double dt, const StepperOptions& options);

/// Replaces the air particles by lattice sites within `band` of the fluid and
/// at least `exclusion` away from every fluid and solid particle.
void resample_air(SimState& state, double band, double exclusion);

/// Moves each fluid particle to its cell centroid, except cells touching air.
void lloyd_regularize(Particles& particles, const VoronoiDiagram& diagram);

/// min(dt_max, cfl * h / max|u|), with max|u| floored at 1e-12.
double compute_dt(const Particles& particles, double spacing, double cfl, double dt_max);

/// Fluid velocities as a 2 x n field.
VectorField fluid_velocity(const Particles& particles);

}  // namespace covfluid
