#pragma once

#include <optional>
#include <span>
#include <vector>

#include "covfluid/voronoi.hpp"

namespace covfluid {

/// Per-particle flow-map state since the last reinitialization at time s.
struct FlowMapState {
  Vec2 x_init = Vec2::Zero();
  Vec2 u_init = Vec2::Zero();
  Mat2 T = Mat2::Identity();     // backward-map Jacobian dx_s/dx_r
  double lambda_acc = 0;         // path integral of p - |u|^2/2
  double kinetic_acc = 0;        // path integral of -|u|^2/2 (integral surface condition)
  Vec2 gravity_acc = Vec2::Zero();
  bool near_surface = false;
  bool rank_deficient = false;   // Jacobian fit failed; one-step advection until reinit
  int since_reinit = 0;

  /// True when the particle evolves by one-step advection this step.
  bool scalar_branch() const { return near_surface || rank_deficient; }
};

/// Particle arrays. Fluid particles come first so that fluid index i is both
/// the diagram cell id and the operator row; solids follow, then air.
struct Particles {
  std::vector<Vec2> position;
  std::vector<Vec2> velocity;
  std::vector<Material> kind;
  std::vector<FlowMapState> flow;  // meaningful for fluid entries only
  std::vector<long> id;
  int fluid_count = 0;
  int solid_count = 0;
  long next_air_id = 0;

  int size() const { return static_cast<int>(position.size()); }
  int air_count() const { return size() - fluid_count - solid_count; }
};

void advect_positions(Particles& particles, double dt);

/// Keeps fluid positions at least `margin` inside `box`.
void clamp_to_box(Particles& particles, const Box& box, double margin);

struct NeighborSample {
  Vec2 x_init;
  Vec2 x_now;
  double weight = 1.0;
};

/// Least-squares backward Jacobian T = (sum ds dr^T)(sum dr dr^T)^-1 over the
/// neighborhood; exact for affine motion. nullopt when the neighborhood is
/// rank deficient.
std::optional<Mat2> estimate_jacobian(const Vec2& x_init, const Vec2& x_now,
                                      std::span<const NeighborSample> neighbors);

/// Updates T for every fluid particle from its fluid Voronoi neighbors, each
/// weighted by facet length over site distance so a neighbor entering through
/// a vanishing facet does not change T abruptly. A failed fit keeps the
/// previous T and marks the particle rank deficient.
void estimate_jacobians(Particles& particles, const VoronoiDiagram& diagram);

/// First-order Jacobian evolution dT/dt = -T grad(u) (ablation alternative).
Mat2 evolve_jacobian(const Mat2& T, const Mat2& grad_u, double dt);

/// u^M = T^T u_s + accumulated gravity.
Vec2 map_velocity(const FlowMapState& state);

/// One-step advected velocity from the long-range map:
/// u^A = u^M - grad(Lambda_s^{s'}) + dt grad(|u_{s'}|^2 / 2).
Vec2 fuse_to_advected(const Vec2& u_mapped, const Vec2& grad_lambda_acc, const Vec2& grad_half_u2,
                      double dt);

void accumulate_lambda(FlowMapState& state, double p, const Vec2& u, double dt);

/// Fluid cells within `layers` FluidFluid marches of an air cell (layer 0 is
/// adjacent to air). Indexed by diagram cell.
std::vector<char> near_surface_cells(const VoronoiDiagram& diagram, int layers);

/// Sets the near-surface flag of fluid particles; sticky flags are only ever
/// raised until the next reinitialization.
void flag_near_surface(Particles& particles, const VoronoiDiagram& diagram, int layers, bool sticky = true);

/// Restarts every fluid flow map at the current position and velocity.
void reinitialize(Particles& particles);

}  // namespace covfluid
