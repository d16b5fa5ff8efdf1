#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covfluid/stepper.hpp"

namespace covfluid {

enum class SceneId { TaylorGreen, TaylorVortex, Leapfrog, HydrostaticPool, DropletPool, DamBreak };

const char* to_string(SceneId s);
/// Throws std::invalid_argument for an unknown name.
SceneId scene_from_string(const std::string& name);

/// True for scenes with a free surface (air particles, gravity).
bool has_free_surface(SceneId s);

struct SceneConfig {
  SceneId scene = SceneId::TaylorGreen;
  SchemeMode mode = SchemeMode::Base;
  SurfaceTreatment surface = SurfaceTreatment::Fusion;
  JacobianMethod jacobian = JacobianMethod::LeastSquares;

  double domain_width = 2.0;
  double domain_height = 2.0;
  double spacing = 2.0 / 64;

  double dt = 0.01;
  bool adaptive_dt = false;
  double cfl = 0.5;
  double dt_max = 0.01;
  int steps = 500;

  int reinit_period = 20;
  int surface_layers = 0;
  bool sticky_flags = true;
  Vec2 gravity = Vec2::Zero();
  GravityTreatment gravity_treatment = GravityTreatment::Potential;
  bool lloyd = true;
  double air_band = 2.0;

  double cg_tol = 1e-8;
  int cg_max_iter = 0;

  std::string output_dir = "out";
  int frame_every = 50;
  bool dump_voronoi = false;
  bool wall_clock = false;  // record wall_ms; off keeps energy.csv bit-reproducible
  int threads = 0;
  std::uint64_t seed = 1;
  double jitter = 0;  // lattice jitter, in spacings

  // Taylor-Green
  double tg_amplitude = 1.0;
  // Taylor vortex pair
  double vortex_U = 1.0;
  double vortex_a = 0.3;
  double vortex_separation = 0.815;
  // Leapfrog: two vortex pairs, top vortex +gamma, bottom -gamma
  double lf_gamma = 1.0;
  double lf_core = 0.1;
  double lf_x1 = 0.4;
  double lf_x2 = 1.1;
  double lf_half_gap = 0.5;
  // Free-surface scenes
  double pool_height = 0.5;
  double droplet_radius = 0.1;
  double droplet_cx = 0.5;
  double droplet_cy = 0.7;
  double dam_width_fraction = 0.4;
  double dam_height = 0.6;

  Box fluid_box() const { return {Vec2::Zero(), Vec2(domain_width, domain_height)}; }
};

/// Documented defaults for a scene.
SceneConfig scene_defaults(SceneId scene);

/// Sites (i + 1/2, j + 1/2) h of the lattice covering `box`.
std::vector<Vec2> lattice_sites(const Box& box, double h);

/// Tangential speed of a Taylor vortex, U (r/a) exp((1 - r^2/a^2) / 2).
double taylor_vortex_speed(double r, double U, double a);
/// Its vorticity, U/a (2 - r^2/a^2) exp((1 - r^2/a^2) / 2).
double taylor_vortex_vorticity(double r, double U, double a);
/// Gaussian-core point vortex velocity at p.
Vec2 gaussian_vortex_velocity(const Vec2& p, const Vec2& center, double gamma, double core);

Vec2 taylor_green_velocity(const Vec2& p, double L, double U0);
Vec2 taylor_vortex_pair_velocity(const Vec2& p, const SceneConfig& cfg);
Vec2 leapfrog_velocity(const Vec2& p, const SceneConfig& cfg);

// Initializers return fluid particles followed by the solid wall layer.
Particles init_taylor_green(const SceneConfig& cfg);
Particles init_taylor_vortex_pair(const SceneConfig& cfg);
Particles init_leapfrog(const SceneConfig& cfg);
Particles init_hydrostatic_pool(const SceneConfig& cfg);
Particles init_droplet_pool(const SceneConfig& cfg);
Particles init_dam_break(const SceneConfig& cfg);

Particles init_scene(const SceneConfig& cfg);

/// Stepper options implied by a config.
StepperOptions stepper_options(const SceneConfig& cfg);

/// Initialized scene with air seeded (free-surface scenes) and geometry built.
SimState make_state(const SceneConfig& cfg);

}  // namespace covfluid
