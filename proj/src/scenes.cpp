#include "covfluid/scenes.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace covfluid {

namespace {

constexpr struct {
  SceneId id;
  const char* name;
} kSceneNames[] = {
    {SceneId::TaylorGreen, "taylor_green"},       {SceneId::TaylorVortex, "taylor_vortex"},
    {SceneId::Leapfrog, "leapfrog"},              {SceneId::HydrostaticPool, "hydrostatic_pool"},
    {SceneId::DropletPool, "droplet_pool"},       {SceneId::DamBreak, "dam_break"},
};

void jitter_sites(std::vector<Vec2>& sites, const SceneConfig& cfg) {
  if (cfg.jitter <= 0) return;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  const double amp = cfg.jitter * cfg.spacing;
  for (Vec2& s : sites) {
    const double dx = dist(rng);
    const double dy = dist(rng);
    s += amp * Vec2(dx, dy);
  }
}

// Fluid particles at `sites` with velocities from `velocity`, then the solid wall layer.
template <typename F>
Particles assemble(const SceneConfig& cfg, std::vector<Vec2> sites, F&& velocity) {
  jitter_sites(sites, cfg);
  const Box box = cfg.fluid_box();
  const double h = cfg.spacing;
  Particles P;
  for (const Vec2& s : sites) {
    P.position.push_back(s);
    P.velocity.push_back(velocity(s));
    P.kind.push_back(Material::Fluid);
    P.id.push_back(static_cast<long>(P.id.size()));
  }
  P.fluid_count = static_cast<int>(sites.size());

  const int nx = static_cast<int>(std::lround(box.width() / h));
  const int ny = static_cast<int>(std::lround(box.height() / h));
  for (int j = -1; j <= ny; ++j) {
    for (int i = -1; i <= nx; ++i) {
      if (i >= 0 && i < nx && j >= 0 && j < ny) continue;
      P.position.push_back(box.lo + h * Vec2(i + 0.5, j + 0.5));
      P.velocity.push_back(Vec2::Zero());
      P.kind.push_back(Material::Solid);
      P.id.push_back(static_cast<long>(P.id.size()));
    }
  }
  P.solid_count = P.size() - P.fluid_count;
  P.flow.assign(P.size(), FlowMapState{});
  P.next_air_id = P.size();
  return P;
}

Vec2 zero_velocity(const Vec2&) { return Vec2::Zero(); }

}  // namespace

const char* to_string(SceneId s) {
  for (const auto& e : kSceneNames)
    if (e.id == s) return e.name;
  return "?";
}

SceneId scene_from_string(const std::string& name) {
  for (const auto& e : kSceneNames)
    if (name == e.name) return e.id;
  throw std::invalid_argument("unknown scene '" + name + "'");
}

bool has_free_surface(SceneId s) {
  return s == SceneId::HydrostaticPool || s == SceneId::DropletPool || s == SceneId::DamBreak;
}

SceneConfig scene_defaults(SceneId scene) {
  SceneConfig c;
  c.scene = scene;
  switch (scene) {
    case SceneId::TaylorGreen:
      break;
    case SceneId::TaylorVortex:
      c.domain_width = c.domain_height = 3.0;
      c.spacing = 1.0 / 32;
      c.steps = 300;
      break;
    case SceneId::Leapfrog:
      c.domain_width = 4.0;
      c.domain_height = 2.0;
      c.spacing = 1.0 / 32;
      c.adaptive_dt = true;
      c.dt_max = 0.02;
      c.steps = 1500;
      c.frame_every = 100;
      break;
    case SceneId::HydrostaticPool:
      c.mode = SchemeMode::Boundary;
      c.domain_width = c.domain_height = 1.0;
      c.spacing = 1.0 / 32;
      c.dt = 0.005;
      c.steps = 100;
      c.gravity = Vec2(0, -9.8);
      c.cg_tol = 1e-10;
      break;
    case SceneId::DropletPool:
    case SceneId::DamBreak:
      c.mode = SchemeMode::Boundary;
      c.domain_width = c.domain_height = 1.0;
      c.spacing = 1.0 / 48;
      c.dt = 0.002;
      c.steps = 500;
      c.gravity = Vec2(0, -9.8);
      c.pool_height = scene == SceneId::DropletPool ? 0.3 : 0.0;
      c.cg_tol = 1e-10;
      break;
  }
  return c;
}

std::vector<Vec2> lattice_sites(const Box& box, double h) {
  const int nx = static_cast<int>(std::lround(box.width() / h));
  const int ny = static_cast<int>(std::lround(box.height() / h));
  std::vector<Vec2> sites;
  sites.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) sites.push_back(box.lo + h * Vec2(i + 0.5, j + 0.5));
  return sites;
}

double taylor_vortex_speed(double r, double U, double a) {
  const double q = r / a;
  return U * q * std::exp(0.5 * (1.0 - q * q));
}

double taylor_vortex_vorticity(double r, double U, double a) {
  const double q2 = (r / a) * (r / a);
  return U / a * (2.0 - q2) * std::exp(0.5 * (1.0 - q2));
}

Vec2 gaussian_vortex_velocity(const Vec2& p, const Vec2& center, double gamma, double core) {
  const Vec2 d = p - center;
  const double r2 = d.squaredNorm();
  if (r2 == 0.0) return Vec2::Zero();
  const double k = gamma / (2.0 * std::numbers::pi * r2) * (1.0 - std::exp(-r2 / (core * core)));
  return k * Vec2(-d.y(), d.x());
}

Vec2 taylor_green_velocity(const Vec2& p, double L, double U0) {
  const double a = std::numbers::pi * p.x() / L;
  const double b = std::numbers::pi * p.y() / L;
  return U0 * Vec2(std::sin(a) * std::cos(b), -std::cos(a) * std::sin(b));
}

Vec2 taylor_vortex_pair_velocity(const Vec2& p, const SceneConfig& cfg) {
  const Vec2 mid = 0.5 * Vec2(cfg.domain_width, cfg.domain_height);
  const Vec2 off(0.5 * cfg.vortex_separation, 0);
  Vec2 u = Vec2::Zero();
  for (const Vec2& c : {Vec2(mid - off), Vec2(mid + off)}) {
    const Vec2 d = p - c;
    const double r = d.norm();
    if (r == 0.0) continue;
    u += taylor_vortex_speed(r, cfg.vortex_U, cfg.vortex_a) / r * Vec2(-d.y(), d.x());
  }
  return u;
}

Vec2 leapfrog_velocity(const Vec2& p, const SceneConfig& cfg) {
  const double yc = 0.5 * cfg.domain_height;
  Vec2 u = Vec2::Zero();
  for (double x : {cfg.lf_x1, cfg.lf_x2}) {
    u += gaussian_vortex_velocity(p, Vec2(x, yc + cfg.lf_half_gap), cfg.lf_gamma, cfg.lf_core);
    u += gaussian_vortex_velocity(p, Vec2(x, yc - cfg.lf_half_gap), -cfg.lf_gamma, cfg.lf_core);
  }
  return u;
}

Particles init_taylor_green(const SceneConfig& cfg) {
  const double L = cfg.domain_width;
  return assemble(cfg, lattice_sites(cfg.fluid_box(), cfg.spacing),
                  [&](const Vec2& p) { return taylor_green_velocity(p, L, cfg.tg_amplitude); });
}

Particles init_taylor_vortex_pair(const SceneConfig& cfg) {
  return assemble(cfg, lattice_sites(cfg.fluid_box(), cfg.spacing),
                  [&](const Vec2& p) { return taylor_vortex_pair_velocity(p, cfg); });
}

Particles init_leapfrog(const SceneConfig& cfg) {
  return assemble(cfg, lattice_sites(cfg.fluid_box(), cfg.spacing),
                  [&](const Vec2& p) { return leapfrog_velocity(p, cfg); });
}

Particles init_hydrostatic_pool(const SceneConfig& cfg) {
  const Box pool{Vec2::Zero(), Vec2(cfg.domain_width, cfg.pool_height)};
  return assemble(cfg, lattice_sites(pool, cfg.spacing), zero_velocity);
}

Particles init_droplet_pool(const SceneConfig& cfg) {
  std::vector<Vec2> sites;
  const Vec2 c(cfg.droplet_cx, cfg.droplet_cy);
  for (const Vec2& s : lattice_sites(cfg.fluid_box(), cfg.spacing))
    if (s.y() < cfg.pool_height || (s - c).norm() <= cfg.droplet_radius) sites.push_back(s);
  return assemble(cfg, std::move(sites), zero_velocity);
}

Particles init_dam_break(const SceneConfig& cfg) {
  std::vector<Vec2> sites;
  const double xmax = cfg.dam_width_fraction * cfg.domain_width;
  const double ymax = cfg.dam_height * cfg.domain_height;
  for (const Vec2& s : lattice_sites(cfg.fluid_box(), cfg.spacing))
    if ((s.x() < xmax && s.y() < ymax) || s.y() < cfg.pool_height) sites.push_back(s);
  return assemble(cfg, std::move(sites), zero_velocity);
}

Particles init_scene(const SceneConfig& cfg) {
  if (!(cfg.spacing > 0)) throw std::invalid_argument("init_scene: spacing must be positive");
  switch (cfg.scene) {
    case SceneId::TaylorGreen: return init_taylor_green(cfg);
    case SceneId::TaylorVortex: return init_taylor_vortex_pair(cfg);
    case SceneId::Leapfrog: return init_leapfrog(cfg);
    case SceneId::HydrostaticPool: return init_hydrostatic_pool(cfg);
    case SceneId::DropletPool: return init_droplet_pool(cfg);
    case SceneId::DamBreak: return init_dam_break(cfg);
  }
  throw std::invalid_argument("init_scene: unknown scene");
}

StepperOptions stepper_options(const SceneConfig& cfg) {
  StepperOptions o;
  o.mode = cfg.mode;
  o.surface = cfg.surface;
  o.jacobian = cfg.jacobian;
  o.reinit_period = cfg.reinit_period;
  o.surface_layers = cfg.surface_layers;
  o.sticky_flags = cfg.sticky_flags;
  o.gravity = cfg.gravity;
  o.gravity_treatment = cfg.gravity_treatment;
  o.lloyd = cfg.lloyd;
  o.air = has_free_surface(cfg.scene);
  o.air_band = cfg.air_band;
  o.cg.tolerance = cfg.cg_tol;
  o.cg.max_iterations = cfg.cg_max_iter;
  return o;
}

SimState make_state(const SceneConfig& cfg) {
  SimState s;
  s.particles = init_scene(cfg);
  s.fluid_box = cfg.fluid_box();
  s.spacing = cfg.spacing;
  s.domain = s.fluid_box.expanded(cfg.spacing);
  const StepperOptions o = stepper_options(cfg);
  if (o.air) resample_air(s, o.air_band * s.spacing, o.air_exclusion * s.spacing);
  rebuild_geometry(s);
  return s;
}

}  // namespace covfluid
