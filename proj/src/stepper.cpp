#include "covfluid/stepper.hpp"

#include <algorithm>
#include <cmath>

#include "covfluid/spatial_grid.hpp"

namespace covfluid {

const char* to_string(SchemeMode m) {
  switch (m) {
    case SchemeMode::Base: return "base";
    case SchemeMode::Boundary: return "boundary";
    case SchemeMode::Baseline: return "baseline";
  }
  return "?";
}

VectorField fluid_velocity(const Particles& particles) {
  VectorField u(2, particles.fluid_count);
  for (int i = 0; i < particles.fluid_count; ++i) u.col(i) = particles.velocity[i];
  return u;
}

void rebuild_geometry(SimState& state) {
  const Particles& p = state.particles;
  DiagramOptions opt;
  opt.spacing = state.spacing;
  state.diagram = build_diagram(p.position, p.kind, state.domain, opt);
  state.ops = assemble_operators(*state.diagram);
}

// x_init is left alone: the map keeps tracking the pre-regularization trajectory.
void lloyd_regularize(Particles& particles, const VoronoiDiagram& diagram) {
  // Free-surface cells stay put: their centroids follow the air lattice, which feeds a corner mode.
  for (int i = 0; i < particles.fluid_count; ++i) {
    const auto nb = diagram.neighbors(i);
    const bool surface =
        std::any_of(nb.begin(), nb.end(), [&](int j) { return particles.kind[j] == Material::Air; });
    if (!surface) particles.position[i] = diagram.cells[i].centroid;
  }
}

double compute_dt(const Particles& particles, double spacing, double cfl, double dt_max) {
  double vmax = 0;
  for (int i = 0; i < particles.fluid_count; ++i) vmax = std::max(vmax, particles.velocity[i].norm());
  vmax = std::max(vmax, 1e-12);
  return std::min(dt_max, cfl * spacing / vmax);
}

void resample_air(SimState& state, double band, double exclusion) {
  Particles& P = state.particles;
  const int keep = P.fluid_count + P.solid_count;
  P.position.resize(keep);
  P.velocity.resize(keep);
  P.kind.resize(keep);
  P.flow.resize(keep);
  P.id.resize(keep);

  const std::span<const Vec2> fluid(P.position.data(), P.fluid_count);
  const std::span<const Vec2> solid(P.position.data() + P.fluid_count, P.solid_count);
  if (fluid.empty()) return;
  const double h = state.spacing;
  const SpatialGrid fluid_grid(fluid, state.domain, h);
  const SpatialGrid solid_grid(solid, state.domain, h);
  const int nx = static_cast<int>(std::lround(state.fluid_box.width() / h));
  const int ny = static_cast<int>(std::lround(state.fluid_box.height() / h));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec2 site = state.fluid_box.lo + h * Vec2(i + 0.5, j + 0.5);
      const int f = fluid_grid.nearest(fluid, site, band);
      if (f < 0 || (fluid[f] - site).norm() < exclusion) continue;
      if (!solid.empty() && solid_grid.nearest(solid, site, exclusion) >= 0) continue;
      P.position.push_back(site);
      P.velocity.push_back(Vec2::Zero());
      P.kind.push_back(Material::Air);
      P.flow.emplace_back();
      P.id.push_back(P.next_air_id++);
    }
  }
}

namespace {

void begin_step(SimState& s, double dt, const StepperOptions& o, bool uses_map) {
  Particles& P = s.particles;
  if (uses_map && (!s.map_started || s.map_steps >= std::max(1, o.reinit_period))) {
    reinitialize(P);
    s.map_steps = 0;
    s.map_started = true;
  }
  advect_positions(P, dt);
  clamp_to_box(P, s.fluid_box, o.wall_margin * s.spacing);
  if (o.air) resample_air(s, o.air_band * s.spacing, o.air_exclusion * s.spacing);
  rebuild_geometry(s);
}

void update_jacobians(SimState& s, const StepperOptions& o, const VectorField& u_prev, double dt) {
  Particles& P = s.particles;
  if (o.jacobian == JacobianMethod::LeastSquares) {
    estimate_jacobians(P, *s.diagram);
    return;
  }
  const VectorField gx = gradient(s.ops, u_prev.row(0).transpose(), SurfaceValue::Own);
  const VectorField gy = gradient(s.ops, u_prev.row(1).transpose(), SurfaceValue::Own);
  for (int i = 0; i < P.fluid_count; ++i) {
    Mat2 J;
    J.row(0) = gx.col(i).transpose();
    J.row(1) = gy.col(i).transpose();
    P.flow[i].T = evolve_jacobian(P.flow[i].T, J, dt);
  }
}

ScalarField half_speed_squared(const VectorField& u) { return 0.5 * u.colwise().squaredNorm().transpose(); }

ScalarField lambda_buffer(const Particles& P) {
  ScalarField l(P.fluid_count);
  for (int i = 0; i < P.fluid_count; ++i) l(i) = P.flow[i].lambda_acc;
  return l;
}

PoissonSolution solve(const SimState& s, const VectorField& u_star, const ScalarField& guess,
                      const ProblemBoundary& bc, const StepperOptions& o, StepReport& rep) {
  const PoissonProblem prob = build_problem(s.ops, u_star, guess, bc);
  PoissonSolution sol = cg_solve(prob, o.cg);
  rep.cg_iterations = sol.iterations;
  rep.cg_residual = sol.residual;
  rep.status = sol.status;
  return sol;
}

void finish_step(SimState& s, const VectorField& u, double dt, const StepperOptions& o, bool uses_map,
                 StepReport& rep) {
  Particles& P = s.particles;
  for (int i = 0; i < P.fluid_count; ++i) P.velocity[i] = u.col(i);
  rep.dt = dt;
  rep.max_abs_divergence = P.fluid_count > 0 ? divergence(s.ops, u).cwiseAbs().maxCoeff() : 0.0;
  s.time += dt;
  ++s.step;
  if (uses_map) {
    ++s.map_steps;
    for (int i = 0; i < P.fluid_count; ++i) ++P.flow[i].since_reinit;
  }
  if (o.lloyd) lloyd_regularize(P, *s.diagram);
}

bool body_force(const StepperOptions& o) {
  return o.gravity_treatment == GravityTreatment::BodyForce && !o.gravity.isZero();
}

void add_gravity(Particles& P, const StepperOptions& o, double dt) {
  if (!body_force(o)) return;
  for (int i = 0; i < P.fluid_count; ++i) P.flow[i].gravity_acc += o.gravity * dt;
}

// Potential -dt g.x on every free-surface facet (potential treatment only).
ProblemBoundary gravity_boundary(const SimState& s, const StepperOptions& o, double dt) {
  ProblemBoundary bc;
  if (o.gravity_treatment != GravityTreatment::Potential || !s.ops.has_air()) return bc;
  ScalarField f(s.ops.air_faces.size());
  for (std::size_t k = 0; k < s.ops.air_faces.size(); ++k)
    f(k) = -dt * o.gravity.dot(s.diagram->facets[s.ops.air_faces[k].facet].centroid);
  bc.surface_values = std::move(f);
  return bc;
}

StepReport step_naive(SimState& s, double dt, const StepperOptions& o) {
  StepReport rep;
  Particles& P = s.particles;
  const VectorField u_prev = fluid_velocity(P);
  begin_step(s, dt, o, true);
  const int nf = P.fluid_count;
  update_jacobians(s, o, u_prev, dt);
  add_gravity(P, o, dt);

  const bool potential = o.gravity_treatment == GravityTreatment::Potential;
  VectorField u_map(2, nf);
  ScalarField surface(nf);
  for (int i = 0; i < nf; ++i) {
    FlowMapState& fm = P.flow[i];
    double lambda_free = -0.5 * u_prev.col(i).squaredNorm();
    if (potential) lambda_free -= o.gravity.dot(P.position[i]);
    fm.kinetic_acc += lambda_free * dt;
    surface(i) = fm.kinetic_acc;
    u_map.col(i) = map_velocity(fm);
  }
  ProblemBoundary bc;
  bc.surface_values = faces_from_rows(s.ops, surface);
  const PoissonSolution sol = solve(s, u_map, lambda_buffer(P), bc, o, rep);
  const VectorField u = project_velocity(s.ops, u_map, sol.p, bc.surface_values);
  for (int i = 0; i < nf; ++i) P.flow[i].lambda_acc = sol.p(i);
  s.pressure = sol.p;
  finish_step(s, u, dt, o, true, rep);
  return rep;
}

}  // namespace

StepReport step_base(SimState& s, double dt, const StepperOptions& o) {
  Particles& P = s.particles;
  if (o.air || P.air_count() > 0)
    throw std::invalid_argument("step_base: base mode requires a scene without air particles");
  StepReport rep;
  const VectorField u_prev = fluid_velocity(P);
  begin_step(s, dt, o, true);
  const int nf = P.fluid_count;
  const bool fresh = s.map_steps == 0;
  if (!fresh || o.jacobian == JacobianMethod::Ode) update_jacobians(s, o, u_prev, dt);
  add_gravity(P, o, dt);
  // In a closed domain the gravity potential is absorbed by Lambda entirely.
  const Vec2 g_step = body_force(o) ? Vec2(o.gravity * dt) : Vec2::Zero();

  const ScalarField lambda_prev = lambda_buffer(P);
  const VectorField grad_lambda = gradient(s.ops, lambda_prev, SurfaceValue::Own);
  const VectorField grad_half = gradient(s.ops, half_speed_squared(u_prev), SurfaceValue::Own);
  VectorField u_map(2, nf);
  for (int i = 0; i < nf; ++i) {
    const FlowMapState& fm = P.flow[i];
    if (fresh || fm.scalar_branch()) {
      // One-step map in closed form, shifted back to the long-range frame.
      u_map.col(i) = u_prev.col(i) + g_step + grad_lambda.col(i) - dt * grad_half.col(i);
    } else {
      u_map.col(i) = map_velocity(fm);
    }
  }
  if (o.check_warm_start) {
    const VectorField u_short = project_velocity(s.ops, u_map, lambda_prev);
    rep.warm_start = warm_start_equivalence_check(s.ops, u_map, u_short, lambda_prev, o.cg);
  }
  const PoissonSolution sol = solve(s, u_map, lambda_prev, {}, o, rep);
  const VectorField u = project_velocity(s.ops, u_map, sol.p);
  for (int i = 0; i < nf; ++i) P.flow[i].lambda_acc = sol.p(i);
  s.pressure = sol.p;
  finish_step(s, u, dt, o, true, rep);
  return rep;
}

StepReport step_boundary(SimState& s, double dt, const StepperOptions& o) {
  if (o.surface == SurfaceTreatment::Naive) return step_naive(s, dt, o);
  StepReport rep;
  Particles& P = s.particles;
  const VectorField u_prev = fluid_velocity(P);
  begin_step(s, dt, o, true);
  const int nf = P.fluid_count;
  const bool fresh = s.map_steps == 0;
  flag_near_surface(P, *s.diagram, o.surface_layers, o.sticky_flags);
  if (!fresh || o.jacobian == JacobianMethod::Ode) update_jacobians(s, o, u_prev, dt);
  add_gravity(P, o, dt);
  const Vec2 g_step = body_force(o) ? Vec2(o.gravity * dt) : Vec2::Zero();

  const VectorField grad_lambda = gradient(s.ops, lambda_buffer(P), SurfaceValue::Own);
  const VectorField grad_half = gradient(s.ops, half_speed_squared(u_prev), SurfaceValue::Own);
  VectorField u_adv(2, nf);
  for (int i = 0; i < nf; ++i) {
    const FlowMapState& fm = P.flow[i];
    if (fresh || fm.scalar_branch()) {
      u_adv.col(i) = u_prev.col(i) + g_step;
    } else {
      u_adv.col(i) = fuse_to_advected(map_velocity(fm), grad_lambda.col(i), grad_half.col(i), dt);
    }
  }
  const ProblemBoundary bc = gravity_boundary(s, o, dt);
  const PoissonSolution sol = solve(s, u_adv, ScalarField::Zero(nf), bc, o, rep);
  const VectorField u = project_velocity(s.ops, u_adv, sol.p, bc.surface_values);
  for (int i = 0; i < nf; ++i) accumulate_lambda(P.flow[i], sol.p(i) / dt, u_prev.col(i), dt);
  s.pressure = sol.p / dt;
  finish_step(s, u, dt, o, true, rep);
  return rep;
}

StepReport step_baseline(SimState& s, double dt, const StepperOptions& o) {
  StepReport rep;
  Particles& P = s.particles;
  const VectorField u_prev = fluid_velocity(P);
  begin_step(s, dt, o, false);
  VectorField u_adv = u_prev;
  if (body_force(o)) u_adv.colwise() += o.gravity * dt;
  const ProblemBoundary bc = gravity_boundary(s, o, dt);
  const PoissonSolution sol = solve(s, u_adv, ScalarField::Zero(P.fluid_count), bc, o, rep);
  const VectorField u = project_velocity(s.ops, u_adv, sol.p, bc.surface_values);
  s.pressure = sol.p / dt;
  finish_step(s, u, dt, o, false, rep);
  return rep;
}

StepReport step(SimState& state, double dt, const StepperOptions& options) {
  switch (options.mode) {
    case SchemeMode::Base: return step_base(state, dt, options);
    case SchemeMode::Boundary: return step_boundary(state, dt, options);
    case SchemeMode::Baseline: return step_baseline(state, dt, options);
  }
  return {};
}

}  // namespace covfluid
