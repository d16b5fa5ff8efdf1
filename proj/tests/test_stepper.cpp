#include <doctest.h>

#include <cmath>
#include <random>

#include "covfluid/scenes.hpp"
#include "support.hpp"

using namespace covfluid;
using namespace covfluid::testing;

namespace {

SceneConfig small_taylor_green(int n = 16) {
  SceneConfig c = scene_defaults(SceneId::TaylorGreen);
  c.spacing = c.domain_width / n;
  c.dt = 0.01;
  return c;
}

SceneConfig small_pool() {
  SceneConfig c = scene_defaults(SceneId::HydrostaticPool);
  c.spacing = 1.0 / 16;
  return c;
}

double max_speed(const Particles& P) {
  double m = 0;
  for (int i = 0; i < P.fluid_count; ++i) m = std::max(m, P.velocity[i].norm());
  return m;
}

double max_velocity_gap(const Particles& a, const Particles& b) {
  double m = 0;
  for (int i = 0; i < a.fluid_count; ++i) m = std::max(m, (a.velocity[i] - b.velocity[i]).norm());
  return m;
}

std::vector<Vec2> air_positions(const Particles& P) {
  return {P.position.begin() + P.fluid_count + P.solid_count, P.position.end()};
}

}  // namespace

TEST_CASE("compute_dt") {
  Particles P;
  P.position = {Vec2::Zero(), Vec2::Ones()};
  P.velocity = {Vec2::Zero(), Vec2::Zero()};
  P.fluid_count = 2;
  CHECK(compute_dt(P, 0.1, 0.5, 0.03) == 0.03);
  P.velocity[1] = Vec2(0, 2);
  CHECK(compute_dt(P, 0.1, 0.5, 0.03) == doctest::Approx(0.025));
  CHECK(compute_dt(P, 0.1, 0.5, 0.01) == 0.01);
}

TEST_CASE("base step keeps a divergence-free field divergence-free") {
  const SceneConfig c = small_taylor_green();
  SimState s = make_state(c);
  const StepperOptions o = stepper_options(c);
  REQUIRE(o.mode == SchemeMode::Base);
  for (int k = 0; k < 3; ++k) {
    const StepReport r = step(s, c.dt, o);
    CHECK(r.ok());
    CHECK(r.max_abs_divergence <= 1e-6 * max_speed(s.particles) / c.spacing);
  }
  CHECK(s.step == 3);
  CHECK(s.time == doctest::Approx(0.03));
  CHECK(fluid_velocity(s.particles).cols() == s.particles.fluid_count);
}

TEST_CASE("uniform translation with co-moving walls survives projection") {
  const Layout L = lattice(8, 8, 0.25, [](int i, int j) {
    return (i == 0 || j == 0 || i == 7 || j == 7) ? Material::Solid : Material::Fluid;
  });
  const DiscreteOperators ops = assemble_operators(L.diagram());
  const Vec2 c(0.7, -0.3);
  const VectorField u = VectorField(c.replicate(1, ops.rows()));
  const ProblemBoundary bc{.solid_velocity = c};
  const PoissonSolution sol = cg_solve(build_problem(ops, u, ScalarField::Zero(ops.rows()), bc));
  CHECK(sol.ok());
  CHECK((project_velocity(ops, u, sol.p) - u).norm() < 1e-12);
}

TEST_CASE("boundary mode without air matches base mode") {
  const SceneConfig c = small_taylor_green();
  SimState a = make_state(c), b = make_state(c);
  StepperOptions oa = stepper_options(c), ob = oa;
  oa.cg.tolerance = ob.cg.tolerance = 1e-10;
  ob.mode = SchemeMode::Boundary;
  for (int k = 0; k < 25; ++k) {
    step(a, c.dt, oa);
    step(b, c.dt, ob);
    CHECK(max_velocity_gap(a.particles, b.particles) <= 10 * oa.cg.tolerance * max_speed(a.particles) * 10);
  }
}

TEST_CASE("reinitializing every step reproduces the baseline") {
  SceneConfig drop = scene_defaults(SceneId::DropletPool);
  drop.spacing = 1.0 / 24;
  for (auto [c, mode] : {std::pair{small_taylor_green(), SchemeMode::Base}, std::pair{small_taylor_green(), SchemeMode::Boundary},
                         std::pair{drop, SchemeMode::Boundary}}) {
    SimState a = make_state(c), b = make_state(c);
    StepperOptions oa = stepper_options(c), ob = oa;
    oa.mode = mode;
    oa.reinit_period = 1;
    oa.cg.tolerance = ob.cg.tolerance = 1e-10;
    ob.mode = SchemeMode::Baseline;
    for (int k = 0; k < 10; ++k) {
      step(a, c.dt, oa);
      step(b, c.dt, ob);
      CHECK(max_velocity_gap(a.particles, b.particles) <= 10 * oa.cg.tolerance * std::max(1.0, max_speed(b.particles)));
    }
    double dx = 0;
    for (int i = 0; i < a.particles.fluid_count; ++i)
      dx = std::max(dx, (a.particles.position[i] - b.particles.position[i]).norm());
    CHECK(dx < 1e-10);
  }
}

TEST_CASE("first step from rest: boundary and baseline coincide") {
  for (GravityTreatment g : {GravityTreatment::Potential, GravityTreatment::BodyForce}) {
    SceneConfig c = small_pool();
    c.gravity_treatment = g;
    SimState a = make_state(c), b = make_state(c);
    StepperOptions oa = stepper_options(c), ob = oa;
    ob.mode = SchemeMode::Baseline;
    step(a, c.dt, oa);
    step(b, c.dt, ob);
    CHECK(max_velocity_gap(a.particles, b.particles) == 0.0);
    CHECK((a.pressure - b.pressure).norm() == 0.0);
  }
}

TEST_CASE("hydrostatic pool stays at rest") {
  const SceneConfig c = small_pool();
  SimState s = make_state(c);
  const StepperOptions o = stepper_options(c);
  for (int k = 0; k < 40; ++k) REQUIRE(step(s, c.dt, o).ok());
  CHECK(max_speed(s.particles) < 1e-3 * std::sqrt(9.8 * c.pool_height));
  // The reduced pressure p - g.x is flat; p itself rises linearly with depth.
  double lo = 1e9, hi = -1e9;
  for (int r = 0; r < s.ops.rows(); ++r) {
    lo = std::min(lo, s.pressure(r));
    hi = std::max(hi, s.pressure(r));
  }
  CHECK(hi - lo < 1e-6 * 9.8 * c.pool_height);
  CHECK(hi == doctest::Approx(9.8 * c.pool_height).epsilon(1e-6));
}

TEST_CASE("base mode rejects free-surface scenes") {
  SceneConfig c = small_pool();
  SimState s = make_state(c);
  StepperOptions o = stepper_options(c);
  o.mode = SchemeMode::Base;
  CHECK_THROWS_AS(step(s, c.dt, o), std::invalid_argument);
}

TEST_CASE("warm-start check on Taylor-Green") {
  const SceneConfig c = small_taylor_green();
  SimState s = make_state(c);
  StepperOptions o = stepper_options(c);
  o.check_warm_start = true;
  for (int k = 0; k < 10; ++k) {
    const StepReport r = step(s, c.dt, o);
    REQUIRE(r.warm_start.has_value());
    CHECK(r.warm_start->equivalent);
    CHECK(r.warm_start->long_iterations <= r.warm_start->short_iterations);
  }
}

TEST_CASE("resample_air") {
  SUBCASE("submerged box has no air") {
    SceneConfig c = small_pool();
    c.pool_height = 1.0;
    const SimState s = make_state(c);
    CHECK(s.particles.air_count() == 0);
  }
  SUBCASE("flat pool gets lattice air layers") {
    const SceneConfig c = small_pool();
    SimState s = make_state(c);
    const double h = c.spacing;
    const int n = static_cast<int>(std::lround(1.0 / h));
    // The band is exclusive: at 2h only the first lattice row qualifies.
    const std::vector<Vec2> air = air_positions(s.particles);
    REQUIRE(air.size() == static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) CHECK((air[i] - Vec2((i + 0.5) * h, c.pool_height + 0.5 * h)).norm() < 1e-12);
    resample_air(s, c.air_band * h, 0.8 * h);
    CHECK(air_positions(s.particles) == air);
    resample_air(s, 2.5 * h, 0.8 * h);
    const std::vector<Vec2> two = air_positions(s.particles);
    REQUIRE(two.size() == static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) CHECK((two[n + i] - Vec2((i + 0.5) * h, c.pool_height + 1.5 * h)).norm() < 1e-12);
  }
  SUBCASE("air follows a rising pool and never enters the fluid") {
    const SceneConfig c = small_pool();
    SimState s = make_state(c);
    const double h = c.spacing;
    for (int i = 0; i < s.particles.fluid_count; ++i) s.particles.position[i].y() += h;
    resample_air(s, c.air_band * h, 0.8 * h);
    int top_row = 0;
    for (const Vec2& a : air_positions(s.particles)) {
      CHECK(std::abs(a.y() - (c.pool_height + 0.5 * h)) > 0.1 * h);
      top_row += std::abs(a.y() - (c.pool_height + 1.5 * h)) < 1e-12;
      for (int i = 0; i < s.particles.fluid_count; ++i) CHECK((s.particles.position[i] - a).norm() >= 0.8 * h);
    }
    CHECK(top_row == static_cast<int>(std::lround(1.0 / h)));
  }
}

TEST_CASE("lloyd_regularize") {
  SUBCASE("centroidal lattice does not move") {
    const SceneConfig c = small_taylor_green();
    SimState s = make_state(c);
    const std::vector<Vec2> before = s.particles.position;
    lloyd_regularize(s.particles, *s.diagram);
    for (int i = 0; i < s.particles.fluid_count; ++i) CHECK((s.particles.position[i] - before[i]).norm() < 1e-12);
  }
  SUBCASE("perturbed lattice converges monotonically") {
    SceneConfig c = small_taylor_green();
    c.jitter = 0.4;
    c.tg_amplitude = 0;
    SimState s = make_state(c);
    double prev = 1e9;
    for (int k = 0; k < 10; ++k) {
      double worst = 0;
      for (int i = 0; i < s.particles.fluid_count; ++i)
        worst = std::max(worst, (s.diagram->cells[i].centroid - s.particles.position[i]).norm());
      CHECK(worst < prev);
      prev = worst;
      lloyd_regularize(s.particles, *s.diagram);
      rebuild_geometry(s);
    }
  }
  SUBCASE("disabled regularization leaves the advected positions") {
    SceneConfig c = small_taylor_green();
    c.lloyd = false;
    SimState s = make_state(c);
    std::vector<Vec2> expected = s.particles.position;
    for (int i = 0; i < s.particles.fluid_count; ++i) expected[i] += c.dt * s.particles.velocity[i];
    step(s, c.dt, stepper_options(c));
    for (int i = 0; i < s.particles.fluid_count; ++i) CHECK((s.particles.position[i] - expected[i]).norm() < 1e-15);
  }
}

TEST_CASE("droplet fusion and naive variants run") {
  SceneConfig c = scene_defaults(SceneId::DropletPool);
  c.spacing = 1.0 / 24;
  for (SurfaceTreatment t : {SurfaceTreatment::Fusion, SurfaceTreatment::Naive}) {
    c.surface = t;
    SimState s = make_state(c);
    const StepperOptions o = stepper_options(c);
    for (int k = 0; k < 10; ++k) CHECK(step(s, c.dt, o).ok());
    CHECK(max_speed(s.particles) > 0.1);  // the droplet is falling
  }
}
