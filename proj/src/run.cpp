#include "covfluid/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "covfluid/config.hpp"
#include "covfluid/output.hpp"

namespace covfluid {

namespace fs = std::filesystem;

namespace {

void write_outputs(const SceneConfig& cfg, const fs::path& dir, const SimState& s) {
  write_frame((dir / frame_name(s.step)).string(), s);
  if (cfg.dump_voronoi && s.diagram) {
    char name[32];
    std::snprintf(name, sizeof name, "voronoi_%06d.txt", s.step);
    write_voronoi((dir / name).string(), *s.diagram);
  }
}

bool finite_state(const Particles& P) {
  for (int i = 0; i < P.fluid_count; ++i)
    if (!P.position[i].allFinite() || !P.velocity[i].allFinite()) return false;
  return true;
}

}  // namespace

int run(const SceneConfig& cfg, std::ostream& err, const StepObserver& observer) {
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  const fs::path dir(cfg.output_dir);
  try {
    fs::create_directories(dir);
    std::ofstream resolved(dir / "config_resolved.txt");
    if (!resolved) throw IoError("cannot write config_resolved.txt");
    write_resolved_config(resolved, cfg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }

  try {
    SimState state = make_state(cfg);
    const StepperOptions opts = stepper_options(cfg);
    EnergyWriter energy((dir / "energy.csv").string());
    write_outputs(cfg, dir, state);

    for (int k = 1; k <= cfg.steps; ++k) {
      const double dt =
          cfg.adaptive_dt ? compute_dt(state.particles, cfg.spacing, cfg.cfl, cfg.dt_max) : cfg.dt;
      const auto t0 = std::chrono::steady_clock::now();
      const StepReport rep = step(state, dt, opts);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      if (!rep.ok() || !finite_state(state.particles)) {
        err << "error: step " << k << ": Poisson solve " << to_string(rep.status) << " (relative residual "
            << rep.cg_residual << " after " << rep.cg_iterations << " iterations)\n";
        return kExitSolver;
      }
      const DiagnosticsRecord rec = diagnose(state, rep, cfg.wall_clock ? ms : 0.0);
      energy.write(rec);
      if (observer) observer(state, rep, rec);
      if ((cfg.frame_every > 0 && k % cfg.frame_every == 0) || k == cfg.steps) write_outputs(cfg, dir, state);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace covfluid
