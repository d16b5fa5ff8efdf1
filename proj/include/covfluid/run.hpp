#pragma once

#include <functional>
#include <iosfwd>

#include "covfluid/diagnostics.hpp"
#include "covfluid/scenes.hpp"

namespace covfluid {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitIo = 4 };

/// Called after every completed step with the state and its record.
using StepObserver = std::function<void(const SimState&, const StepReport&, const DiagnosticsRecord&)>;

/// Runs `cfg.steps` steps, writing energy.csv, frames and config_resolved.txt
/// into cfg.output_dir. Diagnostics for failures go to `err`.
int run(const SceneConfig& cfg, std::ostream& err, const StepObserver& observer = {});

}  // namespace covfluid
