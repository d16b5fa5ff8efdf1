#pragma once

#include <fstream>
#include <string>

#include "covfluid/diagnostics.hpp"

namespace covfluid {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kEnergyHeader =
    "step,time,kinetic_energy,max_abs_divergence,total_circulation,cg_iterations,cg_residual,wall_ms";
inline constexpr const char* kFrameHeader = "id,kind,x,y,u,v,vorticity";

/// Appends one DiagnosticsRecord per line; flushes every record.
class EnergyWriter {
 public:
  explicit EnergyWriter(const std::string& path);
  void write(const DiagnosticsRecord& r);

 private:
  std::ofstream out_;
  std::string path_;
};

/// frame_NNNNNN.csv name for a frame index.
std::string frame_name(int index);

/// Particle snapshot; vorticity is left empty for non-fluid particles.
void write_frame(const std::string& path, const SimState& state);

void write_voronoi(const std::string& path, const VoronoiDiagram& diagram);

}  // namespace covfluid
