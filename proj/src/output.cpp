#include "covfluid/output.hpp"

#include <cstdio>

#include "covfluid/format.hpp"

namespace covfluid {

EnergyWriter::EnergyWriter(const std::string& path) : out_(path), path_(path) {
  if (!out_) throw IoError("cannot open '" + path + "' for writing");
  out_ << kEnergyHeader << '\n';
  out_.flush();
}

void EnergyWriter::write(const DiagnosticsRecord& r) {
  out_ << r.step << ',' << format_number(r.time) << ',' << format_number(r.kinetic_energy) << ','
       << format_number(r.max_abs_divergence) << ',' << format_number(r.total_circulation) << ','
       << r.cg_iterations << ',' << format_number(r.cg_residual) << ',' << format_number(r.wall_ms) << '\n';
  out_.flush();
  if (!out_) throw IoError("write to '" + path_ + "' failed");
}

std::string frame_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d.csv", index);
  return buf;
}

void write_frame(const std::string& path, const SimState& state) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const Particles& P = state.particles;
  ScalarField omega;
  if (state.ops.rows() == P.fluid_count) omega = compute_vorticity(state.ops, fluid_velocity(P));
  out << kFrameHeader << '\n';
  for (int i = 0; i < P.size(); ++i) {
    out << P.id[i] << ',' << to_string(P.kind[i]) << ',' << format_number(P.position[i].x()) << ','
        << format_number(P.position[i].y()) << ',' << format_number(P.velocity[i].x()) << ','
        << format_number(P.velocity[i].y()) << ',';
    if (i < P.fluid_count && omega.size() > 0) out << format_number(omega(i));
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

void write_voronoi(const std::string& path, const VoronoiDiagram& diagram) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_polygons(diagram, out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace covfluid
