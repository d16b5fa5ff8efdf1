#include "covfluid/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "covfluid/spatial_grid.hpp"

namespace covfluid {

ScalarField compute_vorticity(const DiscreteOperators& ops, const VectorField& u) {
  if (u.cols() != ops.rows()) throw SizeMismatch("compute_vorticity: field length mismatch");
  const VectorField gx = gradient(ops, u.row(0).transpose(), SurfaceValue::Own);
  const VectorField gy = gradient(ops, u.row(1).transpose(), SurfaceValue::Own);
  return gy.row(0).transpose() - gx.row(1).transpose();
}

double kinetic_energy(const DiscreteOperators& ops, const VectorField& u) {
  const double vol = ops.volumes.sum();
  if (vol <= 0) return 0;
  return 0.5 * u.colwise().squaredNorm().dot(ops.volumes) / vol;
}

double total_circulation(const DiscreteOperators& ops, const ScalarField& vorticity) {
  return vorticity.dot(ops.volumes);
}

DiagnosticsRecord diagnose(const SimState& state, const StepReport& report, double wall_ms) {
  DiagnosticsRecord r;
  r.step = state.step;
  r.time = state.time;
  const VectorField u = fluid_velocity(state.particles);
  r.kinetic_energy = kinetic_energy(state.ops, u);
  r.max_abs_divergence = report.max_abs_divergence;
  r.total_circulation = total_circulation(state.ops, compute_vorticity(state.ops, u));
  r.cg_iterations = report.cg_iterations;
  r.cg_residual = report.cg_residual;
  r.wall_ms = wall_ms;
  return r;
}

std::vector<int> vortex_extrema(const VoronoiDiagram& diagram, const DiscreteOperators& ops,
                                const ScalarField& vorticity) {
  const int n = ops.rows();
  std::vector<int> out;
  if (n == 0) return out;
  const ScalarField mag = vorticity.cwiseAbs();
  const double half = 0.5 * mag.maxCoeff();

  auto fluid_neighbors = [&](int row, std::vector<int>& acc) {
    for (int f : diagram.cells[ops.fluid_cells[row]].facet_ids) {
      const int r = ops.row_of_cell[diagram.facets[f].other(ops.fluid_cells[row])];
      if (r >= 0) acc.push_back(r);
    }
  };

  std::vector<int> ring1, ring2;
  for (int i = 0; i < n; ++i) {
    if (mag(i) <= half) continue;
    ring1.clear();
    ring2.clear();
    fluid_neighbors(i, ring1);
    for (int j : ring1) fluid_neighbors(j, ring2);
    ring2.insert(ring2.end(), ring1.begin(), ring1.end());
    const bool is_max = std::all_of(ring2.begin(), ring2.end(), [&](int j) {
      return j == i || mag(i) > mag(j) || (mag(i) == mag(j) && i < j);
    });
    if (is_max) out.push_back(i);
  }
  std::stable_sort(out.begin(), out.end(), [&](int a, int b) { return mag(a) > mag(b); });
  return out;
}

namespace {

// Fluid sites bucketed for radius queries.
struct RowSites {
  RowSites(const VoronoiDiagram& diagram, const DiscreteOperators& ops, double cell) {
    for (int r = 0; r < ops.rows(); ++r) sites.push_back(diagram.sites[ops.fluid_cells[r]]);
    Box box{sites.front(), sites.front()};
    for (const Vec2& x : sites) {
      box.lo = box.lo.cwiseMin(x);
      box.hi = box.hi.cwiseMax(x);
    }
    grid = SpatialGrid(sites, box, cell);
  }

  // f(row, squared distance) for rows within `radius` of row i.
  template <typename F>
  void for_each_within(int i, double radius, F&& f) const {
    const Vec2& x = sites[i];
    const Eigen::Vector2i c = grid.cell_of(x);
    const int rings = static_cast<int>(std::ceil(radius / grid.cell_size()));
    for (int k = 0; k <= rings; ++k)
      if (!grid.for_each_in_ring(c, k, [&](int j) {
            const double d2 = (sites[j] - x).squaredNorm();
            if (d2 <= radius * radius) f(j, d2);
          }))
        break;
  }

  std::vector<Vec2> sites;
  SpatialGrid grid;
};

}  // namespace

ScalarField smooth_vorticity(const VoronoiDiagram& diagram, const DiscreteOperators& ops,
                             const ScalarField& vorticity, double radius) {
  if (vorticity.size() != ops.rows()) throw SizeMismatch("smooth_vorticity: field length mismatch");
  const RowSites grid(diagram, ops, radius);
  ScalarField out(ops.rows());
  for (int i = 0; i < ops.rows(); ++i) {
    double num = 0, den = 0;
    grid.for_each_within(i, 3 * radius, [&](int j, double d2) {
      const double w = ops.volumes(j) * std::exp(-d2 / (radius * radius));
      num += w * vorticity(j);
      den += w;
    });
    out(i) = num / den;
  }
  return out;
}

std::vector<int> distinct_vortices(const VoronoiDiagram& diagram, const DiscreteOperators& ops,
                                   const ScalarField& vorticity, double radius) {
  std::vector<int> out;
  if (ops.rows() == 0) return out;
  const ScalarField mag = smooth_vorticity(diagram, ops, vorticity, radius).cwiseAbs();
  const double half = 0.5 * mag.maxCoeff();
  const RowSites grid(diagram, ops, radius);
  for (int i = 0; i < ops.rows(); ++i) {
    if (mag(i) <= half) continue;
    bool is_max = true;
    grid.for_each_within(i, radius, [&](int j, double) {
      if (j != i && (mag(j) > mag(i) || (mag(j) == mag(i) && j < i))) is_max = false;
    });
    if (is_max) out.push_back(i);
  }
  std::stable_sort(out.begin(), out.end(), [&](int a, int b) { return mag(a) > mag(b); });
  return out;
}

double strongest_pair_distance(const VoronoiDiagram& diagram, const DiscreteOperators& ops,
                               const ScalarField& vorticity) {
  const std::vector<int> ext = vortex_extrema(diagram, ops, vorticity);
  if (ext.size() < 2) return 0;
  return (diagram.sites[ops.fluid_cells[ext[0]]] - diagram.sites[ops.fluid_cells[ext[1]]]).norm();
}

}  // namespace covfluid
