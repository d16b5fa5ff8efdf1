#pragma once

#include <functional>
#include <random>
#include <vector>

#include "covfluid/operators.hpp"
#include "covfluid/voronoi.hpp"

namespace covfluid::testing {

struct Layout {
  std::vector<Vec2> points;
  std::vector<Material> kinds;
  Box box;
  double spacing = 1;

  VoronoiDiagram diagram() const { return build_diagram(points, kinds, box, {.spacing = spacing}); }
};

// nx x ny lattice at spacing h with sites at (i + 1/2, j + 1/2) h; kind(i, j) picks the material.
inline Layout lattice(int nx, int ny, double h,
                      const std::function<Material(int, int)>& kind = [](int, int) { return Material::Fluid; }) {
  Layout L;
  L.box = {Vec2::Zero(), Vec2(nx * h, ny * h)};
  L.spacing = h;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      L.points.push_back(h * Vec2(i + 0.5, j + 0.5));
      L.kinds.push_back(kind(i, j));
    }
  return L;
}

// Jittered lattice with a solid ring, an air patch at the top and fluid elsewhere.
inline Layout random_layout(std::mt19937_64& rng, int n_target, bool with_air) {
  const int n = std::max(4, static_cast<int>(std::sqrt(static_cast<double>(n_target))));
  std::uniform_real_distribution<double> jit(-0.3, 0.3);
  Layout L = lattice(n, n, 1.0, [&](int i, int j) {
    if (i == 0 || j == 0 || i == n - 1 || j == n - 1) return Material::Solid;
    if (with_air && j >= n - 3) return Material::Air;
    return Material::Fluid;
  });
  for (Vec2& p : L.points) p += Vec2(jit(rng), jit(rng));
  return L;
}

// Facet-by-facet reference for D v, written from the volume-gradient formula.
inline ScalarField reference_divergence(const VoronoiDiagram& d, const DiscreteOperators& ops,
                                        const VectorField& v) {
  ScalarField out = ScalarField::Zero(ops.rows());
  for (const VoronoiFacet& f : d.facets) {
    const double w = f.length / f.l;
    for (int side = 0; side < 2; ++side) {
      const int i = side == 0 ? f.cell_a : f.cell_b;
      const int j = f.other(i);
      const int ri = ops.row_of_cell[i];
      if (ri < 0) continue;
      const int rj = ops.row_of_cell[j];
      const Vec2 xi = d.sites[i], xj = d.sites[j], b = f.centroid;
      if (d.kinds[j] == Material::Fluid)
        out(ri) += w * ((xj - b).dot(v.col(rj)) + (b - xi).dot(v.col(ri)));
      else if (d.kinds[j] == Material::Air)
        out(ri) += w * (xj - xi).dot(v.col(ri));
    }
  }
  return out;
}

inline VectorField field_from(const VoronoiDiagram& d, const DiscreteOperators& ops,
                              const std::function<Vec2(const Vec2&)>& f) {
  VectorField v(2, ops.rows());
  for (int r = 0; r < ops.rows(); ++r) v.col(r) = f(d.sites[ops.fluid_cells[r]]);
  return v;
}

inline ScalarField scalar_from(const VoronoiDiagram& d, const DiscreteOperators& ops,
                               const std::function<double(const Vec2&)>& f) {
  ScalarField s(ops.rows());
  for (int r = 0; r < ops.rows(); ++r) s(r) = f(d.sites[ops.fluid_cells[r]]);
  return s;
}

// Rows whose four lattice neighbours are all fluid.
inline std::vector<int> interior_rows(const VoronoiDiagram& d, const DiscreteOperators& ops) {
  std::vector<int> out;
  for (int r = 0; r < ops.rows(); ++r) {
    const int c = ops.fluid_cells[r];
    int fluid_nb = 0;
    for (int j : d.neighbors(c)) fluid_nb += d.kinds[j] == Material::Fluid;
    if (fluid_nb == 4 && d.cells[c].facet_ids.size() == 4) out.push_back(r);
  }
  return out;
}

}  // namespace covfluid::testing
