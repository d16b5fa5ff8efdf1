#pragma once

#include <span>
#include <utility>
#include <vector>

#include "covfluid/types.hpp"

namespace covfluid {

enum class FacetKind : std::uint8_t { FluidFluid, FluidAir, FluidSolid, Other };

FacetKind classify_facet(Material a, Material b);

struct VoronoiCell {
  int particle_id = -1;
  double area = 0;    // exact polygon area
  double volume = 0;  // area clamped to the degenerate-cell floor
  Vec2 centroid = Vec2::Zero();
  std::vector<int> facet_ids;
  std::vector<Vec2> polygon;  // counter-clockwise
};

/// Shared edge between the cells of generators a and b.
struct VoronoiFacet {
  int cell_a = -1;
  int cell_b = -1;
  double length = 0;             // A_ab
  Vec2 centroid = Vec2::Zero();  // b_ab
  Vec2 normal = Vec2::Zero();    // unit, from a toward b
  double l = 0;                  // |x_a - x_b|
  double d_a = 0;
  double d_b = 0;
  FacetKind kind = FacetKind::Other;

  int other(int cell) const { return cell == cell_a ? cell_b : cell_a; }
};

struct DiagramOptions {
  /// Mean particle spacing; 0 derives it from the box area and point count.
  double spacing = 0;
  /// Grid cell size of the candidate search, in units of spacing.
  double search_cell = 1.0;
};

struct VoronoiDiagram {
  Box domain;
  double spacing = 0;
  double volume_floor = 0;
  std::vector<Vec2> sites;  // generators after the near-duplicate tie-break
  std::vector<Material> kinds;
  std::vector<VoronoiCell> cells;
  std::vector<VoronoiFacet> facets;

  std::size_t size() const { return cells.size(); }
  /// Generator ids adjacent to `cell`, in facet order.
  std::vector<int> neighbors(int cell) const;
};

/// Bounded Voronoi diagram of `points` clipped to `domain` by per-cell
/// half-plane clipping. Throws GeometryError on duplicate, collinear-only or
/// out-of-domain input.
VoronoiDiagram build_diagram(std::span<const Vec2> points, std::span<const Material> kinds,
                             const Box& domain, const DiagramOptions& options = {});

/// (volume, centroid) of a cell; volume carries the degenerate-cell floor.
std::pair<double, Vec2> cell_geometry(const VoronoiDiagram& diagram, int cell_id);

/// Plain-text polygon dump: one line per cell, `id kind x0 y0 x1 y1 ...`.
void write_polygons(const VoronoiDiagram& diagram, std::ostream& os);

}  // namespace covfluid
