#include "covfluid/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include "covfluid/polygon.hpp"
#include "covfluid/spatial_grid.hpp"

namespace covfluid {

const char* to_string(Material m) {
  switch (m) {
    case Material::Fluid: return "fluid";
    case Material::Solid: return "solid";
    case Material::Air: return "air";
  }
  return "?";
}

FacetKind classify_facet(Material a, Material b) {
  if (a == Material::Fluid && b == Material::Fluid) return FacetKind::FluidFluid;
  if (a == Material::Fluid || b == Material::Fluid) {
    const Material other = a == Material::Fluid ? b : a;
    return other == Material::Air ? FacetKind::FluidAir : FacetKind::FluidSolid;
  }
  return FacetKind::Other;
}

std::vector<int> VoronoiDiagram::neighbors(int cell) const {
  std::vector<int> out;
  out.reserve(cells[cell].facet_ids.size());
  for (int f : cells[cell].facet_ids) out.push_back(facets[f].other(cell));
  return out;
}

namespace {

constexpr double kDuplicateTol = 1e-12;   // x box diagonal
constexpr double kNearDuplicate = 1e-9;   // x spacing
constexpr double kFacetMin = 1e-10;       // x spacing
constexpr double kVolumeFloor = 1e-12;    // x spacing^2

struct EdgeRecord {
  int neighbor;
  Vec2 p;
  Vec2 q;
};

void check_input(std::span<const Vec2> points, std::span<const Material> kinds, const Box& domain) {
  if (points.size() != kinds.size())
    throw SizeMismatch("build_diagram: points and kinds differ in length");
  if (points.size() < 3)
    throw GeometryError(GeometryError::Kind::DegenerateInput, "build_diagram: need at least 3 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite() || !domain.contains_strict(points[i]))
      throw GeometryError(GeometryError::Kind::OutOfDomain,
                          "build_diagram: point " + std::to_string(i) + " is outside the domain");
  }
  // Collinear-only sets have no bounded 2D structure worth discretizing.
  const Vec2 p0 = points[0];
  std::size_t far = 0;
  for (std::size_t i = 1; i < points.size(); ++i)
    if ((points[i] - p0).squaredNorm() > (points[far] - p0).squaredNorm()) far = i;
  const Vec2 axis = points[far] - p0;
  double max_cross = 0;
  for (const Vec2& p : points) {
    const Vec2 r = p - p0;
    max_cross = std::max(max_cross, std::abs(axis.x() * r.y() - axis.y() * r.x()));
  }
  if (max_cross <= 1e-12 * axis.norm() * domain.diagonal())
    throw GeometryError(GeometryError::Kind::DegenerateInput, "build_diagram: points are collinear");
}

std::vector<Vec2> separate_sites(std::span<const Vec2> points, const Box& domain, double spacing) {
  std::vector<Vec2> sites(points.begin(), points.end());
  const SpatialGrid grid(points, domain, spacing);
  const double dup = kDuplicateTol * domain.diagonal();
  const double near = kNearDuplicate * spacing;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector2i c = grid.cell_of(points[i]);
    bool perturb = false;
    for (int r = 0; r <= 1; ++r) {
      grid.for_each_in_ring(c, r, [&](int j) {
        if (static_cast<std::size_t>(j) >= i) return;
        const double d = (points[j] - points[i]).norm();
        if (d <= dup)
          throw GeometryError(GeometryError::Kind::DegenerateInput,
                              "build_diagram: duplicate points " + std::to_string(j) + " and " +
                                  std::to_string(i));
        if (d < near) perturb = true;
      });
    }
    if (perturb) sites[i].x() += near;
  }
  return sites;
}

LabeledPolygon<double> clip_cell(int i, std::span<const Vec2> sites, const SpatialGrid& grid,
                                 const Box& domain) {
  LabeledPolygon<double> poly = box_polygon<double>(domain.lo, domain.hi);
  const Vec2& xi = sites[i];
  const Eigen::Vector2i c = grid.cell_of(xi);
  const double cs = grid.cell_size();
  for (int r = 0;; ++r) {
    const bool inside = grid.for_each_in_ring(c, r, [&](int j) {
      if (j == i || poly.empty()) return;
      const Vec2 d = sites[j] - xi;
      poly = clip_half_plane<double>(poly, 0.5 * (xi + sites[j]), d, j);
    });
    if (!inside || poly.empty()) break;
    double rmax2 = 0;
    for (const Vec2& v : poly.vertices) rmax2 = std::max(rmax2, (v - xi).squaredNorm());
    // Unvisited generators are at least r*cs away; their bisectors cannot cut.
    if (r * cs >= 2.0 * std::sqrt(rmax2)) break;
  }
  return poly;
}

}  // namespace

VoronoiDiagram build_diagram(std::span<const Vec2> points, std::span<const Material> kinds,
                             const Box& domain, const DiagramOptions& options) {
  check_input(points, kinds, domain);
  const std::size_t n = points.size();

  VoronoiDiagram diagram;
  diagram.domain = domain;
  diagram.spacing =
      options.spacing > 0 ? options.spacing : std::sqrt(domain.area() / static_cast<double>(n));
  diagram.volume_floor = kVolumeFloor * diagram.spacing * diagram.spacing;
  diagram.kinds.assign(kinds.begin(), kinds.end());
  diagram.sites = separate_sites(points, domain, diagram.spacing);

  const SpatialGrid grid(diagram.sites, domain, options.search_cell * diagram.spacing);
  diagram.cells.resize(n);
  std::vector<std::vector<EdgeRecord>> edges(n);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const int i = static_cast<int>(ii);
    const LabeledPolygon<double> poly = clip_cell(i, diagram.sites, grid, domain);
    VoronoiCell& cell = diagram.cells[i];
    cell.particle_id = i;
    cell.polygon = poly.vertices;
    const auto [area, centroid] = area_centroid(poly.vertices);
    cell.area = std::max(area, 0.0);
    cell.volume = std::max(cell.area, diagram.volume_floor);
    cell.centroid = poly.empty() ? diagram.sites[i] : centroid;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const int j = poly.labels[k];
      if (j < 0) continue;
      const Vec2& p = poly.vertices[k];
      const Vec2& q = poly.vertices[(k + 1) % poly.size()];
      auto it = std::find_if(edges[i].begin(), edges[i].end(),
                             [j](const EdgeRecord& e) { return e.neighbor == j; });
      if (it == edges[i].end()) {
        edges[i].push_back({j, p, q});
      } else if ((q - p).squaredNorm() > (it->q - it->p).squaredNorm()) {
        *it = {j, p, q};
      }
    }
  }

  // Each shared edge becomes one facet, taken from the lower-id cell when that
  // side resolved it and from the higher-id cell otherwise.
  const double min_len = kFacetMin * diagram.spacing;
  auto pair_key = [n](int a, int b) { return static_cast<std::uint64_t>(a) * n + b; };
  std::unordered_map<std::uint64_t, int> seen;
  for (std::size_t i = 0; i < n; ++i)
    for (const EdgeRecord& e : edges[i])
      if (static_cast<std::size_t>(e.neighbor) > i && (e.q - e.p).norm() >= min_len)
        seen.emplace(pair_key(static_cast<int>(i), e.neighbor), static_cast<int>(i));
  for (std::size_t i = 0; i < n; ++i)
    for (const EdgeRecord& e : edges[i])
      if (static_cast<std::size_t>(e.neighbor) < i && (e.q - e.p).norm() >= min_len)
        seen.emplace(pair_key(e.neighbor, static_cast<int>(i)), static_cast<int>(i));

  std::vector<std::pair<std::uint64_t, int>> order(seen.begin(), seen.end());
  std::sort(order.begin(), order.end());
  diagram.facets.reserve(order.size());
  for (const auto& [key, owner] : order) {
    const int a = static_cast<int>(key / n);
    const int b = static_cast<int>(key % n);
    const int other = owner == a ? b : a;
    const auto& rec = *std::find_if(edges[owner].begin(), edges[owner].end(),
                                    [other](const EdgeRecord& e) { return e.neighbor == other; });
    VoronoiFacet f;
    f.cell_a = a;
    f.cell_b = b;
    const Vec2& xa = diagram.sites[a];
    const Vec2& xb = diagram.sites[b];
    f.length = (rec.q - rec.p).norm();
    f.centroid = 0.5 * (rec.p + rec.q);
    f.l = (xb - xa).norm();
    f.normal = (xb - xa) / f.l;
    f.d_a = std::abs((f.centroid - xa).dot(f.normal));
    f.d_b = std::abs((xb - f.centroid).dot(f.normal));
    f.kind = classify_facet(diagram.kinds[a], diagram.kinds[b]);
    const int id = static_cast<int>(diagram.facets.size());
    diagram.cells[a].facet_ids.push_back(id);
    diagram.cells[b].facet_ids.push_back(id);
    diagram.facets.push_back(f);
  }
  return diagram;
}

std::pair<double, Vec2> cell_geometry(const VoronoiDiagram& diagram, int cell_id) {
  if (cell_id < 0 || static_cast<std::size_t>(cell_id) >= diagram.cells.size())
    throw GeometryError(GeometryError::Kind::InvalidId, "cell_geometry: invalid cell id");
  const VoronoiCell& c = diagram.cells[cell_id];
  return {c.volume, c.centroid};
}

void write_polygons(const VoronoiDiagram& diagram, std::ostream& os) {
  const auto prec = os.precision(17);
  for (const VoronoiCell& c : diagram.cells) {
    os << c.particle_id << ' ' << to_string(diagram.kinds[c.particle_id]);
    for (const Vec2& v : c.polygon) os << ' ' << v.x() << ' ' << v.y();
    os << '\n';
  }
  os.precision(prec);
}

}  // namespace covfluid
