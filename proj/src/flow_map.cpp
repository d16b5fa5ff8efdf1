#include "covfluid/flow_map.hpp"

#include <algorithm>
#include <deque>

#include <Eigen/LU>

namespace covfluid {

void advect_positions(Particles& particles, double dt) {
  for (int i = 0; i < particles.fluid_count; ++i) particles.position[i] += dt * particles.velocity[i];
}

void clamp_to_box(Particles& particles, const Box& box, double margin) {
  const Vec2 lo = box.lo + Vec2::Constant(margin);
  const Vec2 hi = box.hi - Vec2::Constant(margin);
  for (int i = 0; i < particles.fluid_count; ++i)
    particles.position[i] = particles.position[i].cwiseMax(lo).cwiseMin(hi);
}

std::optional<Mat2> estimate_jacobian(const Vec2& x_init, const Vec2& x_now,
                                      std::span<const NeighborSample> neighbors) {
  Mat2 sr = Mat2::Zero();
  Mat2 rr = Mat2::Zero();
  for (const NeighborSample& n : neighbors) {
    const Vec2 ds = n.x_init - x_init;
    const Vec2 dr = n.x_now - x_now;
    sr.noalias() += n.weight * ds * dr.transpose();
    rr.noalias() += n.weight * dr * dr.transpose();
  }
  const double scale = 0.5 * rr.trace();
  if (!(scale > 0)) return std::nullopt;
  if (rr.determinant() <= 1e-8 * scale * scale) return std::nullopt;
  const Mat2 T = sr * rr.inverse();
  if (!T.allFinite()) return std::nullopt;
  return T;
}

void estimate_jacobians(Particles& particles, const VoronoiDiagram& diagram) {
  const int nf = particles.fluid_count;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nf; ++i) {
    std::vector<NeighborSample> samples;
    samples.reserve(diagram.cells[i].facet_ids.size());
    for (int f : diagram.cells[i].facet_ids) {
      const VoronoiFacet& facet = diagram.facets[f];
      const int j = facet.other(i);
      if (j < nf) samples.push_back({particles.flow[j].x_init, particles.position[j], facet.length / facet.l});
    }
    FlowMapState& fm = particles.flow[i];
    if (auto T = estimate_jacobian(fm.x_init, particles.position[i], samples)) {
      fm.T = *T;
    } else {
      fm.rank_deficient = true;
    }
  }
}

Mat2 evolve_jacobian(const Mat2& T, const Mat2& grad_u, double dt) {
  return T * (Mat2::Identity() - dt * grad_u);
}

Vec2 map_velocity(const FlowMapState& state) {
  return state.T.transpose() * state.u_init + state.gravity_acc;
}

Vec2 fuse_to_advected(const Vec2& u_mapped, const Vec2& grad_lambda_acc, const Vec2& grad_half_u2,
                      double dt) {
  return u_mapped - grad_lambda_acc + dt * grad_half_u2;
}

void accumulate_lambda(FlowMapState& state, double p, const Vec2& u, double dt) {
  state.lambda_acc += (p - 0.5 * u.squaredNorm()) * dt;
}

std::vector<char> near_surface_cells(const VoronoiDiagram& diagram, int layers) {
  const std::size_t n = diagram.cells.size();
  std::vector<int> depth(n, -1);
  std::deque<int> queue;
  for (std::size_t c = 0; c < n; ++c) {
    if (diagram.kinds[c] != Material::Fluid) continue;
    for (int f : diagram.cells[c].facet_ids) {
      if (diagram.facets[f].kind == FacetKind::FluidAir) {
        depth[c] = 0;
        queue.push_back(static_cast<int>(c));
        break;
      }
    }
  }
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    if (depth[c] >= layers) continue;
    for (int f : diagram.cells[c].facet_ids) {
      const VoronoiFacet& facet = diagram.facets[f];
      if (facet.kind != FacetKind::FluidFluid) continue;
      const int o = facet.other(c);
      if (depth[o] < 0) {
        depth[o] = depth[c] + 1;
        queue.push_back(o);
      }
    }
  }
  std::vector<char> flags(n, 0);
  for (std::size_t c = 0; c < n; ++c) flags[c] = depth[c] >= 0;
  return flags;
}

void flag_near_surface(Particles& particles, const VoronoiDiagram& diagram, int layers, bool sticky) {
  const std::vector<char> flags = near_surface_cells(diagram, layers);
  for (int i = 0; i < particles.fluid_count; ++i) {
    FlowMapState& fm = particles.flow[i];
    fm.near_surface = flags[i] || (sticky && fm.near_surface);
  }
}

void reinitialize(Particles& particles) {
  for (int i = 0; i < particles.fluid_count; ++i) {
    FlowMapState& fm = particles.flow[i];
    fm = FlowMapState{};
    fm.x_init = particles.position[i];
    fm.u_init = particles.velocity[i];
  }
}

}  // namespace covfluid
