#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "covfluid/types.hpp"

namespace covfluid {

/// Uniform bucket grid over a box, stored in CSR form. Points inside a bucket
/// keep their input order, so traversal is deterministic.
class SpatialGrid {
 public:
  SpatialGrid() = default;

  SpatialGrid(std::span<const Vec2> points, const Box& box, double cell_size)
      : origin_(box.lo), cell_(cell_size) {
    nx_ = std::max(1, static_cast<int>(std::ceil(box.width() / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(box.height() / cell_)));
    start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    std::vector<int> bucket(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      bucket[i] = flat(cell_of(points[i]));
      ++start_[bucket[i] + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    items_.resize(points.size());
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) items_[fill[bucket[i]]++] = static_cast<int>(i);
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double cell_size() const { return cell_; }

  Eigen::Vector2i cell_of(const Vec2& p) const {
    const int ix = static_cast<int>(std::floor((p.x() - origin_.x()) / cell_));
    const int iy = static_cast<int>(std::floor((p.y() - origin_.y()) / cell_));
    return {std::clamp(ix, 0, nx_ - 1), std::clamp(iy, 0, ny_ - 1)};
  }

  std::span<const int> bucket(int ix, int iy) const {
    const int c = iy * nx_ + ix;
    return {items_.data() + start_[c], items_.data() + start_[c + 1]};
  }

  /// Calls f(index) for every point in the buckets at Chebyshev ring `r`
  /// around `c`. Returns false once the ring lies entirely outside the grid.
  template <typename F>
  bool for_each_in_ring(const Eigen::Vector2i& c, int r, F&& f) const {
    if (r == 0) {
      for (int idx : bucket(c.x(), c.y())) f(idx);
      return true;
    }
    const int x0 = c.x() - r, x1 = c.x() + r, y0 = c.y() - r, y1 = c.y() + r;
    if (x0 < 0 && y0 < 0 && x1 >= nx_ && y1 >= ny_) return false;
    for (int iy = std::max(y0, 0); iy <= std::min(y1, ny_ - 1); ++iy) {
      const bool edge_row = (iy == y0 || iy == y1);
      for (int ix = std::max(x0, 0); ix <= std::min(x1, nx_ - 1); ++ix) {
        if (!edge_row && ix != x0 && ix != x1) continue;
        for (int idx : bucket(ix, iy)) f(idx);
      }
    }
    return true;
  }

  /// Index of the nearest point to p among `points` (the set the grid was
  /// built from) within `radius`, or -1.
  int nearest(std::span<const Vec2> points, const Vec2& p, double radius) const {
    const Eigen::Vector2i c = cell_of(p);
    const int rings = static_cast<int>(std::ceil(radius / cell_)) + 1;
    int best = -1;
    double best_d2 = radius * radius;
    for (int r = 0; r <= rings; ++r) {
      if (!for_each_in_ring(c, r, [&](int j) {
            const double d2 = (points[j] - p).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && best >= 0 && j < best)) {
              best_d2 = d2;
              best = j;
            }
          }))
        break;
    }
    return best;
  }

 private:
  int flat(const Eigen::Vector2i& c) const { return c.y() * nx_ + c.x(); }

  Vec2 origin_ = Vec2::Zero();
  double cell_ = 1;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<int> start_;
  std::vector<int> items_;
};

}  // namespace covfluid
