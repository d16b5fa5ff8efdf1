#pragma once

#include <vector>

#include <Eigen/Core>

namespace covfluid {

/// Convex polygon whose edge k runs from vertex k to vertex k+1 and carries a
/// label (the generator that produced it, or -1 for the bounding box).
template <typename Scalar>
struct LabeledPolygon {
  using Point = Eigen::Matrix<Scalar, 2, 1>;
  std::vector<Point> vertices;
  std::vector<int> labels;

  std::size_t size() const { return vertices.size(); }
  bool empty() const { return vertices.empty(); }
};

template <typename Scalar>
LabeledPolygon<Scalar> box_polygon(const Eigen::Matrix<Scalar, 2, 1>& lo,
                                   const Eigen::Matrix<Scalar, 2, 1>& hi) {
  using P = Eigen::Matrix<Scalar, 2, 1>;
  return {{lo, P(hi.x(), lo.y()), hi, P(lo.x(), hi.y())}, {-1, -1, -1, -1}};
}

/// Shoelace area (positive for counter-clockwise vertex order).
template <typename Derived>
typename Derived::Scalar signed_area(const std::vector<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  Scalar a = 0;
  const std::size_t n = v.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = v[k];
    const auto& q = v[(k + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return a / 2;
}

/// Area and centroid of a simple polygon. Coordinates are taken relative to
/// the first vertex to limit cancellation for small cells far from the origin.
template <typename Derived>
std::pair<typename Derived::Scalar, Eigen::Matrix<typename Derived::Scalar, 2, 1>>
area_centroid(const std::vector<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  using P = Eigen::Matrix<Scalar, 2, 1>;
  const std::size_t n = v.size();
  if (n == 0) return {Scalar(0), P::Zero()};
  const P origin = v[0];
  Scalar a2 = 0;
  P c = P::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const P p = v[k] - origin;
    const P q = v[(k + 1) % n] - origin;
    const Scalar cross = p.x() * q.y() - q.x() * p.y();
    a2 += cross;
    c += (p + q) * cross;
  }
  if (a2 == Scalar(0)) {
    P mean = P::Zero();
    for (const auto& p : v) mean += p;
    return {Scalar(0), mean / Scalar(n)};
  }
  return {a2 / 2, origin + c / (3 * a2)};
}

/// Clip a convex polygon against the half-plane {p : (p - m) . d <= 0}.
/// Edges created along the clip line receive `label`.
template <typename Scalar>
LabeledPolygon<Scalar> clip_half_plane(const LabeledPolygon<Scalar>& poly,
                                       const Eigen::Matrix<Scalar, 2, 1>& m,
                                       const Eigen::Matrix<Scalar, 2, 1>& d, int label) {
  using P = Eigen::Matrix<Scalar, 2, 1>;
  const std::size_t n = poly.size();
  LabeledPolygon<Scalar> out;
  if (n == 0) return out;

  std::vector<Scalar> s(n);
  bool any_out = false;
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = (poly.vertices[k] - m).dot(d);
    any_out = any_out || s[k] > 0;
  }
  if (!any_out) return poly;

  out.vertices.reserve(n + 1);
  out.labels.reserve(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k1 = (k + 1) % n;
    const P& a = poly.vertices[k];
    const P& b = poly.vertices[k1];
    const bool a_in = s[k] <= 0;
    const bool b_in = s[k1] <= 0;
    if (a_in) {
      out.vertices.push_back(a);
      out.labels.push_back(poly.labels[k]);
      if (!b_in) {
        const Scalar t = s[k] / (s[k] - s[k1]);
        out.vertices.push_back(a + t * (b - a));
        out.labels.push_back(label);
      }
    } else if (b_in) {
      const Scalar t = s[k] / (s[k] - s[k1]);
      out.vertices.push_back(a + t * (b - a));
      out.labels.push_back(poly.labels[k]);
    }
  }
  if (out.vertices.size() < 3) return {};
  return out;
}

}  // namespace covfluid
