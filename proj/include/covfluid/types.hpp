#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace covfluid {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Per-cell vector fields are stored column-wise; viewed as a flat vector the
// layout is interleaved (x0, y0, x1, y1, ...), which is the column order of D.
using VectorField = Eigen::Matrix2Xd;
using ScalarField = Eigen::VectorXd;

enum class Material : std::uint8_t { Fluid, Solid, Air };

const char* to_string(Material m);

/// Axis-aligned box [lo, hi].
struct Box {
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Ones();

  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  double area() const { return width() * height(); }
  double diagonal() const { return (hi - lo).norm(); }
  bool contains_strict(const Vec2& p) const {
    return p.x() > lo.x() && p.x() < hi.x() && p.y() > lo.y() && p.y() < hi.y();
  }
  Box expanded(double margin) const {
    return {lo - Vec2::Constant(margin), hi + Vec2::Constant(margin)};
  }
};

class GeometryError : public std::runtime_error {
 public:
  enum class Kind { DegenerateInput, OutOfDomain, InvalidId };
  GeometryError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class SizeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace covfluid
