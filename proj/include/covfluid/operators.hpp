#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "covfluid/voronoi.hpp"

namespace covfluid {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Volume derivatives of a diagram, from the facet geometry alone.
/// For facet f = (a, b): wrt_b[f] = grad_{x_b} V_a = (A/l)(x_b - b_ab) and
/// wrt_a[f] = grad_{x_a} V_b = (A/l)(x_a - b_ab). diagonal[i] = grad_{x_i} V_i.
struct VolumeGradients {
  std::vector<Vec2> wrt_a;
  std::vector<Vec2> wrt_b;
  std::vector<Vec2> diagonal;
};

VolumeGradients volume_gradients(const VoronoiDiagram& diagram);

/// Fluid facet that borders an air cell. The free surface sits on the facet:
/// pressure there is a prescribed value and the air side of the flux uses the
/// fluid cell's own velocity.
struct AirFace {
  int row;
  int facet;
  Vec2 coeff;  // (A/l)(x_fluid - x_air)
};

/// Fluid facet that borders a solid cell; the normal flux is prescribed.
struct SolidFace {
  int row;
  int facet;
  int solid_cell;
  Vec2 flux;  // (A/l)(x_solid - x_fluid) = A n
};

/// Matrix-form operators restricted to fluid cells. Rows/columns index fluid
/// cells in diagram order; vector fields interleave (x, y) per row.
struct DiscreteOperators {
  std::vector<int> fluid_cells;  // row -> diagram cell
  std::vector<int> row_of_cell;  // diagram cell -> row, or -1
  SparseMatrix D;                // rows x 2 rows
  SparseMatrix G;                // 2 rows x rows, exactly -D^T
  ScalarField volumes;           // V (with the degenerate-cell floor)
  SparseMatrix L;                // D V^-1 G, symmetric
  std::vector<AirFace> air_faces;
  std::vector<SolidFace> solid_faces;

  int rows() const { return static_cast<int>(fluid_cells.size()); }
  bool has_air() const { return !air_faces.empty(); }
};

DiscreteOperators assemble_operators(const VoronoiDiagram& diagram);

/// Value the gradient sees on free-surface facets.
enum class SurfaceValue {
  Zero,  // Dirichlet p = 0 (pressure)
  Own,   // p_face = p_i, i.e. surface facets drop out (diagnostic fields)
};

/// Volume-weighted divergence [Dv]_i including the prescribed solid flux.
ScalarField apply_divergence(const DiscreteOperators& ops, const VectorField& v,
                             const Vec2& solid_velocity = Vec2::Zero());

/// Volume-weighted gradient [Gp]_i.
VectorField apply_gradient(const DiscreteOperators& ops, const ScalarField& p,
                           SurfaceValue surface = SurfaceValue::Zero);

/// Volume-weighted gradient with prescribed values on the free surface, one
/// per entry of ops.air_faces.
VectorField apply_gradient(const DiscreteOperators& ops, const ScalarField& p,
                           const ScalarField& face_values);

/// Face values taking each air face's value from its fluid row.
ScalarField faces_from_rows(const DiscreteOperators& ops, const ScalarField& row_values);

/// Pointwise versions: [Dv]_i / V_i and [Gp]_i / V_i.
ScalarField divergence(const DiscreteOperators& ops, const VectorField& v,
                       const Vec2& solid_velocity = Vec2::Zero());
VectorField gradient(const DiscreteOperators& ops, const ScalarField& p,
                     SurfaceValue surface = SurfaceValue::Zero);

SparseMatrix assemble_laplacian(const SparseMatrix& D, const SparseMatrix& G,
                                const ScalarField& volumes);

inline Eigen::Map<const Eigen::VectorXd> flat(const VectorField& v) {
  return {v.data(), v.size()};
}

}  // namespace covfluid
