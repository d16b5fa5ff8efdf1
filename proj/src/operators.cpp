#include "covfluid/operators.hpp"

namespace covfluid {

VolumeGradients volume_gradients(const VoronoiDiagram& diagram) {
  VolumeGradients g;
  const std::size_t nf = diagram.facets.size();
  g.wrt_a.resize(nf);
  g.wrt_b.resize(nf);
  g.diagonal.assign(diagram.cells.size(), Vec2::Zero());
  for (std::size_t k = 0; k < nf; ++k) {
    const VoronoiFacet& f = diagram.facets[k];
    const double w = f.length / f.l;
    g.wrt_b[k] = w * (diagram.sites[f.cell_b] - f.centroid);
    g.wrt_a[k] = w * (diagram.sites[f.cell_a] - f.centroid);
    // grad_{x_a} V_a = -sum_j grad_{x_a} V_j
    g.diagonal[f.cell_a] -= g.wrt_a[k];
    g.diagonal[f.cell_b] -= g.wrt_b[k];
  }
  return g;
}

SparseMatrix assemble_laplacian(const SparseMatrix& D, const SparseMatrix& G,
                                const ScalarField& volumes) {
  Eigen::VectorXd inv(2 * volumes.size());
  for (Eigen::Index i = 0; i < volumes.size(); ++i) inv(2 * i) = inv(2 * i + 1) = 1.0 / volumes(i);
  SparseMatrix L = D * (inv.asDiagonal() * G);
  SparseMatrix Lt = L.transpose();
  SparseMatrix sym = 0.5 * (L + Lt);
  sym.prune(0.0);
  return sym;
}

DiscreteOperators assemble_operators(const VoronoiDiagram& diagram) {
  DiscreteOperators ops;
  const int n = static_cast<int>(diagram.cells.size());
  ops.row_of_cell.assign(n, -1);
  for (int c = 0; c < n; ++c) {
    if (diagram.kinds[c] == Material::Fluid) {
      ops.row_of_cell[c] = static_cast<int>(ops.fluid_cells.size());
      ops.fluid_cells.push_back(c);
    }
  }
  const int rows = ops.rows();
  ops.volumes.resize(rows);
  for (int r = 0; r < rows; ++r) ops.volumes(r) = diagram.cells[ops.fluid_cells[r]].volume;

  const VolumeGradients vg = volume_gradients(diagram);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(rows) * 14);
  auto add = [&trip](int row, int col_cell_row, const Vec2& v) {
    trip.emplace_back(row, 2 * col_cell_row, v.x());
    trip.emplace_back(row, 2 * col_cell_row + 1, v.y());
  };

  for (std::size_t k = 0; k < diagram.facets.size(); ++k) {
    const VoronoiFacet& f = diagram.facets[k];
    const int ra = ops.row_of_cell[f.cell_a];
    const int rb = ops.row_of_cell[f.cell_b];
    switch (f.kind) {
      case FacetKind::FluidFluid:
        // D_ab = (grad_{x_b} V_a)^T, D_aa += (b_ab - x_a)(A/l)
        add(ra, rb, vg.wrt_b[k]);
        add(ra, ra, -vg.wrt_a[k]);
        add(rb, ra, vg.wrt_a[k]);
        add(rb, rb, -vg.wrt_b[k]);
        break;
      case FacetKind::FluidAir: {
        const bool a_fluid = ra >= 0;
        const int row = a_fluid ? ra : rb;
        const int fc = a_fluid ? f.cell_a : f.cell_b;
        const int ac = a_fluid ? f.cell_b : f.cell_a;
        const Vec2 coeff = (f.length / f.l) * (diagram.sites[fc] - diagram.sites[ac]);
        add(row, row, -coeff);
        ops.air_faces.push_back({row, static_cast<int>(k), coeff});
        break;
      }
      case FacetKind::FluidSolid: {
        const bool a_fluid = ra >= 0;
        const int row = a_fluid ? ra : rb;
        const int fc = a_fluid ? f.cell_a : f.cell_b;
        const int sc = a_fluid ? f.cell_b : f.cell_a;
        ops.solid_faces.push_back(
            {row, static_cast<int>(k), sc, (f.length / f.l) * (diagram.sites[sc] - diagram.sites[fc])});
        break;
      }
      case FacetKind::Other:
        break;
    }
  }
  ops.D.resize(rows, 2 * rows);
  ops.D.setFromTriplets(trip.begin(), trip.end());
  ops.G = -SparseMatrix(ops.D.transpose());
  ops.L = assemble_laplacian(ops.D, ops.G, ops.volumes);
  return ops;
}

ScalarField apply_divergence(const DiscreteOperators& ops, const VectorField& v,
                             const Vec2& solid_velocity) {
  if (v.cols() != ops.rows()) throw SizeMismatch("apply_divergence: field length mismatch");
  ScalarField out = ops.D * flat(v);
  if (!solid_velocity.isZero())
    for (const SolidFace& s : ops.solid_faces) out(s.row) += s.flux.dot(solid_velocity);
  return out;
}

namespace {
VectorField gradient_with(const DiscreteOperators& ops, const ScalarField& p,
                          const auto& face_value) {
  if (p.size() != ops.rows()) throw SizeMismatch("apply_gradient: field length mismatch");
  VectorField out(2, ops.rows());
  Eigen::Map<Eigen::VectorXd>(out.data(), out.size()) = ops.G * p;
  for (std::size_t k = 0; k < ops.air_faces.size(); ++k) {
    const AirFace& a = ops.air_faces[k];
    out.col(a.row) -= a.coeff * face_value(k, a.row);
  }
  return out;
}
}  // namespace

VectorField apply_gradient(const DiscreteOperators& ops, const ScalarField& p, SurfaceValue surface) {
  if (surface == SurfaceValue::Own) return gradient_with(ops, p, [&p](std::size_t, int r) { return p(r); });
  return gradient_with(ops, p, [](std::size_t, int) { return 0.0; });
}

VectorField apply_gradient(const DiscreteOperators& ops, const ScalarField& p,
                           const ScalarField& face_values) {
  if (face_values.size() != static_cast<Eigen::Index>(ops.air_faces.size()))
    throw SizeMismatch("apply_gradient: surface value length mismatch");
  return gradient_with(ops, p, [&face_values](std::size_t k, int) { return face_values(k); });
}

ScalarField faces_from_rows(const DiscreteOperators& ops, const ScalarField& row_values) {
  if (row_values.size() != ops.rows()) throw SizeMismatch("faces_from_rows: length mismatch");
  ScalarField f(ops.air_faces.size());
  for (std::size_t k = 0; k < ops.air_faces.size(); ++k) f(k) = row_values(ops.air_faces[k].row);
  return f;
}

ScalarField divergence(const DiscreteOperators& ops, const VectorField& v, const Vec2& solid_velocity) {
  return apply_divergence(ops, v, solid_velocity).cwiseQuotient(ops.volumes);
}

VectorField gradient(const DiscreteOperators& ops, const ScalarField& p, SurfaceValue surface) {
  VectorField g = apply_gradient(ops, p, surface);
  for (int r = 0; r < ops.rows(); ++r) g.col(r) /= ops.volumes(r);
  return g;
}

}  // namespace covfluid
