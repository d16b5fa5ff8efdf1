#include "covfluid/poisson.hpp"

#include <cmath>

namespace covfluid {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::NonFinite: return "non_finite";
  }
  return "?";
}

namespace {

ScalarField surface_correction(const DiscreteOperators& ops, const ScalarField& face_values) {
  // D V^-1 g where g is the free-surface part of the gradient.
  VectorField g = VectorField::Zero(2, ops.rows());
  for (std::size_t k = 0; k < ops.air_faces.size(); ++k) {
    const AirFace& a = ops.air_faces[k];
    g.col(a.row) -= a.coeff * face_values(k) / ops.volumes(a.row);
  }
  return ops.D * flat(g);
}

void remove_mean(ScalarField& v) {
  if (v.size() > 0) v.array() -= v.mean();
}

}  // namespace

PoissonProblem build_problem(const DiscreteOperators& ops, const VectorField& u_star,
                             const ScalarField& initial_guess, const ProblemBoundary& boundary) {
  if (initial_guess.size() != ops.rows()) throw SizeMismatch("build_problem: initial guess length mismatch");
  PoissonProblem prob;
  prob.A = -ops.L;
  prob.rhs = -apply_divergence(ops, u_star, boundary.solid_velocity);
  if (boundary.surface_values) {
    if (boundary.surface_values->size() != static_cast<Eigen::Index>(ops.air_faces.size()))
      throw SizeMismatch("build_problem: surface value length mismatch");
    prob.rhs += surface_correction(ops, *boundary.surface_values);
  }
  prob.initial_guess = initial_guess;
  prob.pure_neumann = !ops.has_air();
  if (prob.pure_neumann) remove_mean(prob.rhs);
  return prob;
}

PoissonSolution cg_solve(const PoissonProblem& problem, const CgOptions& options) {
  const Eigen::Index n = problem.rhs.size();
  PoissonSolution sol;
  sol.p = problem.initial_guess.size() == n ? problem.initial_guess : ScalarField::Zero(n);
  if (n == 0) return sol;

  const double bnorm = problem.rhs.norm();
  if (bnorm == 0.0) {
    sol.p.setZero();
    return sol;
  }
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(10 * n);
  const double threshold = options.tolerance * bnorm;

  ScalarField inv_diag = ScalarField::Ones(n);
  if (options.preconditioner == Preconditioner::Jacobi) {
    const ScalarField d = problem.A.diagonal();
    for (Eigen::Index i = 0; i < n; ++i) inv_diag(i) = d(i) > 0 ? 1.0 / d(i) : 0.0;
  }

  ScalarField& x = sol.p;
  ScalarField r = problem.rhs - problem.A * x;
  double rnorm = r.norm();
  ScalarField best = x;
  double best_norm = rnorm;

  if (rnorm > threshold) {
    ScalarField z = inv_diag.cwiseProduct(r);
    ScalarField p = z;
    ScalarField q(n);
    double rz = r.dot(z);
    sol.status = SolveStatus::MaxIterations;
    for (int k = 1; k <= max_iter; ++k) {
      q.noalias() = problem.A * p;
      const double pq = p.dot(q);
      if (!std::isfinite(pq) || !std::isfinite(rz)) {
        sol.status = SolveStatus::NonFinite;
        break;
      }
      if (pq <= 0) break;  // search direction in the null space
      const double alpha = rz / pq;
      x.noalias() += alpha * p;
      r.noalias() -= alpha * q;
      rnorm = r.norm();
      sol.iterations = k;
      if (options.observer) options.observer(k, x);
      if (!std::isfinite(rnorm)) {
        sol.status = SolveStatus::NonFinite;
        break;
      }
      if (rnorm < best_norm) {
        best_norm = rnorm;
        best = x;
      }
      if (rnorm <= threshold) {
        sol.status = SolveStatus::Converged;
        break;
      }
      z = inv_diag.cwiseProduct(r);
      const double rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
    if (sol.status != SolveStatus::Converged) x = best;
  }

  if (problem.pure_neumann) remove_mean(x);
  sol.residual = (problem.rhs - problem.A * x).norm() / bnorm;
  return sol;
}

VectorField project_velocity(const DiscreteOperators& ops, const VectorField& u_star,
                             const ScalarField& potential, const std::optional<ScalarField>& surface_values) {
  VectorField g = surface_values ? apply_gradient(ops, potential, *surface_values)
                                 : apply_gradient(ops, potential, SurfaceValue::Zero);
  VectorField u = u_star;
  for (int r = 0; r < ops.rows(); ++r) u.col(r) -= g.col(r) / ops.volumes(r);
  return u;
}

EquivalenceReport warm_start_equivalence_check(const DiscreteOperators& ops, const VectorField& u_long,
                                               const VectorField& u_short, const ScalarField& lambda_prev,
                                               const CgOptions& options) {
  EquivalenceReport rep;
  const PoissonProblem long_problem = build_problem(ops, u_long, lambda_prev);
  const PoissonProblem short_problem = build_problem(ops, u_short, ScalarField::Zero(ops.rows()));
  const PoissonSolution long_sol = cg_solve(long_problem, options);
  const PoissonSolution short_sol = cg_solve(short_problem, options);
  rep.long_iterations = long_sol.iterations;
  rep.short_iterations = short_sol.iterations;

  const VectorField a = project_velocity(ops, u_long, long_sol.p);
  const VectorField b = project_velocity(ops, u_short, short_sol.p);
  rep.velocity_scale = a.colwise().norm().maxCoeff();
  rep.max_velocity_difference = (a - b).colwise().norm().maxCoeff();
  rep.equivalent = long_sol.ok() && short_sol.ok() &&
                   rep.max_velocity_difference <= 10.0 * options.tolerance * std::max(rep.velocity_scale, 1e-300);
  return rep;
}

}  // namespace covfluid
