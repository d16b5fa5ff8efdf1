#pragma once

#include <functional>
#include <optional>

#include "covfluid/operators.hpp"

namespace covfluid {

/// SPD (or compatibility-projected PSD) system (-L) x = rhs over fluid rows.
struct PoissonProblem {
  SparseMatrix A;  // -L
  ScalarField rhs;
  ScalarField initial_guess;
  bool pure_neumann = false;
};

struct ProblemBoundary {
  Vec2 solid_velocity = Vec2::Zero();
  /// Value imposed on each free-surface facet (indexed like ops.air_faces); zero when absent.
  std::optional<ScalarField> surface_values;
};

/// rhs = -[D u*] (solid flux and surface values folded in). When there is no
/// free surface the rhs mean is removed so the singular system is consistent.
PoissonProblem build_problem(const DiscreteOperators& ops, const VectorField& u_star,
                             const ScalarField& initial_guess, const ProblemBoundary& boundary = {});

enum class Preconditioner { None, Jacobi };

struct CgOptions {
  double tolerance = 1e-8;  // relative to |rhs|
  int max_iterations = 0;   // 0 -> 10 * rows
  Preconditioner preconditioner = Preconditioner::Jacobi;
  /// Called with (iteration, iterate) after every update; tests use it.
  std::function<void(int, const ScalarField&)> observer;
};

enum class SolveStatus { Converged, MaxIterations, NonFinite };

const char* to_string(SolveStatus s);

struct PoissonSolution {
  ScalarField p;
  int iterations = 0;
  double residual = 0;  // |rhs - A p| / |rhs| (absolute when rhs == 0)
  SolveStatus status = SolveStatus::Converged;

  bool ok() const { return status == SolveStatus::Converged; }
};

/// Preconditioned conjugate gradient. On MaxIterations the best iterate (lowest
/// residual) is returned; on NonFinite the last finite iterate is returned.
PoissonSolution cg_solve(const PoissonProblem& problem, const CgOptions& options = {});

/// Velocity u* - G x / V for a solved potential x.
VectorField project_velocity(const DiscreteOperators& ops, const VectorField& u_star,
                             const ScalarField& potential,
                             const std::optional<ScalarField>& surface_values = std::nullopt);

/// Long-range projection warm-started with the accumulated potential versus
/// the short-range projection of u_long - grad(lambda_prev) from zero.
struct EquivalenceReport {
  bool equivalent = false;
  double max_velocity_difference = 0;
  double velocity_scale = 0;
  int long_iterations = 0;
  int short_iterations = 0;
};

EquivalenceReport warm_start_equivalence_check(const DiscreteOperators& ops, const VectorField& u_long,
                                               const VectorField& u_short, const ScalarField& lambda_prev,
                                               const CgOptions& options = {});

}  // namespace covfluid
