#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wgdmp/assembly.hpp"

namespace wgdmp {

enum class SolverMethod { kConjugateGradientJacobi, kDenseCholesky };

const char* to_string(SolverMethod method);
SolverMethod parse_solver_method(const std::string& name);

struct SolverConfig {
  double rel_tolerance = 1e-12;
  /// Defaults to 20 * N_b.
  std::optional<int> max_iterations;
  SolverMethod method = SolverMethod::kConjugateGradientJacobi;

  /// Largest system the dense route accepts.
  static constexpr int kDenseLimit = 2000;
};

struct SolveStats {
  int iterations = 0;
  /// ||b - A x|| / ||b|| of the returned iterate (0 when b = 0).
  double residual_norm = 0.0;
  /// Relative recurrence residual after every CG iteration.
  std::vector<double> history;
};

/// Solves A u_b = rhs - A_bdry g_h. Throws NonConvergenceError when CG hits
/// its iteration cap and SizeCapError when the dense route is asked for more
/// than SolverConfig::kDenseLimit unknowns.
Vector solve_reduced(const ReducedSystem& sys, const Vector& g_h, const SolverConfig& cfg,
                     SolveStats* stats = nullptr);

/// u0 = M00^-1 (F0 - M0b u_b - M0b_bdry u_bdry), elementwise.
Vector recover_interior(const WgSystem& sys, const Vector& ub, const Vector& ub_bdry);

struct WgSolution {
  Vector u0;
  Vector ub;
  Vector ub_bdry;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Everything derived from (mesh, problem, rule) before the linear solve.
struct Discretization {
  ElementTerms terms;
  WgSystem system;
  ReducedSystem reduced;
};

Discretization discretize(const TriMesh& mesh, const Problem& problem, const QuadratureRule& rule);
WgSolution solve(const Discretization& disc, const SolverConfig& cfg = {});

/// Mean of the edge values incident to each vertex (for contour output only).
Vector vertex_average(const TriMesh& mesh, const WgSolution& solution);

/// `kind,index,value` with kind in {element, interior_edge, boundary_edge}.
void write_solution_csv(const WgSolution& solution, std::ostream& out);
/// `x,y,value` per vertex.
void write_vertex_csv(const TriMesh& mesh, const Vector& values, std::ostream& out);

}  // namespace wgdmp
