#include "wgdmp/solve.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/Cholesky>

#include "wgdmp/error.hpp"

namespace wgdmp {

namespace {

void configure_csv(std::ostream& out) {
  out.precision(17);
  out.unsetf(std::ios::floatfield);
}

// Jacobi-preconditioned CG. When the recurrence residual claims convergence
// the true residual is recomputed, and iteration restarts from it if the two
// disagree.
Vector pcg(const SparseMatrix& a, const Vector& b, double tol, int max_iter, SolveStats& stats) {
  const Eigen::Index n = b.size();
  Vector x = Vector::Zero(n);
  const double b_norm = b.norm();
  if (b_norm == 0.0) return x;

  Vector inv_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = a.coeff(i, i);
    if (!(d > 0.0)) throw SingularBlockError("reduced matrix has a nonpositive diagonal entry");
    inv_diag(i) = 1.0 / d;
  }

  Vector r = b;
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  Vector ap(n);
  double rz = r.dot(z);

  while (stats.iterations < max_iter) {
    ap.noalias() = a * p;
    const double alpha = rz / p.dot(ap);
    x.noalias() += alpha * p;
    r.noalias() -= alpha * ap;
    ++stats.iterations;
    const double rel = r.norm() / b_norm;
    stats.history.push_back(rel);

    if (rel <= tol) {
      r = b - a * x;
      const double true_rel = r.norm() / b_norm;
      if (true_rel <= tol) {
        stats.residual_norm = true_rel;
        return x;
      }
      z = inv_diag.cwiseProduct(r);
      p = z;
      rz = r.dot(z);
      continue;
    }

    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw NonConvergenceError("conjugate gradient did not reach relative residual " +
                                std::to_string(tol) + " in " + std::to_string(max_iter) +
                                " iterations",
                            stats.history);
}

}  // namespace

const char* to_string(SolverMethod method) {
  return method == SolverMethod::kDenseCholesky ? "dense-cholesky" : "cg-jacobi";
}

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "cg-jacobi" || name == "cg") return SolverMethod::kConjugateGradientJacobi;
  if (name == "dense-cholesky" || name == "cholesky") return SolverMethod::kDenseCholesky;
  throw InvalidArgument("unknown solver method '" + name + "' (expected cg-jacobi or dense-cholesky)");
}

Vector solve_reduced(const ReducedSystem& sys, const Vector& g_h, const SolverConfig& cfg,
                     SolveStats* stats) {
  if (!(cfg.rel_tolerance > 0.0 && cfg.rel_tolerance < 1.0)) {
    throw InvalidArgument("solver tolerance must lie in (0, 1)");
  }
  if (cfg.max_iterations && *cfg.max_iterations <= 0) {
    throw InvalidArgument("iteration cap must be positive");
  }
  if (g_h.size() != sys.a_bdry.cols() || sys.rhs.size() != sys.a_mat.rows()) {
    throw InvalidArgument("reduced system and boundary data sizes disagree");
  }

  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  st = {};
  const Vector b = sys.rhs - sys.a_bdry * g_h;
  const auto n = static_cast<int>(b.size());

  if (cfg.method == SolverMethod::kDenseCholesky) {
    if (n > SolverConfig::kDenseLimit) {
      throw SizeCapError("dense Cholesky is limited to " + std::to_string(SolverConfig::kDenseLimit) +
                         " unknowns; system has " + std::to_string(n));
    }
    const Eigen::MatrixXd dense(sys.a_mat);
    Eigen::LLT<Eigen::MatrixXd> llt(dense);
    if (llt.info() != Eigen::Success) throw Error("reduced matrix is not positive definite");
    Vector x = llt.solve(b);
    const double b_norm = b.norm();
    st.residual_norm = b_norm == 0.0 ? 0.0 : (b - sys.a_mat * x).norm() / b_norm;
    return x;
  }

  const int cap = cfg.max_iterations.value_or(std::max(1, 20 * n));
  return pcg(sys.a_mat, b, cfg.rel_tolerance, cap, st);
}

Vector recover_interior(const WgSystem& sys, const Vector& ub, const Vector& ub_bdry) {
  if (ub.size() != sys.m0b.cols() || ub_bdry.size() != sys.m0b_bdry.cols()) {
    throw InvalidArgument("edge vectors do not match the system");
  }
  return (sys.f0 - sys.m0b * ub - sys.m0b_bdry * ub_bdry).cwiseQuotient(sys.m00_diag);
}

Discretization discretize(const TriMesh& mesh, const Problem& problem, const QuadratureRule& rule) {
  Discretization d;
  d.terms = compute_element_terms(mesh, problem.field, rule);
  d.system = assemble(mesh, d.terms, problem.source, problem.boundary, rule);
  d.reduced = schur_closed_form(mesh, d.terms, d.system);
  return d;
}

WgSolution solve(const Discretization& disc, const SolverConfig& cfg) {
  SolveStats stats;
  WgSolution sol;
  sol.ub_bdry = disc.system.g_h;
  sol.ub = solve_reduced(disc.reduced, sol.ub_bdry, cfg, &stats);
  sol.u0 = recover_interior(disc.system, sol.ub, sol.ub_bdry);
  sol.residual_norm = stats.residual_norm;
  sol.iterations = stats.iterations;
  return sol;
}

Vector vertex_average(const TriMesh& mesh, const WgSolution& solution) {
  Vector sum = Vector::Zero(mesh.num_vertices());
  Eigen::VectorXi count = Eigen::VectorXi::Zero(mesh.num_vertices());
  auto accumulate = [&](std::span<const TriMesh::EdgeVertices> edges, const Vector& values) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      for (int v : edges[e]) {
        sum(v) += values(static_cast<Eigen::Index>(e));
        ++count(v);
      }
    }
  };
  accumulate(mesh.interior_edges(), solution.ub);
  accumulate(mesh.boundary_edges(), solution.ub_bdry);
  for (Eigen::Index v = 0; v < sum.size(); ++v) {
    if (count(v) > 0) sum(v) /= count(v);
  }
  return sum;
}

void write_solution_csv(const WgSolution& solution, std::ostream& out) {
  configure_csv(out);
  out << "kind,index,value\n";
  for (Eigen::Index i = 0; i < solution.u0.size(); ++i) out << "element," << i << ',' << solution.u0(i) << '\n';
  for (Eigen::Index i = 0; i < solution.ub.size(); ++i) {
    out << "interior_edge," << i << ',' << solution.ub(i) << '\n';
  }
  for (Eigen::Index i = 0; i < solution.ub_bdry.size(); ++i) {
    out << "boundary_edge," << i << ',' << solution.ub_bdry(i) << '\n';
  }
}

void write_vertex_csv(const TriMesh& mesh, const Vector& values, std::ostream& out) {
  configure_csv(out);
  out << "x,y,value\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Point& p = mesh.vertex(v);
    out << p.x() << ',' << p.y() << ',' << values(v) << '\n';
  }
}

}  // namespace wgdmp
