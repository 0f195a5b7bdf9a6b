#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "wgdmp/mesh.hpp"
#include "wgdmp/tensor.hpp"

namespace wgdmp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// a (x - x_K) + b, an element of RT0(K).
struct WeakGradient {
  double radial = 0.0;
  Point constant_part = Point::Zero();

  Point operator()(const ElementGeometry& g, const Point& x) const {
    return radial * (x - g.centroid) + constant_part;
  }
};

/// Weak gradient of the element basis function (1 on K, 0 on its edges).
WeakGradient element_weak_gradient(const ElementGeometry& geom);
/// Weak gradient of the basis function that is 1 on local edge i.
WeakGradient edge_weak_gradient(const ElementGeometry& geom, int local_edge);

/// Geometry and A-moments for every element, computed once and shared by
/// assembly, the closed-form reduction and the DMP checks.
struct ElementTerms {
  std::vector<ElementGeometry> geom;
  std::vector<ElementMoments> moments;
};

ElementTerms compute_element_terms(const TriMesh& mesh, const TensorField& field,
                                   const QuadratureRule& rule);

/// Blocks of the full WG system. Rows/columns of the edge blocks follow the
/// mesh's interior and boundary edge numbering.
struct WgSystem {
  Vector m00_diag;         // N0
  SparseMatrix m0b;        // N0 x Nb
  SparseMatrix m0b_bdry;   // N0 x Nb_bdry
  SparseMatrix mbb;        // Nb x Nb
  SparseMatrix mbb_bdry;   // Nb x Nb_bdry
  Vector f0;               // N0
  Vector g_h;              // Nb_bdry
};

/// F0 uses `rule`; g_h is the 2-point Gauss average of g over each boundary edge.
WgSystem assemble(const TriMesh& mesh, const ElementTerms& terms, const ScalarFunction& source,
                  const ScalarFunction& boundary, const QuadratureRule& rule);

/// Edge-only system  A u_b + A_bdry g_h = rhs.
struct ReducedSystem {
  SparseMatrix a_mat;
  SparseMatrix a_bdry;
  Vector rhs;
};

/// Entries from the per-element formula
///   sum_K |e_i||e_j|/|K|^2 [N_ij - m_i m_j / s_a];
/// the right-hand side is taken from the assembled blocks.
ReducedSystem schur_closed_form(const TriMesh& mesh, const ElementTerms& terms,
                                const WgSystem& system);

/// Mbb - Mb0 M00^-1 M0b by sparse elimination.
ReducedSystem schur_algebraic(const WgSystem& system);

/// Sorted `i j value` lines at round-trip precision.
void write_triplets(const SparseMatrix& m, std::ostream& out);

}  // namespace wgdmp
