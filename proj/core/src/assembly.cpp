#include "wgdmp/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <tuple>

#include "wgdmp/error.hpp"

namespace wgdmp {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix compress(Eigen::Index rows, Eigen::Index cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

void require_positive_diagonal(const Vector& d) {
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) {
      throw SingularBlockError("M00 diagonal entry " + std::to_string(i) + " is not positive");
    }
  }
}

// Average of g over the segment [a, b] by 2-point Gauss.
double edge_average(const ScalarFunction& g, const Point& a, const Point& b) {
  const double s = 0.5 / std::sqrt(3.0);
  const Point mid = 0.5 * (a + b);
  const Point half = b - a;
  return 0.5 * (g(mid - s * half) + g(mid + s * half));
}

}  // namespace

WeakGradient element_weak_gradient(const ElementGeometry& geom) {
  return {-geom.c_k, Point::Zero()};
}

WeakGradient edge_weak_gradient(const ElementGeometry& geom, int local_edge) {
  if (local_edge < 0 || local_edge > 2) throw InvalidArgument("local edge index must be 0, 1 or 2");
  return {geom.c_k / 3.0, geom.scaled_normal(local_edge) / geom.area};
}

ElementTerms compute_element_terms(const TriMesh& mesh, const TensorField& field,
                                   const QuadratureRule& rule) {
  if (field.kind() == TensorField::Kind::kPiecewiseConstant &&
      field.num_elements() != mesh.num_elements()) {
    throw InvalidArgument("piecewise-constant field has " + std::to_string(field.num_elements()) +
                          " values for " + std::to_string(mesh.num_elements()) + " elements");
  }
  ElementTerms terms;
  const auto n = static_cast<std::size_t>(mesh.num_elements());
  terms.geom.reserve(n);
  terms.moments.reserve(n);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    terms.geom.push_back(element_geometry(mesh, k));
    terms.moments.push_back(element_moments(terms.geom.back(), field, k, rule));
  }
  return terms;
}

WgSystem assemble(const TriMesh& mesh, const ElementTerms& terms, const ScalarFunction& source,
                  const ScalarFunction& boundary, const QuadratureRule& rule) {
  const int n0 = mesh.num_elements();
  const int nb = mesh.num_interior_edges();
  const int nbd = mesh.num_boundary_edges();
  if (static_cast<int>(terms.geom.size()) != n0) {
    throw InvalidArgument("element terms do not match the mesh");
  }

  WgSystem sys;
  sys.m00_diag.resize(n0);
  sys.f0.resize(n0);
  Triplets t0b, t0bd, tbb, tbbd;
  t0b.reserve(3 * static_cast<std::size_t>(n0));
  tbb.reserve(9 * static_cast<std::size_t>(n0));

  for (int k = 0; k < n0; ++k) {
    const ElementGeometry& g = terms.geom[static_cast<std::size_t>(k)];
    const ElementMoments& mom = terms.moments[static_cast<std::size_t>(k)];
    const double c = g.c_k;
    const double area = g.area;
    const auto& edges = mesh.element_edges(k);

    sys.m00_diag(k) = c * c * mom.s_a;

    double load = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) load += rule.weights[q] * source(rule.point(g, q));
    sys.f0(k) = area * load;

    for (int i = 0; i < 3; ++i) {
      const auto si = static_cast<std::size_t>(i);
      const EdgeRef ei = edges[si];
      const double li = g.edge_lengths[si];
      const double mb0 = -c * c * mom.s_a / 3.0 - c * li * mom.m[si] / area;
      (ei.interior() ? t0b : t0bd).emplace_back(k, ei.index, mb0);

      if (!ei.interior()) continue;
      for (int j = 0; j < 3; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        const EdgeRef ej = edges[sj];
        const double lj = g.edge_lengths[sj];
        const double mbb = c * c * mom.s_a / 9.0 +
                           c / (3.0 * area) * (li * mom.m[si] + lj * mom.m[sj]) +
                           li * lj * mom.n_mat(i, j) / (area * area);
        (ej.interior() ? tbb : tbbd).emplace_back(ei.index, ej.index, mbb);
      }
    }
  }

  sys.m0b = compress(n0, nb, t0b);
  sys.m0b_bdry = compress(n0, nbd, t0bd);
  sys.mbb = compress(nb, nb, tbb);
  sys.mbb_bdry = compress(nb, nbd, tbbd);

  sys.g_h.resize(nbd);
  const auto bedges = mesh.boundary_edges();
  for (int e = 0; e < nbd; ++e) {
    const auto& ev = bedges[static_cast<std::size_t>(e)];
    sys.g_h(e) = edge_average(boundary, mesh.vertex(ev[0]), mesh.vertex(ev[1]));
  }
  return sys;
}

ReducedSystem schur_closed_form(const TriMesh& mesh, const ElementTerms& terms,
                                const WgSystem& system) {
  const int nb = mesh.num_interior_edges();
  const int nbd = mesh.num_boundary_edges();
  Triplets ta, tad;
  ta.reserve(9 * terms.geom.size());

  for (int k = 0; k < mesh.num_elements(); ++k) {
    const ElementGeometry& g = terms.geom[static_cast<std::size_t>(k)];
    const ElementMoments& mom = terms.moments[static_cast<std::size_t>(k)];
    const auto& edges = mesh.element_edges(k);
    const double inv_area2 = 1.0 / (g.area * g.area);
    for (int i = 0; i < 3; ++i) {
      const auto si = static_cast<std::size_t>(i);
      if (!edges[si].interior()) continue;
      for (int j = 0; j < 3; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        const double v = g.edge_lengths[si] * g.edge_lengths[sj] * inv_area2 *
                         (mom.n_mat(i, j) - mom.m[si] * mom.m[sj] / mom.s_a);
        (edges[sj].interior() ? ta : tad).emplace_back(edges[si].index, edges[sj].index, v);
      }
    }
  }

  require_positive_diagonal(system.m00_diag);
  ReducedSystem red;
  red.a_mat = compress(nb, nb, ta);
  red.a_bdry = compress(nb, nbd, tad);
  red.rhs = -(system.m0b.transpose() * system.f0.cwiseQuotient(system.m00_diag));
  return red;
}

ReducedSystem schur_algebraic(const WgSystem& system) {
  require_positive_diagonal(system.m00_diag);
  const Vector inv = system.m00_diag.cwiseInverse();
  const SparseMatrix mb0 = system.m0b.transpose();
  const SparseMatrix scaled = mb0 * inv.asDiagonal();

  ReducedSystem red;
  red.a_mat = system.mbb - SparseMatrix(scaled * system.m0b);
  red.a_bdry = system.mbb_bdry - SparseMatrix(scaled * system.m0b_bdry);
  red.rhs = -(scaled * system.f0);
  red.a_mat.makeCompressed();
  red.a_bdry.makeCompressed();
  return red;
}

void write_triplets(const SparseMatrix& m, std::ostream& out) {
  std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> entries;
  entries.reserve(static_cast<std::size_t>(m.nonZeros()));
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) entries.emplace_back(it.row(), it.col(), it.value());
  }
  std::sort(entries.begin(), entries.end());
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& [i, j, v] : entries) out << i << ' ' << j << ' ' << v << '\n';
  out.precision(old_precision);
}

}  // namespace wgdmp
