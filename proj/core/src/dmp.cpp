#include "wgdmp/dmp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Dense>

#include "wgdmp/error.hpp"

namespace wgdmp {

namespace {

constexpr double kConditionSlack = 1e-12;
constexpr double kAuditSlack = 1e-10;

double condition_scale(const ElementGeometry& g, const ElementMoments& m) {
  return g.area * std::max(m.lam_max, 0.0);
}

template <typename T>
double extreme(const Vector& v, T pick, double empty) {
  if (v.size() == 0) return empty;
  return pick(v);
}

}  // namespace

std::array<PairAngle, 3> metric_angles(const ElementGeometry& geom, const Mat2& a_avg) {
  const double det = a_avg.determinant();
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
    throw InvalidArgument("metric_angles: singular averaged tensor");
  }
  const Mat2 inv = a_avg.inverse();
  std::array<PairAngle, 3> out;
  for (std::size_t p = 0; p < kEdgePairs.size(); ++p) {
    const int i = kEdgePairs[p][0];
    const int j = kEdgePairs[p][1];
    const Point ti = geom.edge_direction(i);
    const Point tj = geom.edge_direction(j);
    const double cross = tj.dot(inv * ti);
    const double len_i = std::sqrt(ti.dot(inv * ti));
    const double len_j = std::sqrt(tj.dot(inv * tj));
    out[p].i = i;
    out[p].j = j;
    out[p].cos_alpha = -cross / (len_i * len_j);
    out[p].n_inner = geom.area * geom.normals[static_cast<std::size_t>(i)].dot(
                                     a_avg * geom.normals[static_cast<std::size_t>(j)]);
  }
  return out;
}

int TheoremDmpResult::pair_failures() const {
  return static_cast<int>(std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return !p.pass; }));
}

int TheoremDmpResult::edge_failures() const {
  return static_cast<int>(std::count_if(edges.begin(), edges.end(), [](const auto& e) { return !e.pass; }));
}

TheoremDmpResult check_theorem_dmp(const TriMesh& mesh, const ElementTerms& terms) {
  TheoremDmpResult res;
  res.pairs.reserve(3 * terms.geom.size());
  res.edges.reserve(3 * terms.geom.size());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const ElementGeometry& g = terms.geom[static_cast<std::size_t>(k)];
    const ElementMoments& mom = terms.moments[static_cast<std::size_t>(k)];
    const double slack = kConditionSlack * condition_scale(g, mom);
    const auto angles = metric_angles(g, mom.a_avg);
    for (const PairAngle& a : angles) {
      PairCondition pc;
      pc.element = k;
      pc.angle = a;
      // Report the same N_ij the condition is evaluated on.
      pc.angle.n_inner = mom.n_mat(a.i, a.j);
      pc.bound = mom.m[static_cast<std::size_t>(a.i)] * mom.m[static_cast<std::size_t>(a.j)] / mom.s_a;
      pc.pass = pc.angle.n_inner <= pc.bound + slack;
      res.pairs.push_back(pc);
    }
    for (int i = 0; i < 3; ++i) {
      const auto si = static_cast<std::size_t>(i);
      EdgeCondition ec;
      ec.element = k;
      ec.edge = i;
      ec.lhs = std::abs(mom.m[si]);
      ec.rhs = g.c_k * g.area / (3.0 * g.edge_lengths[si]) * mom.s_a;
      ec.pass = ec.lhs <= ec.rhs + slack;
      res.edges.push_back(ec);
    }
  }
  return res;
}

TheoremDmpResult check_theorem_dmp(const TriMesh& mesh, const TensorField& field,
                                   const QuadratureRule& rule) {
  return check_theorem_dmp(mesh, compute_element_terms(mesh, field, rule));
}

std::vector<GeneralCondition> check_theorem_general(const TriMesh& mesh, const ElementTerms& terms) {
  std::vector<GeneralCondition> out;
  out.reserve(terms.geom.size());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const ElementGeometry& g = terms.geom[static_cast<std::size_t>(k)];
    const ElementMoments& mom = terms.moments[static_cast<std::size_t>(k)];
    GeneralCondition c;
    c.element = k;
    c.lip = mom.lip;
    c.diameter = g.diameter;
    c.lam_min = mom.lam_min;
    const double ratio = c.lip * c.diameter / c.lam_min;
    c.angle_lhs = ratio * ratio;
    c.min_cos_alpha = std::numeric_limits<double>::infinity();
    for (const PairAngle& a : metric_angles(g, mom.a_avg)) {
      c.min_cos_alpha = std::min(c.min_cos_alpha, a.cos_alpha);
    }
    c.angle_pass = c.angle_lhs <= c.min_cos_alpha + kConditionSlack;
    c.shape_lhs = std::pow(c.diameter, 3) / g.area;
    c.shape_rhs = c.lip > 0.0 ? 2.0 * c.lam_min / (3.0 * c.lip)
                              : std::numeric_limits<double>::infinity();
    c.shape_pass = c.shape_lhs <= c.shape_rhs;
    out.push_back(c);
  }
  return out;
}

std::vector<GeneralCondition> check_theorem_general(const TriMesh& mesh, const TensorField& field,
                                                    const QuadratureRule& rule) {
  return check_theorem_general(mesh, compute_element_terms(mesh, field, rule));
}

std::vector<FullSystemPair> check_full_system_condition(const TriMesh& mesh,
                                                        const ElementTerms& terms) {
  std::vector<FullSystemPair> out;
  out.reserve(3 * terms.geom.size());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const ElementGeometry& g = terms.geom[static_cast<std::size_t>(k)];
    const ElementMoments& mom = terms.moments[static_cast<std::size_t>(k)];
    const double c = g.c_k;
    for (const auto& [i, j] : kEdgePairs) {
      const auto si = static_cast<std::size_t>(i);
      const auto sj = static_cast<std::size_t>(j);
      const double li = g.edge_lengths[si];
      const double lj = g.edge_lengths[sj];
      const double t1 = c * c * mom.s_a / 9.0;
      const double t2 = c / (3.0 * g.area) * (li * mom.m[si] + lj * mom.m[sj]);
      const double t3 = li * lj / (g.area * g.area) * mom.n_mat(i, j);
      FullSystemPair p;
      p.element = k;
      p.i = i;
      p.j = j;
      p.theta = std::acos(std::clamp(-g.edge_direction(i).dot(g.edge_direction(j)), -1.0, 1.0));
      p.contribution = t1 + t2 + t3;
      p.pass = p.contribution <= kConditionSlack * (std::abs(t1) + std::abs(t2) + std::abs(t3));
      out.push_back(p);
    }
  }
  return out;
}

std::vector<FullSystemPair> check_full_system_condition(const TriMesh& mesh,
                                                        const TensorField& field,
                                                        const QuadratureRule& rule) {
  return check_full_system_condition(mesh, compute_element_terms(mesh, field, rule));
}

bool full_system_cot_condition(double cot_theta, double area, double centroid_moment) {
  return cot_theta >= 2.0 * area * area / (9.0 * centroid_moment);
}

MMatrixAudit mmatrix_audit(const ReducedSystem& reduced, DenseAudit mode, int dense_cap) {
  MMatrixAudit audit;
  const SparseMatrix& a = reduced.a_mat;
  const SparseMatrix& ab = reduced.a_bdry;
  const auto n = static_cast<int>(a.rows());

  double max_abs = 0.0;
  for (const SparseMatrix* m : {&a, &ab}) {
    for (Eigen::Index r = 0; r < m->outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(*m, r); it; ++it) max_abs = std::max(max_abs, std::abs(it.value()));
    }
  }
  const double offdiag_tol = kConditionSlack * max_abs;

  for (int r = 0; r < n; ++r) {
    double sum = 0.0, abs_sum = 0.0;
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      sum += it.value();
      abs_sum += std::abs(it.value());
      if (it.col() != r && it.value() > offdiag_tol) {
        audit.offdiag_violations.push_back({r, static_cast<int>(it.col()), false, it.value()});
      }
    }
    for (SparseMatrix::InnerIterator it(ab, r); it; ++it) {
      sum += it.value();
      abs_sum += std::abs(it.value());
      if (it.value() > offdiag_tol) {
        audit.offdiag_violations.push_back({r, static_cast<int>(it.col()), true, it.value()});
      }
    }
    if (abs_sum > 0.0) {
      audit.rowsum_max_dev = std::max(audit.rowsum_max_dev, std::abs(sum) / abs_sum);
      if (sum < -kAuditSlack * abs_sum) audit.rowsums_nonnegative = false;
    }
  }

  if (mode == DenseAudit::kSkip) return audit;
  if (n > dense_cap) {
    if (mode == DenseAudit::kRequired) {
      throw SizeCapError("dense M-matrix audit is limited to " + std::to_string(dense_cap) +
                         " interior edges; system has " + std::to_string(n));
    }
    return audit;
  }

  audit.dense_checked = true;
  if (n == 0) {
    audit.monotone = audit.boundary_coupling_nonnegative = audit.condition_b = true;
    return audit;
  }
  const Eigen::MatrixXd dense(a);
  const Eigen::MatrixXd inv = dense.inverse();
  const double inv_norm = inv.cwiseAbs().rowwise().sum().maxCoeff();
  audit.min_inverse_entry = inv.minCoeff();
  audit.monotone = audit.min_inverse_entry >= -kAuditSlack * inv_norm;

  const Eigen::MatrixXd coupling = -(inv * Eigen::MatrixXd(ab));
  const double coupling_scale = coupling.size() > 0 ? coupling.cwiseAbs().maxCoeff() : 0.0;
  audit.boundary_coupling_nonnegative =
      coupling.size() == 0 || coupling.minCoeff() >= -kAuditSlack * coupling_scale;

  // xi + A^-1 A_bdry xi_bdry with all-ones xi, xi_bdry.
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(n) - coupling.rowwise().sum();
  audit.min_condition_b = b.minCoeff();
  audit.condition_b = audit.min_condition_b >= -kAuditSlack;
  return audit;
}

SolutionVerdict solution_verdict(const WgSolution& solution, bool f_nonpositive, bool f_nonnegative,
                                 double tolerance) {
  SolutionVerdict v;
  const auto vmax = [](const Vector& x) { return x.maxCoeff(); };
  const auto vmin = [](const Vector& x) { return x.minCoeff(); };
  const double g_max = extreme(solution.ub_bdry, vmax, 0.0);
  const double g_min = extreme(solution.ub_bdry, vmin, 0.0);
  v.upper_bound = std::max(0.0, g_max);
  v.lower_bound = std::min(0.0, g_min);
  v.upper_checked = f_nonpositive;
  v.lower_checked = f_nonnegative;

  v.ub_max = extreme(solution.ub, vmax, g_max);
  v.ub_min = extreme(solution.ub, vmin, g_min);
  v.u0_max = extreme(solution.u0, vmax, 0.0);
  v.u0_min = extreme(solution.u0, vmin, 0.0);
  v.ub_all_max = solution.ub_bdry.size() > 0 ? std::max(v.ub_max, g_max) : v.ub_max;
  v.ub_all_min = solution.ub_bdry.size() > 0 ? std::min(v.ub_min, g_min) : v.ub_min;

  auto scan = [&](const Vector& x, std::vector<int>& over, std::vector<int>& under) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (v.upper_checked && x(i) > v.upper_bound + tolerance) over.push_back(static_cast<int>(i));
      if (v.lower_checked && x(i) < v.lower_bound - tolerance) under.push_back(static_cast<int>(i));
    }
  };
  scan(solution.ub, v.overshoot_edges, v.undershoot_edges);
  scan(solution.u0, v.overshoot_elements, v.undershoot_elements);
  v.ub_pass = v.overshoot_edges.empty() && v.undershoot_edges.empty();
  v.u0_pass = v.overshoot_elements.empty() && v.undershoot_elements.empty();
  return v;
}

DmpReport audit_discretization(const TriMesh& mesh, const Discretization& disc, DenseAudit dense) {
  DmpReport r;
  r.theorem = check_theorem_dmp(mesh, disc.terms);
  r.general = check_theorem_general(mesh, disc.terms);
  r.full_system = check_full_system_condition(mesh, disc.terms);
  r.mmatrix = mmatrix_audit(disc.reduced, dense);
  return r;
}

void write_dmp_summary(const DmpReport& report, std::ostream& out) {
  const auto flags = out.flags();
  const auto prec = out.precision(4);
  auto yes = [](bool b) { return b ? "pass" : "FAIL"; };

  const auto& th = report.theorem;
  out << "pair condition (A n_i, n_j)_K <= m_i m_j / s_a: " << yes(th.pair_failures() == 0) << " ("
      << th.pair_failures() << " of " << th.pairs.size() << " pairs fail)\n";
  out << "edge condition |m_i| <= C_K |K| s_a / (3 |e_i|): " << yes(th.edge_failures() == 0) << " ("
      << th.edge_failures() << " of " << th.edges.size() << " edges fail)\n";

  const auto gen_fail = std::count_if(report.general.begin(), report.general.end(),
                                      [](const auto& c) { return !c.pass(); });
  const auto obtuse = std::count_if(report.general.begin(), report.general.end(),
                                    [](const auto& c) { return c.min_cos_alpha < 0.0; });
  out << "variable-coefficient conditions: " << gen_fail << " of " << report.general.size()
      << " elements fail; " << obtuse << " have an obtuse metric angle\n";

  const auto full_fail = std::count_if(report.full_system.begin(), report.full_system.end(),
                                       [](const auto& p) { return !p.pass; });
  out << "full-system Mbb sign condition: " << full_fail << " of " << report.full_system.size()
      << " pairs fail\n";

  const auto& mm = report.mmatrix;
  out << "reduced matrix off-diagonals: " << yes(mm.offdiag_pass()) << " ("
      << mm.offdiag_violations.size() << " positive)\n";
  out << "row sums: " << yes(mm.rowsums_nonnegative) << " (max relative deviation "
      << mm.rowsum_max_dev << ")\n";
  if (mm.dense_checked) {
    out << "monotone (A^-1 >= 0): " << yes(mm.monotone) << " (min entry " << mm.min_inverse_entry
        << ")\n";
    out << "-A^-1 A_bdry >= 0: " << yes(mm.boundary_coupling_nonnegative) << '\n';
    out << "xi + A^-1 A_bdry xi_bdry >= 0: " << yes(mm.condition_b) << " (min "
        << mm.min_condition_b << ")\n";
  } else {
    out << "dense monotonicity checks: skipped\n";
  }

  if (report.verdict) {
    const auto& v = *report.verdict;
    out << "solution: ub in [" << v.ub_all_min << ", " << v.ub_all_max << "], u0 in [" << v.u0_min
        << ", " << v.u0_max << "], bounds [" << v.lower_bound << ", " << v.upper_bound << "]\n";
    out << "solution DMP: " << yes(v.pass()) << " (" << v.overshoot_edges.size() << " edge and "
        << v.overshoot_elements.size() << " element overshoots, " << v.undershoot_edges.size()
        << " edge and " << v.undershoot_elements.size() << " element undershoots)\n";
  }
  out << "sufficient conditions: " << yes(report.conditions_pass()) << '\n';
  out.precision(prec);
  out.flags(flags);
}

void write_angle_csv(const DmpReport& report, std::ostream& out) {
  out.precision(17);
  out << "element,pair,cos_alpha,n_inner,pass\n";
  for (const PairCondition& p : report.theorem.pairs) {
    out << p.element << ',' << p.angle.i << p.angle.j << ',' << p.angle.cos_alpha << ','
        << p.angle.n_inner << ',' << (p.pass ? 1 : 0) << '\n';
  }
}

void write_violation_csv(const SolutionVerdict& verdict, const WgSolution& solution,
                         std::ostream& out) {
  out.precision(17);
  out << "kind,index,value\n";
  for (int k : verdict.overshoot_elements) out << "element," << k << ',' << solution.u0(k) << '\n';
  for (int k : verdict.undershoot_elements) out << "element," << k << ',' << solution.u0(k) << '\n';
  for (int e : verdict.overshoot_edges) out << "interior_edge," << e << ',' << solution.ub(e) << '\n';
  for (int e : verdict.undershoot_edges) out << "interior_edge," << e << ',' << solution.ub(e) << '\n';
}

void write_offdiag_csv(const MMatrixAudit& audit, std::ostream& out) {
  out.precision(17);
  out << "row,col,block,value\n";
  for (const OffDiagonalEntry& e : audit.offdiag_violations) {
    out << e.row << ',' << e.col << ',' << (e.boundary ? "boundary" : "interior") << ',' << e.value
        << '\n';
  }
}

}  // namespace wgdmp
