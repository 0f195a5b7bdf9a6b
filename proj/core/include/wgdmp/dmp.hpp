#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "wgdmp/assembly.hpp"
#include "wgdmp/solve.hpp"

namespace wgdmp {

/// Local edge pairs of a triangle, in reporting order.
inline constexpr std::array<std::array<int, 2>, 3> kEdgePairs{{{0, 1}, {0, 2}, {1, 2}}};

/// Angle between two edges of K measured in the metric A_K^-1, and the
/// matching inner product (A_K n_i, n_j)_K = |K| n_i^T A_K n_j.
struct PairAngle {
  int i = 0;
  int j = 0;
  double cos_alpha = 0.0;
  double n_inner = 0.0;
};

/// The three pair angles of one element. Throws InvalidArgument when `a_avg`
/// is singular.
std::array<PairAngle, 3> metric_angles(const ElementGeometry& geom, const Mat2& a_avg);

struct PairCondition {
  int element = 0;
  PairAngle angle;
  /// m_i m_j / s_a, the right side of the pair condition.
  double bound = 0.0;
  bool pass = true;
};

struct EdgeCondition {
  int element = 0;
  int edge = 0;
  /// |m_i| against C_K |K| / (3 |e_i|) s_a.
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

/// Per-element sufficient conditions on the reduced system:
///   (A n_i, n_j)_K <= m_i m_j / s_a            for every edge pair,
///   |m_i| <= C_K |K| / (3 |e_i|) s_a            for every edge.
struct TheoremDmpResult {
  std::vector<PairCondition> pairs;
  std::vector<EdgeCondition> edges;

  int pair_failures() const;
  int edge_failures() const;
  bool pass() const { return pair_failures() == 0 && edge_failures() == 0; }
};

TheoremDmpResult check_theorem_dmp(const TriMesh& mesh, const ElementTerms& terms);
TheoremDmpResult check_theorem_dmp(const TriMesh& mesh, const TensorField& field,
                                   const QuadratureRule& rule);

/// Variable-coefficient conditions for one element:
///   L^2 h^2 / lam_min^2 <= cos(alpha)  for every pair,
///   h^3 / |K| <= 2 lam_min / (3 L).
struct GeneralCondition {
  int element = 0;
  double lip = 0.0;
  double diameter = 0.0;
  double lam_min = 0.0;
  double angle_lhs = 0.0;
  double min_cos_alpha = 0.0;
  bool angle_pass = true;
  double shape_lhs = 0.0;
  /// +inf when L = 0.
  double shape_rhs = 0.0;
  bool shape_pass = true;

  bool pass() const { return angle_pass && shape_pass; }
};

std::vector<GeneralCondition> check_theorem_general(const TriMesh& mesh, const ElementTerms& terms);
std::vector<GeneralCondition> check_theorem_general(const TriMesh& mesh, const TensorField& field,
                                                    const QuadratureRule& rule);

/// One element's contribution to an off-diagonal entry of Mbb (the
/// unreduced system). Nonpositivity of every contribution is the direct
/// M-matrix route.
struct FullSystemPair {
  int element = 0;
  int i = 0;
  int j = 0;
  /// Euclidean interior angle between the two edges, radians.
  double theta = 0.0;
  double contribution = 0.0;
  bool pass = true;
};

std::vector<FullSystemPair> check_full_system_condition(const TriMesh& mesh,
                                                        const ElementTerms& terms);
std::vector<FullSystemPair> check_full_system_condition(const TriMesh& mesh,
                                                        const TensorField& field,
                                                        const QuadratureRule& rule);

/// The isotropic form of the full-system condition,
///   cot(theta) >= 2 |K|^2 / (9 ||x - x_K||^2_K).
bool full_system_cot_condition(double cot_theta, double area, double centroid_moment);

enum class DenseAudit {
  kAuto,      // dense checks when N_b <= cap, skipped otherwise
  kRequired,  // SizeCapError when N_b > cap
  kSkip,
};

struct OffDiagonalEntry {
  int row = 0;
  int col = 0;
  bool boundary = false;  // entry of A_bdry rather than A
  double value = 0.0;
};

struct MMatrixAudit {
  /// Positive off-diagonal entries of [A | A_bdry].
  std::vector<OffDiagonalEntry> offdiag_violations;
  /// max_i |row sum_i| / sum_j |entry_ij| over interior rows.
  double rowsum_max_dev = 0.0;
  bool rowsums_nonnegative = true;

  bool dense_checked = false;
  /// min entry of A^-1 and the monotonicity verdict.
  double min_inverse_entry = 0.0;
  bool monotone = false;
  /// -A^-1 A_bdry >= 0 entrywise.
  bool boundary_coupling_nonnegative = false;
  /// min over rows of xi + A^-1 A_bdry xi_bdry.
  double min_condition_b = 0.0;
  bool condition_b = false;

  bool offdiag_pass() const { return offdiag_violations.empty(); }
};

MMatrixAudit mmatrix_audit(const ReducedSystem& reduced, DenseAudit mode = DenseAudit::kAuto,
                           int dense_cap = 500);

struct SolutionVerdict {
  /// Extrema over interior edges / elements / all edges.
  double ub_max = 0.0, ub_min = 0.0;
  double u0_max = 0.0, u0_min = 0.0;
  double ub_all_max = 0.0, ub_all_min = 0.0;
  /// max{0, max g_h} and min{0, min g_h}.
  double upper_bound = 0.0, lower_bound = 0.0;
  bool upper_checked = false, lower_checked = false;
  bool ub_pass = true, u0_pass = true;
  std::vector<int> overshoot_elements, undershoot_elements;
  std::vector<int> overshoot_edges, undershoot_edges;

  bool pass() const { return ub_pass && u0_pass; }
};

/// The upper bound is tested when f <= 0, the lower when f >= 0; values may
/// exceed a bound by `tolerance` before they count as violations.
SolutionVerdict solution_verdict(const WgSolution& solution, bool f_nonpositive,
                                 bool f_nonnegative = false, double tolerance = 1e-8);

struct DmpReport {
  TheoremDmpResult theorem;
  std::vector<GeneralCondition> general;
  std::vector<FullSystemPair> full_system;
  MMatrixAudit mmatrix;
  std::optional<SolutionVerdict> verdict;

  /// Whether the per-element sufficient conditions hold everywhere.
  bool conditions_pass() const { return theorem.pass(); }
};

DmpReport audit_discretization(const TriMesh& mesh, const Discretization& disc,
                               DenseAudit dense = DenseAudit::kAuto);

void write_dmp_summary(const DmpReport& report, std::ostream& out);
/// `element,pair,cos_alpha,n_inner,pass`
void write_angle_csv(const DmpReport& report, std::ostream& out);
/// `kind,index,value` for every overshooting/undershooting element or edge.
void write_violation_csv(const SolutionVerdict& verdict, const WgSolution& solution,
                         std::ostream& out);
/// `row,col,block,value` for positive off-diagonal entries of [A | A_bdry].
void write_offdiag_csv(const MMatrixAudit& audit, std::ostream& out);

}  // namespace wgdmp
