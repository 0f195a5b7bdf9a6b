#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "support.hpp"
#include "wgdmp/dmp.hpp"
#include "wgdmp/error.hpp"

using namespace wgdmp;

namespace {

TriMesh example51_mesh(MeshKind kind, int n) { return generate_structured(kind, n, n, example51().domain); }

Discretization discretize_identity(const TriMesh& mesh) {
  const Problem p{.name = "laplace",
                  .field = TensorField::constant(Mat2::Identity()),
                  .source = [](const Point&) { return 0.0; },
                  .boundary = [](const Point&) { return 0.0; },
                  .domain = Rect{}};
  return discretize(mesh, p, quadrature(1));
}

}  // namespace

TEST(MetricAngles, IdentityGivesEuclideanAngles) {
  const double h = std::sqrt(3.0) / 2.0;
  const auto eq = triangle_geometry({Point(0, 0), Point(1, 0), Point(0.5, h)});
  for (const PairAngle& a : metric_angles(eq, Mat2::Identity())) EXPECT_NEAR(a.cos_alpha, 0.5, 1e-15);

  const auto right = triangle_geometry(testing_support::unit_right_triangle());
  // Edges 1 and 2 meet at the right angle in vertex 0.
  for (const PairAngle& a : metric_angles(right, Mat2::Identity())) {
    if (a.i == 1 && a.j == 2) {
      EXPECT_NEAR(a.cos_alpha, 0.0, 1e-15);
      EXPECT_NEAR(a.n_inner, 0.0, 1e-15);
    } else {
      EXPECT_NEAR(a.cos_alpha, std::sqrt(0.5), 1e-15);
    }
  }
}

TEST(MetricAngles, Example51CornerOfMesh135) {
  // Lower-left triangle of a mesh135 cell: the right angle sits at vertex 0,
  // and the metric angle there is obtuse because A12 > 0.
  const auto g = triangle_geometry({Point(0, 0), Point(1, 0), Point(0, 1)});
  const auto angles = metric_angles(g, example51_tensor());
  const PairAngle& corner = angles[2];
  ASSERT_EQ(corner.i, 1);
  ASSERT_EQ(corner.j, 2);
  EXPECT_NEAR(corner.n_inner, 499.5 * g.area, 1e-12);
  EXPECT_NEAR(corner.cos_alpha, -499.5 / 500.5, 1e-13);
}

TEST(MetricAngles, SignMatchesInnerProduct) {
  // In two dimensions the rotated normals turn A into det(A) A^-1, so
  // cos(alpha) = -n_inner / (|K| det(A) |t_i|_{A^-1} |t_j|_{A^-1}).
  std::mt19937 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = triangle_geometry(testing_support::random_triangle(rng));
    const Mat2 a = testing_support::random_spd(rng, 1000.0);
    const Mat2 inv = a.inverse();
    for (const PairAngle& p : metric_angles(g, a)) {
      const Point ti = g.edge_direction(p.i), tj = g.edge_direction(p.j);
      const double li = std::sqrt(ti.dot(inv * ti)), lj = std::sqrt(tj.dot(inv * tj));
      const double expected = -p.n_inner / (g.area * a.determinant() * li * lj);
      EXPECT_NEAR(p.cos_alpha, expected, 1e-9);
      if (std::abs(p.cos_alpha) > 1e-9) EXPECT_EQ(p.cos_alpha < 0, p.n_inner > 0);
    }
  }
}

TEST(MetricAngles, SingularTensorRejected) {
  const auto g = triangle_geometry(testing_support::unit_right_triangle());
  EXPECT_THROW(metric_angles(g, Mat2::Zero()), InvalidArgument);
}

class TheoremExample51 : public ::testing::TestWithParam<int> {};

TEST_P(TheoremExample51, PassesOnMesh45AndMesh90) {
  for (MeshKind kind : {MeshKind::kMesh45, MeshKind::kMesh90}) {
    const TriMesh mesh = example51_mesh(kind, GetParam());
    const auto r = check_theorem_dmp(mesh, example51().field, quadrature(1));
    EXPECT_TRUE(r.pass()) << to_string(kind);
    EXPECT_EQ(r.pairs.size(), 3u * static_cast<std::size_t>(mesh.num_elements()));
    for (const EdgeCondition& e : r.edges) EXPECT_EQ(e.lhs, 0.0);
  }
}

TEST_P(TheoremExample51, FailsOnMesh135AtTheRightAngle) {
  const TriMesh mesh = example51_mesh(MeshKind::kMesh135, GetParam());
  const auto r = check_theorem_dmp(mesh, example51().field, quadrature(1));
  EXPECT_FALSE(r.pass());
  EXPECT_EQ(r.edge_failures(), 0);
  // Exactly one failing pair per element: the one meeting at the right angle.
  EXPECT_EQ(r.pair_failures(), mesh.num_elements());
  for (const PairCondition& p : r.pairs) {
    if (p.pass) continue;
    const auto& g = element_geometry(mesh, p.element);
    EXPECT_NEAR(g.edge_direction(p.angle.i).dot(g.edge_direction(p.angle.j)), 0.0, 1e-14);
    EXPECT_LT(p.angle.cos_alpha, 0.0);
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, TheoremExample51, ::testing::Values(8, 16, 32, 64));

TEST(TheoremDmp, RecomputedFromMoments) {
  std::mt19937 rng(3);
  const TriMesh mesh = testing_support::jittered_mesh(MeshKind::kMesh90, 4, rng);
  const ElementTerms terms = compute_element_terms(mesh, testing_support::smooth_field(30.0), quadrature(4));
  const auto r = check_theorem_dmp(mesh, terms);
  for (const PairCondition& p : r.pairs) {
    const auto& m = terms.moments[static_cast<std::size_t>(p.element)];
    const double bound = m.m[static_cast<std::size_t>(p.angle.i)] * m.m[static_cast<std::size_t>(p.angle.j)] / m.s_a;
    EXPECT_DOUBLE_EQ(p.bound, bound);
    EXPECT_DOUBLE_EQ(p.angle.n_inner, m.n_mat(p.angle.i, p.angle.j));
  }
  for (const EdgeCondition& e : r.edges) {
    const auto& g = terms.geom[static_cast<std::size_t>(e.element)];
    const auto& m = terms.moments[static_cast<std::size_t>(e.element)];
    const auto i = static_cast<std::size_t>(e.edge);
    EXPECT_NEAR(e.rhs, 2.0 * g.area * g.area / (3.0 * g.centroid_moment * g.edge_lengths[i]) * m.s_a,
                1e-12 * e.rhs);
  }
}

TEST(TheoremGeneral, ConstantFieldHasNoLipschitzTerms) {
  const TriMesh mesh = example51_mesh(MeshKind::kMesh45, 8);
  for (const GeneralCondition& c : check_theorem_general(mesh, example51().field, quadrature(1))) {
    EXPECT_EQ(c.lip, 0.0);
    EXPECT_EQ(c.angle_lhs, 0.0);
    EXPECT_TRUE(std::isinf(c.shape_rhs));
    EXPECT_TRUE(c.pass());
  }
}

TEST(TheoremGeneral, Example52ObtuseBelowMidlineOnMesh45) {
  // A12 < 0 below the midline makes the right angle obtuse in the A^-1 metric.
  // Above it, strong anisotropy can still make a 45 degree corner obtuse.
  const TriMesh mesh = generate_structured(MeshKind::kMesh45, 8, 8, Rect{});
  for (double gamma : {1.0, 20.0, 99.0}) {
    const auto terms = compute_element_terms(mesh, example52(gamma).field, quadrature(4));
    int flagged_below = 0;
    for (const GeneralCondition& c : check_theorem_general(mesh, terms)) {
      const auto k = static_cast<std::size_t>(c.element);
      const Mat2& a = terms.moments[k].a_avg;
      if (terms.geom[k].centroid.y() < 0.5 && c.min_cos_alpha < 0.0) ++flagged_below;
      if (terms.geom[k].centroid.y() < 0.5 && a(0, 1) < -1e-12 * a.trace()) {
        EXPECT_LT(c.min_cos_alpha, 0.0) << "element " << c.element;
      }
      if (c.min_cos_alpha < -1e-3) EXPECT_FALSE(c.pass()) << "element " << c.element;
    }
    EXPECT_GE(flagged_below, 8);
  }
}

TEST(FullSystem, UnitTriangleLegsFail) {
  const TriMesh mesh = testing_support::single_triangle(testing_support::unit_right_triangle());
  const auto pairs = check_full_system_condition(mesh, TensorField::constant(Mat2::Identity()), quadrature(1));
  ASSERT_EQ(pairs.size(), 3u);
  for (const FullSystemPair& p : pairs) {
    if (p.i == 1 && p.j == 2) {
      EXPECT_NEAR(p.theta, std::numbers::pi / 2, 1e-15);
      // C^2 s_a / 9 with C = 18, s_a = 1/18.
      EXPECT_NEAR(p.contribution, 2.0, 1e-13);
      EXPECT_FALSE(p.pass);
    } else {
      EXPECT_NEAR(p.theta, std::numbers::pi / 4, 1e-15);
    }
  }
}

TEST(FullSystem, MatchesAssembledBlock) {
  // The per-element contributions sum to the off-diagonal entries of Mbb.
  std::mt19937 rng(8);
  const TriMesh mesh = testing_support::jittered_mesh(MeshKind::kMesh135, 3, rng);
  const Problem p{.name = "p",
                  .field = testing_support::smooth_field(5.0),
                  .source = [](const Point&) { return 0.0; },
                  .boundary = [](const Point&) { return 0.0; },
                  .domain = Rect{}};
  const Discretization d = discretize(mesh, p, quadrature(4));
  const Eigen::MatrixXd mbb(d.system.mbb);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(mbb.rows(), mbb.cols());
  for (const FullSystemPair& fp : check_full_system_condition(mesh, d.terms)) {
    const EdgeRef a = mesh.element_edges(fp.element)[static_cast<std::size_t>(fp.i)];
    const EdgeRef b = mesh.element_edges(fp.element)[static_cast<std::size_t>(fp.j)];
    if (!a.interior() || !b.interior()) continue;
    sum(a.index, b.index) += fp.contribution;
    sum(b.index, a.index) += fp.contribution;
  }
  for (Eigen::Index r = 0; r < mbb.rows(); ++r) {
    for (Eigen::Index c = 0; c < mbb.cols(); ++c) {
      if (r != c) EXPECT_NEAR(sum(r, c), mbb(r, c), 1e-10 * mbb.cwiseAbs().maxCoeff());
    }
  }
}

TEST(FullSystem, CotPredicateDirection) {
  // rhs = 2 |K|^2 / (9 ||x - x_K||^2) = 2 * 0.25 / (9 / 18) = 1 for the unit right triangle.
  EXPECT_TRUE(full_system_cot_condition(1.0, 0.5, 1.0 / 18.0));
  EXPECT_TRUE(full_system_cot_condition(1.5, 0.5, 1.0 / 18.0));
  EXPECT_FALSE(full_system_cot_condition(0.99, 0.5, 1.0 / 18.0));
  EXPECT_FALSE(full_system_cot_condition(0.0, 0.5, 1.0 / 18.0));
}

TEST(FullSystem, ReducedPassesWhereFullFailsOnMesh45) {
  const TriMesh mesh = generate_structured(MeshKind::kMesh45, 6, 6, Rect{});
  const Discretization d = discretize_identity(mesh);
  const auto full = check_full_system_condition(mesh, d.terms);
  bool right_angle_fails = true;
  for (const FullSystemPair& p : full) {
    if (std::abs(p.theta - std::numbers::pi / 2) < 1e-12) right_angle_fails = right_angle_fails && !p.pass;
  }
  EXPECT_TRUE(right_angle_fails);
  EXPECT_TRUE(mmatrix_audit(d.reduced).offdiag_pass());
  EXPECT_TRUE(check_theorem_dmp(mesh, d.terms).pass());
}

TEST(MMatrixAudit, Example51Mesh45) {
  const TriMesh mesh = example51_mesh(MeshKind::kMesh45, 8);
  const Discretization d = discretize(mesh, example51(), quadrature(1));
  const MMatrixAudit a = mmatrix_audit(d.reduced, DenseAudit::kRequired);
  EXPECT_TRUE(a.offdiag_pass());
  EXPECT_TRUE(a.rowsums_nonnegative);
  EXPECT_LE(a.rowsum_max_dev, 1e-10);
  EXPECT_TRUE(a.dense_checked);
  EXPECT_TRUE(a.monotone);
  EXPECT_TRUE(a.boundary_coupling_nonnegative);
  EXPECT_TRUE(a.condition_b);
  EXPECT_NEAR(a.min_condition_b, 0.0, 1e-10);
}

TEST(MMatrixAudit, Example51Mesh135HasPositiveOffDiagonals) {
  const TriMesh mesh = example51_mesh(MeshKind::kMesh135, 8);
  const Discretization d = discretize(mesh, example51(), quadrature(1));
  const MMatrixAudit a = mmatrix_audit(d.reduced, DenseAudit::kRequired);
  EXPECT_FALSE(a.offdiag_pass());
  EXPECT_FALSE(a.boundary_coupling_nonnegative);
  const Eigen::MatrixXd dense(d.reduced.a_mat), bdry(d.reduced.a_bdry);
  for (const OffDiagonalEntry& e : a.offdiag_violations) {
    const double v = e.boundary ? bdry(e.row, e.col) : dense(e.row, e.col);
    EXPECT_EQ(v, e.value);
    EXPECT_GT(v, 0.0);
    if (!e.boundary) EXPECT_NE(e.row, e.col);
  }
  std::ostringstream out;
  write_offdiag_csv(a, out);
  const std::string csv = out.str();
  EXPECT_EQ(csv.rfind("row,col,block,value\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'),
            static_cast<long>(a.offdiag_violations.size()) + 1);
}

TEST(MMatrixAudit, TinySystem) {
  ReducedSystem r;
  r.a_mat.resize(1, 1);
  r.a_mat.insert(0, 0) = 2.0;
  r.a_bdry.resize(1, 2);
  r.a_bdry.insert(0, 0) = -1.0;
  r.a_bdry.insert(0, 1) = -1.0;
  r.rhs = Vector::Zero(1);
  const MMatrixAudit a = mmatrix_audit(r);
  EXPECT_TRUE(a.offdiag_pass());
  EXPECT_TRUE(a.monotone);
  EXPECT_DOUBLE_EQ(a.min_inverse_entry, 0.5);
  EXPECT_TRUE(a.boundary_coupling_nonnegative);
  EXPECT_NEAR(a.min_condition_b, 0.0, 1e-15);
  EXPECT_EQ(a.rowsum_max_dev, 0.0);
}

TEST(MMatrixAudit, DenseCap) {
  const TriMesh mesh = generate_structured(MeshKind::kMesh45, 4, 4, Rect{});
  const Discretization d = discretize_identity(mesh);
  EXPECT_THROW(mmatrix_audit(d.reduced, DenseAudit::kRequired, 10), SizeCapError);
  EXPECT_FALSE(mmatrix_audit(d.reduced, DenseAudit::kAuto, 10).dense_checked);
  EXPECT_FALSE(mmatrix_audit(d.reduced, DenseAudit::kSkip).dense_checked);
  EXPECT_TRUE(mmatrix_audit(d.reduced, DenseAudit::kAuto).dense_checked);
}

TEST(Verdict, ZeroSolutionPasses) {
  WgSolution s;
  s.u0 = Vector::Zero(4);
  s.ub = Vector::Zero(3);
  s.ub_bdry = Vector::Zero(5);
  const SolutionVerdict v = solution_verdict(s, true, true);
  EXPECT_TRUE(v.pass());
  EXPECT_EQ(v.upper_bound, 0.0);
  EXPECT_EQ(v.lower_bound, 0.0);
}

TEST(Verdict, FlagsOvershootsBeyondTolerance) {
  WgSolution s;
  s.u0 = (Vector(3) << 0.5, 1.0 + 1e-9, 1.2).finished();
  s.ub = (Vector(2) << 1.05, -0.1).finished();
  s.ub_bdry = (Vector(2) << 1.0, 0.2).finished();
  const SolutionVerdict v = solution_verdict(s, true);
  EXPECT_FALSE(v.pass());
  EXPECT_EQ(v.overshoot_elements, std::vector<int>{2});
  EXPECT_EQ(v.overshoot_edges, std::vector<int>{0});
  EXPECT_TRUE(v.undershoot_edges.empty());
  EXPECT_FALSE(v.lower_checked);
  EXPECT_DOUBLE_EQ(v.ub_all_max, 1.05);
  EXPECT_DOUBLE_EQ(v.ub_all_min, -0.1);

  const SolutionVerdict both = solution_verdict(s, true, true);
  EXPECT_EQ(both.undershoot_edges, std::vector<int>{1});

  std::ostringstream out;
  write_violation_csv(both, s, out);
  EXPECT_EQ(out.str(), "kind,index,value\nelement,2,1.2\ninterior_edge,0,1.05\ninterior_edge,1,-0.10000000000000001\n");
}

TEST(Audit, ConditionsConsistentWithSolution) {
  // Where the per-element conditions hold, the computed solution obeys the bounds.
  for (MeshKind kind : {MeshKind::kMesh45, MeshKind::kMesh90, MeshKind::kMesh135}) {
    const TriMesh mesh = example51_mesh(kind, 16);
    const Discretization d = discretize(mesh, example51(), quadrature(1));
    DmpReport rep = audit_discretization(mesh, d);
    rep.verdict = solution_verdict(solve(d), true, true);
    if (rep.conditions_pass()) {
      EXPECT_TRUE(rep.verdict->pass()) << to_string(kind);
      EXPECT_TRUE(rep.mmatrix.offdiag_pass()) << to_string(kind);
    } else {
      EXPECT_FALSE(rep.verdict->pass()) << to_string(kind);
    }
    std::ostringstream summary, angles;
    write_dmp_summary(rep, summary);
    write_angle_csv(rep, angles);
    EXPECT_NE(summary.str().find("sufficient conditions"), std::string::npos);
    const std::string csv = angles.str();
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3 * mesh.num_elements() + 1);
  }
}
