#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "instances.hpp"
#include "oracles.hpp"
#include "semicoupling/dual_solver.hpp"
#include "semicoupling/error.hpp"
#include "semicoupling/hull.hpp"
#include "semicoupling/singularity.hpp"
#include "semicoupling/stratify.hpp"

namespace sc = semicoupling;
using sc::Matrix;
using sc::Vector;

namespace {

Vector v2(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

sc::Potential equal_potential(int n, double value) { return sc::Potential(Vector::Constant(n, value)); }

}  // namespace

TEST(Subdifferential, ReportsTiesWithinTolerance) {
  const auto p = sc::testing::two_ball(32);
  const auto pot = equal_potential(2, 0.07);
  const auto on = sc::subdifferential(p, pot, v2(0.0, 0.1), 1e-9);
  EXPECT_EQ(on.indices, std::vector<int>({0, 1}));
  for (double g : on.gaps) {
    EXPECT_LE(g, 0.0);
    EXPECT_GE(g, -1e-9);
  }
  const auto off = sc::subdifferential(p, pot, v2(-0.1, 0.1), 1e-9);
  EXPECT_EQ(off.indices, std::vector<int>({0}));
  EXPECT_THROW(sc::subdifferential(p, pot, v2(0.9, 0.9), 1e-9), sc::DomainError);
}

TEST(CrossDifferences, ShapeAndRank) {
  const auto p = sc::testing::triangle(16);
  const Vector x = v2(0.05, -0.02);
  EXPECT_EQ(sc::cross_diff_gradients(p.cost(), p.target(), x, {1}).rows(), 0);
  const Matrix two = sc::cross_diff_gradients(p.cost(), p.target(), x, {0, 2});
  ASSERT_EQ(two.rows(), 1);
  // grad_x of |x - y|^2/2 differences: y_0 - y_2.
  EXPECT_LT((two.row(0).transpose() - (p.target().point(0) - p.target().point(2))).norm(), 1e-15);
  const Matrix three = sc::cross_diff_gradients(p.cost(), p.target(), x, {0, 1, 2});
  EXPECT_EQ(sc::matrix_rank(three, 1e-8), 2);
  Matrix collinear(2, 2);
  collinear << 1, 2, 2, 4;
  EXPECT_EQ(sc::matrix_rank(collinear, 1e-8), 1);
  EXPECT_EQ(sc::matrix_rank(Matrix::Zero(0, 2), 1e-8), 0);
}

TEST(TangentProjector, IdempotentSymmetricAndOrthogonalToConstraints) {
  const auto p = sc::testing::triangle(16);
  const Vector x = v2(0.1, 0.3);
  const auto free = sc::tangent_projector(p.cost(), p.target(), x, {0}, 1e-8);
  EXPECT_LT((free.projector - Matrix::Identity(2, 2)).norm(), 1e-15);
  const auto edge = sc::tangent_projector(p.cost(), p.target(), x, {0, 1}, 1e-8);
  EXPECT_EQ(edge.rank, 1);
  EXPECT_EQ(edge.basis.cols(), 1);
  EXPECT_LT((edge.projector * edge.projector - edge.projector).norm(), 1e-12);
  EXPECT_LT((edge.projector - edge.projector.transpose()).norm(), 1e-15);
  const Matrix rows = sc::cross_diff_gradients(p.cost(), p.target(), x, {0, 1});
  EXPECT_LT((rows * edge.projector).norm(), 1e-12);
  const auto point = sc::tangent_projector(p.cost(), p.target(), x, {0, 1, 2}, 1e-8);
  EXPECT_TRUE(point.zero_dimensional());
  EXPECT_LT(point.projector.norm(), 1e-15);
}

TEST(Stratify, TriangleStrataAreNestedWithOneTriplePointCluster) {
  const auto p = sc::testing::triangle(96);
  const auto sol = sc::solve_dual(p);
  const auto field = sc::stratify(p, sol.potential, p.tolerances());
  EXPECT_TRUE(field.nested());
  EXPECT_EQ(field.max_label(), 3);
  EXPECT_EQ(field.count(0), p.grid().size());
  EXPECT_GE(field.count(1), field.count(2));
  EXPECT_GE(field.count(2), field.count(3));
  EXPECT_EQ(field.count(2), field.count_exact(2) + field.count_exact(3));
  for (std::size_t c = 0; c < p.grid().size(); ++c) {
    const auto& cell = field.cell(c);
    EXPECT_EQ(cell.label, cell.active ? cell.rank + 1 : 0);
    if (cell.active) {
      EXPECT_GE(cell.cardinality, cell.rank + 1);
    }
  }
  const auto z3 = sc::clusters(field, 3);
  ASSERT_EQ(z3.size(), 1u);
  const Vector tp = sc::oracle::triple_point(p.target().points(), sol.potential.psi());
  EXPECT_LT((z3.front().centroid - tp).norm(), 2 * p.grid().max_spacing());
}

TEST(Stratify, SingleTargetHasNoSingularCells) {
  const auto p = sc::testing::single_dirac(64);
  const auto sol = sc::solve_dual(p);
  const auto field = sc::stratify(p, sol.potential, p.tolerances());
  EXPECT_EQ(field.max_label(), 1);
  EXPECT_EQ(field.count(2), 0u);
  EXPECT_TRUE(sc::clusters(field, 2).empty());
}

TEST(DimensionAudit, EdgesAreOneDimensional) {
  const auto p = sc::testing::two_ball(128);
  const auto sol = sc::solve_dual(p);
  const auto fields = sc::stratify_resolutions(p, sol.potential, p.tolerances(), {64, 128, 256});
  ASSERT_EQ(fields.size(), 3u);
  const auto audit = sc::dimension_audit(fields);
  const auto* z2 = audit.estimate(2);
  ASSERT_NE(z2, nullptr);
  ASSERT_TRUE(z2->dimension.has_value());
  EXPECT_NEAR(*z2->dimension, 1.0, 0.25);
  EXPECT_DOUBLE_EQ(z2->bound, 1.0);
  EXPECT_TRUE(audit.passed());
  ASSERT_TRUE(audit.closedness_witness.has_value());
  // |grad c(., y_0) - grad c(., y_1)| = |y_0 - y_1|.
  EXPECT_NEAR(*audit.closedness_witness, 0.6, 1e-12);
  for (const auto& f : fields) EXPECT_TRUE(f.nested());
}

TEST(Hull, MinNormPointMatchesSupportFunction) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + trial % 6;
    Matrix pts(2, m);
    const Vector shift = v2(2.0 * g(rng), 2.0 * g(rng));
    for (int i = 0; i < m; ++i) pts.col(i) = shift + v2(g(rng), g(rng));
    const auto proj = sc::min_norm_point(pts);
    EXPECT_TRUE(proj.converged);
    EXPECT_NEAR(proj.distance, sc::oracle::support_hull_distance(pts), 1e-8) << trial;
    double wsum = 0.0;
    Vector combo = Vector::Zero(2);
    for (int i = 0; i < m; ++i) {
      EXPECT_GE(proj.weights[i], -1e-15);
      wsum += proj.weights[i];
      combo += proj.weights[i] * pts.col(i);
    }
    EXPECT_NEAR(wsum, 1.0, 1e-12);
    EXPECT_LT((combo - proj.nearest).norm(), 1e-12);
  }
}

TEST(Hull, OriginInsideGivesZeroAndQueriesProject) {
  Matrix pts(2, 3);
  pts << 1, -1, 0, 0, 0, 1;
  EXPECT_LT(sc::hull_distance(pts), 1e-12);
  const auto q = sc::nearest_point_in_hull(pts, v2(0.0, -2.0));
  EXPECT_NEAR(q.distance, 2.0, 1e-12);
  EXPECT_LT((q.nearest - v2(0.0, 0.0)).norm(), 1e-12);
  Matrix single(2, 1);
  single << 3, 4;
  EXPECT_NEAR(sc::hull_distance(single), 5.0, 1e-15);
}
