#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "instances.hpp"
#include "oracles.hpp"
#include "semicoupling/audit.hpp"
#include "semicoupling/cost.hpp"
#include "semicoupling/error.hpp"
#include "semicoupling/grid.hpp"
#include "semicoupling/measures.hpp"
#include "semicoupling/potential.hpp"
#include "semicoupling/problem.hpp"
#include "semicoupling/tolerances.hpp"
#include "semicoupling/transform.hpp"

namespace sc = semicoupling;
using sc::Matrix;
using sc::Vector;

namespace {

Vector v2(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

}  // namespace

TEST(Box, ContainsAndCorners) {
  const sc::Box box = sc::testing::unit_square();
  EXPECT_TRUE(box.contains(v2(1.0, -1.0)));
  EXPECT_FALSE(box.contains(v2(1.0 + 1e-12, 0.0)));
  const Matrix c = box.corners();
  ASSERT_EQ(c.cols(), 4);
  std::set<std::pair<double, double>> seen;
  for (int k = 0; k < 4; ++k) seen.insert({c(0, k), c(1, k)});
  EXPECT_EQ(seen.size(), 4u);
  EXPECT_DOUBLE_EQ(box.diameter(), std::sqrt(8.0));
}

TEST(Grid, FlattenRoundTripAxisZeroFastest) {
  const sc::Grid grid(sc::testing::unit_square(), {4, 3});
  EXPECT_EQ(grid.size(), 12u);
  EXPECT_EQ(grid.flatten({1, 0}), 1u);
  EXPECT_EQ(grid.flatten({0, 1}), 4u);
  for (std::size_t f = 0; f < grid.size(); ++f) EXPECT_EQ(grid.flatten(grid.unflatten(f)), f);
  EXPECT_DOUBLE_EQ(grid.spacing()[0], 0.5);
  EXPECT_DOUBLE_EQ(grid.spacing()[1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(grid.cell_volume(), 0.5 * 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(grid.center(0)[0], -0.75);
  EXPECT_DOUBLE_EQ(grid.center(0)[1], -1.0 + 1.0 / 3.0);
}

TEST(Grid, NeighborhoodIsClippedAtTheBoundary) {
  const sc::Grid grid(sc::testing::unit_square(), {5, 5});
  EXPECT_EQ(grid.neighbors(0).size(), 3u);
  EXPECT_EQ(grid.neighbors(grid.flatten({2, 0})).size(), 5u);
  EXPECT_EQ(grid.neighbors(grid.flatten({2, 2})).size(), 8u);
  EXPECT_EQ(grid.with_resolution(7).size(), 49u);
}

TEST(SourceMeasure, MidpointMassAndSampleErrors) {
  const auto src = sc::make_source(sc::testing::unit_square(), {8, 8}, [](const sc::VectorRef&) { return 2.0; });
  EXPECT_NEAR(src.total_mass(), 8.0, 1e-12);
  EXPECT_NEAR(src.max_cell_mass(), 2.0 * 4.0 / 64, 1e-15);
  try {
    sc::make_source(sc::testing::unit_square(), {4, 4}, [](const sc::VectorRef& x) { return x[0] > 0.5 ? -1.0 : 1.0; });
    FAIL() << "negative density accepted";
  } catch (const sc::DensitySampleError& e) {
    EXPECT_EQ(e.cell(), 3u);
    EXPECT_EQ(e.value(), -1.0);
  }
  EXPECT_THROW(sc::make_source(sc::testing::unit_square(), {4, 4},
                               [](const sc::VectorRef&) { return std::numeric_limits<double>::quiet_NaN(); }),
               sc::DensitySampleError);
}

TEST(TargetMeasure, WeightsAndDistances) {
  Matrix y(2, 3);
  y << 0, 1, 0, 0, 0, 2;
  const sc::TargetMeasure plain(y, {0.1, 0.2, 0.3});
  EXPECT_NEAR(plain.total_mass(), 0.6, 1e-15);
  EXPECT_EQ(plain.averaging_weights(), std::vector<double>({1, 1, 1}));
  EXPECT_DOUBLE_EQ(plain.min_pairwise_distance(), 1.0);
  const sc::TargetMeasure quad(y, {0.1, 0.2, 0.3}, std::vector<double>{0.5, 1.0, 0.5});
  EXPECT_EQ(quad.averaging_weights(), std::vector<double>({0.5, 1.0, 0.5}));
  EXPECT_THROW(sc::TargetMeasure(y, {0.1, -0.2, 0.3}), sc::ValidationError);
  EXPECT_THROW(sc::TargetMeasure(y, {0.1, 0.2}), sc::ValidationError);
}

TEST(Cost, QuadraticDerivativesMatchFiniteDifferences) {
  const auto c = sc::make_quadratic_cost();
  const Vector x = v2(0.3, -0.7);
  const Vector y = v2(-0.2, 0.4);
  EXPECT_DOUBLE_EQ(c->eval(x, y), 0.5 * (x - y).squaredNorm());
  EXPECT_LT((c->grad_x(x, y) - sc::finite_difference_grad_x(*c, x, y, 1e-5)).norm(), 1e-9);
  EXPECT_LT((c->hess_x(x, y) - Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT((sc::finite_difference_grad_y(*c, x, y, 1e-5) - (y - x)).norm(), 1e-9);
}

TEST(Cost, LogRepulsivePoleAndGradient) {
  const auto c = sc::make_log_repulsive_cost(std::log(3.0));
  const Vector x = v2(0.5, 0.1);
  const Vector y = v2(-0.1, -0.2);
  EXPECT_NEAR(c->eval(x, y), -std::log((x - y).norm()) + std::log(3.0), 1e-15);
  EXPECT_LT((c->grad_x(x, y) - sc::finite_difference_grad_x(*c, x, y, 1e-6)).norm(), 1e-8);
  const Matrix h = c->hess_x(x, y);
  EXPECT_TRUE(h.allFinite());
  EXPECT_FALSE(c->in_domain(y, y));
  EXPECT_THROW(c->eval(y, y), sc::DomainError);
}

TEST(Cost, FunctionCostFallsBackToFiniteDifferences) {
  const sc::FunctionCost c([](const sc::VectorRef& x, const sc::VectorRef& y) { return (x - y).squaredNorm() * 0.5; });
  const Vector x = v2(0.1, 0.2);
  const Vector y = v2(0.7, -0.3);
  EXPECT_LT((c.grad_x(x, y) - (x - y)).norm(), 1e-8);
  EXPECT_LT((c.hess_x(x, y) - Matrix::Identity(2, 2)).norm(), 1e-4);
  EXPECT_EQ(c.kind(), sc::CostKind::user_supplied);
}

TEST(Problem, RejectsNonAbundantSource) {
  auto src = sc::make_source(sc::testing::unit_square(), {8, 8}, [](const sc::VectorRef&) { return 0.25; });
  try {
    sc::Problem(src, sc::TargetMeasure(Matrix::Zero(2, 1), {1.0}), sc::make_quadratic_cost());
    FAIL() << "mass equal to the source accepted";
  } catch (const sc::AbundanceError& e) {
    EXPECT_NEAR(e.source_mass(), 1.0, 1e-12);
    EXPECT_NEAR(e.target_mass(), 1.0, 1e-12);
  }
  EXPECT_THROW(sc::Problem(src, sc::TargetMeasure(Matrix::Zero(3, 1), {0.1}), sc::make_quadratic_cost()),
               sc::ValidationError);
}

TEST(Problem, RefinedResamplesTheSource) {
  const auto p = sc::testing::single_dirac(16);
  const auto q = p.refined(32);
  EXPECT_EQ(q.grid().size(), 1024u);
  EXPECT_NEAR(q.source().total_mass(), 4.0, 1e-12);
  EXPECT_EQ(q.target().size(), 1);
}

TEST(Tolerances, ValidateRejectsNonPositive) {
  sc::Tolerances t;
  EXPECT_NO_THROW(t.validate());
  t.tol_mass = 0.0;
  EXPECT_THROW(t.validate(), sc::ValidationError);
  t = {};
  t.tol_tie = -1.0;
  EXPECT_THROW(t.validate(), sc::ValidationError);
  t = {};
  t.ode_rel_err = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(t.validate(), sc::ValidationError);
}

TEST(Tolerances, TieToleranceScalesWithSpacing) {
  const auto coarse = sc::testing::two_ball(64);
  const auto fine = sc::testing::two_ball(128);
  const sc::Potential psi(Vector::Constant(2, 0.07));
  const double a = sc::default_tie_tolerance(coarse, psi, 10.0);
  const double b = sc::default_tie_tolerance(fine, psi, 10.0);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(a / b, 2.0, 0.1);
  sc::Tolerances t;
  t.tol_tie = 0.01;
  EXPECT_EQ(t.tie_tolerance(coarse, psi), 0.01);
}

TEST(Transform, ScoresAndActivity) {
  const auto p = sc::testing::two_ball(16);
  const sc::Potential psi(v2(0.05, 0.02));
  const Vector x = v2(-0.3, 0.1);
  EXPECT_NEAR(sc::score(p.cost(), p.target(), psi, 0, x), 0.05 - 0.005, 1e-15);
  EXPECT_NEAR(sc::c_transform(p, psi, x), 0.045, 1e-15);
  EXPECT_TRUE(sc::is_active(p, psi, x));
  EXPECT_FALSE(sc::is_active(p, psi, v2(0.9, 0.9)));
  const auto on_bisector = sc::cell_assignment(p, sc::Potential(v2(0.05, 0.05)), v2(0.0, 0.1), 1e-12);
  EXPECT_TRUE(on_bisector.active);
  EXPECT_EQ(on_bisector.indices, std::vector<int>({0, 1}));
}

TEST(Audit, QuadraticPassesAndTwistFailureHasWitness) {
  const auto p = sc::testing::triangle(16);
  const auto ok = sc::audit_assumptions(p.cost(), p.source(), p.target(), p.tolerances());
  EXPECT_TRUE(ok.all_passed());
  EXPECT_GT(ok.samples, 0u);

  // A cost constant in x for every target cannot separate them.
  const sc::FunctionCost flat([](const sc::VectorRef&, const sc::VectorRef& y) { return y.squaredNorm(); },
                              [](const sc::VectorRef& x, const sc::VectorRef&) { return Vector(Vector::Zero(x.size())); });
  const auto bad = sc::audit_assumptions(flat, p.source(), p.target(), p.tolerances());
  EXPECT_FALSE(bad.all_passed());
  bool witnessed = false;
  for (const auto& c : bad.checks)
    if (!c.passed && c.witness_point && c.witness_targets) witnessed = true;
  EXPECT_TRUE(witnessed);
}
