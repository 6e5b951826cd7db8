#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "instances.hpp"
#include "oracles.hpp"
#include "semicoupling/dual_solver.hpp"
#include "semicoupling/error.hpp"

namespace sc = semicoupling;
using sc::Vector;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(DualSolver, SingleDiracReachesTheDiscreteThreshold) {
  for (int n : {64, 128}) {
    const auto p = sc::testing::single_dirac(n);
    const auto sol = sc::solve_dual(p);
    const double expected = sc::oracle::discrete_dirac_potential(p.grid(), 0.5);
    EXPECT_NEAR(sol.potential[0], expected, 1e-12) << n;
    EXPECT_LE(sol.residual, p.tolerances().tol_mass);
    EXPECT_NEAR(sum(sol.cell_masses), 0.5, 1e-12);
  }
}

TEST(DualSolver, DualValueMatchesDirectSum) {
  const auto p = sc::testing::two_ball(64);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.05, 0.2);
  for (int k = 0; k < 10; ++k) {
    Vector psi(2);
    psi << u(rng), u(rng);
    EXPECT_NEAR(sc::dual_functional(p, sc::Potential(psi)), sc::oracle::dual_value(p, psi), 1e-13);
  }
}

TEST(DualSolver, WeakDualityAtArbitraryPotentials) {
  const auto p = sc::testing::triangle(48);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  for (int k = 0; k < 10; ++k) {
    Vector psi(3);
    psi << u(rng), u(rng), u(rng);
    const sc::Potential pot(psi);
    EXPECT_GE(sc::primal_cost(p, pot), sc::dual_functional(p, pot) - 1e-14) << psi.transpose();
  }
}

TEST(DualSolver, SupergradientInequalityHolds) {
  // Concavity: F(b) <= F(a) + g(a) . (b - a) for a supergradient g(a).
  const auto p = sc::testing::two_ball(48);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.15);
  for (int k = 0; k < 20; ++k) {
    Vector a(2);
    Vector b(2);
    a << u(rng), u(rng);
    b << u(rng), u(rng);
    const double fa = sc::dual_functional(p, sc::Potential(a));
    const double fb = sc::dual_functional(p, sc::Potential(b));
    const Vector g = sc::dual_gradient(p, sc::Potential(a));
    EXPECT_LE(fb, fa + g.dot(b - a) + 1e-14);
  }
}

TEST(DualSolver, MassesSumToTheActiveMass) {
  const auto p = sc::testing::triangle(64);
  Vector psi(3);
  psi << 0.1, 0.12, 0.08;
  const sc::Potential pot(psi);
  EXPECT_NEAR(sum(sc::cell_masses(p, pot)), sc::active_mass(p, pot), 1e-12);
}

TEST(DualSolver, SymmetricPairGetsEqualPotentials) {
  const auto p = sc::testing::two_ball(128);
  const auto sol = sc::solve_dual(p);
  EXPECT_NEAR(sol.potential[0], sol.potential[1], 1e-6);
  EXPECT_GE(sol.gap(), -1e-12);
  EXPECT_LE(sol.relative_gap(), 1e-6);
  EXPECT_NEAR(sol.dual_value, sc::oracle::dual_value(p, sol.potential.psi()), 1e-12);
}

TEST(DualSolver, GridAlignedTiesAreSplitToMatchTheMasses) {
  // Collinear targets on a grid row: each Laguerre boundary is a whole column
  // whose mass exceeds tol_mass, so only fractional splits can meet it.
  const auto p = sc::testing::axis_aligned_segment(128);
  const auto sol = sc::solve_dual(p);
  EXPECT_LE(sol.residual, p.tolerances().tol_mass);
  EXPECT_GE(sol.gap(), -1e-12);
  EXPECT_LE(sol.relative_gap(), 1e-2);
}

TEST(DualSolver, LogRepulsiveCostConverges) {
  const auto p = sc::testing::load_shipped(sc::testing::problems_dir() + "/log_repulsive.yaml", 96);
  const auto sol = sc::solve_dual(p);
  EXPECT_LE(sol.residual, p.tolerances().tol_mass);
  EXPECT_LE(std::abs(sol.relative_gap()), 1e-6);
}

TEST(DualSolver, IterationCapRaisesConvergenceError) {
  const auto p = sc::testing::two_ball(32);
  sc::SolverOptions opt;
  opt.max_iters = 0;
  opt.initial_psi = Vector::Zero(2);
  try {
    sc::solve_dual(p, opt);
    FAIL() << "no error at zero iterations";
  } catch (const sc::ConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 0);
    EXPECT_NEAR(e.residual(), 0.4, 1e-12);
  }
}

TEST(DualSolver, WrongSizedInitialPotentialIsRejected) {
  const auto p = sc::testing::two_ball(16);
  sc::SolverOptions opt;
  opt.initial_psi = Vector::Zero(3);
  EXPECT_THROW(sc::solve_dual(p, opt), sc::ValidationError);
}

TEST(DualSolver, LogRecordsEveryIterate) {
  const auto p = sc::testing::triangle(64);
  const auto sol = sc::solve_dual(p);
  ASSERT_FALSE(sol.log.empty());
  EXPECT_EQ(sol.log.front().method, "init");
  // Line searches and exact coordinate maximization never decrease the dual.
  for (std::size_t k = 1; k < sol.log.size(); ++k)
    EXPECT_GE(sol.log[k].dual_value, sol.log[k - 1].dual_value - 1e-15) << sol.log[k].method;
}

TEST(DualSolver, RandomStartsAgree) {
  // The maximizer is unique, so restarts agree once the stopping residual is
  // tight; at the default tol_mass psi is only pinned to ~1e-4.
  const auto base = sc::testing::triangle(96);
  sc::Tolerances tight = base.tolerances();
  tight.tol_mass = 1e-10;
  const sc::Problem p(base.source(), base.target(), base.cost_ptr(), tight);
  sc::SolverOptions ref_opt;
  ref_opt.max_iters = 400;
  const auto ref = sc::solve_dual(p, ref_opt);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 0.4);
  for (int k = 0; k < 4; ++k) {
    sc::SolverOptions opt = ref_opt;
    opt.initial_psi = Vector(3);
    *opt.initial_psi << u(rng), u(rng), u(rng);
    const auto sol = sc::solve_dual(p, opt);
    EXPECT_LE(sol.residual, p.tolerances().tol_mass);
    EXPECT_LT((sol.potential.psi() - ref.potential.psi()).lpNorm<Eigen::Infinity>(), 1e-6) << k;
    EXPECT_NEAR(sol.dual_value, ref.dual_value, 1e-12);
  }
}
