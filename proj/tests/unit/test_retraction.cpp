#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "instances.hpp"
#include "oracles.hpp"
#include "semicoupling/dual_solver.hpp"
#include "semicoupling/error.hpp"
#include "semicoupling/fields.hpp"
#include "semicoupling/integrator.hpp"
#include "semicoupling/retraction.hpp"
#include "semicoupling/singularity.hpp"
#include "semicoupling/stratify.hpp"
#include "semicoupling/transform.hpp"
#include "semicoupling/uhs.hpp"

namespace sc = semicoupling;
using sc::Matrix;
using sc::Vector;

namespace {

Vector v2(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

sc::FlowSystem blowup_system(double beta) {
  sc::FlowSystem sys;
  sys.velocity = [beta](const Vector& x) {
    if (!(x[0] > 0.0)) throw sc::DomainError("past the pole");
    return Vector(Vector::Constant(1, -beta * std::pow(x[0], -1.0 - beta)));
  };
  sys.gap = [](const Vector& x) { return x[0]; };
  return sys;
}

// Solved problems are shared across tests; each costs a dual solve.
const sc::Problem& dirac128() {
  static const auto p = sc::testing::single_dirac(128);
  return p;
}
const sc::Potential& dirac128_potential() {
  static const auto pot = sc::solve_dual(dirac128()).potential;
  return pot;
}
const sc::Problem& triangle128() {
  static const auto p = sc::testing::triangle(128);
  return p;
}
const sc::Potential& triangle128_potential() {
  static const auto pot = sc::solve_dual(triangle128()).potential;
  return pot;
}

sc::FieldSpec cellular_spec() {
  sc::FieldSpec spec;
  spec.mode = sc::FlowMode::cellular;
  spec.stratum = 2;
  return spec;
}

}  // namespace

TEST(Integrator, OneDimensionalBlowUpTimeAndProfile) {
  sc::IntegratorOptions opt;
  const auto traj = sc::integrate(blowup_system(2.0), Vector::Constant(1, 1.0), opt);
  ASSERT_EQ(traj.terminated_by, sc::Termination::pole_reached);
  EXPECT_NEAR(traj.omega, sc::oracle::blowup_time(1.0, 2.0), 1e-6);
  // Away from the pole the profile is well conditioned in t.
  double worst = 0.0;
  for (const auto& s : traj.samples)
    if (s.x[0] >= 0.5) worst = std::max(worst, std::abs(s.x[0] - sc::oracle::blowup_profile(1.0, 2.0, s.t)));
  EXPECT_LT(worst, 1e-7);
  EXPECT_GT(traj.endpoint[0], 0.0);
  EXPECT_LE(traj.endpoint[0], opt.eps_stop / 10);
  for (std::size_t k = 1; k < traj.samples.size(); ++k) EXPECT_LT(traj.samples[k].gap, traj.samples[k - 1].gap);
}

TEST(Integrator, SupNormProfileNeedsTimeAccuracyNearThePole) {
  // A time offset d moves x by (8 d)^{1/4} near the pole, so the full
  // sup-norm match needs omega to about 1e-13.
  sc::IntegratorOptions opt;
  opt.rel_err = 1e-13;
  const auto traj = sc::integrate(blowup_system(2.0), Vector::Constant(1, 1.0), opt);
  ASSERT_EQ(traj.terminated_by, sc::Termination::pole_reached);
  EXPECT_NEAR(traj.omega, 0.125, 1e-13);
  double sup = 0.0;
  for (const auto& s : traj.samples) sup = std::max(sup, std::abs(s.x[0] - sc::oracle::blowup_profile(1.0, 2.0, s.t)));
  EXPECT_LE(sup, 1e-3);
}

TEST(Integrator, BlowUpTimeScalesWithSeedAndExponent) {
  for (double beta : {2.0, 3.0}) {
    for (double x0 : {0.5, 2.0}) {
      const auto traj = sc::integrate(blowup_system(beta), Vector::Constant(1, x0), {});
      ASSERT_EQ(traj.terminated_by, sc::Termination::pole_reached);
      EXPECT_NEAR(traj.omega / sc::oracle::blowup_time(x0, beta), 1.0, 1e-6) << beta << " " << x0;
    }
  }
}

TEST(Integrator, TerminationReasons) {
  sc::FlowSystem still;
  still.velocity = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
  still.gap = [](const Vector& x) { return x[0]; };
  EXPECT_EQ(sc::integrate(still, Vector::Constant(1, 1.0), {}).terminated_by, sc::Termination::field_vanished);

  sc::FlowSystem slow;
  slow.velocity = [](const Vector& x) { return Vector(Vector::Constant(x.size(), -1e-3)); };
  slow.gap = [](const Vector& x) { return x[0]; };
  sc::IntegratorOptions opt;
  opt.max_time = 1.0;
  const auto t = sc::integrate(slow, Vector::Constant(1, 1.0), opt);
  EXPECT_EQ(t.terminated_by, sc::Termination::max_time);
  EXPECT_NEAR(t.omega, 1.0, 1e-12);

  const auto at_pole = sc::integrate(slow, Vector::Constant(1, 1e-6), {});
  EXPECT_EQ(at_pole.terminated_by, sc::Termination::pole_reached);
  EXPECT_EQ(at_pole.omega, 0.0);
  EXPECT_EQ(sc::termination_from_string(sc::to_string(sc::Termination::field_vanished)),
            sc::Termination::field_vanished);
}

TEST(Fields, OffDomainFieldIsTheGradientOfTheAverage) {
  const auto p = sc::testing::two_ball(32);
  Vector psi(2);
  psi << 0.06, 0.07;
  const sc::Potential pot(psi);
  sc::FieldSpec spec;
  for (const Vector& x : {v2(0.0, 0.6), v2(-0.8, -0.5), v2(0.7, 0.2)}) {
    ASSERT_GT(sc::u_min(p, pot, x), 0.0);
    const Vector eta = sc::eta_off_domain(p, pot, x, spec);
    const Vector fd = sc::oracle::fd_gradient([&](const Vector& z) { return sc::f_avg(p, pot, z, spec); }, x, 1e-4);
    EXPECT_LT((eta - fd).norm() / eta.norm(), 1e-7);
    const auto terms = sc::off_domain_terms(p, pot, x, spec);
    EXPECT_LT((terms.integrands.rowwise().sum() - eta).norm(), 1e-14);
    EXPECT_LT((terms.directions.col(1) - (x - p.target().point(1))).norm(), 1e-15);
  }
  EXPECT_NEAR(sc::u_min(p, pot, v2(0.0, 0.6)), -sc::c_transform(p, pot, v2(0.0, 0.6)), 1e-15);
  EXPECT_THROW(sc::f_avg(p, pot, v2(-0.3, 0.0), spec), sc::DomainError);
}

TEST(Fields, NuWeightIsACappedDistanceProduct) {
  const auto p = sc::testing::triangle(16);
  sc::FieldSpec spec;
  const double side = std::sqrt(3.0) * 0.5;
  EXPECT_NEAR(sc::nu_weight(p, {0}, 1, spec), side, 1e-12);
  EXPECT_NEAR(sc::nu_weight(p, {0, 1}, 2, spec), side * side, 1e-12);
  spec.order = {3.0, 1.0, 1.0};
  EXPECT_NEAR(sc::nu_weight(p, {0}, 2, spec), std::pow(side, 3), 1e-12);
  EXPECT_EQ(sc::nu_weight(p, {}, 2, spec), 1.0);
}

TEST(Fields, CellularFieldDoesNotDependOnTheAnchor) {
  const auto& p = triangle128();
  const auto& pot = triangle128_potential();
  const auto spec = cellular_spec();
  const Vector tp = sc::oracle::triple_point(p.target().points(), pot.psi());
  // Points on the tie variety of {0, 1}: the bisector through the triple point.
  const Vector along = (p.target().point(0) - p.target().point(1)).unitOrthogonal();
  for (double s : {0.1, 0.25, 0.4}) {
    Vector x = tp + s * (along[1] > 0 ? along : Vector(-along));
    x = sc::project_to_ties(p, pot, x, {0, 1}, 1e-14);
    EXPECT_LT(sc::tie_residual(p, pot, x, {0, 1}).norm(), 1e-13);
    const auto a = sc::cellular_terms(p, pot, x, {0, 1}, 0, spec, 1e-8);
    const auto b = sc::cellular_terms(p, pot, x, {0, 1}, 1, spec, 1e-8);
    EXPECT_LT((a.eta - b.eta).norm(), 1e-10 * std::max(1.0, a.eta.norm()));
    EXPECT_GT(sc::next_tie_gap(p, pot, x, {0, 1}), 0.0);
  }
}

TEST(Flow, RadialOffDomainFlowMatchesTheClosedForm) {
  const auto& p = dirac128();
  const auto& pot = dirac128_potential();
  const double r_star = std::sqrt(2 * pot[0]);
  for (double angle : {0.3, 2.0, 4.4}) {
    const Vector seed = 0.8 * v2(std::cos(angle), std::sin(angle));
    const auto traj = sc::integrate_flow(seed, {}, p, pot, p.tolerances());
    ASSERT_EQ(traj.terminated_by, sc::Termination::pole_reached);
    const double r_end = traj.endpoint.norm();
    EXPECT_NEAR(r_end, r_star, 1e-4);
    // Radial: the endpoint stays on the seed's ray.
    EXPECT_LT(std::abs(traj.endpoint[0] * seed[1] - traj.endpoint[1] * seed[0]), 1e-9);
    EXPECT_NEAR(traj.omega / sc::oracle::radial_flow_time(0.8, r_end, pot[0]), 1.0, 1e-6);
    for (std::size_t k = 1; k < traj.samples.size(); ++k) EXPECT_LT(traj.samples[k].gap, traj.samples[k - 1].gap);
  }
}

TEST(Flow, ReparameterizationStartsAtTheSeedAndEndsAtThePole) {
  const auto& p = dirac128();
  const auto& pot = dirac128_potential();
  const Vector seed = v2(0.6, -0.5);
  const auto traj = sc::integrate_flow(seed, {}, p, pot, p.tolerances());
  const auto rp = sc::reparameterize(traj, 17);
  ASSERT_EQ(rp.s.size(), 17u);
  EXPECT_EQ(rp.s.front(), 0.0);
  EXPECT_EQ(rp.s.back(), 1.0);
  EXPECT_TRUE((rp.x.col(0) - seed).isZero(0.0));
  EXPECT_LT((rp.x.col(16) - traj.endpoint).norm(), 1e-12);
  for (int k = 1; k < 17; ++k)
    EXPECT_LT(sc::u_min(p, pot, rp.x.col(k)), sc::u_min(p, pot, rp.x.col(k - 1)));

  sc::Trajectory stuck = traj;
  stuck.terminated_by = sc::Termination::field_vanished;
  EXPECT_THROW(sc::reparameterize(stuck), sc::ValidationError);
}

TEST(Flow, CellularFlowStaysOnTheEdgeAndGainsATie) {
  const auto& p = triangle128();
  const auto& pot = triangle128_potential();
  const sc::FlowField field(p, pot, cellular_spec(), p.tolerances());
  const Vector tp = sc::oracle::triple_point(p.target().points(), pot.psi());
  const Vector seed = tp + v2(0.0, -0.3);
  std::vector<int> tied;
  field.system(seed, &tied);
  EXPECT_EQ(tied, std::vector<int>({1, 2}));
  const auto traj = field.integrate(seed);
  ASSERT_EQ(traj.terminated_by, sc::Termination::pole_reached);
  EXPECT_LE(traj.max_drift, field.tie());
  EXPECT_LT((traj.endpoint - tp).norm(), 1e-3);
  const auto end = sc::subdifferential(p, pot, traj.endpoint, field.tie());
  EXPECT_EQ(end.indices, std::vector<int>({0, 1, 2}));
  // A seed off Z_2 is outside the cellular region.
  EXPECT_THROW(field.system(v2(0.0, 0.45)), sc::DomainError);
}

TEST(UHS, SingleDiracPassesOnTheWholeOffDomain) {
  const auto& p = dirac128();
  const auto& pot = dirac128_potential();
  const sc::FieldSpec spec;
  const Matrix samples = sc::region_samples(p, pot, spec, p.tolerances(), 21);
  ASSERT_GT(samples.cols(), 100);
  for (int k = 0; k < samples.cols(); ++k) EXPECT_GT(sc::u_min(p, pot, samples.col(k)), 0.0);
  const auto report = sc::uhs_check(samples, p, pot, spec, p.tolerances());
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.region, "X-A");
  EXPECT_EQ(report.property_c_violations, 0u);
  // One direction per sample, so the hull distance is |x|.
  EXPECT_NEAR(report.min_hull_distance, std::sqrt(2 * pot[0]), 0.1);
}

TEST(UHS, BoundaryTargetsFailAtTheCentre) {
  const auto p = sc::testing::boundary_targets(128);
  const auto pot = sc::solve_dual(p).potential;
  const sc::FieldSpec spec;
  const Matrix samples = sc::region_samples(p, pot, spec, p.tolerances(), 33);
  const auto report = sc::uhs_check(samples, p, pot, spec, p.tolerances());
  EXPECT_FALSE(report.passed());
  ASSERT_TRUE(report.worst.has_value());
  EXPECT_LT(report.samples[*report.worst].x.norm(), 1e-12);
  EXPECT_LE(report.samples[*report.worst].hull_distance, p.tolerances().eps_uhs);
}

TEST(UHS, RejectsEmptyAndOutOfRegionSamples) {
  const auto& p = dirac128();
  const auto& pot = dirac128_potential();
  EXPECT_THROW(sc::uhs_check(Matrix(2, 0), p, pot, {}, p.tolerances()), sc::ValidationError);
  Matrix active(2, 1);
  active << 0.0, 0.0;
  EXPECT_THROW(sc::uhs_check(active, p, pot, {}, p.tolerances()), sc::DomainError);
  EXPECT_EQ(sc::region_name(cellular_spec()), "Z_2-Z_3");
}

TEST(Lattice, IncludesTheFaces) {
  const Matrix l = sc::lattice(sc::testing::unit_square(), {3, 5});
  ASSERT_EQ(l.cols(), 15);
  EXPECT_EQ(l(0, 0), -1.0);
  EXPECT_EQ(l(0, 2), 1.0);
  EXPECT_EQ(l(1, 14), 1.0);
  EXPECT_DOUBLE_EQ(l(1, 3), -0.5);
}

TEST(RegionFlow, NeighbourRatiosAreFiniteForAPassingRegion) {
  const auto& p = dirac128();
  const auto& pot = dirac128_potential();
  Matrix seeds(2, 12);
  for (int k = 0; k < 12; ++k) seeds.col(k) = (0.6 + 0.02 * (k % 3)) * v2(std::cos(0.5 * k), std::sin(0.5 * k));
  const auto flow = sc::retract_region(seeds, {}, p, pot, p.tolerances());
  EXPECT_TRUE(flow.all_pole_reached());
  EXPECT_EQ(flow.pole_reached, 12u);
  EXPECT_TRUE(std::isfinite(flow.max_neighbor_ratio));
  EXPECT_GE(flow.max_neighbor_ratio, flow.median_neighbor_ratio);
}
