#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mbloch/fibers.hpp"
#include "mbloch/integrate.hpp"
#include "test_support.hpp"

using namespace mbloch;
using mbloch::testing::uniform;

TEST(Integrate, RejectsBadArguments) {
  const SystemParams p(-1);
  EXPECT_THROW(integrate(p, {0, 0, 1}, {1.0, 1.0}, 1e-8), Error);
  EXPECT_THROW(integrate(p, {0, 0, 1}, {2.0, 1.0}, 1e-8), Error);
  try {
    integrate(p, {0, 0, 1}, {0.0, 1.0}, 1e-1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ToleranceOutOfRange);
  }
  EXPECT_THROW(integrate(p, {0, 0, 1}, {0.0, 1.0}, 1e-15), Error);
}

TEST(Integrate, EquilibriumStaysFixed) {
  const Trajectory3 tr = integrate(SystemParams(-1), {0, 0, 1}, {0.0, 10.0}, 1e-10);
  EXPECT_EQ(tr.status(), IntegrationStatus::Completed);
  EXPECT_EQ(tr.t_begin(), 0.0);
  EXPECT_EQ(tr.t_end(), 10.0);
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_EQ(tr.state(i), State3(0, 0, 1));
  const DriftReport d = drift_report(SystemParams(-1), tr);
  EXPECT_EQ(d.max_abs_dH, 0.0);
  EXPECT_EQ(d.max_abs_dC, 0.0);
}

TEST(Integrate, TimesStrictlyIncreasing) {
  const Trajectory3 tr = integrate(SystemParams(-1.5), {0.3, -0.2, 0.8}, {0.5, 20.0}, 1e-9);
  EXPECT_EQ(tr.t_begin(), 0.5);
  for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_GT(tr.time(i), tr.time(i - 1));
}

TEST(Integrate, HeteroclinicApproachesSaddle) {
  const SystemParams p(-1);
  const Trajectory3 tr = integrate(p, {0, 0.5, 0.5}, {0.0, 40.0}, 1e-10);
  ASSERT_EQ(tr.status(), IntegrationStatus::Completed);
  EXPECT_LT(distance(tr.final_state(), State3(1, 0, 0)), 1e-6);
  // Against the closed form at intermediate times.
  for (double t : {1.0, 3.0, 7.0}) {
    EXPECT_LT(distance(tr.interpolate(t), heteroclinic(p, 1.0, 0.0, Sign::Plus, t)), 1e-8);
  }
}

TEST(Integrate, SecantSolutionBlowsUpBeforePole) {
  const Trajectory3 tr = integrate(SystemParams(-1), {2, 0, -1}, {0.0, 2.0}, 1e-10);
  EXPECT_EQ(tr.status(), IntegrationStatus::BlowUp);
  EXPECT_LT(tr.t_end(), std::numbers::pi / 2);
  EXPECT_GT(tr.t_end(), std::numbers::pi / 2 - 1e-3);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    for (double v : tr.state(i).to_array()) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(Integrate, MaxStepsCap) {
  IntegrateOptions opt;
  opt.max_steps = 5;
  const Trajectory3 tr = integrate(SystemParams(-1), {0.5, 0, 1}, {0.0, 100.0}, 1e-10, opt);
  EXPECT_EQ(tr.status(), IntegrationStatus::MaxSteps);
}

TEST(Integrate, DenseOutputReproducesQuintics) {
  // Hand-built nodes from y(t) = t^5 - 2t^3 + t on [0, 1]: quintic Hermite is exact.
  using Node = Trajectory3::Node;
  auto y = [](double t) { return std::pow(t, 5) - 2 * std::pow(t, 3) + t; };
  auto dy = [](double t) { return 5 * std::pow(t, 4) - 6 * t * t + 1; };
  auto ddy = [](double t) { return 20 * std::pow(t, 3) - 12 * t; };
  auto node = [&](double t) { return Node{t, {y(t), 0, 0}, {dy(t), 0, 0}, {ddy(t), 0, 0}}; };
  const Trajectory3 tr({node(0.0), node(0.4), node(1.0)}, 1e-10, IntegrationStatus::Completed);
  for (double t = 0; t <= 1.0; t += 0.05) {
    EXPECT_NEAR(tr.interpolate(t).x(), y(t), 1e-13);
    EXPECT_NEAR(tr.interpolate_derivative(t)[0], dy(t), 1e-12);
  }
  EXPECT_THROW(tr.interpolate(1.5), Error);
}

TEST(Integrate, DenseOutputMatchesClosedForm) {
  const SystemParams p(-1);
  const Trajectory3 tr = integrate(p, {0, 0.5, 0.5}, {0.0, 10.0}, 1e-11);
  for (double t = 0.013; t < 10.0; t += 0.137) {
    EXPECT_LT(distance(tr.interpolate(t), heteroclinic(p, 1.0, 0.0, Sign::Plus, t)), 1e-9);
  }
}

TEST(Integrate4, LinearSolutionAtRest) {
  const Trajectory4 tr = integrate4(SystemParams(-1), {0, 0, 0, 1}, {0.0, 5.0}, 1e-10);
  ASSERT_EQ(tr.status(), IntegrationStatus::Completed);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const State4 s = tr.state(i);
    EXPECT_NEAR(s.q2(), -tr.time(i), 1e-12);
    EXPECT_EQ(s.q1(), 0.0);
    EXPECT_EQ(s.p1(), 0.0);
    EXPECT_EQ(s.p2(), 1.0);
  }
}

TEST(Integrate4, PushforwardMatches3DFlow) {
  const SystemParams p(-1);
  // realization_map(0, q2, 0.5, 0.5) = (0, 0.5, 0.5)
  const State4 s4(0, 0.3, 0.5, 0.5);
  ASSERT_EQ(realization_map(s4), State3(0, 0.5, 0.5));
  const Trajectory4 t4 = integrate4(p, s4, {0.0, 10.0}, 1e-10);
  const Trajectory3 t3 = integrate(p, {0, 0.5, 0.5}, {0.0, 10.0}, 1e-10);
  for (std::size_t i = 0; i < t4.size(); ++i) {
    EXPECT_EQ(t4.state(i).p2(), 0.5);
    EXPECT_LT(distance(realization_map(t4.state(i)), t3.interpolate(t4.time(i))), 1e-7);
  }
}

TEST(Integrate, ConservationDrift) {
  const SystemParams p(-1);
  const Trajectory3 tr = integrate(p, {0.1, 0, 1}, {0.0, 100.0}, 1e-10);
  const DriftReport d = drift_report(p, tr);
  EXPECT_LE(d.max_abs_dH, 1e-7);
  EXPECT_LE(d.max_abs_dC, 1e-7);
  // Report equals maxima recomputed from stored samples.
  double mh = 0, mc = 0;
  const State3 s0 = tr.state(0);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    mh = std::max(mh, std::abs(hamiltonian(p, tr.state(i)) - hamiltonian(p, s0)));
    mc = std::max(mc, std::abs(casimir(tr.state(i)) - casimir(s0)));
  }
  EXPECT_EQ(d.max_abs_dH, mh);
  EXPECT_EQ(d.max_abs_dC, mc);
}

TEST(Integrate, ProjectionOptionHoldsLevels) {
  const SystemParams p(-2);
  IntegrateOptions opt;
  opt.project_onto_levels = true;
  const Trajectory3 tr = integrate(p, {0.2, 0.1, 0.9}, {0.0, 50.0}, 1e-6, opt);
  const DriftReport d = drift_report(p, tr);
  EXPECT_LE(d.max_abs_dH, 1e-13);
  EXPECT_LE(d.max_abs_dC, 1e-13);
}

// Error vs. step count on the heteroclinic trajectory, against the exact solution.
TEST(Integrate, ConvergenceOrder) {
  const SystemParams p(-1);
  const State3 exact = heteroclinic(p, 1.0, 0.0, Sign::Plus, 6.0);
  std::vector<double> errs, steps;
  for (double tol : {1e-5, 1e-6, 1e-7, 1e-8, 1e-9}) {
    const Trajectory3 tr = integrate(p, {0, 0.5, 0.5}, {0.0, 6.0}, tol);
    errs.push_back(distance(tr.final_state(), exact));
    steps.push_back(static_cast<double>(tr.size() - 1));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) EXPECT_LT(errs[i], errs[i - 1]);
  const double order = -std::log(errs.back() / errs.front()) / std::log(steps.back() / steps.front());
  EXPECT_GE(order, 4.0);
}

// (x, y, z, t) -> (x, -y, z, -t) is a symmetry, so the backward flow is the
// forward flow of the reflected state.
TEST(Integrate, TimeReversalConsistency) {
  const SystemParams p(-1.3);
  for (int trial = 0; trial < 5; ++trial) {
    const State3 s0(uniform(-0.5, 0.5), uniform(-0.5, 0.5), uniform(0.5, 1.5));
    const double T = 15.0;
    const double tol = 1e-9;
    const State3 s1 = integrate(p, s0, {0.0, T}, tol).final_state();
    const State3 s1_ref = integrate(p, s0, {0.0, T}, 1e-13).final_state();
    const double one_way = std::max(distance(s1, s1_ref), 1e-14);
    const State3 back = integrate(p, {s1.x(), -s1.y(), s1.z()}, {0.0, T}, tol).final_state();
    const State3 returned(back.x(), -back.y(), back.z());
    EXPECT_LE(distance(returned, s0), 10.0 * one_way);
  }
}

TEST(SectionCrossings, HalfPeriodSpacingNearCenter) {
  const SystemParams p(-1);
  const Trajectory3 tr = integrate(p, {0.01, 0, 1}, {0.0, 30.0}, 1e-11);
  const auto cr = find_section_crossings(tr, [](const State3& s) { return s.y(); },
                                         CrossingDirection::Both);
  ASSERT_GE(cr.size(), 8u);
  for (std::size_t i = 1; i < cr.size(); ++i) {
    EXPECT_NEAR(cr[i].t - cr[i - 1].t, std::numbers::pi, 0.01);
  }
  for (const auto& c : cr) EXPECT_LE(std::abs(c.state.y()), 1e-11);
}

TEST(SectionCrossings, ConstantSignGivesNothing) {
  const Trajectory3 tr = integrate(SystemParams(-1), {0.01, 0, 1}, {0.0, 30.0}, 1e-9);
  EXPECT_TRUE(find_section_crossings(tr, [](const State3& s) { return s.z() + 5.0; },
                                     CrossingDirection::Both)
                  .empty());
}

TEST(SectionCrossings, InitialZeroExcluded) {
  // y(0) = 0 and y'(0) = k x z > 0 for x < 0.
  const Trajectory3 tr = integrate(SystemParams(-1), {-0.05, 0, 1}, {0.0, 20.0}, 1e-10);
  const auto cr = find_section_crossings(tr, [](const State3& s) { return s.y(); },
                                         CrossingDirection::Positive);
  ASSERT_FALSE(cr.empty());
  EXPECT_GT(cr.front().t, 1.0);
  EXPECT_NEAR(cr.front().t, 2 * std::numbers::pi, 0.05);
}
