#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <vector>

#include "mbloch/equilibria.hpp"
#include "mbloch/integrate.hpp"
#include "test_support.hpp"

using namespace mbloch;
using mbloch::testing::uniform;
using cd = std::complex<double>;

namespace {

std::vector<cd> numeric_spectrum(const SystemParams& p, const State3& s) {
  const Matrix3 J = jacobian(p, s);
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = J[i][j];
  Eigen::EigenSolver<Eigen::Matrix3d> es(m, false);
  std::vector<cd> out(es.eigenvalues().data(), es.eigenvalues().data() + 3);
  return out;
}

// Every closed-form eigenvalue is matched by a distinct numeric one.
double spectral_mismatch(const Spectrum& closed, std::vector<cd> numeric) {
  double worst = 0.0;
  for (const cd& l : closed) {
    auto it = std::min_element(numeric.begin(), numeric.end(),
                               [&](cd a, cd b) { return std::abs(a - l) < std::abs(b - l); });
    worst = std::max(worst, std::abs(*it - l));
    numeric.erase(it);
  }
  return worst;
}

void expect_spectrum(const Spectrum& s, cd a, cd b, cd c) {
  EXPECT_NEAR(std::abs(s[0] - a), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s[1] - b), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s[2] - c), 0.0, 1e-15);
}

}  // namespace

TEST(Eigenvalues, Examples) {
  const SystemParams p(-1);
  expect_spectrum(eigenvalues_at(p, {EquilibriumFamily::E2, -1}), 0, 1, -1);
  expect_spectrum(eigenvalues_at(p, {EquilibriumFamily::E2, 1}), 0, cd(0, 1), cd(0, -1));
  expect_spectrum(eigenvalues_at(p, {EquilibriumFamily::E1, 2}), 0, 2, -2);
}

TEST(Eigenvalues, MatchNumericEigenSolve) {
  for (int trial = 0; trial < 50; ++trial) {
    const SystemParams p(-uniform(0.1, 4.0));
    const double M = uniform(-3, 3);
    for (auto fam : {EquilibriumFamily::E1, EquilibriumFamily::E2}) {
      const Equilibrium e(fam, M);
      EXPECT_LE(spectral_mismatch(eigenvalues_at(p, e), numeric_spectrum(p, e.point())), 1e-10);
    }
  }
}

TEST(ArnoldTest, Examples) {
  ArnoldResult a = arnold_test(SystemParams(-1), 3);
  EXPECT_EQ(a.multiplier, -3);
  EXPECT_EQ(a.diagonal.first, 3);
  EXPECT_EQ(a.diagonal.second, 1);
  EXPECT_TRUE(a.positive_definite);

  a = arnold_test(SystemParams(-2), -1);
  EXPECT_EQ(a.multiplier, 2);
  EXPECT_EQ(a.diagonal.first, -2);
  EXPECT_FALSE(a.positive_definite);

  a = arnold_test(SystemParams(-1), 0.0);
  EXPECT_EQ(a.diagonal.first, 0.0);
  EXPECT_FALSE(a.positive_definite);
}

TEST(ArnoldTest, CriticalMultiplierKillsGradient) {
  for (int trial = 0; trial < 100; ++trial) {
    const SystemParams p(-uniform(0.1, 4.0));
    const double M = uniform(-3, 3);
    const State3 e(0, 0, M);
    const double lambda = arnold_test(p, M).multiplier;
    const Vec3 dH = hamiltonian_gradient(p, e);
    const Vec3 dC = casimir_gradient(e);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(dH[i] - lambda * dC[i], 0.0);
  }
}

TEST(Classify, Examples) {
  const SystemParams p(-1);
  const StabilityVerdict s = classify_equilibrium(p, {EquilibriumFamily::E2, 1});
  EXPECT_EQ(s.verdict, Verdict::NonlinearStable);
  ASSERT_TRUE(s.arnold_multiplier.has_value());
  EXPECT_EQ(*s.arnold_multiplier, -1);
  EXPECT_EQ(s.arnold_form_diagonal->first, 1);
  EXPECT_EQ(s.arnold_form_diagonal->second, 1);
  EXPECT_EQ(classify_equilibrium(p, {EquilibriumFamily::E2, -1}).verdict, Verdict::Unstable);
  EXPECT_EQ(classify_equilibrium(p, {EquilibriumFamily::E1, 5}).verdict, Verdict::Unstable);
  EXPECT_EQ(classify_equilibrium(p, {EquilibriumFamily::E1, 0}).verdict, Verdict::DegenerateOrigin);
  EXPECT_EQ(classify_equilibrium(p, {EquilibriumFamily::E2, 0}).verdict, Verdict::DegenerateOrigin);
}

TEST(Classify, VerdictInvariants) {
  for (int trial = 0; trial < 200; ++trial) {
    const SystemParams p(-uniform(0.1, 4.0));
    const Equilibrium e(trial % 2 ? EquilibriumFamily::E1 : EquilibriumFamily::E2, uniform(-3, 3));
    const StabilityVerdict v = classify_equilibrium(p, e);
    EXPECT_TRUE(std::any_of(v.eigenvalues.begin(), v.eigenvalues.end(),
                            [](cd l) { return l == cd(0, 0); }));
    if (v.verdict == Verdict::Unstable) {
      EXPECT_TRUE(std::any_of(v.eigenvalues.begin(), v.eigenvalues.end(),
                              [](cd l) { return l.real() > 0; }));
    }
    if (v.verdict == Verdict::NonlinearStable) {
      EXPECT_GT(v.arnold_form_diagonal->first, 0);
      EXPECT_GT(v.arnold_form_diagonal->second, 0);
    }
  }
}

// Lyapunov smoke test: perturbed trajectories stay near a certified equilibrium.
TEST(Classify, ArnoldCertificateBoundsTrajectories) {
  for (int trial = 0; trial < 20; ++trial) {
    const SystemParams p(-uniform(0.3, 3.0));
    const double M = uniform(0.5, 2.0);
    const Equilibrium e(EquilibriumFamily::E2, M);
    ASSERT_EQ(classify_equilibrium(p, e).verdict, Verdict::NonlinearStable);
    Vec3 d{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
    const double n = norm(d);
    const State3 s0(1e-3 * d[0] / n, 1e-3 * d[1] / n, M + 1e-3 * d[2] / n);
    const Trajectory3 tr = integrate(p, s0, {0.0, 200.0}, 1e-9);
    ASSERT_EQ(tr.status(), IntegrationStatus::Completed);
    for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_LT(distance(tr.state(i), e.point()), 0.1);
  }
}
