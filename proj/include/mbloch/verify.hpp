#pragma once

// Self-check suite: every structural identity of the system evaluated on
// seeded random samples, reported as a residual against a fixed threshold.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mbloch/core.hpp"
#include "mbloch/elliptic.hpp"
#include "mbloch/equilibria.hpp"
#include "mbloch/fibers.hpp"
#include "mbloch/integrate.hpp"
#include "mbloch/strata.hpp"
#include "mbloch/symplectic.hpp"

namespace mbloch {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct VerifyOptions {
  std::uint64_t seed = 42;
  std::size_t samples = 1000;
  /// Replaces the vector field under test; empty means the library field.
  std::function<Vec3(double k, const Vec3&)> vector_field_override;
};

namespace detail {

inline double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline CheckResult make_check(std::string name, double residual, double threshold) {
  return {std::move(name), residual, threshold, std::isfinite(residual) && residual <= threshold};
}

}  // namespace detail

inline std::vector<CheckResult> run_verification(const SystemParams& params,
                                                 const VerifyOptions& opt = {}) {
  const double k = params.k();
  std::mt19937_64 gen(opt.seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); };
  auto field = [&](const State3& s) {
    return opt.vector_field_override ? opt.vector_field_override(k, s.to_array())
                                     : vector_field(params, s).to_array();
  };

  std::vector<CheckResult> out;

  // Poisson structure.
  double ham_form = 0.0, casimir_kernel = 0.0, energy_flux = 0.0, casimir_flux = 0.0;
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const State3 s(uni(-3, 3), uni(-3, 3), uni(-3, 3));
    const Vec3 X = field(s);
    const Matrix3 P = poisson_matrix(s);
    const Vec3 PdH = mat_vec(P, hamiltonian_gradient(params, s));
    const Vec3 PdC = mat_vec(P, casimir_gradient(s));
    const double scale = std::max(1.0, std::abs(k * s.x() * s.y() * s.z()));
    for (int j = 0; j < 3; ++j) {
      ham_form = std::max(ham_form, detail::rel_gap(X[j], PdH[j]));
      casimir_kernel = std::max(casimir_kernel, std::abs(PdC[j]));
    }
    energy_flux = std::max(energy_flux, std::abs(dot(hamiltonian_gradient(params, s), X)) / scale);
    casimir_flux = std::max(casimir_flux, std::abs(dot(casimir_gradient(s), X)) / scale);
  }
  out.push_back(detail::make_check("Hamiltonian-form identity", ham_form, 1e-14));
  out.push_back(detail::make_check("Casimir annihilation", casimir_kernel, 1e-14));
  out.push_back(detail::make_check("energy conservation dH.X", energy_flux, 1e-14));
  out.push_back(detail::make_check("Casimir conservation dC.X", casimir_flux, 1e-14));

  // Symplectic realization.
  double pullback = 0.0, involution = 0.0, pushforward = 0.0;
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const State4 s4(uni(-3, 3), uni(-3, 3), uni(-3, 3), uni(-3, 3));
    const State3 s3 = realization_map(s4);
    pullback = std::max({pullback, detail::rel_gap(hamiltonian4(params, s4), hamiltonian(params, s3)),
                         detail::rel_gap(casimir(s3), momentum_integral(s4))});
    involution = std::max(involution, std::abs(canonical_bracket(
                                          hamiltonian4_gradient(params, s4),
                                          momentum_integral_gradient(s4))));
    const Vec4 X4 = vector_field4(params, s4).to_array();
    const Matrix34 D = realization_jacobian(s4);
    const Vec3 X3 = field(s3);
    for (int r = 0; r < 3; ++r) {
      double pushed = 0.0;
      for (int c = 0; c < 4; ++c) pushed += D[r][c] * X4[c];
      pushforward = std::max(pushforward, detail::rel_gap(pushed, X3[r]));
    }
  }
  out.push_back(detail::make_check("realization pullback", pullback, 1e-14));
  out.push_back(detail::make_check("involution {H4, p2}", involution, 1e-14));
  out.push_back(detail::make_check("pushforward of dynamics", pushforward, 1e-14));

  // Equilibria: spectra and Arnold certificates.
  double arnold = 0.0;
  double verdict_mismatch = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double M = uni(0.05, 3.0);
    const State3 e(0, 0, M);
    const ArnoldResult a = arnold_test(params, M);
    const Vec3 dH = hamiltonian_gradient(params, e);
    const Vec3 dC = casimir_gradient(e);
    for (int j = 0; j < 3; ++j) arnold = std::max(arnold, std::abs(dH[j] - a.multiplier * dC[j]));
    if (!a.positive_definite) verdict_mismatch += 1.0;
    const StabilityVerdict u = classify_equilibrium(params, {EquilibriumFamily::E2, -M});
    const StabilityVerdict w = classify_equilibrium(params, {EquilibriumFamily::E1, M});
    if (u.verdict != Verdict::Unstable || w.verdict != Verdict::Unstable) verdict_mismatch += 1.0;
    for (const auto& l : u.eigenvalues) {
      const std::complex<double> sq = l * l;
      if (std::abs(sq) > 0.0) arnold = std::max(arnold, std::abs(sq - std::complex<double>(-k * M)));
    }
  }
  out.push_back(detail::make_check("Arnold certificate gradient", arnold, 1e-12));
  out.push_back(detail::make_check("stability verdicts", verdict_mismatch, 0.0));

  // Strata: equilibrium images land on their strata.
  double strata_mismatch = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double M = uni(0.01, 3.0) * (i % 2 ? 1.0 : -1.0);
    for (auto fam : {EquilibriumFamily::E1, EquilibriumFamily::E2}) {
      if (classify_ec_point(params, equilibrium_image(params, fam, M), 1e-12) !=
          stratum_of_equilibrium(params, fam, M)) {
        strata_mismatch += 1.0;
      }
    }
  }
  out.push_back(detail::make_check("equilibrium image strata", strata_mismatch, 0.0));

  // Weierstrass P differential identity.
  double wp_identity = 0.0;
  for (int i = 0; i < 50; ++i) {
    const WeierstrassInvariants inv(uni(-5, 5), uni(-5, 5));
    const WeierstrassP wp(inv);
    for (double t = 0.05; t <= 3.0; t += 0.05) {
      try {
        const WeierstrassValue v = wp(t);
        const double r = std::abs(v.p_prime * v.p_prime -
                                  (4 * v.p * v.p * v.p - inv.g2 * v.p - inv.g3));
        wp_identity = std::max(wp_identity, r / std::max(1.0, std::abs(v.p * v.p * v.p)));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::PoleProximity) throw;
      }
    }
  }
  out.push_back(detail::make_check("Weierstrass differential identity", wp_identity, 1e-9));

  // Fiber residuals over one representative per stratum.
  const std::vector<ECValue> reps = {
      {0.5 * k, 1.0}, {0.5 * k, -1.0}, {0.0, 0.5},  {0.0, 0.0},
      {0.5 * k - 1.0, 1.0}, {0.25 * k, 1.0}, {1.0, -1.0}};
  double closed_res = 0.0, numeric_res = 0.0;
  for (const ECValue& v : reps) {
    const Fiber f = build_fiber(params, v, 1e-12);
    for (const auto& c : f.components) {
      for (double t : c.sample_times(200)) {
        const State3 s = c.parametrize(t);
        const double r = std::max(std::abs(hamiltonian(params, s) - v.h), std::abs(casimir(s) - v.c));
        double& slot = c.closed_form ? closed_res : numeric_res;
        slot = std::max(slot, r);
      }
    }
  }
  out.push_back(detail::make_check("fiber residuals (closed form)", closed_res, 1e-12));
  out.push_back(detail::make_check("fiber residuals (P-based, numeric)", numeric_res, 1e-8));

  // Conservation along integrated trajectories.
  double drift = 0.0;
  for (int i = 0; i < 3; ++i) {
    const State3 s0(uni(-0.5, 0.5), uni(-0.5, 0.5), uni(0.5, 1.5));
    const DriftReport d = drift_report(params, integrate(params, s0, {0.0, 50.0}, 1e-10));
    drift = std::max({drift, d.max_abs_dH, d.max_abs_dC});
  }
  out.push_back(detail::make_check("integration drift", drift, 1e-7));
  return out;
}

inline bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace mbloch
