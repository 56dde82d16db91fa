#pragma once

// Equilibrium families (M,0,0) and (0,0,M); spectral and energy-Casimir
// (Arnold) stability classification.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <utility>

#include "mbloch/core.hpp"

namespace mbloch {

enum class EquilibriumFamily { E1, E2 };

inline const char* to_string(EquilibriumFamily f) {
  return f == EquilibriumFamily::E1 ? "E1" : "E2";
}

/// E1: (M, 0, 0).  E2: (0, 0, M).
class Equilibrium {
 public:
  Equilibrium(EquilibriumFamily family, double M) : family_(family), M_(M) {
    require_finite(M, "M");
  }

  EquilibriumFamily family() const noexcept { return family_; }
  double parameter_M() const noexcept { return M_; }
  State3 point() const {
    return family_ == EquilibriumFamily::E1 ? State3(M_, 0.0, 0.0) : State3(0.0, 0.0, M_);
  }

 private:
  EquilibriumFamily family_;
  double M_;
};

enum class Verdict { Unstable, NonlinearStable, DegenerateOrigin };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Unstable: return "Unstable";
    case Verdict::NonlinearStable: return "NonlinearStable";
    case Verdict::DegenerateOrigin: return "DegenerateOrigin";
  }
  return "Unknown";
}

using Spectrum = std::array<std::complex<double>, 3>;

/// Result of the energy-Casimir test on (0,0,M) with F = H - lambda C.
struct ArnoldResult {
  double multiplier;                 // lambda = kM, the unique critical multiplier
  std::pair<double, double> diagonal;  // d2F restricted to span{e_x, e_y}
  bool positive_definite;
};

struct StabilityVerdict {
  Verdict verdict;
  Spectrum eigenvalues;
  std::optional<double> arnold_multiplier;
  std::optional<std::pair<double, double>> arnold_form_diagonal;
};

/// Closed-form spectrum, ordered {0, +lambda, -lambda}.
inline Spectrum eigenvalues_at(const SystemParams& params, const Equilibrium& e) {
  const double k = params.k();
  const double M = e.parameter_M();
  // lambda^2 = kM on E2, lambda^2 = -k M^2 on E1.
  const double sq = e.family() == EquilibriumFamily::E2 ? k * M : -k * M * M;
  const std::complex<double> l =
      sq >= 0.0 ? std::complex<double>(std::sqrt(sq), 0.0)
                : std::complex<double>(0.0, std::sqrt(-sq));
  return {std::complex<double>(0.0, 0.0), l, -l};
}

inline ArnoldResult arnold_test(const SystemParams& params, double M) {
  const double k = params.k();
  const double lambda = k * M;
  // d2F|W = -lambda dx^2 + dy^2 with W = ker dC(0,0,M) = span{(1,0,0),(0,1,0)}.
  const std::pair<double, double> diag{-lambda, 1.0};
  return {lambda, diag, diag.first > 0.0 && diag.second > 0.0};
}

inline StabilityVerdict classify_equilibrium(const SystemParams& params, const Equilibrium& e) {
  StabilityVerdict out{Verdict::Unstable, eigenvalues_at(params, e), std::nullopt, std::nullopt};
  const double M = e.parameter_M();
  if (M == 0.0) {
    out.verdict = Verdict::DegenerateOrigin;
    return out;
  }
  if (e.family() == EquilibriumFamily::E1) {
    return out;
  }
  const ArnoldResult a = arnold_test(params, M);
  out.arnold_multiplier = a.multiplier;
  out.arnold_form_diagonal = a.diagonal;
  out.verdict = a.positive_definite ? Verdict::NonlinearStable : Verdict::Unstable;
  return out;
}

}  // namespace mbloch
