#pragma once

// Stratification of the (h, c) plane. With r = h - (k/2) c^2 the image
// regions are
//   S_I   = {r <= 0}
//   S_II  = {r >= 0, h <= 0, c >= 0}
//   S_III = closure of the complement of S_I and S_II.

#include <cmath>
#include <optional>

#include "mbloch/core.hpp"
#include "mbloch/equilibria.hpp"

namespace mbloch {

enum class Stratum { PrincipalI, PrincipalII, PrincipalIII, Sigma2s, Sigma2u, Sigma1u, Origin };

inline const char* to_string(Stratum s) {
  switch (s) {
    case Stratum::PrincipalI: return "PrincipalI";
    case Stratum::PrincipalII: return "PrincipalII";
    case Stratum::PrincipalIII: return "PrincipalIII";
    case Stratum::Sigma2s: return "Sigma2s";
    case Stratum::Sigma2u: return "Sigma2u";
    case Stratum::Sigma1u: return "Sigma1u";
    case Stratum::Origin: return "Origin";
  }
  return "Unknown";
}

inline bool is_principal(Stratum s) {
  return s == Stratum::PrincipalI || s == Stratum::PrincipalII || s == Stratum::PrincipalIII;
}

/// Signed distance-like quantity to the parabola h = (k/2) c^2.
inline double parabola_residual(const SystemParams& params, const ECValue& v) {
  return v.h - 0.5 * params.k() * v.c * v.c;
}

inline Stratum classify_ec_point(const SystemParams& params, const ECValue& v, double tol) {
  if (!(tol >= 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "tol must be non-negative");
  }
  const double r = parabola_residual(params, v);
  const double h = v.h;
  const double c = v.c;
  if (std::abs(r) <= tol) {
    if (c > tol) return Stratum::Sigma2s;
    if (c < -tol) return Stratum::Sigma2u;
    return Stratum::Origin;
  }
  if (r < -tol) return Stratum::PrincipalI;
  if (std::abs(h) <= tol) {
    if (c > tol) return Stratum::Sigma1u;
    if (std::abs(c) <= tol) return Stratum::Origin;
    return Stratum::PrincipalIII;  // half-line {h = 0, c < 0}
  }
  if (h < -tol && c > tol) return Stratum::PrincipalII;
  return Stratum::PrincipalIII;
}

inline ECValue equilibrium_image(const SystemParams& params, EquilibriumFamily family, double M) {
  require_finite(M, "M");
  if (family == EquilibriumFamily::E1) {
    return {0.0, 0.5 * M * M};
  }
  return {0.5 * params.k() * M * M, M};
}

inline Stratum stratum_of_equilibrium(const SystemParams&, EquilibriumFamily family, double M) {
  require_finite(M, "M");
  if (M == 0.0) return Stratum::Origin;
  if (family == EquilibriumFamily::E1) return Stratum::Sigma1u;
  return M > 0.0 ? Stratum::Sigma2s : Stratum::Sigma2u;
}

/// Equilibrium parameter recovered from a boundary-stratum value:
/// M = c on the E2 parabola branches, M = sqrt(2c) on the E1 half-line.
inline std::optional<double> recovered_M(Stratum s, const ECValue& v) {
  switch (s) {
    case Stratum::Sigma2s:
    case Stratum::Sigma2u: return v.c;
    case Stratum::Sigma1u: return std::sqrt(2.0 * v.c);
    case Stratum::Origin: return 0.0;
    default: return std::nullopt;
  }
}

}  // namespace mbloch
