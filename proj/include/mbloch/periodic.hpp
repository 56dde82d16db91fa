#pragma once

// Periodic orbits on the integral surfaces
//   -kM x^2 + y^2 + k (z - M)^2 = eps^2
// around the stable equilibria (0, 0, M), M > 0.

#include <cmath>
#include <memory>
#include <numbers>

#include "mbloch/core.hpp"
#include "mbloch/integrate.hpp"

namespace mbloch {

struct PeriodicOrbit {
  State3 initial_state;
  double period = 0.0;
  double closure_error = 0.0;
  double surface_eps = 0.0;
  /// Integrated trajectory covering at least [0, period].
  std::shared_ptr<const Trajectory3> trajectory;

  State3 state_at(double t) const {
    double u = std::fmod(t, period);
    if (u < 0.0) u += period;
    return trajectory->interpolate(u);
  }
};

inline constexpr double kClosureTolerance = 1e-7;

inline void require_positive_M(double M) {
  require_finite(M, "M");
  if (!(M > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "M must be positive");
  }
}

/// I = -kM x^2 + y^2 + k (z - M)^2 = 2H - 2kM C + kM^2, a constant of motion.
inline double lyapunov_integral(const SystemParams& params, double M, const State3& s) {
  require_positive_M(M);
  const double k = params.k();
  const double dz = s.z() - M;
  return -k * M * s.x() * s.x() + s.y() * s.y() + k * dz * dz;
}

inline double linearized_period(const SystemParams& params, double M) {
  require_positive_M(M);
  return 2.0 * std::numbers::pi / std::sqrt(-params.k() * M);
}

/// Closed orbit through `seed`, a point of the section {y = 0, x > 0}. The
/// period is the first return to the section in the same direction.
/// Returns with closure_error as measured; the caller decides acceptance.
inline PeriodicOrbit find_closed_orbit(const SystemParams& params, const State3& seed,
                                       double period_guess, double t_limit, double tol) {
  const double k = params.k();
  const double ydot = k * seed.x() * seed.z();
  const CrossingDirection dir =
      ydot < 0.0 ? CrossingDirection::Negative : CrossingDirection::Positive;
  auto section = [](const State3& s) { return s.y(); };

  double horizon = std::min(t_limit, 1.5 * period_guess);
  while (true) {
    auto traj = std::make_shared<const Trajectory3>(integrate(params, seed, {0.0, horizon}, tol));
    for (const auto& cr : find_section_crossings(*traj, section, dir)) {
      if (cr.state.x() > 0.0) {
        PeriodicOrbit orbit;
        orbit.initial_state = seed;
        orbit.period = cr.t;
        orbit.closure_error = distance(seed, cr.state);
        orbit.trajectory = std::move(traj);
        return orbit;
      }
    }
    if (traj->status() != IntegrationStatus::Completed || horizon >= t_limit) {
      throw Error(ErrorCode::NoReturn, "no return to the section within the time limit");
    }
    horizon = std::min(t_limit, 2.0 * horizon);
  }
}

/// Searches for the first return within `limit_periods` linearized periods.
inline PeriodicOrbit find_periodic(const SystemParams& params, double M, double eps, double tol,
                                   double limit_periods = 20.0) {
  require_positive_M(M);
  const double omega = std::sqrt(-params.k() * M);
  if (!(eps > 0.0 && eps <= 0.2 * omega * M)) {
    throw Error(ErrorCode::InvalidParameter, "eps must lie in (0, 0.2 sqrt(-kM) M]");
  }
  const State3 seed(eps / omega, 0.0, M);
  const double eps2 = eps * eps;
  if (std::abs(lyapunov_integral(params, M, seed) - eps2) > 1e-10 * std::max(1.0, eps2)) {
    throw Error(ErrorCode::SeedOffSurface, "seed does not satisfy the surface equation");
  }
  const double t_lin = linearized_period(params, M);
  if (!(limit_periods > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "limit_periods must be positive");
  }

  // Orbits are fibers, so closure holds up to integrator error; tighten the
  // tolerance rather than shoot if it does not.
  double current_tol = tol;
  while (true) {
    PeriodicOrbit orbit =
        find_closed_orbit(params, seed, t_lin, limit_periods * t_lin, current_tol);
    orbit.surface_eps = eps;
    if (orbit.closure_error <= kClosureTolerance || current_tol <= 1e-14) {
      return orbit;
    }
    current_tol = std::max(1e-14, current_tol * 1e-2);
  }
}

}  // namespace mbloch
