#pragma once

// Fibers of the energy-Casimir map, EC^{-1}(h, c), as typed components with
// explicit parametrizations.
//
// Generic fibers reduce to z'^2 = 2 (c - z)(2h - k z^2), solved by
//   z = (2/k) P(t; g2, g3) + c/3,
//   g2 = k^2 c^2 / 3 + 2 k h,   g3 = k^3 c^3 / 27 - 2 k^2 h c / 3,
// with x = +-sqrt(2 (c - z)), y = +-sqrt(2h - k z^2).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mbloch/core.hpp"
#include "mbloch/elliptic.hpp"
#include "mbloch/periodic.hpp"
#include "mbloch/strata.hpp"

namespace mbloch {

enum class ComponentKind { EquilibriumPoint, UnboundedCurve, HeteroclinicOrbit, PeriodicOrbit };

inline const char* to_string(ComponentKind k) {
  switch (k) {
    case ComponentKind::EquilibriumPoint: return "EquilibriumPoint";
    case ComponentKind::UnboundedCurve: return "UnboundedCurve";
    case ComponentKind::HeteroclinicOrbit: return "HeteroclinicOrbit";
    case ComponentKind::PeriodicOrbit: return "PeriodicOrbit";
  }
  return "Unknown";
}

struct TimeInterval {
  double lo;
  double hi;
};

enum class Sign { Plus, Minus };

inline double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }

/// Signs applied to (x, y) on a generic fiber branch.
struct SignPair {
  Sign x = Sign::Plus;
  Sign y = Sign::Plus;
};

inline std::string sign_label(SignPair b) {
  std::string out = "(";
  out += b.x == Sign::Plus ? '+' : '-';
  out += ',';
  out += b.y == Sign::Plus ? '+' : '-';
  out += ')';
  return out;
}

struct FiberComponent {
  ComponentKind kind;
  std::function<State3(double)> parametrize;
  TimeInterval domain;  // open, possibly unbounded
  TimeInterval window;  // finite sub-interval where the curve stays in the display ball
  std::string sign_variant;
  bool closed_form = true;

  /// n times spread uniformly over the window.
  std::vector<double> sample_times(std::size_t n) const {
    std::vector<double> ts;
    ts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1);
      ts.push_back(window.lo + f * (window.hi - window.lo));
    }
    return ts;
  }
};

struct Fiber {
  ECValue value;
  Stratum stratum;
  std::optional<double> M;  // equilibrium parameter, boundary strata only
  std::vector<FiberComponent> components;
  std::string note;
};

inline WeierstrassInvariants invariants_from_ec(const SystemParams& params, const ECValue& v) {
  const double k = params.k();
  const double h = v.h;
  const double c = v.c;
  return {k * k * c * c / 3.0 + 2.0 * k * h,
          k * k * k * c * c * c / 27.0 - 2.0 * k * k * h * c / 3.0};
}

/// Sigma2s curve: x = 2 sqrt(M) sec(wt), y = 2M sqrt(-k) sec(wt) tan(wt),
/// z = -M (1 + 2 tan^2(wt)), w = sqrt(-kM), |t| < pi / (2w).
inline State3 param_case_i(const SystemParams& params, double M, double t) {
  require_positive_M(M);
  const double k = params.k();
  const double w = std::sqrt(-k * M);
  if (!(std::abs(t) < std::numbers::pi / (2.0 * w))) {
    throw Error(ErrorCode::DomainExceeded, "t outside (-pi/(2w), pi/(2w))");
  }
  const double sec = 1.0 / std::cos(w * t);
  const double tan = std::tan(w * t);
  return {2.0 * std::sqrt(M) * sec, 2.0 * M * std::sqrt(-k) * sec * tan,
          -M * (1.0 + 2.0 * tan * tan)};
}

/// Sigma2u curve, M < 0, with p = -exp(2 sqrt(kM) t); pole at t = 0.
inline State3 param_case_ii(const SystemParams& params, double M, double t) {
  require_finite(M, "M");
  if (!(M < 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "M must be negative");
  }
  if (std::abs(t) < WeierstrassP::kPoleGuard) {
    throw Error(ErrorCode::PoleProximity, "t lies within 1e-8 of the pole at t = 0");
  }
  const double k = params.k();
  const double p = -std::exp(2.0 * std::sqrt(k * M) * t);
  const double q = p + 1.0;
  return {4.0 * std::sqrt(M * p) / q, 4.0 * M * std::sqrt(k * p) * (p - 1.0) / (q * q),
          M * (p * p - 6.0 * p + 1.0) / (q * q)};
}

/// Heteroclinic connection of (-M,0,0) and (M,0,0), p = exp(M sqrt(-k) (t + alpha)).
inline State3 heteroclinic(const SystemParams& params, double M, double alpha, Sign sign,
                           double t) {
  require_finite(M, "M");
  require_finite(alpha, "alpha");
  if (M == 0.0) {
    throw Error(ErrorCode::InvalidParameter, "M must be nonzero");
  }
  const double k = params.k();
  const double rk = std::sqrt(-k);
  const double a = M * rk * (t + alpha);
  // Written in terms of tanh and sech^2 so that |t| -> infinity stays finite.
  const double x = M * std::tanh(0.5 * a);
  const double ch = std::cosh(0.5 * a);
  const double q = 0.5 * M * M / (ch * ch);  // 2 M^2 p / (p + 1)^2
  const double s = sign_value(sign);
  return {s * x, s * rk * q, q};
}

/// Unbounded branch of a generic fiber, z = (2/k) P(t) + c/3 for t in (0, t_f].
/// t_f is the real half-period of P, where z reaches its largest value and one
/// reality factor 2(c - z) or 2h - k z^2 vanishes.
class GenericFiberCurve {
 public:
  GenericFiberCurve(const SystemParams& params, const ECValue& v)
      : k_(params.k()), v_(v), wp_(invariants_from_ec(params, v)) {}

  double t_final() const noexcept { return wp_.real_half_period(); }
  const WeierstrassP& weierstrass() const noexcept { return wp_; }

  double z(double t) const { return (2.0 / k_) * wp_(t).p + v_.c / 3.0; }

  State3 operator()(SignPair branch, double t) const {
    if (!(t > 0.0) || t > t_final()) {
      throw Error(ErrorCode::DomainExceeded, "t outside (0, t_f]");
    }
    const double zt = z(t);
    const double x = std::sqrt(std::max(0.0, 2.0 * (v_.c - zt)));
    const double y = std::sqrt(std::max(0.0, 2.0 * v_.h - k_ * zt * zt));
    return {sign_value(branch.x) * x, sign_value(branch.y) * y, zt};
  }

 private:
  double k_;
  ECValue v_;
  WeierstrassP wp_;
};

inline State3 param_case_iv(const SystemParams& params, const ECValue& v, SignPair branch,
                            double t) {
  const Stratum s = classify_ec_point(params, v, 1e-12);
  if (!is_principal(s) && s != Stratum::Origin) {
    throw Error(ErrorCode::InvalidParameter, "(h, c) is not in a principal stratum");
  }
  return GenericFiberCurve(params, v)(branch, t);
}

namespace detail {

inline constexpr double kWindowConvergence = 1e-10;

// Expands from `anchor` towards one domain end until the curve leaves the
// ball of radius R, hits a finite regular end, or settles onto its limit.
inline double window_end(const std::function<State3(double)>& f, double anchor, double end,
                         double R, bool end_is_pole) {
  const double dir = end > anchor ? 1.0 : -1.0;
  const double span = std::abs(end - anchor);
  auto safe_norm = [&](double t) -> double {
    try {
      return norm(f(t).to_array());
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  if (std::isfinite(span)) {
    const double near_end = end_is_pole ? end - dir * 2.0 * WeierstrassP::kPoleGuard : end;
    if (safe_norm(near_end) <= R) return near_end;
    double good = anchor;
    double bad = near_end;
    for (int i = 0; i < 200 && std::abs(bad - good) > 1e-13 * std::max(1.0, std::abs(good)); ++i) {
      const double mid = 0.5 * (good + bad);
      (safe_norm(mid) <= R ? good : bad) = mid;
    }
    return good;
  }

  double step = 1.0;
  State3 prev = f(anchor);
  double good = anchor;
  for (int i = 0; i < 80; ++i) {
    const double t = anchor + dir * step;
    const double n = safe_norm(t);
    if (n > R) {
      double bad = t;
      for (int j = 0; j < 200 && std::abs(bad - good) > 1e-12 * std::max(1.0, std::abs(good)); ++j) {
        const double mid = 0.5 * (good + bad);
        (safe_norm(mid) <= R ? good : bad) = mid;
      }
      return good;
    }
    const State3 cur = f(t);
    good = t;
    if (distance(cur, prev) <= kWindowConvergence * R) return t;
    prev = cur;
    step *= 2.0;
  }
  return good;
}

inline TimeInterval make_window(const std::function<State3(double)>& f, double anchor,
                                TimeInterval domain, double R, bool lo_is_pole,
                                bool hi_is_pole) {
  return {window_end(f, anchor, domain.lo, R, lo_is_pole),
          window_end(f, anchor, domain.hi, R, hi_is_pole)};
}

inline double fiber_scale(const SystemParams& params, const ECValue& v) {
  return std::max({1.0, std::abs(v.c), std::sqrt(std::abs(v.h) / -params.k()),
                   std::sqrt(std::abs(2.0 * v.c))});
}

constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline std::vector<FiberComponent> generic_curves(const SystemParams& params, const ECValue& v,
                                                  double R) {
  auto curve = std::make_shared<const GenericFiberCurve>(params, v);
  const double tf = curve->t_final();
  const bool finite_tf = std::isfinite(tf);

  // Anchor: where P has dropped to e1 + max(1, |e1|) if no finite half-period.
  double anchor = tf;
  if (!finite_tf) {
    const double target = curve->weierstrass().largest_root() +
                          std::max(1.0, std::abs(curve->weierstrass().largest_root()));
    double lo = 1e-6;
    double hi = 1.0;
    while (curve->weierstrass()(hi).p > target && hi < 1e6) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (curve->weierstrass()(mid).p > target ? lo : hi) = mid;
    }
    anchor = hi;
  }

  std::vector<FiberComponent> out;
  for (Sign sx : {Sign::Plus, Sign::Minus}) {
    for (Sign sy : {Sign::Plus, Sign::Minus}) {
      const SignPair b{sx, sy};
      std::function<State3(double)> f = [curve, b](double t) { return (*curve)(b, t); };
      const TimeInterval domain{0.0, tf};
      TimeInterval window = make_window(f, anchor, domain, R, true, false);
      out.push_back({ComponentKind::UnboundedCurve, f, domain, window, sign_label(b), false});
    }
  }
  return out;
}

inline FiberComponent equilibrium_component(const State3& p) {
  return {ComponentKind::EquilibriumPoint, [p](double) { return p; },
          {-kInfinity, kInfinity}, {0.0, 1.0}, "(0,0)", true};
}

}  // namespace detail

/// Seed of the bounded (periodic) component on a PrincipalII fiber: the point
/// of the section {y = 0, x > 0} at z = sqrt(2h/k).
inline State3 periodic_component_seed(const SystemParams& params, const ECValue& v) {
  const double a = std::sqrt(2.0 * v.h / params.k());
  return {std::sqrt(std::max(0.0, 2.0 * (v.c - a))), 0.0, a};
}

inline Fiber build_fiber(const SystemParams& params, const ECValue& v, double tol) {
  const double k = params.k();
  const Stratum stratum = classify_ec_point(params, v, tol);
  Fiber fiber{v, stratum, recovered_M(stratum, v), {}, ""};
  const double R = 8.0 * detail::fiber_scale(params, v);
  using detail::kInfinity;

  switch (stratum) {
    case Stratum::Sigma2s: {
      const double M = v.c;
      const double half = std::numbers::pi / (2.0 * std::sqrt(-k * M));
      fiber.components.push_back(detail::equilibrium_component(State3(0.0, 0.0, M)));
      for (Sign s : {Sign::Plus, Sign::Minus}) {
        const double sv = sign_value(s);
        std::function<State3(double)> f = [params, M, sv](double t) {
          const State3 p = param_case_i(params, M, t);
          return State3(sv * p.x(), sv * p.y(), p.z());
        };
        const TimeInterval domain{-half, half};
        fiber.components.push_back({ComponentKind::UnboundedCurve, f, domain,
                                    detail::make_window(f, 0.0, domain, R, true, true),
                                    s == Sign::Plus ? "(+,+)" : "(-,-)", true});
      }
      break;
    }
    case Stratum::Sigma2u: {
      const double M = v.c;
      const double rate = 2.0 * std::sqrt(k * M);
      for (Sign s : {Sign::Plus, Sign::Minus}) {
        const double sv = sign_value(s);
        std::function<State3(double)> f = [params, M, sv](double t) {
          const State3 p = param_case_ii(params, M, t);
          return State3(sv * p.x(), sv * p.y(), p.z());
        };
        const std::string label = s == Sign::Plus ? "(+,+)" : "(-,-)";
        const TimeInterval pos{0.0, kInfinity};
        const TimeInterval neg{-kInfinity, 0.0};
        fiber.components.push_back({ComponentKind::UnboundedCurve, f, pos,
                                    detail::make_window(f, 1.0 / rate, pos, R, true, false),
                                    label + " t>0", true});
        fiber.components.push_back({ComponentKind::UnboundedCurve, f, neg,
                                    detail::make_window(f, -1.0 / rate, neg, R, false, true),
                                    label + " t<0", true});
      }
      break;
    }
    case Stratum::Sigma1u: {
      const double M = std::sqrt(2.0 * v.c);
      for (Sign s : {Sign::Plus, Sign::Minus}) {
        std::function<State3(double)> f = [params, M, s](double t) {
          return heteroclinic(params, M, 0.0, s, t);
        };
        const TimeInterval domain{-kInfinity, kInfinity};
        fiber.components.push_back({ComponentKind::HeteroclinicOrbit, f, domain,
                                    detail::make_window(f, 0.0, domain, R, false, false),
                                    s == Sign::Plus ? "(+,+,+)" : "(-,-,+)", true});
      }
      break;
    }
    case Stratum::Origin: {
      fiber.components.push_back(detail::equilibrium_component(State3(0.0, 0.0, 0.0)));
      for (auto& c : detail::generic_curves(params, ECValue(0.0, 0.0), R)) {
        fiber.components.push_back(std::move(c));
      }
      fiber.note =
          "degenerate origin: equilibrium point plus the limiting generic curves with (h,c)=(0,0)";
      break;
    }
    case Stratum::PrincipalI:
    case Stratum::PrincipalIII: {
      fiber.components = detail::generic_curves(params, v, R);
      break;
    }
    case Stratum::PrincipalII: {
      fiber.components = detail::generic_curves(params, v, R);
      const State3 seed = periodic_component_seed(params, v);
      // The orbit encircles (0,0,c) on the surface I = 2h - k c^2 of that center.
      const double M = v.c;
      const double t_lin = linearized_period(params, M);
      auto orbit = std::make_shared<const PeriodicOrbit>(
          find_closed_orbit(params, seed, t_lin, 50.0 * t_lin, 1e-12));
      std::function<State3(double)> f = [orbit](double t) { return orbit->state_at(t); };
      fiber.components.push_back({ComponentKind::PeriodicOrbit, f, {-kInfinity, kInfinity},
                                  {0.0, orbit->period}, "closed", false});
      break;
    }
  }
  return fiber;
}

}  // namespace mbloch
