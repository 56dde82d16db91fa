#pragma once

// Jacobi elliptic functions by the descending Landen (AGM) scale and the
// Weierstrass P-function on the real axis for real invariants g2, g3.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "mbloch/error.hpp"

namespace mbloch {

struct JacobiValues {
  double sn;
  double cn;
  double dn;
};

namespace detail {

constexpr int kMaxAgmSteps = 40;

struct AgmScale {
  std::array<double, kMaxAgmSteps + 1> a{};
  std::array<double, kMaxAgmSteps + 1> c{};
  int steps = 0;
};

inline AgmScale agm_scale(double m) {
  AgmScale s;
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  double c = std::sqrt(m);
  s.a[0] = a;
  s.c[0] = c;
  int n = 0;
  while (std::abs(c) > 4.0 * std::numeric_limits<double>::epsilon() * a && n < kMaxAgmSteps) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    c = 0.5 * (a - b);
    a = an;
    b = bn;
    ++n;
    s.a[n] = a;
    s.c[n] = c;
  }
  s.steps = n;
  return s;
}

}  // namespace detail

/// Complete elliptic integral of the first kind K(m), 0 <= m < 1.
inline double elliptic_k(double m) {
  if (!(m >= 0.0 && m < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "elliptic_k requires 0 <= m < 1");
  }
  const detail::AgmScale s = detail::agm_scale(m);
  return std::numbers::pi / (2.0 * s.a[s.steps]);
}

/// sn, cn, dn of (u | m) for 0 <= m <= 1.
inline JacobiValues jacobi_sncndn(double u, double m) {
  if (!(m >= 0.0 && m <= 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "jacobi_sncndn requires 0 <= m <= 1");
  }
  if (m == 0.0) {
    return {std::sin(u), std::cos(u), 1.0};
  }
  if (m == 1.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }
  const detail::AgmScale s = detail::agm_scale(m);
  const int n = s.steps;
  double phi = std::ldexp(s.a[n] * u, n);
  for (int i = n; i > 0; --i) {
    phi = 0.5 * (phi + std::asin(s.c[i] / s.a[i] * std::sin(phi)));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  // dn^2 = cn^2 + (1 - m) sn^2, a sum of non-negative terms.
  const double dn = std::sqrt(cn * cn + (1.0 - m) * sn * sn);
  return {sn, cn, dn};
}

struct WeierstrassInvariants {
  double g2 = 0.0;
  double g3 = 0.0;
  double discriminant = 0.0;  // g2^3 - 27 g3^2

  WeierstrassInvariants() = default;
  WeierstrassInvariants(double g2_, double g3_)
      : g2(g2_), g3(g3_), discriminant(g2_ * g2_ * g2_ - 27.0 * g3_ * g3_) {}
};

struct WeierstrassValue {
  double p;
  double p_prime;
};

/// Real-axis Weierstrass P(t; g2, g3) and its derivative.
///
/// Three real roots e1 > e2 > e3:  P = e3 + (e1 - e3) / sn^2(t sqrt(e1 - e3), m),
///   m = (e2 - e3) / (e1 - e3).
/// One real root e1:  P = e1 + H (1 + cn(2 sqrt(H) t, m)) / (1 - cn(2 sqrt(H) t, m)),
///   H^2 = 3 e1^2 - g2 / 4,  m = 1/2 - 3 e1 / (4 H).
/// Double root e_d with simple root e_s = -2 e_d:
///   P = e_d + 3 e_d / sinh^2(sqrt(3 e_d) t)      if e_d > 0,
///   P = e_d + 3|e_d| / sin^2(sqrt(3|e_d|) t)     if e_d < 0,
///   P = 1 / t^2                                  if g2 = g3 = 0.
/// Near t = 0 the Laurent expansion is used.
class WeierstrassP {
 public:
  enum class Kind { ThreeRealRoots, OneRealRoot, DoubleRootSinh, DoubleRootSin, Equianharmonic0 };

  static constexpr double kPoleGuard = 1e-8;

  explicit WeierstrassP(const WeierstrassInvariants& inv) : inv_(inv) {
    const double g2 = inv.g2;
    const double g3 = inv.g3;
    if (!std::isfinite(g2) || !std::isfinite(g3)) {
      throw Error(ErrorCode::NonFiniteValue, "invariants must be finite");
    }
    const double scale = std::max(std::abs(g2 * g2 * g2), 27.0 * g3 * g3);
    if (g2 == 0.0 && g3 == 0.0) {
      kind_ = Kind::Equianharmonic0;
    } else if (std::abs(inv.discriminant) <= 1e-14 * scale) {
      // Double root e_d = -3 g3 / (2 g2), simple root -2 e_d.
      ed_ = -1.5 * g3 / g2;
      kind_ = ed_ > 0.0 ? Kind::DoubleRootSinh : Kind::DoubleRootSin;
      e1_ = std::max(ed_, -2.0 * ed_);
      if (kind_ == Kind::DoubleRootSin) {
        half_period_ = std::numbers::pi / (2.0 * std::sqrt(-3.0 * ed_));
      }
    } else if (inv.discriminant > 0.0) {
      kind_ = Kind::ThreeRealRoots;
      const double p = -g2 / 4.0;
      const double q = -g3 / 4.0;
      const double r = 2.0 * std::sqrt(-p / 3.0);
      const double arg = std::clamp(3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p), -1.0, 1.0);
      const double th = std::acos(arg) / 3.0;
      std::array<double, 3> e{r * std::cos(th), r * std::cos(th - 2.0 * std::numbers::pi / 3.0),
                              r * std::cos(th - 4.0 * std::numbers::pi / 3.0)};
      for (double& x : e) x = polish_root(x);
      std::sort(e.begin(), e.end(), std::greater<>());
      e1_ = e[0];
      e2_ = e[1];
      e3_ = e[2];
      const double span = e1_ - e3_;
      m_ = std::clamp((e2_ - e3_) / span, 0.0, 1.0);
      rate_ = std::sqrt(span);
      half_period_ = m_ < 1.0 ? elliptic_k(m_) / rate_ : std::numeric_limits<double>::infinity();
    } else {
      kind_ = Kind::OneRealRoot;
      const double p = -g2 / 4.0;
      const double q = -g3 / 4.0;
      const double d = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
      e1_ = polish_root(std::cbrt(-q / 2.0 + d) + std::cbrt(-q / 2.0 - d));
      h2_ = std::sqrt(3.0 * e1_ * e1_ - g2 / 4.0);
      m_ = std::clamp(0.5 - 0.75 * e1_ / h2_, 0.0, 1.0);
      rate_ = 2.0 * std::sqrt(h2_);
      half_period_ = m_ < 1.0 ? elliptic_k(m_) / std::sqrt(h2_)
                              : std::numeric_limits<double>::infinity();
    }
  }

  const WeierstrassInvariants& invariants() const noexcept { return inv_; }
  Kind kind() const noexcept { return kind_; }

  /// Largest real root of 4 s^3 - g2 s - g3: the minimum of P on the real axis.
  double largest_root() const noexcept { return e1_; }

  /// Real half-period; P decreases from the pole at 0 to its minimum here.
  /// Infinite when the real axis carries a single pole.
  double real_half_period() const noexcept { return half_period_; }

  WeierstrassValue operator()(double t) const {
    if (!std::isfinite(t)) {
      throw Error(ErrorCode::NonFiniteValue, "t must be finite");
    }
    double sign = t < 0.0 ? -1.0 : 1.0;  // P' is odd
    double u = std::abs(t);
    if (std::isfinite(half_period_)) {
      const double period = 2.0 * half_period_;
      u = std::fmod(u, period);
      if (u > half_period_) {
        u = period - u;
        sign = -sign;
      }
    }
    if (u < kPoleGuard) {
      throw Error(ErrorCode::PoleProximity, "t lies within 1e-8 of a pole of P");
    }
    WeierstrassValue v = u * u * laurent_radius_scale() < 1e-2 ? laurent(u) : evaluate(u);
    v.p_prime *= sign;
    return v;
  }

 private:
  double polish_root(double s) const {
    for (int i = 0; i < 3; ++i) {
      const double f = 4.0 * s * s * s - inv_.g2 * s - inv_.g3;
      const double df = 12.0 * s * s - inv_.g2;
      if (df == 0.0) break;
      s -= f / df;
    }
    return s;
  }

  double laurent_radius_scale() const {
    return std::max(std::sqrt(std::abs(inv_.g2)), std::cbrt(std::abs(inv_.g3)));
  }

  // P = t^-2 + sum_{n>=2} c_n t^(2n-2), c2 = g2/20, c3 = g3/28,
  // c_n = 3 / ((2n+1)(n-3)) sum_{j=2}^{n-2} c_j c_{n-j}.
  WeierstrassValue laurent(double t) const {
    constexpr int kTerms = 10;
    std::array<double, kTerms + 1> c{};
    c[2] = inv_.g2 / 20.0;
    c[3] = inv_.g3 / 28.0;
    for (int n = 4; n <= kTerms; ++n) {
      double s = 0.0;
      for (int j = 2; j <= n - 2; ++j) s += c[j] * c[n - j];
      c[n] = 3.0 * s / ((2.0 * n + 1.0) * (n - 3.0));
    }
    const double t2 = t * t;
    double p = 1.0 / t2;
    double dp = -2.0 / (t2 * t);
    double pw = 1.0;  // t^(2n-4)
    for (int n = 2; n <= kTerms; ++n) {
      p += c[n] * pw * t2;
      dp += c[n] * (2.0 * n - 2.0) * pw * t;
      pw *= t2;
    }
    return {p, dp};
  }

  WeierstrassValue evaluate(double t) const {
    switch (kind_) {
      case Kind::Equianharmonic0: {
        return {1.0 / (t * t), -2.0 / (t * t * t)};
      }
      case Kind::DoubleRootSinh: {
        const double w = std::sqrt(3.0 * ed_);
        const double sh = std::sinh(w * t);
        const double ch = std::cosh(w * t);
        return {ed_ + 3.0 * ed_ / (sh * sh), -6.0 * ed_ * w * ch / (sh * sh * sh)};
      }
      case Kind::DoubleRootSin: {
        const double a = -3.0 * ed_;
        const double w = std::sqrt(a);
        const double s = std::sin(w * t);
        const double c = std::cos(w * t);
        return {ed_ + a / (s * s), -2.0 * a * w * c / (s * s * s)};
      }
      case Kind::ThreeRealRoots: {
        const JacobiValues j = jacobi_sncndn(rate_ * t, m_);
        const double span = e1_ - e3_;
        const double s2 = j.sn * j.sn;
        return {e3_ + span / s2, -2.0 * span * rate_ * j.cn * j.dn / (s2 * j.sn)};
      }
      case Kind::OneRealRoot: {
        const JacobiValues j = jacobi_sncndn(rate_ * t, m_);
        // 1 - cn computed as sn^2 / (1 + cn) to avoid cancellation near the pole.
        const double one_minus_cn =
            j.cn > 0.0 ? j.sn * j.sn / (1.0 + j.cn) : 1.0 - j.cn;
        const double p = e1_ + h2_ * (1.0 + j.cn) / one_minus_cn;
        const double dp = -2.0 * h2_ * rate_ * j.sn * j.dn / (one_minus_cn * one_minus_cn);
        return {p, dp};
      }
    }
    return {0.0, 0.0};
  }

  WeierstrassInvariants inv_;
  Kind kind_ = Kind::Equianharmonic0;
  double e1_ = 0.0, e2_ = 0.0, e3_ = 0.0;
  double ed_ = 0.0;
  double h2_ = 0.0;
  double m_ = 0.0;
  double rate_ = 0.0;
  double half_period_ = std::numeric_limits<double>::infinity();
};

inline WeierstrassValue weierstrass_p(const WeierstrassInvariants& inv, double t) {
  return WeierstrassP(inv)(t);
}

}  // namespace mbloch
