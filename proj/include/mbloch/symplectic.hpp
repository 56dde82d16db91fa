#pragma once

// Canonical realization on R^4 with omega = dp1^dq1 + dp2^dq2 and the
// Poisson projection phi(q1, q2, p1, p2) = (q1, p1, p2 - q1^2 / 2).

#include <array>
#include <cmath>

#include "mbloch/core.hpp"

namespace mbloch {

using Vec4 = std::array<double, 4>;

class State4 {
 public:
  static constexpr std::size_t dim = 4;

  State4() = default;
  State4(double q1, double q2, double p1, double p2)
      : q1_(q1), q2_(q2), p1_(p1), p2_(p2) {
    require_finite(q1, "q1");
    require_finite(q2, "q2");
    require_finite(p1, "p1");
    require_finite(p2, "p2");
  }
  explicit State4(const Vec4& v) : State4(v[0], v[1], v[2], v[3]) {}

  double q1() const noexcept { return q1_; }
  double q2() const noexcept { return q2_; }
  double p1() const noexcept { return p1_; }
  double p2() const noexcept { return p2_; }

  Vec4 to_array() const noexcept { return {q1_, q2_, p1_, p2_}; }

  friend bool operator==(const State4&, const State4&) = default;

 private:
  double q1_ = 0.0;
  double q2_ = 0.0;
  double p1_ = 0.0;
  double p2_ = 0.0;
};

using Matrix4 = std::array<Vec4, 4>;
using Matrix34 = std::array<Vec4, 3>;

namespace detail {

inline Vec4 vector_field4(double k, const Vec4& s) {
  const double q1 = s[0];
  const double p2 = s[3];
  return {s[2], k * p2 - 0.5 * k * q1 * q1, k * p2 * q1 - 0.5 * k * q1 * q1 * q1, 0.0};
}

inline Matrix4 jacobian4(double k, const Vec4& s) {
  const double q1 = s[0];
  const double p2 = s[3];
  return {{{0.0, 0.0, 1.0, 0.0},
           {-k * q1, 0.0, 0.0, k},
           {k * p2 - 1.5 * k * q1 * q1, 0.0, 0.0, k * q1},
           {0.0, 0.0, 0.0, 0.0}}};
}

}  // namespace detail

inline State4 vector_field4(const SystemParams& params, const State4& s4) {
  return State4(detail::vector_field4(params.k(), s4.to_array()));
}

inline State3 realization_map(const State4& s4) {
  return {s4.q1(), s4.p1(), s4.p2() - 0.5 * s4.q1() * s4.q1()};
}

/// Derivative of the realization map; rows ((1,0,0,0), (0,0,1,0), (-q1,0,0,1)).
inline Matrix34 realization_jacobian(const State4& s4) {
  return {{{1.0, 0.0, 0.0, 0.0},
           {0.0, 0.0, 1.0, 0.0},
           {-s4.q1(), 0.0, 0.0, 1.0}}};
}

inline double hamiltonian4(const SystemParams& params, const State4& s4) {
  const double k = params.k();
  const double q1 = s4.q1();
  const double p1 = s4.p1();
  const double p2 = s4.p2();
  return 0.5 * (p1 * p1 + k * p2 * p2 - k * p2 * q1 * q1 + 0.25 * k * q1 * q1 * q1 * q1);
}

/// Second first integral, I = p2.
inline double momentum_integral(const State4& s4) { return s4.p2(); }

/// Gradient of the realized Hamiltonian, ordered (dq1, dq2, dp1, dp2).
inline Vec4 hamiltonian4_gradient(const SystemParams& params, const State4& s4) {
  const double k = params.k();
  const double q1 = s4.q1();
  const double p2 = s4.p2();
  return {-k * p2 * q1 + 0.5 * k * q1 * q1 * q1, 0.0, s4.p1(), k * p2 - 0.5 * k * q1 * q1};
}

inline Vec4 momentum_integral_gradient(const State4&) { return {0.0, 0.0, 0.0, 1.0}; }

/// Canonical bracket sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i) from gradients.
inline double canonical_bracket(const Vec4& df, const Vec4& dg) {
  return (df[0] * dg[2] - df[2] * dg[0]) + (df[1] * dg[3] - df[3] * dg[1]);
}

/// Membership in the dense open set where d(H4) and dI are independent.
/// The complement is {p1 = 0, q1^3 - 2 q1 p2 = 0}.
inline bool in_omega(const State4& s4, double tol) {
  if (!(tol >= 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "tol must be non-negative");
  }
  const double q1 = s4.q1();
  const double critical = q1 * q1 * q1 - 2.0 * q1 * s4.p2();
  return !(std::abs(s4.p1()) <= tol && std::abs(critical) <= tol);
}

}  // namespace mbloch
