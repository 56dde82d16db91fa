#pragma once

// Phase space, controlled vector field, constants of motion and Poisson
// structure of the real-valued Maxwell-Bloch system with quadratic control
//
//   x' = y,   y' = k x z,   z' = -x y,        k < 0.

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>

#include "mbloch/error.hpp"

namespace mbloch {

using Vec3 = std::array<double, 3>;
using Matrix3 = std::array<Vec3, 3>;  // row-major

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteValue, std::string(what) + " must be finite");
  }
}

/// Control parameter of u = (k-1)xz. Only the k < 0 regime is modelled.
class SystemParams {
 public:
  explicit SystemParams(double k) : k_(k) {
    require_finite(k, "k");
    if (!(k < 0.0)) {
      throw Error(ErrorCode::InvalidParameter, "k must be negative");
    }
  }

  double k() const noexcept { return k_; }

 private:
  double k_;
};

/// Point (x, y, z) of the three-dimensional phase space.
class State3 {
 public:
  static constexpr std::size_t dim = 3;

  State3() = default;
  State3(double x, double y, double z) : x_(x), y_(y), z_(z) {
    require_finite(x, "x");
    require_finite(y, "y");
    require_finite(z, "z");
  }
  explicit State3(const Vec3& v) : State3(v[0], v[1], v[2]) {}

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  double z() const noexcept { return z_; }

  Vec3 to_array() const noexcept { return {x_, y_, z_}; }

  friend bool operator==(const State3&, const State3&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

/// Value (h, c) of the energy-Casimir map.
struct ECValue {
  double h = 0.0;
  double c = 0.0;

  ECValue() = default;
  ECValue(double h_, double c_) : h(h_), c(c_) {
    require_finite(h_, "h");
    require_finite(c_, "c");
  }

  friend bool operator==(const ECValue&, const ECValue&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 mat_vec(const Matrix3& m, const Vec3& v) {
  return {dot(m[0], v), dot(m[1], v), dot(m[2], v)};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double distance(const State3& a, const State3& b) {
  const Vec3 u = a.to_array();
  const Vec3 v = b.to_array();
  return norm({u[0] - v[0], u[1] - v[1], u[2] - v[2]});
}

namespace detail {

inline Vec3 vector_field(double k, const Vec3& s) {
  return {s[1], k * s[0] * s[2], -s[0] * s[1]};
}

inline Matrix3 jacobian(double k, const Vec3& s) {
  return {{{0.0, 1.0, 0.0},
           {k * s[2], 0.0, k * s[0]},
           {-s[1], -s[0], 0.0}}};
}

}  // namespace detail

inline State3 vector_field(const SystemParams& params, const State3& s) {
  return State3(detail::vector_field(params.k(), s.to_array()));
}

inline Matrix3 jacobian(const SystemParams& params, const State3& s) {
  return detail::jacobian(params.k(), s.to_array());
}

/// H_k = (y^2 + k z^2) / 2
inline double hamiltonian(const SystemParams& params, const State3& s) {
  return 0.5 * (s.y() * s.y() + params.k() * s.z() * s.z());
}

/// C = x^2 / 2 + z
inline double casimir(const State3& s) { return 0.5 * s.x() * s.x() + s.z(); }

inline Vec3 hamiltonian_gradient(const SystemParams& params, const State3& s) {
  return {0.0, s.y(), params.k() * s.z()};
}

inline Vec3 casimir_gradient(const State3& s) { return {s.x(), 0.0, 1.0}; }

inline ECValue energy_casimir(const SystemParams& params, const State3& s) {
  return {hamiltonian(params, s), casimir(s)};
}

inline Matrix3 poisson_matrix(const State3& s) {
  const double x = s.x();
  return {{{0.0, 1.0, 0.0},
           {-1.0, 0.0, x},
           {0.0, -x, 0.0}}};
}

template <class F>
concept GradientFunction = std::regular_invocable<F, const State3&> &&
    std::convertible_to<std::invoke_result_t<F, const State3&>, Vec3>;

/// {f, g}(s) = grad f(s)^T Pi(s) grad g(s)
template <GradientFunction F, GradientFunction G>
double poisson_bracket(F&& f_grad, G&& g_grad, const State3& s) {
  const Vec3 df = f_grad(s);
  const Vec3 dg = g_grad(s);
  return dot(df, mat_vec(poisson_matrix(s), dg));
}

}  // namespace mbloch
