#pragma once

// Adaptive Dormand-Prince 5(4) integration of the 3D flow and of the 4D
// canonical realization, with quintic Hermite dense output, section-crossing
// detection and conservation-drift reporting.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "mbloch/core.hpp"
#include "mbloch/symplectic.hpp"

namespace mbloch {

enum class IntegrationStatus { Completed, BlowUp, MaxSteps };

inline const char* to_string(IntegrationStatus s) {
  switch (s) {
    case IntegrationStatus::Completed: return "Completed";
    case IntegrationStatus::BlowUp: return "BlowUp";
    case IntegrationStatus::MaxSteps: return "MaxSteps";
  }
  return "Unknown";
}

struct IntegrateOptions {
  std::size_t max_steps = 10'000'000;
  double blowup_norm = 1e12;
  /// Orthogonal projection of every accepted 3D step back onto the initial
  /// {H = h} and {C = c} level sets. Ignored by integrate4.
  bool project_onto_levels = false;
};

template <class State>
class Trajectory {
 public:
  static constexpr std::size_t dim = State::dim;
  using Array = std::array<double, dim>;

  /// Accepted step node: time, state, first and second time derivatives.
  struct Node {
    double t;
    Array y;
    Array dy;
    Array ddy;
  };

  Trajectory(std::vector<Node> nodes, double tol, IntegrationStatus status)
      : nodes_(std::move(nodes)), tol_(tol), status_(status) {}

  std::size_t size() const noexcept { return nodes_.size(); }
  double time(std::size_t i) const { return nodes_.at(i).t; }
  State state(std::size_t i) const { return State(nodes_.at(i).y); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  double t_begin() const { return nodes_.front().t; }
  double t_end() const { return nodes_.back().t; }
  State initial_state() const { return State(nodes_.front().y); }
  State final_state() const { return State(nodes_.back().y); }

  double tol() const noexcept { return tol_; }
  IntegrationStatus status() const noexcept { return status_; }

  /// Dense output on [t_begin, t_end].
  Array interpolate_array(double t) const {
    const std::size_t i = interval_index(t);
    if (i + 1 == nodes_.size()) {
      return nodes_[i].y;
    }
    const Node& a = nodes_[i];
    const Node& b = nodes_[i + 1];
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double s4 = s3 * s;
    const double s5 = s4 * s;
    const double h00 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    const double h10 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    const double h20 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    const double h01 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    const double h11 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    const double h21 = 0.5 * s3 - s4 + 0.5 * s5;
    Array out{};
    for (std::size_t j = 0; j < dim; ++j) {
      out[j] = h00 * a.y[j] + h * h10 * a.dy[j] + h * h * h20 * a.ddy[j] +
               h01 * b.y[j] + h * h11 * b.dy[j] + h * h * h21 * b.ddy[j];
    }
    return out;
  }

  State interpolate(double t) const { return State(interpolate_array(t)); }

  /// Time derivative of the dense output.
  Array interpolate_derivative(double t) const {
    const std::size_t i = interval_index(t);
    if (i + 1 == nodes_.size()) {
      return nodes_[i].dy;
    }
    const Node& a = nodes_[i];
    const Node& b = nodes_[i + 1];
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double s4 = s3 * s;
    const double d00 = (-30.0 * s2 + 60.0 * s3 - 30.0 * s4) / h;
    const double d10 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    const double d20 = h * (s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4);
    const double d01 = -d00;
    const double d11 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    const double d21 = h * (1.5 * s2 - 4.0 * s3 + 2.5 * s4);
    Array out{};
    for (std::size_t j = 0; j < dim; ++j) {
      out[j] = d00 * a.y[j] + d10 * a.dy[j] + d20 * a.ddy[j] +
               d01 * b.y[j] + d11 * b.dy[j] + d21 * b.ddy[j];
    }
    return out;
  }

 private:
  std::size_t interval_index(double t) const {
    if (t < nodes_.front().t || t > nodes_.back().t) {
      throw Error(ErrorCode::DomainExceeded, "time outside the integrated span");
    }
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                               [](double v, const Node& n) { return v < n.t; });
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    return i == 0 ? 0 : std::min(i - 1, nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
  double tol_;
  IntegrationStatus status_;
};

using Trajectory3 = Trajectory<State3>;
using Trajectory4 = Trajectory<State4>;

namespace detail {

template <std::size_t N>
using Arr = std::array<double, N>;

template <std::size_t N>
double inf_norm(const Arr<N>& v) {
  double m = 0.0;
  for (double x : v) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

template <std::size_t N>
bool all_finite(const Arr<N>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Dormand & Prince (1980) 5(4) tableau.
struct DP54 {
  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                          a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
};

inline void check_span_and_tol(double t0, double t1, double tol) {
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0)) {
    throw Error(ErrorCode::InvalidSpan, "t_span must satisfy t1 > t0");
  }
  if (!(tol >= 1e-14 && tol <= 1e-2)) {
    throw Error(ErrorCode::ToleranceOutOfRange, "tol must lie in [1e-14, 1e-2]");
  }
}

/// Generic driver. `rhs(y)` is the vector field, `accel(y, f)` the second
/// derivative J(y) f, `project(y)` an optional post-step correction.
template <class State, class Rhs, class Accel>
Trajectory<State> dopri54(Rhs&& rhs, Accel&& accel,
                          const std::function<void(Arr<State::dim>&)>& project,
                          const Arr<State::dim>& y0, double t0, double t1, double tol,
                          const IntegrateOptions& opt) {
  constexpr std::size_t N = State::dim;
  using V = Arr<N>;
  using Node = typename Trajectory<State>::Node;
  using T = DP54;

  auto scale = [tol](const V& a, const V& b, std::size_t j) {
    return tol * std::max({1.0, std::abs(a[j]), std::abs(b[j])});
  };
  auto axpy = [](const V& y, double h, std::initializer_list<std::pair<double, const V*>> terms) {
    V out = y;
    for (const auto& [w, k] : terms) {
      for (std::size_t j = 0; j < N; ++j) out[j] += h * w * (*k)[j];
    }
    return out;
  };

  std::vector<Node> nodes;
  V y = y0;
  V f = rhs(y);
  nodes.push_back({t0, y, f, accel(y, f)});

  // Initial step guess (Hairer, Norsett & Wanner, II.4).
  double h;
  {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double sc = tol * std::max(1.0, std::abs(y[j]));
      d0 = std::max(d0, std::abs(y[j]) / sc);
      d1 = std::max(d1, std::abs(f[j]) / sc);
    }
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t1 - t0);
    V y1 = axpy(y, h0, {{1.0, &f}});
    V f1 = rhs(y1);
    double d2 = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double sc = tol * std::max(1.0, std::abs(y[j]));
      d2 = std::max(d2, std::abs(f1[j] - f[j]) / sc);
    }
    if (!std::isfinite(d2)) d2 = 1e30;
    d2 /= h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    h = std::min({100.0 * h0, h1, t1 - t0});
  }

  constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
  constexpr double facmin = 0.2, facmax = 10.0;
  double facold = 1e-4;
  double t = t0;
  bool last_rejected = false;
  std::size_t steps = 0;
  IntegrationStatus status = IntegrationStatus::Completed;

  while (t < t1) {
    if (steps++ >= opt.max_steps) {
      status = IntegrationStatus::MaxSteps;
      break;
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      // Step-size collapse: a finite-time singularity ahead.
      status = IntegrationStatus::BlowUp;
      break;
    }
    bool final_step = false;
    if (t + h >= t1) {
      h = t1 - t;
      final_step = true;
    }

    const V& k1 = f;
    const V k2 = rhs(axpy(y, h, {{T::a21, &k1}}));
    const V k3 = rhs(axpy(y, h, {{T::a31, &k1}, {T::a32, &k2}}));
    const V k4 = rhs(axpy(y, h, {{T::a41, &k1}, {T::a42, &k2}, {T::a43, &k3}}));
    const V k5 = rhs(axpy(y, h, {{T::a51, &k1}, {T::a52, &k2}, {T::a53, &k3}, {T::a54, &k4}}));
    const V k6 = rhs(axpy(y, h, {{T::a61, &k1}, {T::a62, &k2}, {T::a63, &k3}, {T::a64, &k4},
                                 {T::a65, &k5}}));
    V ynew = axpy(y, h, {{T::a71, &k1}, {T::a73, &k3}, {T::a74, &k4}, {T::a75, &k5},
                         {T::a76, &k6}});
    const V k7 = rhs(ynew);

    double err = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double e = h * (T::e1 * k1[j] + T::e3 * k3[j] + T::e4 * k4[j] + T::e5 * k5[j] +
                            T::e6 * k6[j] + T::e7 * k7[j]);
      err = std::max(err, std::abs(e) / scale(y, ynew, j));
    }

    if (!(err <= 1.0)) {
      // Rejected (also covers NaN from overflowing stages).
      const double fac11 = std::isfinite(err) ? std::pow(err, expo1) : 1.0 / facmin;
      h /= std::min(1.0 / facmin, fac11 / safe);
      last_rejected = true;
      continue;
    }

    const double fac11 = std::pow(err, expo1);
    double fac = fac11 / std::pow(facold, beta);
    fac = std::clamp(fac / safe, 1.0 / facmax, 1.0 / facmin);
    double hnew = h / fac;
    facold = std::max(err, 1e-4);

    V fnew = k7;
    if (project) {
      project(ynew);
      fnew = rhs(ynew);
    }
    t = final_step ? t1 : t + h;
    y = ynew;
    f = fnew;

    if (!all_finite(y)) {
      status = IntegrationStatus::BlowUp;
      break;
    }
    nodes.push_back({t, y, f, accel(y, f)});
    if (inf_norm(y) > opt.blowup_norm) {
      status = IntegrationStatus::BlowUp;
      break;
    }
    if (last_rejected) hnew = std::min(hnew, h);
    last_rejected = false;
    h = hnew;
  }
  return Trajectory<State>(std::move(nodes), tol, status);
}

inline Vec3 acceleration3(double k, const Vec3& y, const Vec3& f) {
  return mat_vec(jacobian(k, y), f);
}

// Gauss-Newton projection onto {H = h0} and {C = c0}.
inline void project_levels(double k, double h0, double c0, Vec3& s) {
  for (int it = 0; it < 3; ++it) {
    const double r1 = 0.5 * (s[1] * s[1] + k * s[2] * s[2]) - h0;
    const double r2 = 0.5 * s[0] * s[0] + s[2] - c0;
    const Vec3 g1{0.0, s[1], k * s[2]};
    const Vec3 g2{s[0], 0.0, 1.0};
    const double a = dot(g1, g1), b = dot(g1, g2), d = dot(g2, g2);
    const double det = a * d - b * b;
    if (!(std::abs(det) > 1e-300)) return;
    const double l1 = (d * r1 - b * r2) / det;
    const double l2 = (-b * r1 + a * r2) / det;
    for (std::size_t j = 0; j < 3; ++j) s[j] -= l1 * g1[j] + l2 * g2[j];
  }
}

}  // namespace detail

inline Trajectory3 integrate(const SystemParams& params, const State3& s0,
                             std::pair<double, double> t_span, double tol,
                             const IntegrateOptions& options = {}) {
  detail::check_span_and_tol(t_span.first, t_span.second, tol);
  const double k = params.k();
  std::function<void(Vec3&)> project;
  if (options.project_onto_levels) {
    const double h0 = hamiltonian(params, s0);
    const double c0 = casimir(s0);
    project = [k, h0, c0](Vec3& s) { detail::project_levels(k, h0, c0, s); };
  }
  return detail::dopri54<State3>(
      [k](const Vec3& y) { return detail::vector_field(k, y); },
      [k](const Vec3& y, const Vec3& f) { return detail::acceleration3(k, y, f); }, project,
      s0.to_array(), t_span.first, t_span.second, tol, options);
}

inline Trajectory4 integrate4(const SystemParams& params, const State4& s0,
                              std::pair<double, double> t_span, double tol,
                              const IntegrateOptions& options = {}) {
  detail::check_span_and_tol(t_span.first, t_span.second, tol);
  const double k = params.k();
  return detail::dopri54<State4>(
      [k](const Vec4& y) { return detail::vector_field4(k, y); },
      [k](const Vec4& y, const Vec4& f) {
        const Matrix4 j = detail::jacobian4(k, y);
        Vec4 out{};
        for (std::size_t r = 0; r < 4; ++r) {
          out[r] = j[r][0] * f[0] + j[r][1] * f[1] + j[r][2] * f[2] + j[r][3] * f[3];
        }
        return out;
      },
      {}, s0.to_array(), t_span.first, t_span.second, tol, options);
}

enum class CrossingDirection { Positive, Negative, Both };

template <class State>
struct Crossing {
  double t;
  State state;
};

/// Zeros of `section` along the dense output with the requested sign change,
/// refined to |section| <= 1e-11. A zero at the initial time is never reported.
template <class State, class Section>
std::vector<Crossing<State>> find_section_crossings(const Trajectory<State>& traj,
                                                    Section&& section,
                                                    CrossingDirection direction) {
  constexpr int kSubdivisions = 4;
  constexpr double kResidual = 1e-11;

  auto g = [&](double t) { return static_cast<double>(section(traj.interpolate(t))); };
  auto wanted = [direction](double before, double after) {
    switch (direction) {
      case CrossingDirection::Positive: return before < 0.0 && after > 0.0;
      case CrossingDirection::Negative: return before > 0.0 && after < 0.0;
      case CrossingDirection::Both: return true;
    }
    return false;
  };

  auto refine = [&](double a, double ga, double b, double gb) {
    // Safeguarded Newton on the dense output, bisection fallback.
    double t = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
      const double gt = g(t);
      if (std::abs(gt) <= kResidual) return t;
      if ((gt < 0.0) == (ga < 0.0)) {
        a = t;
        ga = gt;
      } else {
        b = t;
        gb = gt;
      }
      if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
        return std::abs(ga) < std::abs(gb) ? a : b;
      }
      const double d = std::max(1e-9 * (b - a), 1e-13 * std::max(1.0, std::abs(t)));
      const double lo = std::max(a, t - d), hi = std::min(b, t + d);
      const double slope = (g(hi) - g(lo)) / (hi - lo);
      double next = (slope != 0.0 && std::isfinite(slope)) ? t - gt / slope : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      t = next;
    }
    return t;
  };

  std::vector<Crossing<State>> out;
  const auto& nodes = traj.nodes();
  if (nodes.size() < 2) return out;

  double last_t = nodes.front().t;
  double last_g = g(last_t);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double ta = nodes[i].t;
    const double tb = nodes[i + 1].t;
    for (int s = 1; s <= kSubdivisions; ++s) {
      const double t = s == kSubdivisions ? tb : ta + (tb - ta) * s / kSubdivisions;
      const double gt = g(t);
      if (gt == 0.0) continue;  // resolved once the sign is known on the far side
      if (last_g == 0.0) {
        last_t = t;
        last_g = gt;
        continue;
      }
      if ((gt < 0.0) != (last_g < 0.0)) {
        if (wanted(last_g, gt)) {
          const double root = refine(last_t, last_g, t, gt);
          out.push_back({root, traj.interpolate(root)});
        }
      }
      last_t = t;
      last_g = gt;
    }
  }
  return out;
}

struct DriftReport {
  double max_abs_dH = 0.0;
  double max_abs_dC = 0.0;
};

inline DriftReport drift_report(const SystemParams& params, const Trajectory3& traj) {
  DriftReport r;
  const State3 s0 = traj.initial_state();
  const double h0 = hamiltonian(params, s0);
  const double c0 = casimir(s0);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State3 s = traj.state(i);
    r.max_abs_dH = std::max(r.max_abs_dH, std::abs(hamiltonian(params, s) - h0));
    r.max_abs_dC = std::max(r.max_abs_dC, std::abs(casimir(s) - c0));
  }
  return r;
}

}  // namespace mbloch
