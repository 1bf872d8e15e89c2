#pragma once

// Closed-form results for the minimal model: the per-outcome objective Q,
// its maximization chain over (omega, psi, z), the maximum teleported energy,
// the energy and entanglement profiles f_E / f_I, and both
// energy-entanglement bound coefficients.
//
// Entropies are in nats.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <utility>

#include "qet/errors.hpp"
#include "qet/measurement.hpp"
#include "qet/model.hpp"
#include "qet/qmath.hpp"

namespace qet {

using Vec3 = std::array<double, 3>;

namespace detail {

inline void require_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(what) + ": argument " +
                                                  std::to_string(x) + " outside [0, 1]");
}

// Clamps round-off overshoot of x = q^2/p^2 back into [0, 1].
inline double clamp_ratio(double x, const char* what) {
  if (x > 1.0 && x <= 1.0 + 1e-12) return 1.0;
  if (x < 0.0 && x >= -1e-12) return 0.0;
  require_unit_interval(x, what);
  return x;
}

// sqrt(1 + y) - 1 without cancellation.
inline double sqrt1pm1(double y) { return y / (std::sqrt(1.0 + y) + 1.0); }

}  // namespace detail

// X(mu) = p [h^2 (1 - n_z^2) + 2 k^2 (1 - n_x^2)] - 3 h k q n_x n_z
inline double X_of(const ModelParams& params, double p, double q, const Vec3& n) {
  const double h = params.h();
  const double k = params.k();
  return p * (h * h * (1.0 - n[2] * n[2]) + 2.0 * k * k * (1.0 - n[0] * n[0])) -
         3.0 * h * k * q * n[0] * n[2];
}

// Q(mu) = X cos(2 omega) - h k q n_y sin(2 omega) - X.  E_B = (1/eps) sum_mu Q(mu).
inline double Q_of(const ModelParams& params, double p, double q, double omega, const Vec3& n) {
  const double x = X_of(params, p, q, n);
  return x * std::cos(2.0 * omega) - params.h() * params.k() * q * n[1] * std::sin(2.0 * omega) - x;
}

// max over omega of Q = sqrt(X^2 + (h k q n_y)^2) - X.
inline double max_over_omega(const ModelParams& params, double p, double q, const Vec3& n) {
  const double x = X_of(params, p, q, n);
  const double y = params.h() * params.k() * q * n[1];
  return std::hypot(x, y) - x;
}

// Minimum of X over psi with n_x = sqrt(z) cos psi, n_z = sqrt(z) sin psi.
inline double min_X_over_psi(const ModelParams& params, double p, double q, double z) {
  detail::require_unit_interval(z, "min_X_over_psi");
  const double h2 = params.h() * params.h();
  const double k2 = params.k() * params.k();
  const double spread = std::sqrt((h2 - 2.0 * k2) * (h2 - 2.0 * k2) * p * p + 9.0 * h2 * k2 * q * q);
  return (1.0 - z / 2.0) * p * (h2 + 2.0 * k2) - (z / 2.0) * spread;
}

struct TCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

inline TCoefficients t_coefficients(const ModelParams& params, double p, double q) {
  const double h2 = params.h() * params.h();
  const double k2 = params.k() * params.k();
  const double spread = std::sqrt((h2 - 2.0 * k2) * (h2 - 2.0 * k2) * p * p + 9.0 * h2 * k2 * q * q);
  return {p * (h2 + 2.0 * k2), p * (h2 + 2.0 * k2) / 2.0 + spread / 2.0, h2 * k2 * q * q};
}

// T(z) = sqrt((a - b z)^2 + c (1 - z)) - (a - b z): the optimum of Q at fixed z = 1 - n_y^2.
inline double T_profile(const ModelParams& params, double p, double q, double z) {
  detail::require_unit_interval(z, "T_profile");
  const auto [a, b, c] = t_coefficients(params, p, q);
  const double lin = a - b * z;
  return std::sqrt(lin * lin + c * (1.0 - z)) - lin;
}

// t(z) = -c + 2 b T(z); dT/dz = t(z) / (2 sqrt(...)).
inline double t_of(const ModelParams& params, double p, double q, double z) {
  const auto coef = t_coefficients(params, p, q);
  return -coef.c + 2.0 * coef.b * T_profile(params, p, q, z);
}

struct TSignVerdict {
  bool degenerate = false;      // q = 0 or |q| = p: t vanishes identically
  bool a_ge_b = false;          // regime used for the t(1) formula
  double t_at_one = 0.0;        // t(1) evaluated from (a, b, c)
  double t_at_one_regime = 0.0; // -h^2 k^2 q^2 (a >= b) or -8 h^2 k^2 (p^2 - q^2) (a <= b)
  double max_t = 0.0;           // max of t over the z grid
  double max_excess = 0.0;      // max over the grid of T(z) - T(0)
  bool max_at_zero = false;
  bool ok = false;
};

// Scans z in [0, 1] and checks that T is maximized at z = 0 and that t <= 0.
inline TSignVerdict t_sign_check(const ModelParams& params, double p, double q, int grid_points = 128,
                                 double tol = 1e-12) {
  const double h2 = params.h() * params.h();
  const double k2 = params.k() * params.k();
  const auto coef = t_coefficients(params, p, q);

  TSignVerdict v;
  const double scale = std::max(1.0, coef.a);
  v.degenerate = q == 0.0 || std::abs(p * p - q * q) <= 1e-12 * p * p;
  v.a_ge_b = coef.a >= coef.b;
  v.t_at_one = t_of(params, p, q, 1.0);
  v.t_at_one_regime = v.a_ge_b ? -h2 * k2 * q * q : -8.0 * h2 * k2 * (p * p - q * q);

  const double t0 = T_profile(params, p, q, 0.0);
  v.max_t = -INFINITY;
  v.max_excess = -INFINITY;
  for (int i = 0; i < grid_points; ++i) {
    const double z = grid_points == 1 ? 0.0 : static_cast<double>(i) / (grid_points - 1);
    v.max_t = std::max(v.max_t, t_of(params, p, q, z));
    v.max_excess = std::max(v.max_excess, T_profile(params, p, q, z) - t0);
  }
  v.max_at_zero = v.max_excess <= tol * scale;
  const bool t1_consistent = std::abs(v.t_at_one - v.t_at_one_regime) <= 1e-9 * scale * scale;
  const bool t_nonpositive = v.max_t <= 1e-9 * scale * scale;
  const bool t1_negative = v.degenerate || v.t_at_one < 0.0;
  v.ok = v.max_at_zero && t1_consistent && t_nonpositive && t1_negative;
  return v;
}

// Energy profile f_E(x), x = q^2 / p^2.
inline double f_E(const ModelParams& params, double x) {
  x = detail::clamp_ratio(x, "f_E");
  const double c2 = params.cos_sigma() * params.cos_sigma();
  const double s2 = params.sin_sigma() * params.sin_sigma();
  return params.eps() * (1.0 + s2) * detail::sqrt1pm1(c2 * s2 / ((1.0 + s2) * (1.0 + s2)) * x);
}

// Entanglement profile f_I(x) in nats: the drop of the binary entropy from
// (1 + c)/2 to (1 + y)/2, y = sqrt(c^2 + x s^2).  Equivalently the integral of
// atanh over [c, y]; short intervals are integrated directly because the
// entropy difference cancels there.
inline double f_I(const ModelParams& params, double x) {
  x = detail::clamp_ratio(x, "f_I");
  const double c = params.cos_sigma();
  const double s2 = params.sin_sigma() * params.sin_sigma();
  const double y = std::sqrt(c * c + x * s2);
  const double width = x * s2 / (y + c);
  const double one_minus_y = s2 * (1.0 - x) / (1.0 + y);

  if (width <= 0.25 * one_minus_y) {
    static constexpr double node[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                       0.9602898564975363};
    static constexpr double weight[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                         0.1012285362903763};
    const double mid = c + width / 2.0;
    double sum = 0.0;
    for (int i = 0; i < 4; ++i)
      sum += weight[i] * (std::atanh(mid - node[i] * width / 2.0) + std::atanh(mid + node[i] * width / 2.0));
    return sum * width / 2.0;
  }
  const double one_minus_c = s2 / (1.0 + c);
  return xlogx((1.0 + y) / 2.0) + xlogx(one_minus_y / 2.0) - xlogx((1.0 + c) / 2.0) -
         xlogx(one_minus_c / 2.0);
}

enum class Profile { energy, entanglement };

// Rescaled profiles with unit slope at x = 0.
inline double rescaled_fbar(const ModelParams& params, double x, Profile which) {
  detail::require_unit_interval(x, "rescaled_fbar");
  const double c = params.cos_sigma();
  const double s2 = params.sin_sigma() * params.sin_sigma();
  if (which == Profile::energy)
    return 2.0 * (1.0 + s2) / (params.eps() * c * c * s2) * f_E(params, x);
  const double log_ratio = std::log((1.0 + c) * (1.0 + c) / s2);  // ln((1+c)/(1-c))
  return 4.0 * c / (s2 * log_ratio) * f_I(params, x);
}

// ((h^2 + 2k^2)/eps) sum_mu p [sqrt(1 + h^2 k^2 q^2 / ((h^2 + 2k^2)^2 p^2)) - 1].
inline double max_EB_closed(const ModelParams& params, std::span<const OutcomeWeights> weights) {
  const double h2 = params.h() * params.h();
  const double k2 = params.k() * params.k();
  const double a = h2 + 2.0 * k2;
  double sum = 0.0;
  for (const auto& w : weights) {
    if (w.p < kZeroProbability) continue;
    const double x = detail::clamp_ratio(w.q * w.q / (w.p * w.p), "max_EB_closed");
    sum += w.p * detail::sqrt1pm1(h2 * k2 / (a * a) * x);
  }
  return a / params.eps() * sum;
}

inline double max_EB_closed(const ModelParams& params, const MeasurementModel& model) {
  const auto w = model.weights();
  return max_EB_closed(params, w);
}

// sum_mu p f(q^2 / p^2) for either profile; zero-probability outcomes are dropped.
inline double profile_sum(const ModelParams& params, std::span<const OutcomeWeights> weights,
                          Profile which) {
  double sum = 0.0;
  for (const auto& w : weights) {
    if (w.p < kZeroProbability) continue;
    const double x = w.q * w.q / (w.p * w.p);
    sum += w.p * (which == Profile::energy ? f_E(params, x) : f_I(params, x));
  }
  return sum;
}

// Maximum over all measurements of the class: every outcome proportional to a projector.
inline double projective_max_EB(const ModelParams& params) {
  const double h2 = params.h() * params.h();
  const double k2 = params.k() * params.k();
  const double a = h2 + 2.0 * k2;
  return a / params.eps() * detail::sqrt1pm1(h2 * k2 / (a * a));
}

// Eigenvalues (lambda_+, lambda_-) of the post-measurement reduced state of B.
inline std::pair<double, double> lambda_pm(const ModelParams& params, double p, double q) {
  if (!(p > 0.0) || std::abs(q) > p * (1.0 + 1e-12))
    throw DomainError("lambda_pm: need p > 0 and |q| <= p");
  const double x = std::min(1.0, q * q / (p * p));
  const double c2 = params.cos_sigma() * params.cos_sigma();
  const double s2 = params.sin_sigma() * params.sin_sigma();
  const double y = std::sqrt(c2 + s2 * x);
  return {(1.0 + y) / 2.0, s2 * (1.0 - x) / (2.0 * (1.0 + y))};
}

struct BoundCoefficients {
  double c32 = 0.0;   // Delta S >= c32 * maxE_B / eps
  double c770 = 0.0;  // maxE_B >= c770 * Delta S
};

inline BoundCoefficients bounds(const ModelParams& params) {
  const double c = params.cos_sigma();
  const double s2 = params.sin_sigma() * params.sin_sigma();
  const double one_minus_c = s2 / (1.0 + c);
  BoundCoefficients b;
  b.c32 = (1.0 + s2) / (2.0 * c * c * c) * std::log((1.0 + c) / one_minus_c);
  const double numer = 2.0 * params.eps() * (std::sqrt(4.0 - 3.0 * c * c) - 2.0 + c * c);
  const double denom = (1.0 + c) * std::log(2.0 / (1.0 + c)) + one_minus_c * std::log(2.0 / one_minus_c);
  b.c770 = numer / denom;
  return b;
}

}  // namespace qet
