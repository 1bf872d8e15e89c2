#pragma once

// Measurements on A whose Kraus operators commute with the interaction V:
//   M_A(mu) = e^{i delta} (m + e^{i alpha} l sigma_A^x),
//   Pi_A(mu) = M^dagger M = p + q sigma_A^x,  p = m^2 + l^2,  q = 2 m l cos(alpha).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qet/errors.hpp"
#include "qet/model.hpp"
#include "qet/qmath.hpp"

namespace qet {

inline constexpr double kConstraintTol = 1e-10;
inline constexpr double kZeroProbability = 1e-14;

struct KrausCoefficients {
  double m = 0.0;
  double l = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
};

struct OutcomeWeights {
  double p = 0.0;
  double q = 0.0;
};

struct Outcome {
  KrausCoefficients coeffs;
  OutcomeWeights weights;
};

class MeasurementModel {
public:
  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  std::size_t size() const { return outcomes_.size(); }
  const Outcome& operator[](std::size_t mu) const { return outcomes_.at(mu); }

  std::vector<OutcomeWeights> weights() const {
    std::vector<OutcomeWeights> w;
    w.reserve(outcomes_.size());
    for (const auto& o : outcomes_) w.push_back(o.weights);
    return w;
  }

  std::vector<KrausCoefficients> coefficients() const {
    std::vector<KrausCoefficients> c;
    c.reserve(outcomes_.size());
    for (const auto& o : outcomes_) c.push_back(o.coeffs);
    return c;
  }

  double sum_l_squared() const {
    double s = 0.0;
    for (const auto& o : outcomes_) s += o.coeffs.l * o.coeffs.l;
    return s;
  }

private:
  friend MeasurementModel validate(std::span<const KrausCoefficients>);
  std::vector<Outcome> outcomes_;
};

inline Operator2 kraus_operator(const KrausCoefficients& c) {
  const cplx global = std::polar(1.0, c.delta);
  const cplx mixed = std::polar(c.l, c.alpha);
  return global * (c.m * Operator2::identity() + mixed * pauli(Axis::x));
}

// Checks both coefficient constraints, completeness and [M, V] = 0.
inline MeasurementModel validate(std::span<const KrausCoefficients> coeffs) {
  if (coeffs.empty()) throw ConstraintViolation(Constraint::normalization, 1.0);

  double norm_sum = 0.0;
  double balance = 0.0;
  for (const auto& c : coeffs) {
    if (!std::isfinite(c.m) || !std::isfinite(c.l) || !std::isfinite(c.alpha) ||
        !std::isfinite(c.delta))
      throw ConstraintViolation(Constraint::normalization, NAN);
    norm_sum += c.m * c.m + c.l * c.l;
    balance += c.m * c.l * std::cos(c.alpha);
  }
  if (std::abs(norm_sum - 1.0) > kConstraintTol)
    throw ConstraintViolation(Constraint::normalization, norm_sum - 1.0);
  if (std::abs(balance) > kConstraintTol) throw ConstraintViolation(Constraint::balance, balance);

  Operator2 total;
  Operator4 coupling = tensor(pauli(Axis::x), pauli(Axis::x));
  double commutation = 0.0;
  MeasurementModel model;
  model.outcomes_.reserve(coeffs.size());
  for (const auto& c : coeffs) {
    const auto m = kraus_operator(c);
    total += m.adjoint() * m;
    commutation = std::max(
        commutation, commutator(tensor(m, Operator2::identity()), coupling).max_abs());
    model.outcomes_.push_back(
        {c, {c.m * c.m + c.l * c.l, 2.0 * c.m * c.l * std::cos(c.alpha)}});
  }
  const double completeness = (total - Operator2::identity()).max_abs();
  if (completeness > kConstraintTol)
    throw ConstraintViolation(Constraint::completeness, completeness);
  if (commutation > 1e-12) throw ConstraintViolation(Constraint::commutation, commutation);
  return model;
}

inline MeasurementModel validate(std::initializer_list<KrausCoefficients> coeffs) {
  return validate(std::span<const KrausCoefficients>(coeffs.begin(), coeffs.size()));
}

inline void check_weights(std::span<const OutcomeWeights> weights) {
  if (weights.empty()) throw ConstraintViolation(Constraint::weights, 1.0);
  double sp = 0.0;
  double sq = 0.0;
  for (const auto& w : weights) {
    if (!std::isfinite(w.p) || !std::isfinite(w.q))
      throw ConstraintViolation(Constraint::weights, NAN);
    if (w.p < std::abs(w.q) - 1e-12) throw ConstraintViolation(Constraint::weights, std::abs(w.q) - w.p);
    sp += w.p;
    sq += w.q;
  }
  if (std::abs(sp - 1.0) > kConstraintTol) throw ConstraintViolation(Constraint::normalization, sp - 1.0);
  if (std::abs(sq) > kConstraintTol) throw ConstraintViolation(Constraint::balance, sq);
}

// Realizes weights with alpha = delta = 0:
//   m = (sqrt(p+q) + sqrt(p-q)) / 2,  l = (sqrt(p+q) - sqrt(p-q)) / 2.
inline KrausCoefficients canonical_coefficients(const OutcomeWeights& w) {
  const double plus = std::sqrt(std::max(0.0, w.p + w.q));
  const double minus = std::sqrt(std::max(0.0, w.p - w.q));
  return {(plus + minus) / 2.0, (plus - minus) / 2.0, 0.0, 0.0};
}

inline MeasurementModel weights_to_coeffs(std::span<const OutcomeWeights> weights) {
  check_weights(weights);
  std::vector<KrausCoefficients> coeffs;
  coeffs.reserve(weights.size());
  for (const auto& w : weights) coeffs.push_back(canonical_coefficients(w));
  return validate(coeffs);
}

inline MeasurementModel weights_to_coeffs(std::initializer_list<OutcomeWeights> weights) {
  return weights_to_coeffs(std::span<const OutcomeWeights>(weights.begin(), weights.size()));
}

inline Operator4 kraus_on_full_space(const MeasurementModel& model, std::size_t mu) {
  if (mu >= model.size())
    throw IndexOutOfRange("outcome index " + std::to_string(mu) + " out of range (" +
                          std::to_string(model.size()) + " outcomes)");
  return tensor(kraus_operator(model[mu].coeffs), Operator2::identity());
}

inline Operator4 povm_on_full_space(const MeasurementModel& model, std::size_t mu) {
  const auto m = kraus_on_full_space(model, mu);
  return m.adjoint() * m;
}

struct MeasuredOutcome {
  double probability = 0.0;
  std::optional<StateVector4> state;  // empty when probability < 1e-14
};

// Unnormalized M_A(mu)|g>.
inline StateVector4 apply_kraus(const MeasurementModel& model, std::size_t mu, const GroundState& g) {
  return kraus_on_full_space(model, mu) * g.psi;
}

// |A(mu)> = M_A(mu)|g> / sqrt(p_A(mu)).
inline StateVector4 post_measurement_state(const MeasurementModel& model, std::size_t mu,
                                           const GroundState& g) {
  const auto v = apply_kraus(model, mu, g);
  const double prob = std::norm(v.norm());
  if (prob < kZeroProbability)
    throw DegenerateOutcome("DegenerateOutcome: outcome " + std::to_string(mu) +
                            " has probability " + std::to_string(prob));
  return (1.0 / std::sqrt(prob)) * v;
}

inline std::vector<MeasuredOutcome> measure(const MeasurementModel& model, const GroundState& g) {
  std::vector<MeasuredOutcome> out;
  out.reserve(model.size());
  for (std::size_t mu = 0; mu < model.size(); ++mu) {
    const auto v = apply_kraus(model, mu, g);
    const double prob = std::norm(v.norm());
    if (prob < kZeroProbability)
      out.push_back({0.0, std::nullopt});
    else
      out.push_back({prob, (1.0 / std::sqrt(prob)) * v});
  }
  return out;
}

// E_A = (2 h^2 / eps) sum_mu l_mu^2.
inline double input_energy_closed(const MeasurementModel& model, const ModelParams& params) {
  return 2.0 * params.h() * params.h() / params.eps() * model.sum_l_squared();
}

// E_A = sum_mu <g| M^dagger H M |g>.
inline double input_energy_bruteforce(const MeasurementModel& model, const ModelParams& params) {
  const auto parts = build_hamiltonian(params);
  const auto g = ground_state(params);
  double e = 0.0;
  for (std::size_t mu = 0; mu < model.size(); ++mu) e += expectation(apply_kraus(model, mu, g), parts.H);
  return e;
}

namespace detail {
// Uniform double in [0, 1) from the top 53 bits; reproducible across platforms.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
}  // namespace detail

// Random feasible weights: p flat on the simplex, q = u p with u in [-1, 1],
// recentered to sum q = 0 and rescaled so that |q| <= p.
inline std::vector<OutcomeWeights> random_weights(std::mt19937_64& rng, std::size_t n_outcomes) {
  std::vector<OutcomeWeights> w(n_outcomes);
  double total = 0.0;
  for (auto& x : w) {
    x.p = -std::log(1.0 - detail::uniform01(rng));
    total += x.p;
  }
  for (auto& x : w) x.p /= total;

  double shift = 0.0;
  for (auto& x : w) {
    x.q = (2.0 * detail::uniform01(rng) - 1.0) * x.p;
    shift += x.q;
  }
  double worst = 1.0;
  for (auto& x : w) {
    x.q -= shift * x.p;
    if (x.p > 0.0) worst = std::max(worst, std::abs(x.q) / x.p);
  }
  for (auto& x : w) x.q /= worst;

  // Absorb round-off so that the sums are exact to a few ulps.
  double sp = 0.0;
  double sq = 0.0;
  for (const auto& x : w) {
    sp += x.p;
    sq += x.q;
  }
  for (auto& x : w) {
    x.p /= sp;
    x.q -= sq * x.p;
    x.q = std::clamp(x.q, -x.p, x.p);
  }
  return w;
}

inline MeasurementModel random_measurement(std::uint64_t seed, std::size_t n_outcomes) {
  if (n_outcomes < 2) throw DomainError("random_measurement: need at least 2 outcomes");
  std::mt19937_64 rng(seed);
  const auto w = random_weights(rng, n_outcomes);
  return weights_to_coeffs(w);
}

// Like random_measurement, but with random alpha and delta per outcome, so
// that sum l^2 (and hence E_A) is not fixed by the POVM alone.
inline MeasurementModel random_kraus_measurement(std::uint64_t seed, std::size_t n_outcomes) {
  if (n_outcomes < 2) throw DomainError("random_kraus_measurement: need at least 2 outcomes");
  std::mt19937_64 rng(seed);
  const auto w = random_weights(rng, n_outcomes);
  std::vector<KrausCoefficients> coeffs;
  coeffs.reserve(w.size());
  for (const auto& x : w) {
    // Need |cos alpha| >= |q|/p so that q / cos(alpha) stays within [-p, p].
    const double ratio = x.p > 0.0 ? std::abs(x.q) / x.p : 0.0;
    const double max_angle = std::acos(std::min(1.0, ratio));
    double alpha = max_angle * (2.0 * detail::uniform01(rng) - 1.0);
    if (detail::uniform01(rng) < 0.5) alpha += std::numbers::pi;
    const double delta = 2.0 * std::numbers::pi * detail::uniform01(rng);
    const double cos_a = std::cos(alpha);
    const double qeff = std::clamp(x.q / cos_a, -x.p, x.p);
    auto c = canonical_coefficients({x.p, qeff});
    c.alpha = alpha;
    c.delta = delta;
    coeffs.push_back(c);
  }
  return validate(coeffs);
}

inline MeasurementModel identity_measurement() { return validate({{1.0, 0.0, 0.0, 0.0}}); }

// sigma_A^x projective measurement, weights (1/2, +1/2), (1/2, -1/2).
inline MeasurementModel projective_measurement() {
  return weights_to_coeffs({{0.5, 0.5}, {0.5, -0.5}});
}

// Two outcomes with weights (1/2, +u/2), (1/2, -u/2), 0 <= u <= 1.
inline MeasurementModel weak_measurement(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("weak_measurement: u must be in [0, 1]");
  return weights_to_coeffs({{0.5, 0.5 * u}, {0.5, -0.5 * u}});
}

}  // namespace qet
