#pragma once

// Brute-force simulation of the teleportation protocol on the 4-dim space:
// measure A, announce mu, apply U_B(mu), account for energies.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qet/analytic.hpp"
#include "qet/entanglement.hpp"
#include "qet/errors.hpp"
#include "qet/measurement.hpp"
#include "qet/model.hpp"
#include "qet/qmath.hpp"

namespace qet {

// U = cos(omega) + i sin(omega) n . sigma on qubit B.
class LocalUnitary {
public:
  LocalUnitary() = default;

  LocalUnitary(double omega, const Vec3& n) : omega_(omega), n_(n) {
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (!std::isfinite(omega) || std::abs(len - 1.0) > 1e-12)
      throw DomainError("LocalUnitary: axis must be a unit vector (|n| = " + std::to_string(len) + ")");
  }

  static LocalUnitary identity() { return {}; }

  // Normalizes an arbitrary nonzero axis.
  static LocalUnitary about(double omega, const Vec3& axis) {
    const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (!(len > 0.0)) throw DomainError("LocalUnitary: zero rotation axis");
    return LocalUnitary(omega, {axis[0] / len, axis[1] / len, axis[2] / len});
  }

  double omega() const { return omega_; }
  const Vec3& axis() const { return n_; }

  Operator2 matrix() const {
    using namespace std::complex_literals;
    const Operator2 n_sigma =
        n_[0] * pauli(Axis::x) + n_[1] * pauli(Axis::y) + n_[2] * pauli(Axis::z);
    return std::cos(omega_) * Operator2::identity() + (1i * std::sin(omega_)) * n_sigma;
  }

  Operator4 on_full_space() const { return tensor(Operator2::identity(), matrix()); }

private:
  double omega_ = 0.0;
  Vec3 n_{0.0, 0.0, 1.0};
};

// mu -> U_B(mu)
struct FeedbackPolicy {
  std::vector<LocalUnitary> unitaries;

  std::size_t size() const { return unitaries.size(); }

  static FeedbackPolicy identity(std::size_t n_outcomes) {
    return {std::vector<LocalUnitary>(n_outcomes)};
  }
};

struct OutcomeRecord {
  double probability = 0.0;
  EnergyValues energies;  // on the normalized post-operation state; zeros if probability is 0
};

struct ProtocolReport {
  double E_A = 0.0;                // brute force
  double E_A_closed = 0.0;
  double E_B = 0.0;                // -Tr[rho (H_B + V)]
  double E_B_analytic = 0.0;       // (1/eps) sum_mu Q(mu)
  double total_final_energy = 0.0; // Tr[rho H]
  std::vector<OutcomeRecord> per_outcome;
  double max_EB_closed = 0.0;
  double delta_S = 0.0;
  double delta_S_closed = 0.0;
  double mutual_info = 0.0;
  BoundCoefficients coefficients;
  double bound32_lhs = 0.0;   // Delta S
  double bound32_rhs = 0.0;   // c32 maxE_B / eps
  double bound770_lhs = 0.0;  // maxE_B
  double bound770_rhs = 0.0;  // c770 Delta S
};

inline ProtocolReport run(const ModelParams& params, const MeasurementModel& model,
                          const FeedbackPolicy& policy) {
  if (policy.size() != model.size())
    throw PolicyMismatch("PolicyMismatch: policy has " + std::to_string(policy.size()) +
                         " entries for " + std::to_string(model.size()) + " outcomes");

  const auto parts = build_hamiltonian(params);
  const auto g = ground_state(params);
  const auto local_B = local_energy_B(parts);

  ProtocolReport r;
  Operator4 rho;
  for (std::size_t mu = 0; mu < model.size(); ++mu) {
    const auto measured = apply_kraus(model, mu, g);
    r.E_A += expectation(measured, parts.H);
    const auto operated = policy.unitaries[mu].on_full_space() * measured;
    rho += outer(operated, operated);

    OutcomeRecord rec;
    rec.probability = std::norm(operated.norm());
    if (rec.probability >= kZeroProbability)
      rec.energies = energy_observables(parts, (1.0 / std::sqrt(rec.probability)) * operated);
    else
      rec.probability = 0.0;
    r.per_outcome.push_back(rec);

    const auto& w = model[mu].weights;
    const auto& u = policy.unitaries[mu];
    r.E_B_analytic += Q_of(params, w.p, w.q, u.omega(), u.axis()) / params.eps();
  }

  const auto state = DensityMatrix::from_matrix(rho);
  r.E_B = -expectation(state, local_B);
  r.total_final_energy = expectation(state, parts.H);
  r.E_A_closed = input_energy_closed(model, params);

  const auto weights = model.weights();
  r.max_EB_closed = max_EB_closed(params, weights);
  const auto ent = consumption(params, model);
  r.delta_S = ent.delta_S;
  r.delta_S_closed = profile_sum(params, weights, Profile::entanglement);
  r.mutual_info = ent.mutual_info;

  r.coefficients = bounds(params);
  r.bound32_lhs = r.delta_S;
  r.bound32_rhs = r.coefficients.c32 * r.max_EB_closed / params.eps();
  r.bound770_lhs = r.max_EB_closed;
  r.bound770_rhs = r.coefficients.c770 * r.delta_S;
  return r;
}

// Optimal rotation angle about y:  cos 2W = (h^2+2k^2) p / R,  sin 2W = -h k q / R.
inline double optimal_angle(const ModelParams& params, double p, double q) {
  if (p < kZeroProbability) return 0.0;
  const double h = params.h();
  const double k = params.k();
  const double cos2 = (h * h + 2.0 * k * k) * p;
  const double sin2 = -h * k * q;
  return 0.5 * std::atan2(sin2, cos2);
}

inline FeedbackPolicy optimal_policy(const ModelParams& params, const MeasurementModel& model) {
  FeedbackPolicy policy;
  for (const auto& o : model.outcomes())
    policy.unitaries.emplace_back(optimal_angle(params, o.weights.p, o.weights.q), Vec3{0.0, 1.0, 0.0});
  return policy;
}

struct PassiveEnergy {
  double difference = 0.0;  // Tr[omega H] - E_A
  double local_form = 0.0;  // <g| W^dagger (H_B + V) W |g>
  double total_form = 0.0;  // <g| W^dagger H W |g>
};

// Energy change from a unitary on B that ignores the measurement outcome.
inline PassiveEnergy passive_unitary_energy(const ModelParams& params, const MeasurementModel& model,
                                            const LocalUnitary& W) {
  const auto parts = build_hamiltonian(params);
  const auto g = ground_state(params);
  const auto w = W.on_full_space();

  Operator4 averaged;
  double e_a = 0.0;
  for (std::size_t mu = 0; mu < model.size(); ++mu) {
    const auto measured = apply_kraus(model, mu, g);
    e_a += expectation(measured, parts.H);
    averaged += outer(measured, measured);
  }
  const auto omega = DensityMatrix::from_matrix(w * averaged * w.adjoint());
  const auto rotated = w * g.psi;

  PassiveEnergy r;
  r.difference = expectation(omega, parts.H) - e_a;
  r.local_form = expectation(rotated, local_energy_B(parts));
  r.total_form = expectation(rotated, parts.H);
  return r;
}

struct EvolutionSample {
  double t = 0.0;
  double HB_bruteforce = 0.0;
  double HB_closed = 0.0;
  double V_expect = 0.0;
};

// Free evolution of the average post-measurement state (no feedback).
class Evolution {
public:
  Evolution(const ModelParams& params, const MeasurementModel& model)
      : params_(params), parts_(build_hamiltonian(params)), spectrum_(hermitian_eig(parts_.H)) {
    const auto g = ground_state(params);
    for (std::size_t mu = 0; mu < model.size(); ++mu) {
      const auto measured = apply_kraus(model, mu, g);
      averaged_ += outer(measured, measured);
    }
    sum_l2_ = model.sum_l_squared();
  }

  EvolutionSample at(double t) const {
    const auto u = matrix_exp_i(spectrum_, t);
    const auto evolved = DensityMatrix::from_matrix(u * averaged_ * u.adjoint());
    const double h = params_.h();
    EvolutionSample s;
    s.t = t;
    s.HB_bruteforce = expectation(evolved, parts_.H_B);
    s.V_expect = expectation(evolved, parts_.V);
    s.HB_closed = h * h * sum_l2_ / params_.eps() * (1.0 - std::cos(4.0 * params_.k() * t));
    return s;
  }

private:
  ModelParams params_;
  HamiltonianParts parts_;
  EigenSystem<4> spectrum_;
  Operator4 averaged_;
  double sum_l2_ = 0.0;
};

inline EvolutionSample evolve_HB(const ModelParams& params, const MeasurementModel& model, double t) {
  return Evolution(params, model).at(t);
}

}  // namespace qet
