#pragma once

// Entropy of entanglement, its consumption by the measurement of A, and the
// mutual information between the measurement pointer and B.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "qet/errors.hpp"
#include "qet/measurement.hpp"
#include "qet/model.hpp"
#include "qet/qmath.hpp"

namespace qet {

// -sum lambda ln lambda; eigenvalues with round-off below -1e-12 are rejected,
// the rest clamped to [0, 1].
inline double entropy_from_eigenvalues(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) {
    if (v < -1e-12) throw DomainError("entropy: negative eigenvalue " + std::to_string(v));
    s -= xlogx(std::clamp(v, 0.0, 1.0));
  }
  return s;
}

template <std::size_t N>
double von_neumann_entropy(const Mat<N>& rho) {
  const auto ev = eigenvalues(rho);
  return entropy_from_eigenvalues(ev);
}

inline Operator2 reduced_state_B(const StateVector4& psi) { return partial_trace(outer(psi, psi), Subsystem::B); }

// Von Neumann entropy (nats) of the reduced state of B for a pure two-qubit state.
inline double entropy_of_entanglement(const StateVector4& psi) {
  const double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-10) throw NotNormalized(n);
  return von_neumann_entropy(reduced_state_B(psi));
}

struct EntanglementReport {
  double S_ground = 0.0;
  std::vector<double> S_post;          // per outcome; 0 for zero-probability outcomes
  std::vector<double> probabilities;
  double delta_S = 0.0;
  double mutual_info = 0.0;
};

// Pieces of the pointer/B state Phi = sum_mu p |mu><mu| (x) rho_B(mu).
struct PointerState {
  std::vector<double> probabilities;
  std::vector<Operator2> rho_B;  // rho_B(mu); zero matrix for zero-probability outcomes
};

inline PointerState pointer_state(const ModelParams& params, const MeasurementModel& model) {
  const auto g = ground_state(params);
  const auto outcomes = measure(model, g);
  PointerState phi;
  for (const auto& o : outcomes) {
    phi.probabilities.push_back(o.probability);
    phi.rho_B.push_back(o.state ? reduced_state_B(*o.state) : Operator2{});
  }
  return phi;
}

// I = S(Phi_pointer) + S(Phi_B) - S(Phi_pointerB), using the block structure
// S(Phi_pointerB) = H(p) + sum_mu p S(rho_B(mu)).
inline double mutual_information(const PointerState& phi) {
  double shannon = 0.0;
  double conditional = 0.0;
  Operator2 marginal_B;
  for (std::size_t mu = 0; mu < phi.probabilities.size(); ++mu) {
    const double p = phi.probabilities[mu];
    if (p <= 0.0) continue;
    shannon -= xlogx(p);
    conditional += p * von_neumann_entropy(phi.rho_B[mu]);
    marginal_B += p * phi.rho_B[mu];
  }
  const double joint = shannon + conditional;
  return shannon + von_neumann_entropy(marginal_B) - joint;
}

inline double mutual_information(const ModelParams& params, const MeasurementModel& model) {
  return mutual_information(pointer_state(params, model));
}

// Delta S_AB = S_AB(g) - sum_mu p S_AB(mu), by brute force on the 4-dim states.
inline EntanglementReport consumption(const ModelParams& params, const MeasurementModel& model) {
  const auto g = ground_state(params);
  EntanglementReport r;
  r.S_ground = entropy_of_entanglement(g.psi);
  double average = 0.0;
  PointerState phi;
  for (const auto& o : measure(model, g)) {
    const double s = o.state ? entropy_of_entanglement(*o.state) : 0.0;
    r.S_post.push_back(s);
    r.probabilities.push_back(o.probability);
    average += o.probability * s;
    phi.probabilities.push_back(o.probability);
    phi.rho_B.push_back(o.state ? reduced_state_B(*o.state) : Operator2{});
  }
  r.delta_S = r.S_ground - average;
  r.mutual_info = mutual_information(phi);
  return r;
}

}  // namespace qet
