#pragma once

// Two-qubit transverse-field Ising model with ground-state-zeroed energy
// pieces: H = H_A + H_B + V.

#include <cmath>
#include <string>

#include "qet/errors.hpp"
#include "qet/qmath.hpp"

namespace qet {

// Couplings (h, k) > 0 and the derived constants eps = sqrt(h^2 + k^2),
// cos_sigma = h / eps, sin_sigma = k / eps.
class ModelParams {
public:
  ModelParams(double h, double k) : h_(h), k_(k) {
    if (!(h > 0.0) || !(k > 0.0) || !std::isfinite(h) || !std::isfinite(k))
      throw InvalidParams("InvalidParams: h and k must be positive and finite (h=" +
                          std::to_string(h) + ", k=" + std::to_string(k) + ")");
    eps_ = std::hypot(h, k);
    cos_ = h / eps_;
    sin_ = k / eps_;
  }

  double h() const { return h_; }
  double k() const { return k_; }
  double eps() const { return eps_; }
  double cos_sigma() const { return cos_; }
  double sin_sigma() const { return sin_; }

private:
  double h_;
  double k_;
  double eps_;
  double cos_;
  double sin_;
};

struct HamiltonianParts {
  Operator4 H_A;
  Operator4 H_B;
  Operator4 V;
  Operator4 H;
};

inline HamiltonianParts build_hamiltonian(const ModelParams& params) {
  const double h = params.h();
  const double k = params.k();
  const double eps = params.eps();
  const auto id2 = Operator2::identity();
  const auto id4 = Operator4::identity();
  const auto sx = pauli(Axis::x);
  const auto sz = pauli(Axis::z);

  HamiltonianParts parts;
  parts.H_A = h * tensor(sz, id2) + (h * h / eps) * id4;
  parts.H_B = h * tensor(id2, sz) + (h * h / eps) * id4;
  parts.V = 2.0 * k * tensor(sx, sx) + (2.0 * k * k / eps) * id4;
  parts.H = parts.H_A + parts.H_B + parts.V;
  return parts;
}

struct GroundState {
  StateVector4 psi;
};

// Closed form:  sqrt(1 - h/eps)/sqrt2 |++>  -  sqrt(1 + h/eps)/sqrt2 |-->.
inline GroundState ground_state(const ModelParams& params) {
  const double c = params.cos_sigma();
  GroundState g;
  g.psi[0] = std::sqrt((1.0 - c) / 2.0);
  g.psi[3] = -std::sqrt((1.0 + c) / 2.0);
  return g;
}

struct EnergyValues {
  double H_A = 0.0;
  double H_B = 0.0;
  double V = 0.0;
  double H = 0.0;
};

// The four energy observables evaluated on a (not necessarily normalized) state.
inline EnergyValues energy_observables(const HamiltonianParts& parts, const StateVector4& psi) {
  return {expectation(psi, parts.H_A), expectation(psi, parts.H_B), expectation(psi, parts.V),
          expectation(psi, parts.H)};
}

inline EnergyValues energy_observables(const HamiltonianParts& parts, const DensityMatrix& rho) {
  return {expectation(rho, parts.H_A), expectation(rho, parts.H_B), expectation(rho, parts.V),
          expectation(rho, parts.H)};
}

// Local energy around B.
inline Operator4 local_energy_B(const HamiltonianParts& parts) { return parts.H_B + parts.V; }

}  // namespace qet
