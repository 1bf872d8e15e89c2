#include <gtest/gtest.h>

#include <cmath>

#include "qet/model.hpp"

using namespace qet;

TEST(ModelParams, DerivedConstants) {
  const ModelParams p(3.0, 4.0);
  EXPECT_DOUBLE_EQ(p.eps(), 5.0);
  EXPECT_DOUBLE_EQ(p.cos_sigma(), 0.6);
  EXPECT_DOUBLE_EQ(p.sin_sigma(), 0.8);
}

TEST(ModelParams, RejectsNonPositive) {
  EXPECT_THROW(ModelParams(0.0, 1.0), InvalidParams);
  EXPECT_THROW(ModelParams(1.0, -1.0), InvalidParams);
  EXPECT_THROW(ModelParams(NAN, 1.0), InvalidParams);
  EXPECT_THROW(ModelParams(1.0, INFINITY), InvalidParams);
}

TEST(Hamiltonian, SpectrumAtUnitCouplings) {
  const auto parts = build_hamiltonian({1.0, 1.0});
  const auto ev = eigenvalues(parts.H);
  const double r2 = std::sqrt(2.0);
  EXPECT_NEAR(ev[0], 0.0, 1e-12);
  EXPECT_NEAR(ev[1], 2.0 * r2 - 2.0, 1e-12);
  EXPECT_NEAR(ev[2], 2.0 * r2 + 2.0, 1e-12);
  EXPECT_NEAR(ev[3], 4.0 * r2, 1e-12);
}

TEST(Hamiltonian, LocalEnergyOfBHasNegativeEigenvalue) {
  const auto parts = build_hamiltonian({1.0, 1.0});
  EXPECT_NEAR(eigenvalues(parts.H_B)[0], 1.0 / std::sqrt(2.0) - 1.0, 1e-13);
  EXPECT_LT(eigenvalues(local_energy_B(parts))[0], 0.0);
}

TEST(Hamiltonian, PartsAreHermitian) {
  const auto parts = build_hamiltonian({0.3, 2.0});
  for (const auto* op : {&parts.H_A, &parts.H_B, &parts.V, &parts.H}) EXPECT_EQ(hermiticity_residual(*op), 0.0);
}

TEST(GroundState, ClosedFormAtUnitCouplings) {
  const auto g = ground_state({1.0, 1.0});
  EXPECT_NEAR(g.psi[0].real(), 0.38268343236508984, 1e-15);
  EXPECT_NEAR(g.psi[3].real(), -0.9238795325112867, 1e-15);
  EXPECT_EQ(g.psi[1], cplx(0.0));
  EXPECT_EQ(g.psi[2], cplx(0.0));
  EXPECT_NEAR(g.psi.norm(), 1.0, 1e-15);
}

TEST(GroundState, AnnihilatedAndZeroedAcrossLogGrid) {
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const ModelParams p(0.1 * std::pow(100.0, i / 19.0), 0.1 * std::pow(100.0, j / 19.0));
      const auto parts = build_hamiltonian(p);
      const auto g = ground_state(p);
      const auto e = energy_observables(parts, g.psi);
      EXPECT_LE((parts.H * g.psi).norm(), 1e-9);
      EXPECT_NEAR(e.H_A, 0.0, 1e-9);
      EXPECT_NEAR(e.H_B, 0.0, 1e-9);
      EXPECT_NEAR(e.V, 0.0, 1e-9);
      EXPECT_NEAR(eigenvalues(parts.H)[0], 0.0, 1e-10);
    }
}

TEST(GroundState, MatchesNumericalGroundVectorUpToPhase) {
  const ModelParams p(0.7, 2.3);
  const auto es = hermitian_eig(build_hamiltonian(p).H);
  EXPECT_NEAR(std::abs(inner(es.vector(0), ground_state(p).psi)), 1.0, 1e-12);
}

TEST(GroundState, DependsOnlyOnRatio) {
  const auto a = ground_state({0.5, 2.0}).psi;
  const auto b = ground_state({5.0, 20.0}).psi;
  EXPECT_LT((a - b).norm(), 1e-15);
}

TEST(GroundState, WeakCouplingLimitApproachesProductState) {
  const auto g = ground_state({1.0, 1e-6});
  EXPECT_NEAR(std::abs(g.psi[3]), 1.0, 1e-12);
}
