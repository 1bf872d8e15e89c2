#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qet/qmath.hpp"
#include "qet/verify.hpp"

using namespace qet;

namespace {

double max_diff(const Operator4& a, const Operator4& b) { return (a - b).max_abs(); }

}  // namespace

TEST(Pauli, AlgebraAndTensorOrdering) {
  const auto sx = pauli(Axis::x), sy = pauli(Axis::y), sz = pauli(Axis::z);
  using namespace std::complex_literals;
  EXPECT_LT((sx * sy - 1i * sz).max_abs(), 1e-15);
  EXPECT_LT((sx * sx - Operator2::identity()).max_abs(), 1e-15);
  // A is the slow index: sigma_z (x) 1 is diag(1, 1, -1, -1).
  const auto zA = tensor(sz, Operator2::identity());
  EXPECT_EQ(zA(0, 0), cplx(1.0));
  EXPECT_EQ(zA(1, 1), cplx(1.0));
  EXPECT_EQ(zA(2, 2), cplx(-1.0));
  EXPECT_EQ(zA(3, 3), cplx(-1.0));
}

TEST(HermitianEig, KnownSpectrumOfTransverseIsing) {
  const auto sx = pauli(Axis::x), sz = pauli(Axis::z), id = Operator2::identity();
  const Operator4 H = tensor(sz, id) + tensor(id, sz) + 2.0 * tensor(sx, sx);
  const auto es = hermitian_eig(H);
  const double r = std::sqrt(2.0);
  EXPECT_NEAR(es.values[0], -2.0 * r, 1e-13);
  EXPECT_NEAR(es.values[1], -2.0, 1e-13);
  EXPECT_NEAR(es.values[2], 2.0, 1e-13);
  EXPECT_NEAR(es.values[3], 2.0 * r, 1e-13);
  EXPECT_LT(max_diff(es.reconstruct(), H), 1e-13);
  EXPECT_LT(unitarity_residual(es.vectors), 1e-13);
}

TEST(HermitianEig, RandomMatricesReconstruct) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto m = random_hermitian<4>(rng, 10.0);
    const auto es = hermitian_eig(m);
    EXPECT_LT(max_diff(es.reconstruct(), m), 1e-12);
    EXPECT_LT(unitarity_residual(es.vectors), 1e-13);
    for (std::size_t j = 1; j < 4; ++j) EXPECT_LE(es.values[j - 1], es.values[j]);
  }
}

TEST(HermitianEig, DegenerateAndDiagonalInput) {
  const auto es = hermitian_eig(Operator4::diag({3.0, 1.0, 1.0, -2.0}));
  EXPECT_EQ(es.values[0], -2.0);
  EXPECT_EQ(es.values[1], 1.0);
  EXPECT_EQ(es.values[2], 1.0);
  EXPECT_EQ(es.values[3], 3.0);
  const auto zero = hermitian_eig(Operator4::zero());
  for (double v : zero.values) EXPECT_EQ(v, 0.0);
}

TEST(HermitianEig, RejectsNonHermitian) {
  Operator4 m;
  m(0, 1) = 1.0;
  EXPECT_THROW(hermitian_eig(m), NonHermitianInput);
  Operator2 tiny;
  tiny(0, 1) = 1e-12;  // below the hermiticity tolerance
  EXPECT_NO_THROW(hermitian_eig(tiny));
}

TEST(MatrixExp, UnitaryAndGroupProperty) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto m = random_hermitian<4>(rng, 3.0);
    const auto es = hermitian_eig(m);
    const auto u = matrix_exp_i(es, 0.7);
    EXPECT_LT(unitarity_residual(u), 1e-12);
    EXPECT_LT(max_diff(matrix_exp_i(es, 0.3) * matrix_exp_i(es, 0.4), u), 1e-12);
    EXPECT_LT(max_diff(matrix_exp_i(es, 0.0), Operator4::identity()), 1e-13);
  }
}

TEST(MatrixExp, PauliRotationClosedForm) {
  // exp(-i t sigma_z) = diag(e^{-it}, e^{it})
  const auto u = matrix_exp_i(pauli(Axis::z), 0.5);
  EXPECT_NEAR(std::abs(u(0, 0) - std::polar(1.0, -0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(1, 1) - std::polar(1.0, 0.5)), 0.0, 1e-15);
}

TEST(DensityMatrix, ValidatesInput) {
  EXPECT_THROW(DensityMatrix::from_pure(2.0 * StateVector4::basis(0)), NotNormalized);
  EXPECT_THROW(DensityMatrix::from_matrix(2.0 * Operator4::identity()), DomainError);
  EXPECT_THROW(DensityMatrix::from_matrix(Operator4::diag({1.5, -0.5, 0.0, 0.0})), DomainError);
  Operator4 skew = 0.25 * Operator4::identity();
  skew(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix::from_matrix(skew), NonHermitianInput);
  EXPECT_NO_THROW(DensityMatrix::maximally_mixed());
}

TEST(PartialTrace, ProductStateFactorizes) {
  StateVector4 psi;  // |+> (x) (|+> + |->)/sqrt2
  psi[0] = psi[1] = 1.0 / std::sqrt(2.0);
  const auto rho = DensityMatrix::from_pure(psi);
  const auto rA = partial_trace(rho, Subsystem::A);
  const auto rB = partial_trace(rho, Subsystem::B);
  EXPECT_NEAR(rA(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(rA(1, 1)), 0.0, 1e-15);
  EXPECT_NEAR(rB(0, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(rB.trace().real(), 1.0, 1e-15);
}

TEST(PartialTrace, BellStateIsMaximallyMixed) {
  StateVector4 bell;
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  for (auto keep : {Subsystem::A, Subsystem::B}) {
    const auto r = partial_trace(DensityMatrix::from_pure(bell), keep);
    EXPECT_LT((r - 0.5 * Operator2::identity()).max_abs(), 1e-15);
  }
}

TEST(Expectation, RealForHermitianObservables) {
  StateVector4 psi;
  psi[0] = cplx(0.5, 0.5);
  psi[3] = cplx(0.5, -0.5);
  const auto zz = tensor(pauli(Axis::z), pauli(Axis::z));
  EXPECT_NEAR(expectation(psi, zz), 1.0, 1e-15);
  EXPECT_NEAR(expectation(DensityMatrix::from_pure(psi), zz), 1.0, 1e-15);
  Operator4 bad;
  bad(0, 3) = 1.0;
  EXPECT_THROW(expectation(psi, bad), NonHermitianInput);
}

TEST(Commutator, SigmaXXCommutesWithLocalX) {
  const auto xx = tensor(pauli(Axis::x), pauli(Axis::x));
  EXPECT_EQ(commutator(xx, tensor(pauli(Axis::x), Operator2::identity())).max_abs(), 0.0);
  EXPECT_GT(commutator(xx, tensor(pauli(Axis::z), Operator2::identity())).max_abs(), 1.0);
}

TEST(Xlogx, ZeroConvention) {
  EXPECT_EQ(xlogx(0.0), 0.0);
  EXPECT_EQ(xlogx(1.0), 0.0);
  EXPECT_NEAR(xlogx(0.5), -0.5 * std::numbers::ln2, 1e-16);
}

TEST(Examples, BasisAndSmallSpectra) {
  const auto plus = Vec<2>::basis(0);
  EXPECT_EQ((pauli(Axis::z) * plus)[0], cplx(1.0));
  EXPECT_EQ(tensor(Operator2::identity(), Operator2::identity()).max_abs(), 1.0);
  EXPECT_LT((tensor(Operator2::identity(), Operator2::identity()) - Operator4::identity()).max_abs(), 1e-16);
  const auto flipped = tensor(pauli(Axis::x), pauli(Axis::x)) * StateVector4::basis(0);
  EXPECT_EQ(flipped[3], cplx(1.0));
  const auto v = eigenvalues(Operator4::diag({3.0, 1.0, 2.0, 0.0}));
  EXPECT_EQ(v, (std::array<double, 4>{0.0, 1.0, 2.0, 3.0}));
  const auto px = eigenvalues(pauli(Axis::x));
  EXPECT_NEAR(px[0], -1.0, 1e-15);
  EXPECT_NEAR(px[1], 1.0, 1e-15);
  EXPECT_LT((matrix_exp_i(Operator4::zero(), 3.0) - Operator4::identity()).max_abs(), 1e-16);
}

TEST(Examples, MaximallyMixedReducesToHalfIdentity) {
  const auto r = partial_trace(DensityMatrix::maximally_mixed(), Subsystem::A);
  EXPECT_LT((r - 0.5 * Operator2::identity()).max_abs(), 1e-16);
}
