#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "qet/measurement.hpp"
#include "qet/model.hpp"
#include "qet/verify.hpp"

using namespace qet;

namespace {

Constraint violation_kind(std::initializer_list<KrausCoefficients> c) {
  try {
    validate(c);
  } catch (const ConstraintViolation& e) {
    return e.which();
  }
  ADD_FAILURE() << "expected ConstraintViolation";
  return Constraint::weights;
}

}  // namespace

TEST(Validate, ProjectiveWeights) {
  const auto m = projective_measurement();
  ASSERT_EQ(m.size(), 2u);
  EXPECT_NEAR(m[0].coeffs.m, 0.5, 1e-15);
  EXPECT_NEAR(m[0].coeffs.l, 0.5, 1e-15);
  EXPECT_NEAR(m[1].coeffs.l, -0.5, 1e-15);
  EXPECT_NEAR(m[0].weights.q, 0.5, 1e-15);
  EXPECT_NEAR(m[1].weights.q, -0.5, 1e-15);
}

TEST(Validate, IdentityIsTrivial) {
  const auto m = identity_measurement();
  EXPECT_EQ(m.size(), 1u);
  EXPECT_EQ(m.sum_l_squared(), 0.0);
}

TEST(Validate, ConstraintKinds) {
  const double a = std::sqrt(0.45) / std::sqrt(2.0);
  EXPECT_EQ(violation_kind({{a, a, 0.0, 0.0}, {a, a, std::numbers::pi, 0.0}}), Constraint::normalization);
  EXPECT_EQ(violation_kind({{0.5, 0.5, 0.0, 0.0}, {0.5, 0.5, 0.0, 0.0}}), Constraint::balance);
  // alpha = pi/2 makes the cross term vanish, so this is a valid two-outcome model.
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NO_THROW(validate({{r * 0.8, r * 0.6, std::numbers::pi / 2, 0.0}, {r * 0.8, r * 0.6, std::numbers::pi / 2, 0.0}}));
}

TEST(Validate, MessageNamesConstraint) {
  try {
    validate({{0.9, 0.0, 0.0, 0.0}});
    FAIL();
  } catch (const ConstraintViolation& e) {
    EXPECT_NE(std::string(e.what()).find("ConstraintViolation(normalization)"), std::string::npos);
  }
}

TEST(Validate, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(validate(std::span<const KrausCoefficients>{}), ConstraintViolation);
  EXPECT_THROW(validate({{NAN, 0.0, 0.0, 0.0}}), ConstraintViolation);
}

TEST(Weights, RoundTripAndInfeasible) {
  const auto m = weights_to_coeffs({{0.4, 0.3}, {0.35, -0.25}, {0.25, -0.05}});
  const auto w = m.weights();
  EXPECT_NEAR(w[0].p, 0.4, 1e-15);
  EXPECT_NEAR(w[1].q, -0.25, 1e-15);
  EXPECT_THROW(weights_to_coeffs({{0.5, 0.6}, {0.5, -0.6}}), ConstraintViolation);
  EXPECT_THROW(weights_to_coeffs({{0.5, 0.1}, {0.4, -0.1}}), ConstraintViolation);
}

TEST(Kraus, OperatorsCommuteWithCoupling) {
  const auto xx = tensor(pauli(Axis::x), pauli(Axis::x));
  const auto m = random_kraus_measurement(3, 4);
  for (std::size_t mu = 0; mu < m.size(); ++mu)
    EXPECT_LT(commutator(kraus_on_full_space(m, mu), xx).max_abs(), 1e-14);
  EXPECT_THROW(kraus_on_full_space(m, 4), IndexOutOfRange);
}

TEST(Kraus, PovmElementsSumToIdentity) {
  const auto m = random_kraus_measurement(5, 5);
  Operator4 total;
  for (std::size_t mu = 0; mu < m.size(); ++mu) total += povm_on_full_space(m, mu);
  EXPECT_LT((total - Operator4::identity()).max_abs(), 1e-12);
}

TEST(InputEnergy, ProjectiveAtUnitCouplings) {
  const ModelParams p(1.0, 1.0);
  const auto m = projective_measurement();
  EXPECT_NEAR(input_energy_closed(m, p), 1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(input_energy_bruteforce(m, p), 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(InputEnergy, IdentityCostsNothing) {
  EXPECT_EQ(input_energy_closed(identity_measurement(), {2.0, 0.5}), 0.0);
  EXPECT_NEAR(input_energy_bruteforce(identity_measurement(), {2.0, 0.5}), 0.0, 1e-14);
}

TEST(InputEnergy, ClosedMatchesBruteForceOnEnsemble) {
  for (int i = 0; i < 500; ++i) {
    const auto& [h, k] = standard_pairs()[i % 9];
    const ModelParams p(h, k);
    const auto m = ensemble_member(42, i);
    EXPECT_NEAR(input_energy_closed(m, p), input_energy_bruteforce(m, p), 1e-10);
  }
}

TEST(Measure, NoLocalDisturbanceOfB) {
  for (int i = 0; i < 200; ++i) {
    const auto& [h, k] = standard_pairs()[i % 9];
    const ModelParams p(h, k);
    const auto parts = build_hamiltonian(p);
    const auto g = ground_state(p);
    const auto m = ensemble_member(8, i);
    double hb = 0.0, v = 0.0;
    for (std::size_t mu = 0; mu < m.size(); ++mu) {
      const auto s = apply_kraus(m, mu, g);
      hb += expectation(s, parts.H_B);
      v += expectation(s, parts.V);
    }
    EXPECT_NEAR(hb, 0.0, 1e-10);
    EXPECT_NEAR(v, 0.0, 1e-10);
  }
}

TEST(Measure, ProbabilitiesEqualWeights) {
  const ModelParams p(0.8, 1.7);
  const auto m = random_kraus_measurement(17, 3);
  const auto out = measure(m, ground_state(p));
  for (std::size_t mu = 0; mu < m.size(); ++mu) EXPECT_NEAR(out[mu].probability, m[mu].weights.p, 1e-14);
}

TEST(Measure, ZeroProbabilityOutcome) {
  const auto m = validate({{1.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}});
  const auto g = ground_state({1.0, 1.0});
  const auto out = measure(m, g);
  EXPECT_TRUE(out[0].state.has_value());
  EXPECT_FALSE(out[1].state.has_value());
  EXPECT_EQ(out[1].probability, 0.0);
  EXPECT_THROW(post_measurement_state(m, 1, g), DegenerateOutcome);
}

TEST(Random, DeterministicPerSeedAndFeasible) {
  const auto a = random_measurement(99, 4).weights();
  const auto b = random_measurement(99, 4).weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].p, b[i].p);
    EXPECT_EQ(a[i].q, b[i].q);
  }
  for (int s = 0; s < 300; ++s) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(s));
    const auto w = random_weights(rng, 2 + static_cast<std::size_t>(s % 5));
    EXPECT_NO_THROW(check_weights(w));
  }
  EXPECT_THROW(random_measurement(1, 1), DomainError);
}

TEST(Builtins, WeakMeasurementLimits) {
  EXPECT_NEAR(weak_measurement(1.0)[0].coeffs.l, 0.5, 1e-15);
  EXPECT_NEAR(weak_measurement(0.0)[0].coeffs.l, 0.0, 1e-15);
  EXPECT_THROW(weak_measurement(1.5), DomainError);
}
