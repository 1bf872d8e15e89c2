#pragma once

// Cross-module invariant suite. Each check reports the largest violation it
// saw; a check passes when that residual is within its tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qet/analytic.hpp"
#include "qet/entanglement.hpp"
#include "qet/measurement.hpp"
#include "qet/model.hpp"
#include "qet/optimizer.hpp"
#include "qet/protocol.hpp"
#include "qet/qmath.hpp"

namespace qet {

enum class CheckStatus { pass, fail, skipped };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::skipped: return "SKIP";
  }
  return "?";
}

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::pass;
  std::string error;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int ensemble = 1000;
  bool corrupt_builtin = false;  // test hook: feeds a broken builtin measurement
};

// The nine (h, k) pairs used by every grid-cycled check.
inline const std::array<std::pair<double, double>, 9>& standard_pairs() {
  static const std::array<std::pair<double, double>, 9> pairs = [] {
    std::array<std::pair<double, double>, 9> p{};
    const double v[3] = {0.25, 1.0, 4.0};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) p[3 * i + j] = {v[i], v[j]};
    return p;
  }();
  return pairs;
}

// Ensemble member i: 2..5 outcomes, alternating canonical and random-phase realizations.
inline MeasurementModel ensemble_member(std::uint64_t seed, int i) {
  const std::uint64_t s = seed * 1000003ULL + static_cast<std::uint64_t>(i);
  const std::size_t n = 2 + static_cast<std::size_t>(i % 4);
  return i % 2 == 0 ? random_measurement(s, n) : random_kraus_measurement(s, n);
}

// Every outcome has |q| = p: a = p + q and b = p - q have disjoint supports.
inline MeasurementModel random_projective_like(std::mt19937_64& rng, std::size_t n_outcomes) {
  std::vector<OutcomeWeights> w(n_outcomes);
  std::vector<double> mass(n_outcomes);
  double plus = 0.0, minus = 0.0;
  for (std::size_t i = 0; i < n_outcomes; ++i) {
    mass[i] = 0.05 + detail::uniform01(rng);
    (i % 2 == 0 ? plus : minus) += mass[i];
  }
  for (std::size_t i = 0; i < n_outcomes; ++i) {
    const double p = (i % 2 == 0 ? mass[i] / plus : mass[i] / minus) / 2.0;
    w[i] = {p, i % 2 == 0 ? p : -p};
  }
  return weights_to_coeffs(w);
}

inline LocalUnitary random_unitary(std::mt19937_64& rng) {
  Vec3 axis{};
  double len = 0.0;
  do {
    for (auto& a : axis) a = 2.0 * detail::uniform01(rng) - 1.0;
    len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  } while (len < 1e-3 || len > 1.0);
  return LocalUnitary::about(std::numbers::pi * detail::uniform01(rng), axis);
}

template <std::size_t N>
Mat<N> random_hermitian(std::mt19937_64& rng, double scale = 1.0) {
  Mat<N> m;
  for (std::size_t i = 0; i < N; ++i) {
    m(i, i) = scale * (2.0 * detail::uniform01(rng) - 1.0);
    for (std::size_t j = i + 1; j < N; ++j) {
      m(i, j) = scale * cplx(2.0 * detail::uniform01(rng) - 1.0, 2.0 * detail::uniform01(rng) - 1.0);
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

class VerificationSuite {
public:
  explicit VerificationSuite(VerifyOptions opts) : opts_(opts), rng_(opts.seed) {}

  std::vector<CheckResult> run_all() {
    qmath_checks();
    model_checks();
    measurement_checks();
    protocol_checks();
    analytic_checks();
    entanglement_checks();
    optimizer_checks();
    return results_;
  }

private:
  template <class F>
  void check(const std::string& name, double tol, F&& body, bool needs_ensemble = true) {
    CheckResult r{name, 0.0, tol, CheckStatus::pass, {}};
    if (needs_ensemble && opts_.ensemble <= 0) {
      r.status = CheckStatus::skipped;
      results_.push_back(r);
      return;
    }
    try {
      r.residual = body();
      if (!(r.residual <= tol)) r.status = CheckStatus::fail;
    } catch (const std::exception& e) {
      r.status = CheckStatus::fail;
      r.residual = NAN;
      r.error = e.what();
    }
    results_.push_back(r);
  }

  int n() const { return opts_.ensemble; }

  ModelParams pair_params(int i) const {
    const auto& [h, k] = standard_pairs()[static_cast<std::size_t>(i) % 9];
    return {h, k};
  }

  void qmath_checks() {
    check("qmath.eig_reconstruction", 1e-10, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto m = random_hermitian<4>(rng_, 5.0);
        const auto es = hermitian_eig(m);
        worst = std::max({worst, (es.reconstruct() - m).max_abs(), unitarity_residual(es.vectors)});
      }
      return worst;
    });
    check("qmath.partial_trace_unit_trace", 1e-12, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto a = random_hermitian<4>(rng_);
        const auto es = hermitian_eig(a);
        Operator4 rho;
        double total = 0.0;
        std::array<double, 4> w{};
        for (auto& x : w) total += (x = detail::uniform01(rng_));
        for (std::size_t j = 0; j < 4; ++j) rho += (w[j] / total) * outer(es.vector(j), es.vector(j));
        const auto state = DensityMatrix::from_matrix(rho);
        worst = std::max({worst, std::abs(partial_trace(state, Subsystem::A).trace() - 1.0),
                          std::abs(partial_trace(state, Subsystem::B).trace() - 1.0)});
      }
      return worst;
    });
    check("qmath.exp_group_property", 1e-9, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto m = random_hermitian<4>(rng_);
        const double t1 = 20.0 * detail::uniform01(rng_) - 10.0;
        const double t2 = 20.0 * detail::uniform01(rng_) - 10.0;
        const auto es = hermitian_eig(m);
        worst = std::max(worst, (matrix_exp_i(es, t1) * matrix_exp_i(es, t2) - matrix_exp_i(es, t1 + t2)).max_abs());
      }
      return worst;
    });
  }

  void model_checks() {
    check(
        "model.ground_state_grid", 1e-9,
        [&] {
          double worst = 0.0;
          for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j) {
              const ModelParams p(0.1 * std::pow(100.0, i / 19.0), 0.1 * std::pow(100.0, j / 19.0));
              const auto parts = build_hamiltonian(p);
              const auto g = ground_state(p);
              const auto e = energy_observables(parts, g.psi);
              const auto ev = eigenvalues(parts.H);
              const double eps = p.eps(), k = p.k();
              const std::array<double, 4> expected{0.0, 2 * eps - 2 * k, 2 * eps + 2 * k, 4 * eps};
              worst = std::max({worst, (parts.H * g.psi).norm(), std::abs(e.H_A), std::abs(e.H_B),
                                std::abs(e.V)});
              for (std::size_t m = 0; m < 4; ++m) worst = std::max(worst, std::abs(ev[m] - expected[m]));
            }
          return worst;
        },
        false);
    check(
        "model.scale_invariance", 1e-12,
        [&] {
          double worst = 0.0;
          for (const auto& [h, k] : standard_pairs())
            for (double c : {0.5, 2.0, 7.0})
              worst = std::max(worst, (ground_state({h, k}).psi - ground_state({c * h, c * k}).psi).norm());
          return worst;
        },
        false);
  }

  void measurement_checks() {
    check(
        "measurement.builtins_validate", 0.0,
        [&] {
          if (opts_.corrupt_builtin) {
            const double a = std::sqrt(0.45) / std::sqrt(2.0);
            validate({{a, a, 0.0, 0.0}, {a, a, std::numbers::pi, 0.0}});
          }
          identity_measurement();
          projective_measurement();
          weak_measurement(0.01);
          return 0.0;
        },
        false);
    check("measurement.no_local_disturbance", 1e-10, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const auto parts = build_hamiltonian(params);
        const auto g = ground_state(params);
        double hb = 0.0, v = 0.0;
        for (std::size_t mu = 0; mu < model.size(); ++mu) {
          const auto s = apply_kraus(model, mu, g);
          hb += expectation(s, parts.H_B);
          v += expectation(s, parts.V);
        }
        worst = std::max({worst, std::abs(hb), std::abs(v)});
      }
      return worst;
    });
    check("measurement.input_energy_oracle", 1e-10, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const auto parts = build_hamiltonian(params);
        const auto g = ground_state(params);
        double ha = 0.0;
        for (std::size_t mu = 0; mu < model.size(); ++mu) ha += expectation(apply_kraus(model, mu, g), parts.H_A);
        const double closed = input_energy_closed(model, params);
        worst = std::max({worst, std::abs(closed - input_energy_bruteforce(model, params)), std::abs(closed - ha)});
      }
      return worst;
    });
    check("measurement.probabilities", 1e-10, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const auto out = measure(model, ground_state(params));
        double total = 0.0;
        for (std::size_t mu = 0; mu < model.size(); ++mu) {
          total += out[mu].probability;
          worst = std::max(worst, std::abs(out[mu].probability - model[mu].weights.p));
        }
        worst = std::max(worst, std::abs(total - 1.0));
      }
      return worst;
    });
    check("measurement.weights_round_trip", 1e-12, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto model = ensemble_member(opts_.seed, i);
        const auto w = model.weights();
        const auto again = weights_to_coeffs(w).weights();
        for (std::size_t mu = 0; mu < w.size(); ++mu)
          worst = std::max({worst, std::abs(w[mu].p - again[mu].p), std::abs(w[mu].q - again[mu].q)});
      }
      return worst;
    });
  }

  void protocol_checks() {
    check("protocol.energy_bookkeeping", 1e-10, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        FeedbackPolicy policy;
        for (std::size_t mu = 0; mu < model.size(); ++mu) policy.unitaries.push_back(random_unitary(rng_));
        const auto r = run(params, model, policy);
        worst = std::max({worst, std::abs(r.total_final_energy - (r.E_A - r.E_B)), -r.total_final_energy,
                          std::abs(r.E_B - r.E_B_analytic), std::abs(r.E_A - r.E_A_closed)});
      }
      return worst;
    });
    check("protocol.optimal_policy_attains_max", 1e-10, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const auto r = run(params, model, optimal_policy(params, model));
        worst = std::max(worst, std::abs(r.E_B - r.max_EB_closed));
      }
      return worst;
    });
    check("protocol.negative_energy_density", 0.0, [&] {
      double failures = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const auto r = run(params, model, optimal_policy(params, model));
        if (r.max_EB_closed > 1e-12 && !(r.E_B > 0.0 && r.total_final_energy >= -1e-10)) failures += 1.0;
      }
      return failures;
    });
    check("protocol.delta_independence", 1e-12, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        auto coeffs = model.coefficients();
        for (auto& c : coeffs) c.delta += 2.0 * std::numbers::pi * detail::uniform01(rng_);
        const auto shifted = validate(coeffs);
        const auto policy = optimal_policy(params, model);
        const auto a = run(params, model, policy);
        const auto b = run(params, shifted, policy);
        worst = std::max({worst, std::abs(a.E_A - b.E_A), std::abs(a.E_B - b.E_B), std::abs(a.delta_S - b.delta_S),
                          std::abs(a.mutual_info - b.mutual_info)});
      }
      return worst;
    });
    check("protocol.feedback_essential", 1e-10, [&] {
      double worst = 0.0;
      const int count = std::min(n(), 200);
      for (int i = 0; i < count; ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const auto best = optimal_policy(params, model);
        const double optimum = run(params, model, best).E_B;
        // Shuffled assignment of the optimal unitaries.
        auto shuffled = best;
        std::rotate(shuffled.unitaries.begin(), shuffled.unitaries.begin() + 1, shuffled.unitaries.end());
        worst = std::max(worst, run(params, model, shuffled).E_B - optimum);
        // Outcome-independent unitaries never extract energy.
        for (const auto& u : best.unitaries) {
          FeedbackPolicy constant{std::vector<LocalUnitary>(model.size(), u)};
          worst = std::max(worst, run(params, model, constant).E_B);
        }
      }
      return worst;
    });
    check("protocol.no_go_passive_unitary", 1e-10, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const auto r = passive_unitary_energy(params, model, random_unitary(rng_));
        worst = std::max({worst, -r.difference, std::abs(r.difference - r.local_form),
                          std::abs(r.difference - r.total_form)});
      }
      return worst;
    });
    check("protocol.time_evolution", 1e-9, [&] {
      double worst = 0.0;
      const int count = std::min(n(), 27);
      for (int i = 0; i < count; ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const Evolution evo(params, model);
        const double period = std::numbers::pi / (2.0 * params.k());
        for (int j = 0; j < 64; ++j) {
          const auto s = evo.at(period * j / 63.0);
          worst = std::max({worst, std::abs(s.HB_bruteforce - s.HB_closed), std::abs(s.V_expect)});
        }
        const auto peak = evo.at(period / 2.0);
        worst = std::max(worst, std::abs(peak.HB_bruteforce - input_energy_closed(model, params)));
      }
      return worst;
    });
  }

  void analytic_checks() {
    check("analytic.chain_consistency", 1e-10, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const double p = 0.01 + detail::uniform01(rng_);
        const double q = p * (2.0 * detail::uniform01(rng_) - 1.0);
        const auto axis = random_unitary(rng_).axis();
        const double best = max_over_omega(params, p, q, axis);
        for (int j = 0; j < 256; ++j)
          worst = std::max(worst, Q_of(params, p, q, std::numbers::pi * j / 256.0, axis) - best);
        const double term = (params.h() * params.h() + 2 * params.k() * params.k()) /
                            params.eps() * p *
                            (std::sqrt(1.0 + std::pow(params.h() * params.k() /
                                                          (params.h() * params.h() + 2 * params.k() * params.k()),
                                                      2) *
                                                 q * q / (p * p)) -
                             1.0);
        const double via_T = T_profile(params, p, q, 0.0) / params.eps();
        const double via_minX = std::sqrt(std::pow(min_X_over_psi(params, p, q, 0.0), 2) +
                                          std::pow(params.h() * params.k() * q, 2)) -
                                min_X_over_psi(params, p, q, 0.0);
        worst = std::max({worst, std::abs(via_T - term), std::abs(via_minX / params.eps() - term)});
        if (!t_sign_check(params, p, q).ok) worst = std::max(worst, 1.0);
      }
      return worst;
    });
    check("analytic.inequality_entanglement_lower_bound", 1e-10, [&] {
      double worst = -INFINITY;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const double ds = consumption(params, model).delta_S;
        worst = std::max(worst, bounds(params).c32 * max_EB_closed(params, model) / params.eps() - ds);
      }
      return worst;
    });
    check("analytic.inequality_energy_lower_bound", 1e-10, [&] {
      double worst = -INFINITY;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const double ds = consumption(params, model).delta_S;
        worst = std::max(worst, bounds(params).c770 * ds - max_EB_closed(params, model));
      }
      return worst;
    });
    check("analytic.energy_bound_equality_projective", 1e-9, [&] {
      double worst = 0.0;
      const int count = std::min(n(), 200);
      for (int i = 0; i < count; ++i) {
        const auto params = pair_params(i);
        const auto model = random_projective_like(rng_, 2 + static_cast<std::size_t>(i % 4));
        const double rhs = bounds(params).c770 * consumption(params, model).delta_S;
        const double lhs = max_EB_closed(params, model);
        worst = std::max(worst, std::abs(lhs - rhs) / lhs);
      }
      return worst;
    });
    check(
        "analytic.weak_measurement_order", 0.1,
        [&] {
          // Fitted exponent of the relative error of Delta S / (maxE_B / eps) against c32.
          double worst = 0.0;
          for (const auto& [h, k] : standard_pairs()) {
            const ModelParams params(h, k);
            std::array<double, 3> err{};
            const std::array<double, 3> us{1e-1, 1e-2, 1e-3};
            for (std::size_t j = 0; j < 3; ++j) {
              const auto w = std::vector<OutcomeWeights>{{0.5, 0.5 * us[j]}, {0.5, -0.5 * us[j]}};
              const double ratio = profile_sum(params, w, Profile::entanglement) /
                                   (max_EB_closed(params, w) / params.eps());
              err[j] = std::abs(ratio / bounds(params).c32 - 1.0);
            }
            for (std::size_t j = 0; j + 1 < 3; ++j)
              worst = std::max(worst, std::abs(std::log10(err[j] / err[j + 1]) - 2.0));
          }
          return worst;
        },
        false);
    check(
        "analytic.rescaled_sandwich", 1e-12,
        [&] {
          double worst = 0.0;
          for (const auto& [h, k] : standard_pairs()) {
            const ModelParams params(h, k);
            for (int j = 0; j < 1024; ++j) {
              const double x = j / 1023.0;
              worst = std::max({worst, rescaled_fbar(params, x, Profile::energy) - x,
                                x - rescaled_fbar(params, x, Profile::entanglement)});
            }
          }
          return worst;
        },
        false);
    check(
        "analytic.curvature_signs", 0.0,
        [&] {
          double violations = 0.0;
          const double step = 1e-3;
          for (const auto& [h, k] : standard_pairs()) {
            const ModelParams params(h, k);
            for (int j = 1; j < 255; ++j) {
              const double x = step + (1.0 - 2.0 * step) * j / 255.0;
              auto d2 = [&](Profile which) {
                return rescaled_fbar(params, x + step, which) - 2.0 * rescaled_fbar(params, x, which) +
                       rescaled_fbar(params, x - step, which);
              };
              if (!(d2(Profile::energy) < 0.0)) violations += 1.0;
              if (!(d2(Profile::entanglement) > 0.0)) violations += 1.0;
            }
          }
          return violations;
        },
        false);
  }

  void entanglement_checks() {
    check("entanglement.consumption_closed_form", 1e-10, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const auto r = consumption(params, model);
        const auto w = model.weights();
        worst = std::max({worst, std::abs(r.delta_S - profile_sum(params, w, Profile::entanglement)), -r.delta_S,
                          std::abs(r.mutual_info - r.delta_S)});
      }
      return worst;
    });
    check("entanglement.lambda_match", 1e-10, [&] {
      double worst = 0.0;
      for (int i = 0; i < n(); ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const auto out = measure(model, ground_state(params));
        for (std::size_t mu = 0; mu < model.size(); ++mu) {
          if (!out[mu].state) continue;
          const auto ev = eigenvalues(reduced_state_B(*out[mu].state));
          const auto [plus, minus] = lambda_pm(params, model[mu].weights.p, model[mu].weights.q);
          worst = std::max({worst, std::abs(ev[1] - plus), std::abs(ev[0] - minus)});
        }
      }
      return worst;
    });
    check(
        "entanglement.monotone_in_correlation", 0.0,
        [&] {
          double violations = 0.0;
          for (const auto& [h, k] : standard_pairs()) {
            const ModelParams params(h, k);
            double last = -1.0;
            for (int j = 0; j < 64; ++j) {
              const double u = j / 63.0;
              const double ds = consumption(params, weak_measurement(u)).delta_S;
              if (ds < last - 1e-12) violations += 1.0;
              last = ds;
            }
          }
          return violations;
        },
        false);
  }

  void optimizer_checks() {
    check("optimizer.soundness", 1e-7, [&] {
      double worst = 0.0;
      const int count = std::min(n(), 12);
      for (int i = 0; i < count; ++i) {
        const auto params = pair_params(i);
        const auto model = ensemble_member(opts_.seed, i);
        const auto r = maximize_over_policy(params, model);
        const double closed = max_EB_closed(params, model);
        if (r.best_value > closed + 1e-9) worst = std::max(worst, 1.0);
        worst = std::max(worst, std::abs(r.best_value - closed) / std::max(closed, 1e-300));
      }
      return worst;
    });
    check("optimizer.deterministic", 0.0, [&] {
      const auto params = pair_params(4);
      const auto model = ensemble_member(opts_.seed, 0);
      const auto a = maximize_over_policy(params, model);
      const auto b = maximize_over_policy(params, model);
      return a.best_value == b.best_value && a.evaluations == b.evaluations ? 0.0 : 1.0;
    });
  }

  VerifyOptions opts_;
  std::mt19937_64 rng_;
  std::vector<CheckResult> results_;
};

inline std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
  return VerificationSuite(opts).run_all();
}

}  // namespace qet
