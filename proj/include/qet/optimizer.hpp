#pragma once

// Derivative-free maximization of teleported energy.
//
// The policy search evaluates each outcome's contribution
//   -<g| M^dagger U^dagger (H_B + V) U M |g>
// directly on the 4-dim state, so it shares nothing with the closed-form
// maximization chain in analytic.hpp.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "qet/analytic.hpp"
#include "qet/measurement.hpp"
#include "qet/model.hpp"
#include "qet/protocol.hpp"
#include "qet/qmath.hpp"

namespace qet {

struct OptimizerOptions {
  int coarse_omega_points = 64;
  int sphere_points = 256;
  int refine_iters = 1000;  // per policy refinement start; ill-conditioned when k >> h
  int weight_iters = 2000;  // per weight-search start
  double tol = 1e-10;      // polytope size at which a refinement stops
  int refine_starts = 4;   // best coarse candidates refined per outcome
  int weight_starts = 16;  // random starts for the weight search
  std::uint64_t seed = 20100;
};

template <std::size_t D>
struct PolytopeResult {
  std::array<double, D> x{};
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Nelder-Mead maximization. Stops when every vertex is within tol (max-norm)
// of the best vertex, when all vertex values agree to floating-point
// resolution, or after max_iter iterations.
template <std::size_t D, class F>
PolytopeResult<D> polytope_maximize(F&& f, const std::array<double, D>& start,
                                    const std::array<double, D>& step, int max_iter, double tol) {
  using Point = std::array<double, D>;
  std::array<Point, D + 1> x;
  std::array<double, D + 1> fx;
  PolytopeResult<D> res;

  auto eval = [&](const Point& p) {
    ++res.evaluations;
    return f(p);
  };
  auto combine = [](const Point& a, const Point& b, double t) {
    Point r;
    for (std::size_t i = 0; i < D; ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
  };

  x[0] = start;
  for (std::size_t i = 0; i < D; ++i) {
    x[i + 1] = start;
    x[i + 1][i] += step[i];
  }
  for (std::size_t i = 0; i <= D; ++i) fx[i] = eval(x[i]);

  std::array<std::size_t, D + 1> order;
  auto sort_vertices = [&] {
    for (std::size_t i = 0; i <= D; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] > fx[b]; });
    std::array<Point, D + 1> xs;
    std::array<double, D + 1> fs;
    for (std::size_t i = 0; i <= D; ++i) {
      xs[i] = x[order[i]];
      fs[i] = fx[order[i]];
    }
    x = xs;
    fx = fs;
  };
  auto size = [&] {
    double s = 0.0;
    for (std::size_t i = 1; i <= D; ++i)
      for (std::size_t j = 0; j < D; ++j) s = std::max(s, std::abs(x[i][j] - x[0][j]));
    return s;
  };

  auto flat = [&] {
    return fx[0] - fx[D] <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(fx[0]);
  };

  sort_vertices();
  for (int iter = 0; iter < max_iter; ++iter) {
    if (size() < tol || flat()) {
      res.converged = true;
      break;
    }
    Point centroid{};
    for (std::size_t i = 0; i < D; ++i)
      for (std::size_t j = 0; j < D; ++j) centroid[j] += x[i][j] / static_cast<double>(D);

    const Point reflected = combine(centroid, x[D], -1.0);
    const double fr = eval(reflected);
    if (fr > fx[0]) {
      const Point expanded = combine(centroid, x[D], -2.0);
      const double fe = eval(expanded);
      if (fe > fr) {
        x[D] = expanded;
        fx[D] = fe;
      } else {
        x[D] = reflected;
        fx[D] = fr;
      }
    } else if (fr > fx[D - 1]) {
      x[D] = reflected;
      fx[D] = fr;
    } else {
      const bool outside = fr > fx[D];
      const Point contracted = outside ? combine(centroid, reflected, 0.5) : combine(centroid, x[D], 0.5);
      const double fc = eval(contracted);
      if (fc > std::max(fr, fx[D]) || (!outside && fc >= fx[D])) {
        x[D] = contracted;
        fx[D] = fc;
      } else {
        for (std::size_t i = 1; i <= D; ++i) {
          x[i] = combine(x[0], x[i], 0.5);
          fx[i] = eval(x[i]);
        }
      }
    }
    sort_vertices();
  }
  if (!res.converged && (size() < tol || flat())) res.converged = true;
  res.x = x[0];
  res.value = fx[0];
  return res;
}

// Deterministic quasi-uniform points on the unit sphere (Fibonacci spiral).
inline std::vector<Vec3> sphere_lattice(int count) {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(count));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return pts;
}

// Energy extracted from B for one outcome, given the unnormalized M|g>.
class OutcomeObjective {
public:
  OutcomeObjective(const StateVector4& measured, const Operator4& local_B)
      : measured_(measured), local_B_(local_B) {}

  double operator()(double omega, const Vec3& n) const {
    using namespace std::complex_literals;
    const double c = std::cos(omega);
    const cplx is = 1i * std::sin(omega);
    // u = c + i s (n . sigma)
    const cplx u00 = c + is * n[2];
    const cplx u01 = is * cplx(n[0], -n[1]);
    const cplx u10 = is * cplx(n[0], n[1]);
    const cplx u11 = c - is * n[2];
    StateVector4 v;
    for (std::size_t a = 0; a < 2; ++a) {
      v[2 * a] = u00 * measured_[2 * a] + u01 * measured_[2 * a + 1];
      v[2 * a + 1] = u10 * measured_[2 * a] + u11 * measured_[2 * a + 1];
    }
    return -inner(v, local_B_ * v).real();
  }

private:
  StateVector4 measured_;
  Operator4 local_B_;
};

struct OptimizationResult {
  FeedbackPolicy best_policy;
  double best_value = 0.0;
  std::vector<double> per_outcome;
  long evaluations = 0;
  bool converged = true;
};

namespace detail {
inline Vec3 axis_from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}
}  // namespace detail

inline OptimizationResult maximize_over_policy(const ModelParams& params, const MeasurementModel& model,
                                               const OptimizerOptions& opts = {}) {
  if (opts.coarse_omega_points < 1 || opts.sphere_points < 1 || opts.refine_iters < 1 ||
      !(opts.tol > 0.0) || opts.refine_starts < 1)
    throw DomainError("OptimizerOptions: all fields must be positive");

  const auto parts = build_hamiltonian(params);
  const auto local_B = local_energy_B(parts);
  const auto g = ground_state(params);
  const auto lattice = sphere_lattice(opts.sphere_points);
  const double omega_step = std::numbers::pi / opts.coarse_omega_points;
  const double angle_step = std::sqrt(4.0 * std::numbers::pi / opts.sphere_points);

  struct Candidate {
    double value;
    double omega;
    Vec3 n;
  };

  OptimizationResult res;
  for (std::size_t mu = 0; mu < model.size(); ++mu) {
    const auto measured = apply_kraus(model, mu, g);
    if (std::norm(measured.norm()) < kZeroProbability) {
      res.best_policy.unitaries.push_back(LocalUnitary::identity());
      res.per_outcome.push_back(0.0);
      continue;
    }
    const OutcomeObjective objective(measured, local_B);

    // Coarse scan over omega in [0, pi) x sphere lattice; keep the top candidates.
    std::vector<Candidate> best;
    for (int i = 0; i < opts.coarse_omega_points; ++i) {
      const double omega = omega_step * i;
      for (const auto& n : lattice) {
        const double v = objective(omega, n);
        ++res.evaluations;
        if (static_cast<int>(best.size()) < opts.refine_starts || v > best.back().value) {
          best.push_back({v, omega, n});
          std::sort(best.begin(), best.end(),
                    [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
          if (static_cast<int>(best.size()) > opts.refine_starts) best.pop_back();
        }
      }
    }

    Candidate winner = best.front();
    bool winner_converged = false;
    for (const auto& start : best) {
      const double theta = std::acos(std::clamp(start.n[2], -1.0, 1.0));
      const double phi = std::atan2(start.n[1], start.n[0]);
      auto f = [&objective](const std::array<double, 3>& x) {
        return objective(x[0], detail::axis_from_angles(x[1], x[2]));
      };
      const auto refined = polytope_maximize<3>(f, {start.omega, theta, phi},
                                                {omega_step, angle_step, angle_step},
                                                opts.refine_iters, opts.tol);
      res.evaluations += refined.evaluations;
      if (refined.value > winner.value || (!winner_converged && refined.value >= winner.value)) {
        winner = {refined.value, refined.x[0], detail::axis_from_angles(refined.x[1], refined.x[2])};
        winner_converged = refined.converged;
      }
    }
    res.converged = res.converged && winner_converged;
    res.best_policy.unitaries.push_back(LocalUnitary::about(winner.omega, winner.n));
    res.per_outcome.push_back(winner.value);
    res.best_value += winner.value;
  }
  return res;
}

struct WeightOptimization {
  std::vector<OutcomeWeights> weights;
  double value = 0.0;
  long evaluations = 0;
  bool converged = false;
};

namespace detail {
// Squared hyperspherical coordinates: angles -> point on the probability simplex.
inline void simplex_from_angles(const double* angles, std::span<double> out) {
  double tail = 1.0;
  const std::size_t n = out.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double c = std::cos(angles[i]);
    out[i] = tail * c * c;
    const double s = std::sin(angles[i]);
    tail *= s * s;
  }
  out[n - 1] = tail;
}

template <std::size_t N>
std::vector<OutcomeWeights> weights_from_angles(const std::array<double, 2 * (N - 1)>& x) {
  std::array<double, N> a{};
  std::array<double, N> b{};
  simplex_from_angles(x.data(), a);
  simplex_from_angles(x.data() + (N - 1), b);
  std::vector<OutcomeWeights> w(N);
  for (std::size_t i = 0; i < N; ++i) w[i] = {(a[i] + b[i]) / 2.0, (a[i] - b[i]) / 2.0};
  return w;
}

template <std::size_t N>
WeightOptimization maximize_over_weights_fixed(const ModelParams& params, const OptimizerOptions& opts) {
  constexpr std::size_t D = 2 * (N - 1);
  std::mt19937_64 rng(opts.seed);
  auto f = [&params](const std::array<double, D>& x) {
    const auto w = weights_from_angles<N>(x);
    return profile_sum(params, w, Profile::energy);
  };

  WeightOptimization best;
  best.value = -INFINITY;
  std::array<double, D> step;
  step.fill(0.25);
  for (int s = 0; s < opts.weight_starts; ++s) {
    std::array<double, D> start;
    for (auto& v : start) v = std::numbers::pi / 2.0 * uniform01(rng);
    PolytopeResult<D> r = polytope_maximize<D>(f, start, step, opts.weight_iters, opts.tol);
    best.evaluations += r.evaluations;
    if (r.value > best.value) {
      best.value = r.value;
      best.weights = weights_from_angles<N>(r.x);
      best.converged = r.converged;
    }
  }
  return best;
}
}  // namespace detail

// Maximizes sum_mu p f_E(q^2/p^2) over all feasible weight vectors with
// n_outcomes entries: a = p + q and b = p - q each range over the simplex.
inline WeightOptimization maximize_over_weights(const ModelParams& params, std::size_t n_outcomes,
                                                const OptimizerOptions& opts = {}) {
  if (opts.weight_starts < 1 || opts.weight_iters < 1 || !(opts.tol > 0.0))
    throw DomainError("OptimizerOptions: all fields must be positive");
  switch (n_outcomes) {
    case 2: return detail::maximize_over_weights_fixed<2>(params, opts);
    case 3: return detail::maximize_over_weights_fixed<3>(params, opts);
    case 4: return detail::maximize_over_weights_fixed<4>(params, opts);
    case 5: return detail::maximize_over_weights_fixed<5>(params, opts);
    case 6: return detail::maximize_over_weights_fixed<6>(params, opts);
    default:
      throw DomainError("maximize_over_weights: supported outcome counts are 2..6");
  }
}

}  // namespace qet
