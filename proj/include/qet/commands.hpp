#pragma once

// Command implementations behind the qet executable. Each returns the process
// exit code: 0 success, 1 verification failure, 2 usage or I/O error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qet/analytic.hpp"
#include "qet/entanglement.hpp"
#include "qet/errors.hpp"
#include "qet/io.hpp"
#include "qet/measurement.hpp"
#include "qet/model.hpp"
#include "qet/optimizer.hpp"
#include "qet/protocol.hpp"
#include "qet/verify.hpp"

namespace qet {

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitUsage = 2 };

namespace detail {

// Runs a command body, mapping library errors to exit code 2.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

inline nlohmann::json bound_json(double lhs, double rhs) {
  return {{"lhs", lhs}, {"rhs", rhs}, {"slack", lhs - rhs}};
}

inline nlohmann::json unitary_json(const LocalUnitary& u) {
  return {{"omega", u.omega()}, {"axis", {u.axis()[0], u.axis()[1], u.axis()[2]}}};
}

}  // namespace detail

struct VerifyCommand {
  std::uint64_t seed = 1;
  int ensemble = 1000;
  bool corrupt_builtin = false;
};

inline int cmd_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err) {
  if (cmd.ensemble < 0) {
    err << "error: --ensemble must be >= 0\n";
    return kExitUsage;
  }
  const auto results = run_verification({cmd.seed, cmd.ensemble, cmd.corrupt_builtin});
  nlohmann::json failures = nlohmann::json::array();
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << r.name << to_string(r.status);
    if (r.status != CheckStatus::skipped)
      out << "  max residual " << format_double(r.residual) << "  tol " << format_double(r.tolerance);
    out << "\n";
    if (r.status == CheckStatus::fail) {
      nlohmann::json f = {{"check", r.name}, {"residual", r.residual}, {"tolerance", r.tolerance}};
      if (!r.error.empty()) f["error"] = r.error;
      failures.push_back(f);
    }
  }
  if (!failures.empty()) {
    err << nlohmann::json{{"failures", failures}}.dump(2) << "\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

struct PointCommand {
  double h = 1.0;
  double k = 1.0;
  std::string povm = "builtin:projective";
};

inline nlohmann::json report_json(const ModelParams& params, const MeasurementSource& source) {
  const auto& model = source.model;
  const auto policy = optimal_policy(params, model);
  const auto r = run(params, model, policy);
  const auto numeric = maximize_over_policy(params, model);
  const auto ent = consumption(params, model);

  nlohmann::json outcomes = nlohmann::json::array();
  for (std::size_t mu = 0; mu < model.size(); ++mu) {
    const auto& o = model[mu];
    outcomes.push_back({{"m", o.coeffs.m},
                        {"l", o.coeffs.l},
                        {"alpha", o.coeffs.alpha},
                        {"delta", o.coeffs.delta},
                        {"p", o.weights.p},
                        {"q", o.weights.q},
                        {"probability", r.per_outcome[mu].probability},
                        {"S_post", ent.S_post[mu]},
                        {"unitary", detail::unitary_json(policy.unitaries[mu])}});
  }

  return {
      {"params", {{"h", params.h()}, {"k", params.k()}, {"eps", params.eps()}}},
      {"measurement", {{"source", source.label}, {"hash", hex64(povm_hash(model))}, {"outcomes", outcomes}}},
      {"energy",
       {{"E_A_closed", r.E_A_closed},
        {"E_A_bruteforce", r.E_A},
        {"E_B_closed", r.max_EB_closed},
        {"E_B_bruteforce", r.E_B},
        {"E_B_numeric", numeric.best_value},
        {"numeric_converged", numeric.converged},
        {"total_final_energy", r.total_final_energy}}},
      {"entanglement",
       {{"S_ground", ent.S_ground},
        {"delta_S_bruteforce", r.delta_S},
        {"delta_S_closed", r.delta_S_closed},
        {"delta_S_bits", r.delta_S / std::numbers::ln2},
        {"mutual_info", r.mutual_info}}},
      {"bounds",
       {{"c32", r.coefficients.c32},
        {"c770", r.coefficients.c770},
        {"bound32", detail::bound_json(r.bound32_lhs, r.bound32_rhs)},
        {"bound770", detail::bound_json(r.bound770_lhs, r.bound770_rhs)}}},
  };
}

inline int cmd_report(const PointCommand& cmd, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const ModelParams params(cmd.h, cmd.k);
    const auto source = load_measurement(cmd.povm);
    out << report_json(params, source).dump(2) << "\n";
    return kExitOk;
  });
}

struct SweepCommand {
  GridRange h;
  GridRange k;
  std::string povm = "builtin:projective";
  std::string out_dir;
  unsigned threads = 0;  // 0: hardware concurrency
};

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{
      "h",           "k",           "E_A",          "maxE_B_closed", "maxE_B_numeric",
      "delta_S",     "mutual_info", "bound32_lhs",  "bound32_rhs",   "bound770_lhs",
      "bound770_rhs", "delta_S_bits", "povm_hash"};
  return cols;
}

inline std::vector<std::string> sweep_row(const ModelParams& params, const MeasurementModel& model,
                                          const std::string& hash) {
  const auto r = run(params, model, optimal_policy(params, model));
  const auto numeric = maximize_over_policy(params, model);
  return {format_double(params.h()),  format_double(params.k()),           format_double(r.E_A_closed),
          format_double(r.max_EB_closed), format_double(numeric.best_value), format_double(r.delta_S),
          format_double(r.mutual_info),   format_double(r.bound32_lhs),      format_double(r.bound32_rhs),
          format_double(r.bound770_lhs),  format_double(r.bound770_rhs),
          format_double(r.delta_S / std::numbers::ln2), hash};
}

inline int cmd_sweep(const SweepCommand& cmd, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto source = load_measurement(cmd.povm);
    const auto hs = cmd.h.values();
    const auto ks = cmd.k.values();
    const std::string hash = hex64(povm_hash(source.model));

    namespace fs = std::filesystem;
    const fs::path dir(cmd.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path file = dir / "sweep.csv";
    std::ofstream csv(file);
    if (!csv) {
      err << "error: cannot write " << file.string() << "\n";
      return static_cast<int>(kExitUsage);
    }

    // Rows are computed in parallel into fixed slots, then written h-major.
    const std::size_t total = hs.size() * ks.size();
    std::vector<std::vector<std::string>> rows(total);
    std::vector<std::string> failures(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < total; i = next++) {
        try {
          rows[i] = sweep_row(ModelParams(hs[i / ks.size()], ks[i % ks.size()]), source.model, hash);
        } catch (const std::exception& e) {
          failures[i] = e.what();
        }
      }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(cmd.threads ? cmd.threads
                                                                           : std::thread::hardware_concurrency(),
                                                               static_cast<unsigned>(total)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
      if (!f.empty()) throw Error(f);

    const auto& cols = sweep_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) csv << (c ? "," : "") << cols[c];
    csv << "\n";
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << row[c];
      csv << "\n";
    }
    csv.flush();
    if (!csv) {
      err << "error: failed writing " << file.string() << "\n";
      return static_cast<int>(kExitUsage);
    }
    out << "wrote " << total << " rows to " << file.string() << "\n";
    return static_cast<int>(kExitOk);
  });
}

struct EvolveCommand {
  PointCommand point;
  double t_max = std::numbers::pi / 2.0;
  int points = 256;
};

inline int cmd_evolve(const EvolveCommand& cmd, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (!(cmd.t_max > 0.0) || !std::isfinite(cmd.t_max)) throw InputError("--t-max must be > 0");
    if (cmd.points < 1) throw InputError("--points must be >= 1");
    const ModelParams params(cmd.point.h, cmd.point.k);
    const auto source = load_measurement(cmd.point.povm);
    const Evolution evo(params, source.model);
    out << "t,HB_bruteforce,HB_closed,V_expect\n";
    for (int i = 0; i < cmd.points; ++i) {
      const double t = cmd.points == 1 ? 0.0 : cmd.t_max * i / (cmd.points - 1);
      const auto s = evo.at(t);
      out << format_double(s.t) << "," << format_double(s.HB_bruteforce) << "," << format_double(s.HB_closed)
          << "," << format_double(s.V_expect) << "\n";
    }
    return kExitOk;
  });
}

struct OptimizeCommand {
  PointCommand point;
  bool over_weights = false;
  int outcomes = 0;  // weight search size; 0 means the size of the given measurement
};

inline int cmd_optimize(const OptimizeCommand& cmd, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const ModelParams params(cmd.point.h, cmd.point.k);
    const auto source = load_measurement(cmd.point.povm);
    nlohmann::json doc = {{"params", {{"h", params.h()}, {"k", params.k()}, {"eps", params.eps()}}}};

    if (cmd.over_weights) {
      const int n = cmd.outcomes > 0 ? cmd.outcomes : static_cast<int>(source.model.size());
      if (n < 2 || n > 6)
        throw InputError("weight search needs 2..6 outcomes, got " + std::to_string(n) +
                         " (use --outcomes)");
      const auto r = maximize_over_weights(params, static_cast<std::size_t>(n));
      nlohmann::json weights = nlohmann::json::array();
      for (const auto& w : r.weights) weights.push_back({{"p", w.p}, {"q", w.q}});
      doc["over"] = "weights";
      doc["outcomes"] = n;
      doc["maxE_B_numeric"] = r.value;
      doc["maxE_B_projective"] = projective_max_EB(params);
      doc["weights"] = weights;
      doc["evaluations"] = r.evaluations;
      doc["converged"] = r.converged;
    } else {
      const auto r = maximize_over_policy(params, source.model);
      const auto closed = optimal_policy(params, source.model);
      nlohmann::json per = nlohmann::json::array();
      for (std::size_t mu = 0; mu < source.model.size(); ++mu)
        per.push_back({{"value", r.per_outcome[mu]},
                       {"numeric", detail::unitary_json(r.best_policy.unitaries[mu])},
                       {"closed", detail::unitary_json(closed.unitaries[mu])}});
      doc["over"] = "policy";
      doc["measurement"] = {{"source", source.label}, {"hash", hex64(povm_hash(source.model))}};
      doc["maxE_B_numeric"] = r.best_value;
      doc["maxE_B_closed"] = max_EB_closed(params, source.model);
      doc["per_outcome"] = per;
      doc["evaluations"] = r.evaluations;
      doc["converged"] = r.converged;
    }
    out << doc.dump(2) << "\n";
    return kExitOk;
  });
}

}  // namespace qet
