// qet: verification, reports, sweeps, time evolution and optimization for the
// two-qubit energy teleportation model.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qet/commands.hpp"

namespace {

void add_point_options(CLI::App* cmd, qet::PointCommand& point) {
  cmd->add_option("--h", point.h, "local field h > 0")->required();
  cmd->add_option("--k", point.k, "coupling k > 0")->required();
  cmd->add_option("--povm", point.povm, "POVM JSON file or builtin:identity|projective|weak(u)")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal two-qubit quantum energy teleportation toolkit"};
  app.set_help_flag("--help", "print this help and exit");  // -h would clash with --h
  app.require_subcommand(1);

  qet::VerifyCommand verify;
  std::string fault;
  auto* verify_cmd = app.add_subcommand("verify", "run the invariant suite");
  verify_cmd->add_option("--seed", verify.seed, "ensemble seed")->capture_default_str();
  verify_cmd->add_option("--ensemble", verify.ensemble, "random measurements per ensemble check (0 skips)")
      ->capture_default_str();
  verify_cmd->add_option("--inject-fault", fault)->group("")->check(CLI::IsMember({"corrupt-builtin"}));

  qet::PointCommand report;
  auto* report_cmd = app.add_subcommand("report", "closed-form and brute-force values at one point (JSON)");
  add_point_options(report_cmd, report);

  qet::SweepCommand sweep;
  std::string h_range, k_range;
  auto* sweep_cmd = app.add_subcommand("sweep", "grid over (h, k) written to DIR/sweep.csv");
  sweep_cmd->add_option("--h", h_range, "MIN:MAX:N[:log]")->required();
  sweep_cmd->add_option("--k", k_range, "MIN:MAX:N[:log]")->required();
  sweep_cmd->add_option("--povm", sweep.povm, "POVM JSON file or builtin")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out_dir, "output directory")->required();
  sweep_cmd->add_option("--threads", sweep.threads, "worker threads (0: all cores)")->capture_default_str();

  qet::EvolveCommand evolve;
  auto* evolve_cmd = app.add_subcommand("evolve", "free evolution of <H_B>(t) without feedback (CSV)");
  add_point_options(evolve_cmd, evolve.point);
  evolve_cmd->add_option("--t-max", evolve.t_max, "final time")->capture_default_str();
  evolve_cmd->add_option("--points", evolve.points, "number of time points")->capture_default_str();

  qet::OptimizeCommand optimize;
  std::string over = "policy";
  auto* optimize_cmd = app.add_subcommand("optimize", "numerical maximization of the energy output (JSON)");
  add_point_options(optimize_cmd, optimize.point);
  optimize_cmd->add_option("--over", over, "policy or weights")
      ->check(CLI::IsMember({"policy", "weights"}))
      ->capture_default_str();
  optimize_cmd->add_option("--outcomes", optimize.outcomes, "outcome count for the weight search");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qet::kExitUsage;
  }

  if (*verify_cmd) {
    verify.corrupt_builtin = fault == "corrupt-builtin";
    return qet::cmd_verify(verify, std::cout, std::cerr);
  }
  if (*report_cmd) return qet::cmd_report(report, std::cout, std::cerr);
  if (*sweep_cmd) {
    try {
      sweep.h = qet::parse_range(h_range);
      sweep.k = qet::parse_range(k_range);
    } catch (const qet::InputError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return qet::kExitUsage;
    }
    return qet::cmd_sweep(sweep, std::cout, std::cerr);
  }
  if (*evolve_cmd) return qet::cmd_evolve(evolve, std::cout, std::cerr);
  if (*optimize_cmd) {
    optimize.over_weights = over == "weights";
    return qet::cmd_optimize(optimize, std::cout, std::cerr);
  }
  return qet::kExitUsage;
}
