#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "delaycert/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"delaycert: stability certificates for scalar delay modes"};
  app.require_subcommand(1);

  delaycert::RunConfig cfg;
  std::string spec_path;
  std::string out_dir = "out";

  const auto add_spec = [&](CLI::App* sub) {
    sub->add_option("--spec", spec_path, "system spec JSON file")->required();
  };
  const auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "output directory (default: out)");
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "membership, critical delays, and rightmost roots per mode");
  add_spec(analyze);
  add_out(analyze);
  analyze->add_option("--K", cfg.branch_range, "Lambert-W branch range");

  CLI::App* region = app.add_subcommand(
      "region", "sample the stability-region boundary for a given delay");
  add_out(region);
  region->add_option("--tau", cfg.tau, "delay defining the region")
      ->check(CLI::PositiveNumber);

  CLI::App* roots = app.add_subcommand(
      "roots", "characteristic roots for every mode in a spec");
  add_spec(roots);
  add_out(roots);
  roots->add_option("--K", cfg.branch_range, "Lambert-W branch range");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "integrate fundamental solutions and write trajectories");
  add_spec(simulate);
  add_out(simulate);
  simulate->add_option("--dt-divisor", cfg.dt_divisor,
                       "steps per delay interval (default: 64)");
  simulate->add_option("--N", cfg.truncation, "mode count cap");

  CLI::App* verify = app.add_subcommand(
      "verify", "cross-check certificates against simulated trajectories");
  add_spec(verify);
  add_out(verify);
  verify->add_option("--tol", cfg.rel_tol, "frequency-integral tolerance");
  verify->add_option("--dt-divisor", cfg.dt_divisor,
                     "steps per delay interval (default: 64)");
  verify->add_option("--seed", cfg.seed, "seed for the forcing inputs");
  verify->add_option("--N", cfg.truncation, "mode count cap");

  CLI::App* certify = app.add_subcommand(
      "certify", "per-mode constants, partial sums, and the tail verdict");
  add_spec(certify);
  add_out(certify);
  certify->add_option("--N", cfg.truncation, "truncation level");

  CLI11_PARSE(app, argc, argv);

  cfg.spec_path = spec_path;
  cfg.output_dir = out_dir;
  if (analyze->parsed()) cfg.command = delaycert::Command::kAnalyze;
  if (region->parsed()) cfg.command = delaycert::Command::kRegion;
  if (roots->parsed()) cfg.command = delaycert::Command::kRoots;
  if (simulate->parsed()) cfg.command = delaycert::Command::kSimulate;
  if (verify->parsed()) cfg.command = delaycert::Command::kVerify;
  if (certify->parsed()) cfg.command = delaycert::Command::kCertify;
  return delaycert::run_command(cfg);
}
