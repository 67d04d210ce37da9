#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace delaycert {

enum class Command { kAnalyze, kRegion, kRoots, kSimulate, kVerify, kCertify };

struct RunConfig {
  Command command = Command::kAnalyze;
  std::filesystem::path spec_path;   // required except for the region command
  std::filesystem::path output_dir = "out";
  double rel_tol = 1e-6;     // in (0, 1)
  int dt_divisor = 64;       // steps per delay interval, >= 16
  int truncation = 1000;     // certificate truncation N
  std::uint64_t seed = 0;    // verification input seed
  int branch_range = 16;     // root-solver branch range K
  double tau = 1.0;          // region command: delay for the boundary curve
};

/// Executes one command: writes the report and CSV outputs into output_dir
/// and prints a short summary to stdout.  Returns 0 on success, 1 on spec or
/// domain failures, 2 when a verification check fails.
int run_command(const RunConfig& config);

}  // namespace delaycert
