#include "delaycert/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include <json.hpp>

#include "delaycert/admissibility.hpp"
#include "delaycert/quasipoly.hpp"
#include "delaycert/simulate.hpp"
#include "delaycert/systems.hpp"

namespace delaycert {

namespace {

constexpr double kPi = 3.14159265358979323846;
using json = nlohmann::ordered_json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

void validate(const RunConfig& cfg) {
  if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0))
    throw std::invalid_argument("cli: --tol must lie in (0, 1)");
  if (cfg.dt_divisor < 16)
    throw std::invalid_argument("cli: --dt-divisor must be at least 16");
  if (cfg.truncation < 1)
    throw std::invalid_argument("cli: --N must be at least 1");
  if (cfg.branch_range < 1)
    throw std::invalid_argument("cli: --K must be at least 1");
  if (!(cfg.tau > 0.0))
    throw std::invalid_argument("cli: --tau must be positive");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cli: cannot write " + path.string());
  out << text;
}

void write_report(const RunConfig& cfg, const json& doc) {
  write_text(cfg.output_dir / "report.json", doc.dump(2) + "\n");
}

int cmd_analyze(const RunConfig& cfg) {
  const SystemSpec spec = load_spec(cfg.spec_path);
  json report;
  report["command"] = "analyze";
  report["tau"] = spec.tau;
  report["modes"] = json::array();
  std::string csv =
      "index,lambda_re,lambda_im,b_re,b_im,member,critical,margin,"
      "critical_delay,crossing_frequency,abscissa,rightmost_re,rightmost_im,"
      "rhp_count\n";
  bool all_member = true;
  for (const ModeSpec& ms : spec.modes) {
    const ModeParams mode(ms.lambda, spec.tau);
    const RegionMembership rm = lambda_region_membership(mode);
    const double tstar = critical_delay(ms.lambda);
    const double omega = crossing_frequency(ms.lambda);
    const SpectralAbscissa sa = spectral_abscissa(mode, cfg.branch_range);
    all_member = all_member && rm.member;
    const Complex rightmost = sa.roots.roots.front();
    json jm;
    jm["index"] = ms.index;
    jm["lambda"] = complex_json(ms.lambda);
    jm["b"] = complex_json(ms.b);
    jm["member"] = rm.member;
    jm["critical"] = rm.critical;
    jm["margin"] = rm.margin;
    jm["critical_delay"] = tstar;
    jm["crossing_frequency"] = omega;
    jm["abscissa"] = sa.value;
    jm["rightmost"] = complex_json(rightmost);
    if (sa.rhp_count.has_value()) jm["rhp_count"] = *sa.rhp_count;
    if (!sa.note.empty()) jm["note"] = sa.note;
    report["modes"].push_back(jm);
    csv += std::to_string(ms.index) + ',' + g17(ms.lambda.real()) + ',' +
           g17(ms.lambda.imag()) + ',' + g17(ms.b.real()) + ',' +
           g17(ms.b.imag()) + ',' + (rm.member ? "1" : "0") + ',' +
           (rm.critical ? "1" : "0") + ',' + g17(rm.margin) + ',' +
           g17(tstar) + ',' + g17(omega) + ',' + g17(sa.value) + ',' +
           g17(rightmost.real()) + ',' + g17(rightmost.imag()) + ',' +
           (sa.rhp_count.has_value() ? std::to_string(*sa.rhp_count) : "") +
           '\n';
  }
  report["all_member"] = all_member;
  write_report(cfg, report);
  write_text(cfg.output_dir / "modes.csv", csv);
  std::cout << "analyze: " << spec.modes.size() << " modes, "
            << (all_member ? "all inside" : "some outside")
            << " the stability region\n";
  return all_member ? 0 : 1;
}

int cmd_region(const RunConfig& cfg) {
  const int samples_per_arc = 512;
  std::string csv = "arg,radius,re,im\n";
  double min_re = 0.0, max_re = -1e300;
  const auto emit = [&](double arg) {
    const double radius = (std::abs(arg) - 0.5 * kPi) / cfg.tau;
    const Complex z = std::polar(radius, arg);
    min_re = std::min(min_re, z.real());
    max_re = std::max(max_re, z.real());
    csv += g17(arg) + ',' + g17(radius) + ',' + g17(z.real()) + ',' +
           g17(z.imag()) + '\n';
  };
  for (int j = 1; j <= samples_per_arc; ++j)
    emit(0.5 * kPi + 0.5 * kPi * static_cast<double>(j) /
                         static_cast<double>(samples_per_arc));
  for (int j = 1; j <= samples_per_arc; ++j)
    emit(-(0.5 * kPi + 0.5 * kPi * static_cast<double>(j) /
                           static_cast<double>(samples_per_arc)));
  write_text(cfg.output_dir / "boundary.csv", csv);
  json report;
  report["command"] = "region";
  report["tau"] = cfg.tau;
  report["samples"] = 2 * samples_per_arc;
  report["max_radius"] = 0.5 * kPi / cfg.tau;
  report["min_re"] = min_re;
  report["max_re"] = max_re;
  write_report(cfg, report);
  std::cout << "region: boundary for tau = " << cfg.tau << ", radius up to "
            << 0.5 * kPi / cfg.tau << "\n";
  return 0;
}

int cmd_roots(const RunConfig& cfg) {
  const SystemSpec spec = load_spec(cfg.spec_path);
  json report;
  report["command"] = "roots";
  report["tau"] = spec.tau;
  report["branch_range"] = cfg.branch_range;
  report["modes"] = json::array();
  std::string csv = "index,root_re,root_im,residual\n";
  for (const ModeSpec& ms : spec.modes) {
    const ModeParams mode(ms.lambda, spec.tau);
    const RootSet roots = char_roots(mode, cfg.branch_range);
    json jm;
    jm["index"] = ms.index;
    jm["count"] = roots.roots.size();
    jm["rightmost"] = complex_json(roots.roots.front());
    report["modes"].push_back(jm);
    for (const Complex& s : roots.roots)
      csv += std::to_string(ms.index) + ',' + g17(s.real()) + ',' +
             g17(s.imag()) + ',' + g17(std::abs(eval_charfun(mode, s))) + '\n';
  }
  write_report(cfg, report);
  write_text(cfg.output_dir / "roots.csv", csv);
  std::cout << "roots: solved " << spec.modes.size() << " modes at K = "
            << cfg.branch_range << "\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  const SystemSpec spec = load_spec(cfg.spec_path);
  const std::size_t cap = std::min<std::size_t>(
      {spec.modes.size(), static_cast<std::size_t>(cfg.truncation), 16});
  json report;
  report["command"] = "simulate";
  report["tau"] = spec.tau;
  report["modes"] = json::array();
  for (std::size_t i = 0; i < cap; ++i) {
    const ModeSpec& ms = spec.modes[i];
    const ModeParams mode(ms.lambda, spec.tau);
    const double dt = spec.tau / static_cast<double>(cfg.dt_divisor);
    const Trajectory traj =
        fundamental_solution(mode, 30.0 * spec.tau, dt);
    std::ofstream out(cfg.output_dir /
                      ("trajectory_" + std::to_string(ms.index) + ".csv"));
    write_trajectory_csv(traj, out);
    json jm;
    jm["index"] = ms.index;
    jm["l2_norm_sq"] = trajectory_l2_norm_sq(traj);
    jm["final_state_norm_sq"] =
        state_norm(traj, traj.total_time()).value_sq;
    report["modes"].push_back(jm);
  }
  write_report(cfg, report);
  std::cout << "simulate: wrote " << cap << " fundamental trajectories\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const SystemSpec spec = load_spec(cfg.spec_path);
  const std::size_t cap = std::min<std::size_t>(
      {spec.modes.size(), static_cast<std::size_t>(cfg.truncation), 10});
  const double dt_base = spec.tau / static_cast<double>(cfg.dt_divisor);
  const int inputs_per_mode = 3;
  json report;
  report["command"] = "verify";
  report["tau"] = spec.tau;
  report["seed"] = cfg.seed;
  report["modes"] = json::array();
  bool any_fail = false;
  for (std::size_t i = 0; i < cap; ++i) {
    const ModeSpec& ms = spec.modes[i];
    const ModeParams mode(ms.lambda, spec.tau);
    const RegionMembership rm = lambda_region_membership(mode);
    json jm;
    jm["index"] = ms.index;
    jm["lambda"] = complex_json(ms.lambda);
    if (!rm.member) {
      jm["skipped"] = rm.critical ? "critical boundary mode" : "not a member";
      report["modes"].push_back(jm);
      std::cout << "verify: mode " << ms.index << " SKIP ("
                << jm["skipped"].get<std::string>() << ")\n";
      continue;
    }
    const FrequencyIntegral fi =
        frequency_integral(mode, std::min(cfg.rel_tol, 1e-4));
    jm["frequency_integral"] = fi.value;
    jm["frequency_error"] = fi.abs_error_estimate;
    const DecayNormResult time_side =
        fundamental_l2_norm_sq(mode, dt_base, 1e-8, 4000.0);
    bool mode_fail = false;
    if (!time_side.converged) {
      jm["skipped"] = "fundamental solution decays too slowly for the "
                      "trailing-energy rule";
      report["modes"].push_back(jm);
      std::cout << "verify: mode " << ms.index << " SKIP (slow decay)\n";
      continue;
    }
    jm["time_norm_sq"] = time_side.norm_sq;
    jm["time_horizon"] = time_side.horizon;
    const double gap = std::abs(time_side.norm_sq - fi.value);
    const bool pw_ok = gap <= 1e-3 * fi.value;
    jm["transform_gap_rel"] = gap / fi.value;
    jm["transform_ok"] = pw_ok;
    mode_fail = mode_fail || !pw_ok;

    const ModeCertificate cert = mode_bound(mode, ms.b);
    jm["certificate_C"] = cert.C;
    jm["delta"] = cert.delta;
    json inputs = json::array();
    for (int j = 0; j < inputs_per_mode; ++j) {
      std::mt19937_64 rng(cfg.seed * 0x9e3779b97f4a7c15ULL +
                          static_cast<std::uint64_t>(ms.index) * 1000003ULL +
                          static_cast<std::uint64_t>(j));
      const InputSignal u = bandlimited_signal(rng, spec.tau, dt_base);
      ForcingNormOptions opts;
      opts.horizon_cap_taus = 60.0;
      opts.require_decay = false;
      const double sup =
          forcing_norm_empirical(mode, ms.b, u, dt_base, 1e-8, opts);
      const double rhs = cert.C * u.norm_sq() * 1.05;
      const bool ok = sup * sup <= rhs;
      json ji;
      ji["input"] = j;
      ji["input_norm_sq"] = u.norm_sq();
      ji["sup_state_norm_sq"] = sup * sup;
      ji["bound_rhs"] = rhs;
      ji["ok"] = ok;
      inputs.push_back(ji);
      mode_fail = mode_fail || !ok;
    }
    jm["forcing_checks"] = inputs;
    jm["pass"] = !mode_fail;
    report["modes"].push_back(jm);
    std::cout << "verify: mode " << ms.index << (mode_fail ? " FAIL" : " ok")
              << " (transform gap " << gap / fi.value << ")\n";
    any_fail = any_fail || mode_fail;
  }
  report["all_pass"] = !any_fail;
  write_report(cfg, report);
  std::cout << (any_fail ? "verify: FAILED\n" : "verify: all checks passed\n");
  return any_fail ? 2 : 0;
}

int cmd_certify(const RunConfig& cfg) {
  const SystemSpec spec = load_spec(cfg.spec_path);
  for (const std::string& w : spec.warnings)
    std::cout << "certify: warning: " << w << "\n";
  const SystemCertificate cert = system_certificate(spec, cfg.truncation);
  write_text(cfg.output_dir / "certificate.json", certificate_to_json(cert));
  std::ofstream csv(cfg.output_dir / "certificate.csv");
  write_certificate_csv(cert, csv);
  json report;
  report["command"] = "certify";
  report["truncation"] = cert.truncation;
  report["partial_sum"] = cert.partial_sum;
  report["tail_verdict"] = to_string(cert.tail_verdict);
  if (cert.partial_sum_doubled.has_value())
    report["partial_sum_doubled"] = *cert.partial_sum_doubled;
  if (cert.growth_rel.has_value()) report["growth_rel"] = *cert.growth_rel;
  write_report(cfg, report);
  std::cout << "certify: N = " << cert.truncation << ", partial sum "
            << cert.partial_sum << ", tail verdict "
            << to_string(cert.tail_verdict) << "\n";
  return 0;
}

}  // namespace

int run_command(const RunConfig& config) {
  try {
    validate(config);
    std::filesystem::create_directories(config.output_dir);
    switch (config.command) {
      case Command::kAnalyze:
        return cmd_analyze(config);
      case Command::kRegion:
        return cmd_region(config);
      case Command::kRoots:
        return cmd_roots(config);
      case Command::kSimulate:
        return cmd_simulate(config);
      case Command::kVerify:
        return cmd_verify(config);
      case Command::kCertify:
        return cmd_certify(config);
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace delaycert
