#include "delaycert/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>

#include <json.hpp>

#include "numerics.hpp"

namespace delaycert {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double epsilon_lambda_of(const ModeParams& mode) {
  return std::abs(principal_arg(mode.lambda())) - 0.5 * kPi;
}

void require_member(const ModeParams& mode, const char* who) {
  const RegionMembership rm = lambda_region_membership(mode);
  if (rm.member) return;
  if (rm.critical)
    throw std::domain_error(std::string(who) +
                            ": mode sits on the stability boundary; the "
                            "resolvent has a pole on the imaginary axis");
  throw std::domain_error(std::string(who) +
                          ": mode is outside the stability region");
}

std::vector<double> frequency_breakpoints(double cutoff, double lambda_abs,
                                          double tau) {
  std::set<double> seed{-cutoff, 0.0, cutoff};
  const double marks[] = {0.25, 0.5, 0.75, 0.9, 1.0, 1.1, 1.25, 1.5, 2.0, 4.0};
  for (double m : marks) {
    const double w = m * lambda_abs;
    if (w > 0.0 && w < cutoff) {
      seed.insert(w);
      seed.insert(-w);
    }
  }
  std::vector<double> pts(seed.begin(), seed.end());
  const double chunk = std::max(kTwoPi / tau, 2.0 * cutoff / 2048.0);
  std::vector<double> out;
  out.reserve(pts.size() * 2);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    out.push_back(pts[i]);
    const double gap = pts[i + 1] - pts[i];
    if (gap > chunk) {
      const int pieces = static_cast<int>(std::ceil(gap / chunk));
      for (int j = 1; j < pieces; ++j)
        out.push_back(pts[i] + gap * static_cast<double>(j) /
                                   static_cast<double>(pieces));
    }
  }
  out.push_back(pts.back());
  return out;
}

struct TailBracket {
  double mid;
  double half;
};

// Both one-sided tails of (1/2pi) |P(iw)|^{-2} beyond the cutoff bracketed by
// the reverse triangle inequality |w| - |lambda| <= |P(iw)| <= |w| + |lambda|.
TailBracket tail_bracket(double cutoff, double lambda_abs) {
  const double upper = (1.0 / kPi) / (cutoff - lambda_abs);
  const double lower = (1.0 / kPi) / (cutoff + lambda_abs);
  return TailBracket{0.5 * (upper + lower), 0.5 * (upper - lower)};
}

}  // namespace

FrequencyIntegral frequency_integral(const ModeParams& mode, double rel_tol,
                                     const FrequencyIntegralOptions& opt) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw std::invalid_argument("frequency_integral: rel_tol must be in (0,1)");
  require_member(mode, "frequency_integral");
  const double lambda_abs = std::abs(mode.lambda());
  const double tau = mode.tau();
  double cutoff = opt.cutoff.value_or(
      std::max({8.0 * lambda_abs, 8.0 / tau, 16.0}));
  if (cutoff <= 2.0 * lambda_abs)
    throw std::invalid_argument(
        "frequency_integral: cutoff must exceed 2|lambda|");

  const auto integrand = [&](double w) {
    return 1.0 / std::norm(eval_charfun(mode, Complex(0.0, w)));
  };

  FrequencyIntegral out;
  for (;;) {
    const auto pts = frequency_breakpoints(cutoff, lambda_abs, tau);
    const num::QuadResult quad = num::integrate_adaptive(
        integrand, pts, 0.5 * rel_tol, 0.0, opt.max_intervals);
    const TailBracket tail = tail_bracket(cutoff, lambda_abs);
    out.value = quad.value / kTwoPi + tail.mid;
    out.abs_error_estimate = quad.error / kTwoPi + tail.half;
    out.cutoff = cutoff;
    if (!quad.converged)
      throw QuadratureBudgetError(
          "frequency_integral: interval budget exhausted before reaching "
          "rel_tol " + g17(rel_tol),
          out);
    if (!opt.grow_cutoff || opt.cutoff.has_value() ||
        tail.half <= 0.25 * rel_tol * out.value || cutoff >= 1e9)
      return out;
    cutoff *= 2.0;
  }
}

double certificate_bracket(double delta, double one_minus_m_sq,
                           double lambda_abs) {
  return (2.0 - delta) / (delta * lambda_abs) +
         2.0 * delta / (one_minus_m_sq * lambda_abs);
}

double feasible_delta_sup(const ModeParams& mode) {
  require_member(mode, "feasible_delta_sup");
  const double eps = epsilon_lambda_of(mode);
  const double scaled = std::abs(mode.lambda()) * mode.tau();
  return std::min(1.0, eps / scaled - 1.0);
}

DeltaSelection select_delta(const ModeParams& mode) {
  DeltaSelection out;
  out.feasible_sup = feasible_delta_sup(mode);
  const double eps = epsilon_lambda_of(mode);
  const double scaled = std::abs(mode.lambda()) * mode.tau();
  const double lambda_abs = std::abs(mode.lambda());
  const auto angle_of = [&](double delta) {
    return eps - (1.0 + delta) * scaled;
  };
  const auto objective = [&](double delta) {
    const double s = std::sin(angle_of(delta));
    return certificate_bracket(delta, s * s, lambda_abs);
  };
  const double width = out.feasible_sup;
  out.narrow = width < 1e-10;
  const double clamp = std::min(1e-12, 1e-3 * width);
  const double lo = clamp;
  const double hi = out.feasible_sup - clamp;
  // coarse scan seeds the unimodal bracket for the golden-section refinement
  const int scan = 128;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan; ++i) {
    const double d =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(scan - 1);
    const double v = objective(d);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const auto at = [&](int i) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(scan - 1);
  };
  const double bra = at(std::max(0, best - 1));
  const double ket = at(std::min(scan - 1, best + 1));
  out.delta = num::golden_min(objective, bra, ket,
                              std::min(1e-10, 0.125 * (ket - bra)));
  out.m = std::cos(angle_of(out.delta));
  return out;
}

ModeCertificate mode_bound(const ModeParams& mode, Complex b,
                           std::optional<double> delta) {
  ModeCertificate cert;
  cert.lambda = mode.lambda();
  cert.b = b;
  cert.tau = mode.tau();
  cert.epsilon_lambda = epsilon_lambda_of(mode);
  const double lambda_abs = std::abs(mode.lambda());
  if (delta.has_value()) {
    require_member(mode, "mode_bound");
    const double sup = feasible_delta_sup(mode);
    const double d = *delta;
    if (!(d > 0.0 && d < 1.0) ||
        !((1.0 + d) * lambda_abs * mode.tau() < cert.epsilon_lambda))
      throw std::domain_error("mode_bound: delta " + g17(d) +
                              " outside the feasible interval (0, " + g17(sup) +
                              ")");
    cert.delta = d;
    cert.narrow_feasibility = sup < 1e-10;
  } else {
    const DeltaSelection sel = select_delta(mode);
    cert.delta = sel.delta;
    cert.narrow_feasibility = sel.narrow;
  }
  const double angle =
      cert.epsilon_lambda - (1.0 + cert.delta) * lambda_abs * mode.tau();
  const double s = std::sin(angle);
  cert.m = std::cos(angle);
  cert.C = std::norm(b) * (1.0 + mode.tau()) * (1.0 / kPi) *
           certificate_bracket(cert.delta, s * s, lambda_abs);
  return cert;
}

const char* to_string(TailVerdict v) {
  switch (v) {
    case TailVerdict::kProvenSummableByRatio:
      return "proven-summable-by-ratio";
    case TailVerdict::kEmpiricallyDecaying:
      return "empirically-decaying";
    case TailVerdict::kInconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

namespace {

ModeSpec spec_mode_at(const SystemSpec& spec, int k) {
  if (k <= static_cast<int>(spec.modes.size()))
    return spec.modes[static_cast<std::size_t>(k) - 1];
  if (!spec.has_rule())
    throw SpecError(
        "system_certificate: mode " + std::to_string(k) +
        " is beyond the listed modes and the spec carries no tail rule");
  return spec.rule_mode(k);
}

double rule_constant(const SystemSpec& spec, int k) {
  const ModeSpec m = spec.rule_mode(k);
  const ModeParams mode(m.lambda, spec.tau);
  return mode_bound(mode, m.b).C;
}

}  // namespace

SystemCertificate system_certificate(const SystemSpec& spec, int truncation) {
  if (truncation < 1)
    throw std::invalid_argument("system_certificate: truncation must be >= 1");
  SystemCertificate cert;
  cert.truncation = truncation;
  cert.mode_certs.reserve(static_cast<std::size_t>(truncation));
  for (int k = 1; k <= truncation; ++k) {
    const ModeSpec m = spec_mode_at(spec, k);
    try {
      const ModeParams mode(m.lambda, spec.tau);
      if (!in_lambda_region(mode))
        throw std::domain_error("outside the stability region");
      cert.mode_certs.push_back(mode_bound(mode, m.b));
    } catch (const std::exception& e) {
      throw std::domain_error("system_certificate: mode " + std::to_string(k) +
                              ": " + e.what());
    }
  }
  double sum = 0.0;
  for (const ModeCertificate& c : cert.mode_certs) sum += c.C;
  cert.partial_sum = sum;

  if (spec.has_rule()) {
    const int n = truncation;
    // constants along the rule out to 4N, reusing the listed prefix
    std::vector<double> c_ext;
    c_ext.reserve(static_cast<std::size_t>(3 * n) + 1);
    for (int k = n; k <= 4 * n; ++k) c_ext.push_back(rule_constant(spec, k));
    double s2 = sum;
    for (int k = n + 1; k <= 2 * n; ++k)
      s2 += c_ext[static_cast<std::size_t>(k - n)];
    cert.partial_sum_doubled = s2;
    cert.growth_rel = sum > 0.0 ? (s2 - sum) / sum : 0.0;

    bool monotone = true;
    for (std::size_t i = 0; i + 1 < c_ext.size(); ++i)
      if (c_ext[i + 1] > c_ext[i] * (1.0 + 1e-12)) {
        monotone = false;
        break;
      }
    const double c_n = c_ext.front();
    const double c_2n = c_ext[static_cast<std::size_t>(n)];
    const double c_4n = c_ext.back();
    // ratio test on the dyadic condensed series: summable when 2 C_{2k}/C_k
    // stays below 1 (valid for monotone nonincreasing constants)
    const double r1 = c_n > 0.0 ? 2.0 * c_2n / c_n : 0.0;
    const double r2 = c_2n > 0.0 ? 2.0 * c_4n / c_2n : 0.0;
    if (monotone && std::max(r1, r2) < 0.98) {
      cert.tail_verdict = TailVerdict::kProvenSummableByRatio;
      return cert;
    }
  }

  // empirical fallback: the last quartile of the computed constants must
  // decrease monotonically and by a real margin
  const std::size_t count = cert.mode_certs.size();
  const std::size_t start = (3 * count) / 4;
  bool decreasing = count - start >= 2;
  for (std::size_t i = start; decreasing && i + 1 < count; ++i)
    if (cert.mode_certs[i + 1].C > cert.mode_certs[i].C * (1.0 + 1e-12))
      decreasing = false;
  if (decreasing &&
      cert.mode_certs[count - 1].C <= 0.95 * cert.mode_certs[start].C)
    cert.tail_verdict = TailVerdict::kEmpiricallyDecaying;
  else
    cert.tail_verdict = TailVerdict::kInconclusive;
  return cert;
}

std::string certificate_to_json(const SystemCertificate& cert) {
  nlohmann::ordered_json doc;
  doc["truncation"] = cert.truncation;
  doc["partial_sum"] = cert.partial_sum;
  doc["tail_verdict"] = to_string(cert.tail_verdict);
  if (cert.partial_sum_doubled.has_value())
    doc["partial_sum_doubled"] = *cert.partial_sum_doubled;
  if (cert.growth_rel.has_value()) doc["growth_rel"] = *cert.growth_rel;
  doc["modes"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < cert.mode_certs.size(); ++i) {
    const ModeCertificate& c = cert.mode_certs[i];
    nlohmann::ordered_json jm;
    jm["index"] = static_cast<int>(i) + 1;
    jm["lambda"] = {c.lambda.real(), c.lambda.imag()};
    jm["b"] = {c.b.real(), c.b.imag()};
    jm["delta"] = c.delta;
    jm["m"] = c.m;
    jm["C"] = c.C;
    jm["epsilon_lambda"] = c.epsilon_lambda;
    jm["narrow_feasibility"] = c.narrow_feasibility;
    doc["modes"].push_back(jm);
  }
  return doc.dump(2) + "\n";
}

void write_certificate_csv(const SystemCertificate& cert, std::ostream& out) {
  out << "index,lambda_re,lambda_im,b_re,b_im,delta,m,C\n";
  for (std::size_t i = 0; i < cert.mode_certs.size(); ++i) {
    const ModeCertificate& c = cert.mode_certs[i];
    out << (i + 1) << ',' << g17(c.lambda.real()) << ',' << g17(c.lambda.imag())
        << ',' << g17(c.b.real()) << ',' << g17(c.b.imag()) << ','
        << g17(c.delta) << ',' << g17(c.m) << ',' << g17(c.C) << '\n';
  }
}

}  // namespace delaycert
