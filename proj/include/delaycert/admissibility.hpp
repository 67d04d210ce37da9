#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "delaycert/quasipoly.hpp"
#include "delaycert/systems.hpp"

namespace delaycert {

struct FrequencyIntegral {
  double value = 0.0;               // (1/2pi) integral of |P(i w)|^{-2} dw
  double abs_error_estimate = 0.0;  // quadrature estimate plus tail slack
  double cutoff = 0.0;              // finite quadrature ran on [-cutoff, cutoff]
};

/// Thrown when the quadrature budget is exhausted before the requested
/// tolerance; carries the best estimate obtained so far.
struct QuadratureBudgetError : std::runtime_error {
  QuadratureBudgetError(const std::string& msg, FrequencyIntegral best_so_far)
      : std::runtime_error(msg), best(best_so_far) {}
  FrequencyIntegral best;
};

struct FrequencyIntegralOptions {
  std::optional<double> cutoff;        // fixed cutoff instead of the default
  bool grow_cutoff = true;             // double the cutoff until the tail
                                       // slack fits the tolerance budget
  std::size_t max_intervals = 60000;
};

/// (1/2pi) * integral over the line of |i w - lambda e^{-i w tau}|^{-2} dw.
/// Requires strict region membership (no characteristic root on the axis).
/// The reported value adds the midpoint of the analytic tail bracket beyond
/// the cutoff; abs_error_estimate covers quadrature error plus half the
/// bracket width.
FrequencyIntegral frequency_integral(const ModeParams& mode, double rel_tol,
                                     const FrequencyIntegralOptions& opt = {});

struct DeltaSelection {
  double delta = 0.0;
  double m = 0.0;           // cos(eps_lambda - (1+delta)|lambda| tau), in (0,1)
  double feasible_sup = 0.0;  // min(1, eps_lambda/(|lambda| tau) - 1)
  bool narrow = false;        // feasible interval narrower than 1e-10
};

/// Supremum of the feasible split parameters: delta in (0, 1) with
/// (1+delta)|lambda| tau < eps_lambda.  Requires region membership.
double feasible_delta_sup(const ModeParams& mode);

/// Minimizes (2-delta)/delta + 2 delta/(1-m(delta)^2) over the feasible
/// interval by a coarse scan refined with golden-section search.
DeltaSelection select_delta(const ModeParams& mode);

struct ModeCertificate {
  Complex lambda;
  Complex b;
  double tau = 0.0;
  double delta = 0.0;
  double m = 0.0;
  double C = 0.0;  // |b|^2 (1+tau) (1/pi) ((2-d)/(d|l|) + 2d/((1-m^2)|l|))
  double epsilon_lambda = 0.0;  // |Arg lambda| - pi/2
  bool narrow_feasibility = false;
};

/// The certificate bracket (2-delta)/(delta L) + 2 delta/((1-m^2) L) for
/// L = |lambda|.  Single code path shared by every certificate computation.
/// Callers pass 1-m^2 directly: near the feasibility boundary m = cos(x)
/// rounds to 1 while sin(x)^2 keeps the full value, so the stable form is
/// sin^2 of the angle epsilon_lambda - (1+delta)|lambda|tau.
double certificate_bracket(double delta, double one_minus_m_sq,
                           double lambda_abs);

/// Admissibility certificate for one mode.  With delta omitted the optimized
/// split is used; an explicit delta is validated against the feasible
/// interval, which is named in the rejection message.
ModeCertificate mode_bound(const ModeParams& mode, Complex b,
                           std::optional<double> delta = std::nullopt);

enum class TailVerdict {
  kProvenSummableByRatio,
  kEmpiricallyDecaying,
  kInconclusive,
};

const char* to_string(TailVerdict v);

struct SystemCertificate {
  std::vector<ModeCertificate> mode_certs;
  double partial_sum = 0.0;  // sum of C_k over the truncation
  int truncation = 0;
  TailVerdict tail_verdict = TailVerdict::kInconclusive;
  // Rule-extended diagnostics, present when the spec carries a closed form:
  std::optional<double> partial_sum_doubled;  // sum of C_k for k <= 2N
  std::optional<double> growth_rel;  // (S_2N - S_N) / S_N
};

/// Certificates for modes 1..N.  Modes beyond the listed ones are generated
/// from the tail rule when one is attached; the first mode outside the
/// stability region aborts with its index named.
SystemCertificate system_certificate(const SystemSpec& spec, int truncation);

std::string certificate_to_json(const SystemCertificate& cert);
void write_certificate_csv(const SystemCertificate& cert, std::ostream& out);

}  // namespace delaycert
