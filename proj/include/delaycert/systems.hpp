#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "delaycert/quasipoly.hpp"

namespace delaycert {

/// Thrown for unreadable, unparsable, or invariant-violating spec documents.
/// Messages carry the offending field path or parse location.
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModeSpec {
  int index = 0;  // 1-based, contiguous
  Complex lambda;
  Complex b;
};

/// lambda_k = c * k^{-p}, b_k = d * k^{-q}
struct PowerLawRule {
  double c = 0.0;
  double p = 0.0;
  double d = 0.0;
  double q = 0.0;
};

/// lambda_k = (-pi/(2 tau) + eps) / k, b_k = k^{-2}
struct ArtificialRule {
  double eps = 0.0;
};

using TailRule = std::variant<std::monostate, PowerLawRule, ArtificialRule>;

struct SystemSpec {
  double tau = 0.0;
  std::vector<ModeSpec> modes;
  TailRule tail_rule;
  std::vector<std::string> warnings;

  bool has_rule() const {
    return !std::holds_alternative<std::monostate>(tail_rule);
  }
  /// Evaluates the tail rule at index k (k >= 1).  Throws when no rule is set.
  ModeSpec rule_mode(int k) const;
};

SystemSpec load_spec(std::istream& in, const std::string& origin = "<stream>");
SystemSpec load_spec(const std::filesystem::path& path);

std::string spec_to_json(const SystemSpec& spec);
void save_spec(const SystemSpec& spec, const std::filesystem::path& path);

/// Reciprocal heat-mode family: tau = 1, lambda_k = -1/k^2, b_k = k^{-q}.
/// q <= 3/2 produces a spec carrying a warning: the certificate constants
/// cannot be summable then.
SystemSpec heat_reciprocal_spec(int n_modes, double q = 2.0);

/// Uniformly delay-stable family lambda_k = (-pi/(2 tau) + eps)/k with
/// b_k = k^{-2}; requires 0 < eps < pi/(2 tau).
SystemSpec artificial_spec(int n_modes, double tau, double eps);

/// Finite sampled multiplication-operator symbol; rejects samples with
/// nonnegative real part (the index is named in the error).  Region
/// membership is checked later, at certification time.
SystemSpec symbol_sampled_spec(std::span<const Complex> symbol_samples,
                               double tau, std::span<const Complex> b);

/// Fixed-order sum of per-mode nonnegative quantities; a negative entry is a
/// caller bug and throws.
double aggregate_norm(std::span<const double> per_mode_values);

}  // namespace delaycert
