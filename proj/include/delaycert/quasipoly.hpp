#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace delaycert {

using Complex = std::complex<double>;

/// One scalar delayed mode dz/dt = lambda * z(t - tau).  Construction rejects
/// Re(lambda) >= 0, non-finite entries, and tau <= 0.
class ModeParams {
 public:
  ModeParams(Complex lambda, double tau);
  Complex lambda() const { return lambda_; }
  double tau() const { return tau_; }

 private:
  Complex lambda_;
  double tau_;
};

/// Principal argument in (-pi, pi]; negative reals map to +pi regardless of
/// the sign of the (zero) imaginary part.
double principal_arg(Complex z);

/// Characteristic function s - lambda * exp(-s * tau).
Complex eval_charfun(const ModeParams& mode, Complex s);

struct RegionMembership {
  bool member = false;    // strict inclusion in the delay-stability region
  bool critical = false;  // within 1e-12 of the boundary |lambda|*tau = margin
  double margin = 0.0;    // (|Arg lambda| - pi/2) - |lambda|*tau
};

RegionMembership lambda_region_membership(const ModeParams& mode);
bool in_lambda_region(const ModeParams& mode);

/// Delay at which the rightmost characteristic root reaches the imaginary
/// axis: (|Arg lambda| - pi/2) / |lambda|.  Rejects Re(lambda) >= 0.
double critical_delay(Complex lambda);

/// Frequency of the boundary crossing: +|lambda| when Arg lambda is in
/// (pi/2, pi], -|lambda| when it is in (-pi, -pi/2).
double crossing_frequency(Complex lambda);

/// Re(ds/dtau) at s = i*omega, equal to omega^2 / (1 + omega^2 tau^2).
/// Positive for every omega != 0, so boundary crossings are destabilizing.
double crossing_direction(double tau, double omega);
double crossing_direction(const ModeParams& mode, double omega);

struct RootSet {
  std::vector<Complex> roots;  // sorted by descending real part
  int branch_range = 0;        // branches -K..K were solved
  double residual_tol = 1e-10;
  std::optional<long> verified_count;  // contour-counted right-half-plane roots
};

/// Characteristic roots s = W_k(lambda*tau)/tau for k = -K..K, polished by
/// Newton steps on the characteristic function itself.  Each returned root
/// satisfies |P(s)| <= residual_tol * (1 + |s|); duplicates collapsing at a
/// branch point are removed.
RootSet char_roots(const ModeParams& mode, int branch_range);

struct SpectralAbscissa {
  double value = 0.0;                  // max real part over the solved roots
  std::optional<long> rhp_count;       // argument-principle count, if obtained
  RootSet roots;
  std::string note;                    // non-empty when the count was degraded
};

struct AbscissaOptions {
  std::size_t contour_points = 4096;
  bool require_count = false;  // throw instead of degrading to an empty count
};

/// Rightmost-root estimate plus an independent right-half-plane root count on
/// the rectangle [0, max(2|lambda|, 1)] x [-(2K+2)pi/tau, (2K+2)pi/tau].
SpectralAbscissa spectral_abscissa(const ModeParams& mode, int branch_range,
                                   const AbscissaOptions& options = {});

inline constexpr int kDefaultBranchRange = 16;

}  // namespace delaycert
