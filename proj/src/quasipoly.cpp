#include "delaycert/quasipoly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "numerics.hpp"

namespace delaycert {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBoundaryBand = 1e-12;

struct ContourCollision {};
struct NonIntegerWinding {};

// Continuous argument increment of P along the straight segment a->b,
// subdividing until each piece turns by at most pi/2.
double phase_delta(const ModeParams& mode, Complex a, Complex b, Complex pa,
                   Complex pb, int depth) {
  if (std::abs(pa) < 1e-280 || std::abs(pb) < 1e-280) throw ContourCollision{};
  const double d = std::arg(pb / pa);
  if (std::abs(d) <= 0.5 * kPi) return d;
  if (depth <= 0) throw ContourCollision{};
  const Complex mid = 0.5 * (a + b);
  const Complex pm = eval_charfun(mode, mid);
  return phase_delta(mode, a, mid, pa, pm, depth - 1) +
         phase_delta(mode, mid, b, pm, pb, depth - 1);
}

// Winding number of P around the rectangle [x_left, x_right] x [-omega, omega].
long winding_count(const ModeParams& mode, double x_left, double x_right,
                   double omega, std::size_t base_points) {
  const Complex c0(x_left, -omega), c1(x_right, -omega), c2(x_right, omega),
      c3(x_left, omega);
  const Complex corners[5] = {c0, c1, c2, c3, c0};
  const double len[4] = {x_right - x_left, 2.0 * omega, x_right - x_left,
                         2.0 * omega};
  const double perimeter = 2.0 * (len[0] + len[1]);
  double total = 0.0;
  for (int side = 0; side < 4; ++side) {
    const std::size_t n = std::max<std::size_t>(
        64, static_cast<std::size_t>(
                static_cast<double>(base_points) * len[side] / perimeter));
    Complex prev = corners[side];
    Complex pprev = eval_charfun(mode, prev);
    for (std::size_t j = 1; j <= n; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(n);
      const Complex cur =
          corners[side] + t * (corners[side + 1] - corners[side]);
      const Complex pcur = eval_charfun(mode, cur);
      total += phase_delta(mode, prev, cur, pprev, pcur, 48);
      prev = cur;
      pprev = pcur;
    }
  }
  const double w = total / (2.0 * kPi);
  const double rounded = std::round(w);
  if (std::abs(w - rounded) > 1e-3) throw NonIntegerWinding{};
  return static_cast<long>(rounded);
}

}  // namespace

ModeParams::ModeParams(Complex lambda, double tau)
    : lambda_(lambda), tau_(tau) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw std::invalid_argument("ModeParams: lambda must be finite");
  if (!(lambda.real() < 0.0))
    throw std::invalid_argument("ModeParams: Re(lambda) must be negative");
  if (!std::isfinite(tau) || !(tau > 0.0))
    throw std::invalid_argument("ModeParams: tau must be positive and finite");
}

double principal_arg(Complex z) {
  const double a = std::arg(z);
  if (a == -kPi) return kPi;
  return a;
}

Complex eval_charfun(const ModeParams& mode, Complex s) {
  return s - mode.lambda() * std::exp(-s * mode.tau());
}

RegionMembership lambda_region_membership(const ModeParams& mode) {
  RegionMembership out;
  const double abs_arg = std::abs(principal_arg(mode.lambda()));
  const double eps = abs_arg - 0.5 * kPi;  // > 0 since Re(lambda) < 0
  const double scaled = std::abs(mode.lambda()) * mode.tau();
  out.margin = eps - scaled;
  if (std::abs(out.margin) <= kBoundaryBand) {
    out.critical = true;
    out.member = false;  // strict inclusion: the boundary itself is excluded
    return out;
  }
  out.member = out.margin > 0.0;
  return out;
}

bool in_lambda_region(const ModeParams& mode) {
  return lambda_region_membership(mode).member;
}

double critical_delay(Complex lambda) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw std::invalid_argument("critical_delay: lambda must be finite");
  if (!(lambda.real() < 0.0))
    throw std::domain_error("critical_delay: requires Re(lambda) < 0");
  const double abs_arg = std::abs(principal_arg(lambda));
  return (abs_arg - 0.5 * kPi) / std::abs(lambda);
}

double crossing_frequency(Complex lambda) {
  if (!(lambda.real() < 0.0))
    throw std::domain_error("crossing_frequency: requires Re(lambda) < 0");
  const double a = principal_arg(lambda);
  return a > 0.0 ? std::abs(lambda) : -std::abs(lambda);
}

double crossing_direction(double tau, double omega) {
  if (!(tau >= 0.0))
    throw std::domain_error("crossing_direction: requires tau >= 0");
  if (omega == 0.0)
    throw std::domain_error("crossing_direction: requires omega != 0");
  const double wt = omega * tau;
  return omega * omega / (1.0 + wt * wt);
}

double crossing_direction(const ModeParams& mode, double omega) {
  return crossing_direction(mode.tau(), omega);
}

RootSet char_roots(const ModeParams& mode, int branch_range) {
  if (branch_range < 0)
    throw std::invalid_argument("char_roots: branch_range must be >= 0");
  RootSet out;
  out.branch_range = branch_range;
  const Complex z = mode.lambda() * mode.tau();
  const double tau = mode.tau();
  out.roots.reserve(2 * static_cast<std::size_t>(branch_range) + 1);
  for (int k = -branch_range; k <= branch_range; ++k) {
    Complex s;
    try {
      s = num::lambert_w(z, k) / tau;
    } catch (const std::exception& e) {
      throw std::runtime_error("char_roots: branch " + std::to_string(k) +
                               " did not converge: " + e.what());
    }
    // Newton polish on the characteristic function itself
    for (int it = 0; it < 10; ++it) {
      const Complex p = eval_charfun(mode, s);
      if (std::abs(p) <= 0.01 * out.residual_tol * (1.0 + std::abs(s))) break;
      const Complex dp = 1.0 + mode.lambda() * tau * std::exp(-s * tau);
      if (std::abs(dp) < 1e-12 * (1.0 + std::abs(s) * tau)) break;
      s -= p / dp;
    }
    if (std::abs(eval_charfun(mode, s)) >
        out.residual_tol * (1.0 + std::abs(s)))
      throw std::runtime_error("char_roots: branch " + std::to_string(k) +
                               " residual above tolerance");
    out.roots.push_back(s);
  }
  std::sort(out.roots.begin(), out.roots.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  // collapse branch-point duplicates
  std::vector<Complex> unique;
  unique.reserve(out.roots.size());
  for (const Complex& s : out.roots) {
    bool dup = false;
    for (const Complex& t : unique)
      if (std::abs(s - t) <= out.residual_tol * (1.0 + std::abs(s))) {
        dup = true;
        break;
      }
    if (!dup) unique.push_back(s);
  }
  out.roots = std::move(unique);
  return out;
}

SpectralAbscissa spectral_abscissa(const ModeParams& mode, int branch_range,
                                   const AbscissaOptions& options) {
  if (branch_range < 1)
    throw std::invalid_argument("spectral_abscissa: branch_range must be >= 1");
  SpectralAbscissa out;
  out.roots = char_roots(mode, branch_range);
  out.value = out.roots.roots.front().real();

  const double abs_lambda = std::abs(mode.lambda());
  const double x_right = std::max(2.0 * abs_lambda, 1.0);
  const double omega =
      (2.0 * branch_range + 2.0) * kPi / mode.tau();
  const double shift_scale = std::max(1.0, abs_lambda);
  const double shifts[4] = {0.0, 1e-10, 1e-8, 1e-6};
  for (double rel_shift : shifts) {
    const double x_left = rel_shift * shift_scale;
    for (std::size_t mult = 1; mult <= 4; mult *= 2) {
      try {
        const long count = winding_count(mode, x_left, x_right, omega,
                                         options.contour_points * mult);
        out.rhp_count = count;
        out.roots.verified_count = count;
        if (rel_shift > 0.0)
          out.note = "contour left edge shifted right by " +
                     std::to_string(x_left) + " to avoid an on-axis root";
        return out;
      } catch (const ContourCollision&) {
        break;  // more points cannot heal a root on the contour
      } catch (const NonIntegerWinding&) {
        continue;  // retry with a denser contour
      }
    }
  }
  if (options.require_count)
    throw std::runtime_error(
        "spectral_abscissa: contour passes through a characteristic root "
        "and perturbed retries failed");
  out.note = "right-half-plane count unavailable: contour repeatedly hit a "
             "characteristic root";
  return out;
}

}  // namespace delaycert
