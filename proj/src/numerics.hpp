#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace delaycert {
namespace num {

using Complex = std::complex<double>;

/// Lambert W on branch k: solves w*exp(w) = z.  Halley iteration from the
/// standard asymptotic branch seed; series seed near the origin on branch 0.
/// Throws std::runtime_error naming the branch when iteration stalls.
Complex lambert_w(Complex z, int branch);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (G7,K15) over the segments defined by consecutive
/// breakpoints.  Refines the worst segment until the summed error estimate
/// drops below max(abs_tol, rel_tol*|value|) or max_intervals is exhausted.
QuadResult integrate_adaptive(const std::function<double(double)>& f,
                              const std::vector<double>& breakpoints,
                              double rel_tol, double abs_tol,
                              std::size_t max_intervals);

/// Composite Simpson over uniformly spaced samples with spacing h.
/// Odd interval counts use a 3/8 closing panel; a single interval falls back
/// to the trapezoid.  Exact for cubics when the interval count is even.
Complex simpson_uniform(const std::vector<Complex>& samples, double h);
double simpson_uniform_real(const std::vector<double>& samples, double h);

/// Trapezoid over uniformly spaced real samples.
double trapezoid_uniform(const std::vector<double>& samples, double h);

/// Cubic Lagrange interpolation of uniformly sampled data at position x,
/// where x is measured in grid units from samples[0] (node j sits at x = j).
/// The four-point stencil is clamped to the sample range.
Complex cubic_interp(const std::vector<Complex>& samples, double x);
Complex cubic_interp(const Complex* samples, std::size_t count, double x);

/// Golden-section minimizer on [lo, hi] down to absolute width tol.
/// Assumes a unimodal objective; callers seed the bracket from a coarse scan.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol);

/// Uniform double in [0, 1) from the top 53 bits of the engine output, so
/// streams do not depend on library distribution internals.
template <class Engine> double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace num
}  // namespace delaycert
