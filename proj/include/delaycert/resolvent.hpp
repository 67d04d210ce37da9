#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "delaycert/quasipoly.hpp"

namespace delaycert {

/// Thrown when an evaluation point sits on (or within rounding distance of) a
/// characteristic root, where the resolvent has a pole.
struct PoleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform samples of a history segment on [-tau, 0].  step * (count - 1)
/// equals tau by construction; at least two nodes are required.
class HistoryGrid {
 public:
  HistoryGrid(std::vector<Complex> samples, double tau);
  static HistoryGrid zero(double tau, std::size_t count);
  static HistoryGrid constant(Complex value, double tau, std::size_t count);

  const std::vector<Complex>& samples() const { return samples_; }
  double tau() const { return tau_; }
  double step() const { return step_; }
  std::size_t count() const { return samples_.size(); }

  /// Sample position of node j: -tau + j * step.
  double node(std::size_t j) const {
    return -tau_ + static_cast<double>(j) * step_;
  }

  /// Cubic interpolation at sigma in [-tau, 0] (clamped at the ends).
  Complex value(double sigma) const;

 private:
  std::vector<Complex> samples_;
  double tau_;
  double step_;
};

/// Scalar resolvent of the delayed generator: 1 / (s - lambda e^{-s tau}).
Complex resolvent_psi(const ModeParams& mode, Complex s);

/// History-block resolvent action: integral_r^0 e^{s(r-t)} f(t) dt evaluated
/// by composite Simpson on the grid restricted to [r, 0], with linear
/// interpolation of f at the cut node.  r must lie in [-tau, 0].
Complex resolvent_a0_apply(Complex s, const HistoryGrid& f, double r);

struct ResolventBlock {
  Complex state;        // b / (s - lambda e^{-s tau})
  HistoryGrid history;  // state * e^{s sigma} sampled on [-tau, 0]
};

ResolventBlock resolvent_block_apply(const ModeParams& mode, Complex b,
                                     Complex s,
                                     std::size_t history_nodes = 129);

/// Squared boundary-trace norm of the adjoint off-diagonal resolvent block on
/// the imaginary axis: tau / |i omega - lambda e^{-i omega tau}|^2.
double trace_norm_sq_r21(const ModeParams& mode, double omega);

}  // namespace delaycert
