#include "delaycert/resolvent.hpp"

#include <cmath>

#include "numerics.hpp"

namespace delaycert {

namespace {

// Relative proximity at which 1/P is treated as a pole.  The scale keeps the
// test meaningful for both tiny and large |s|, |lambda|.
double pole_guard(Complex p, Complex s, Complex lambda) {
  return std::abs(p) <=
                 1e-14 * (1.0 + std::abs(s) + std::abs(lambda))
             ? 0.0
             : std::abs(p);
}

}  // namespace

HistoryGrid::HistoryGrid(std::vector<Complex> samples, double tau)
    : samples_(std::move(samples)), tau_(tau) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("HistoryGrid: tau must be positive and finite");
  if (samples_.size() < 2)
    throw std::invalid_argument("HistoryGrid: at least two nodes required");
  step_ = tau_ / static_cast<double>(samples_.size() - 1);
  const double covered = step_ * static_cast<double>(samples_.size() - 1);
  if (std::abs(covered - tau_) > 1e-12 * tau_)
    throw std::invalid_argument("HistoryGrid: step*(count-1) must equal tau");
}

HistoryGrid HistoryGrid::zero(double tau, std::size_t count) {
  return HistoryGrid(std::vector<Complex>(count, Complex(0.0, 0.0)), tau);
}

HistoryGrid HistoryGrid::constant(Complex value, double tau,
                                  std::size_t count) {
  return HistoryGrid(std::vector<Complex>(count, value), tau);
}

Complex HistoryGrid::value(double sigma) const {
  const double x = (sigma + tau_) / step_;
  return num::cubic_interp(samples_, x);
}

Complex resolvent_psi(const ModeParams& mode, Complex s) {
  const Complex p = eval_charfun(mode, s);
  if (pole_guard(p, s, mode.lambda()) == 0.0)
    throw PoleError("resolvent_psi: s is a characteristic root");
  return 1.0 / p;
}

Complex resolvent_a0_apply(Complex s, const HistoryGrid& f, double r) {
  const double tau = f.tau();
  if (r < -tau - 1e-12 * tau || r > 1e-12 * tau)
    throw std::domain_error("resolvent_a0_apply: r must lie in [-tau, 0]");
  r = std::min(0.0, std::max(-tau, r));
  if (r == 0.0) return Complex(0.0, 0.0);

  const double step = f.step();
  const std::size_t n = f.count();
  // first grid node at or above r
  double pos = (r + tau) / step;
  std::size_t j0 = static_cast<std::size_t>(std::ceil(pos - 1e-9));
  if (j0 >= n) j0 = n - 1;

  const auto integrand = [&](double t, Complex ft) {
    return std::exp(s * (r - t)) * ft;
  };

  Complex acc(0.0, 0.0);
  const double t0 = f.node(j0);
  if (t0 - r > 1e-14 * tau) {
    // partial first cell [r, t0] with f linearly interpolated at r
    const std::size_t jlo = j0 > 0 ? j0 - 1 : 0;
    Complex fr;
    if (j0 == 0) {
      fr = f.samples().front();
    } else {
      const double t = (r - f.node(jlo)) / step;
      fr = (1.0 - t) * f.samples()[jlo] + t * f.samples()[j0];
    }
    acc += 0.5 * (t0 - r) * (integrand(r, fr) + integrand(t0, f.samples()[j0]));
  }
  std::vector<Complex> vals;
  vals.reserve(n - j0);
  for (std::size_t j = j0; j < n; ++j)
    vals.push_back(integrand(f.node(j), f.samples()[j]));
  acc += num::simpson_uniform(vals, step);
  return acc;
}

ResolventBlock resolvent_block_apply(const ModeParams& mode, Complex b,
                                     Complex s, std::size_t history_nodes) {
  if (history_nodes < 2)
    throw std::invalid_argument(
        "resolvent_block_apply: history_nodes must be >= 2");
  const Complex state = b * resolvent_psi(mode, s);
  std::vector<Complex> samples(history_nodes);
  const double tau = mode.tau();
  const double step = tau / static_cast<double>(history_nodes - 1);
  for (std::size_t j = 0; j < history_nodes; ++j) {
    const double sigma = -tau + static_cast<double>(j) * step;
    samples[j] = state * std::exp(s * sigma);
  }
  return ResolventBlock{state, HistoryGrid(std::move(samples), tau)};
}

double trace_norm_sq_r21(const ModeParams& mode, double omega) {
  const Complex p = eval_charfun(mode, Complex(0.0, omega));
  if (pole_guard(p, Complex(0.0, omega), mode.lambda()) == 0.0)
    throw PoleError("trace_norm_sq_r21: i*omega is a characteristic root");
  const double m = std::abs(p);
  return mode.tau() / (m * m);
}

}  // namespace delaycert
