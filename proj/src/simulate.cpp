#include "delaycert/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "numerics.hpp"

namespace delaycert {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::size_t aligned_steps_per_delay(double tau, double dt) {
  if (!(dt > 0.0))
    throw std::invalid_argument("simulate: dt must be positive");
  const double ratio = tau / dt;
  const auto n = static_cast<std::size_t>(std::llround(ratio));
  if (n < 16)
    throw std::invalid_argument(
        "simulate: dt must give at least 16 steps per delay interval");
  if (std::abs(static_cast<double>(n) * dt - tau) > 1e-9 * tau)
    throw std::invalid_argument(
        "simulate: dt must divide tau (dt = tau/n)");
  return n;
}

// Method-of-steps state: the right-hand side at time t needs only z(t - tau),
// which is always in the already-computed part of the grid (or the
// prehistory), so each 4-stage step closes without implicit solves.
class Stepper {
 public:
  Stepper(const ModeParams& mode, Complex b, Complex x0,
          const HistoryGrid& prehistory, const InputSignal& u, double dt)
      : mode_(mode), b_(b), u_(u), dt_(dt),
        n_(aligned_steps_per_delay(mode.tau(), dt)) {
    pre_.resize(n_ + 1);
    if (prehistory.count() == n_ + 1) {
      pre_ = prehistory.samples();
    } else {
      for (std::size_t j = 0; j <= n_; ++j)
        pre_[j] = prehistory.value(-mode.tau() +
                                   static_cast<double>(j) * dt_);
    }
    z_.reserve(1024);
    z_.push_back(x0);
    classical_ = std::abs(pre_.back() - x0) <= 1e-9;
  }

  std::size_t steps_per_delay() const { return n_; }
  bool classical_initial() const { return classical_; }
  const std::vector<Complex>& z() const { return z_; }

  // z(t - tau) at t = (i + frac) dt, where i+frac is the step position.
  // `seg` is the segment of the step being integrated; it pins the delayed
  // values to one smooth piece, so the initial jump at t = 0 and the corner
  // at each later seam never leak across a step.
  Complex delayed(double pos, std::size_t seg) const {
    if (seg == 0) {
      // delayed argument lies in [-tau, 0]: the prehistory owns that
      // interval, including its right endpoint
      return num::cubic_interp(pre_, pos);
    }
    const double shifted = pos - static_cast<double>(n_);
    const double r = std::round(shifted);
    if (std::abs(shifted - r) < 1e-9 && r >= 0.0 &&
        r < static_cast<double>(z_.size()))
      return z_[static_cast<std::size_t>(r)];
    const std::size_t lo = (seg - 1) * n_;
    return num::cubic_interp(z_.data() + lo, n_ + 1, shifted -
                             static_cast<double>(lo));
  }

  void advance(std::size_t steps) {
    for (std::size_t s = 0; s < steps; ++s) {
      const std::size_t base = z_.size() - 1;
      const std::size_t seg = base / n_;
      const auto i = static_cast<double>(base);
      const double t = i * dt_;
      const Complex k1 = rhs(i, t, seg);
      const Complex kmid = rhs(i + 0.5, t + 0.5 * dt_, seg);
      const Complex k4 = rhs(i + 1.0, t + dt_, seg);
      z_.push_back(z_.back() + (dt_ / 6.0) * (k1 + 4.0 * kmid + k4));
    }
  }

  Trajectory finish() && {
    return Trajectory{mode_, b_, dt_, std::move(z_),
                      HistoryGrid(std::move(pre_), mode_.tau()), classical_};
  }

 private:
  Complex rhs(double pos, double t, std::size_t seg) const {
    return mode_.lambda() * delayed(pos, seg) + b_ * u_.value(t);
  }

  ModeParams mode_;
  Complex b_;
  const InputSignal& u_;
  double dt_;
  std::size_t n_;
  std::vector<Complex> pre_;
  std::vector<Complex> z_;
  bool classical_ = false;
};

double window_norm_sq(const std::vector<Complex>& z,
                      const std::vector<Complex>& pre, std::size_t n,
                      double dt, std::size_t i) {
  // trapezoid over the delay window ending at node i; negative indices fall
  // into the prehistory
  double acc = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const auto idx = static_cast<long>(i) - static_cast<long>(n) +
                     static_cast<long>(j);
    const double v =
        idx >= 0 ? std::norm(z[static_cast<std::size_t>(idx)])
                 : std::norm(pre[static_cast<std::size_t>(
                       static_cast<long>(n) + idx)]);
    acc += (j == 0 || j == n) ? 0.5 * v : v;
  }
  return acc * dt;
}

}  // namespace

InputSignal::InputSignal()
    : samples_(), step_(0.0), support_end_(0.0), norm_sq_(0.0) {}

InputSignal::InputSignal(std::vector<Complex> samples, double step)
    : samples_(std::move(samples)), step_(step) {
  if (!samples_.empty() && !(step_ > 0.0))
    throw std::invalid_argument("InputSignal: step must be positive");
  support_end_ =
      samples_.empty() ? 0.0
                       : step_ * static_cast<double>(samples_.size() - 1);
  std::vector<double> sq(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i)
    sq[i] = std::norm(samples_[i]);
  norm_sq_ = num::trapezoid_uniform(sq, step_);
}

Complex InputSignal::value(double t) const {
  if (samples_.empty() || t < 0.0 || t > support_end_) return Complex(0.0, 0.0);
  return num::cubic_interp(samples_, t / step_);
}

std::size_t Trajectory::steps_per_delay() const {
  return aligned_steps_per_delay(mode.tau(), dt);
}

Trajectory step_integrate(const ModeParams& mode, Complex b, Complex x0,
                          const HistoryGrid& prehistory, const InputSignal& u,
                          double T, double dt) {
  if (!(T >= 0.0))
    throw std::invalid_argument("step_integrate: T must be nonnegative");
  if (std::abs(prehistory.tau() - mode.tau()) > 1e-12 * mode.tau())
    throw std::invalid_argument(
        "step_integrate: prehistory covers a different delay interval");
  Stepper stepper(mode, b, x0, prehistory, u, dt);
  const double steps_exact = T / dt;
  auto steps = static_cast<std::size_t>(std::llround(steps_exact));
  if (std::abs(static_cast<double>(steps) - steps_exact) > 1e-9)
    steps = static_cast<std::size_t>(std::ceil(steps_exact - 1e-9));
  stepper.advance(steps);
  return std::move(stepper).finish();
}

Trajectory fundamental_solution(const ModeParams& mode, double T, double dt) {
  const std::size_t n = aligned_steps_per_delay(mode.tau(), dt);
  return step_integrate(mode, Complex(0.0, 0.0), Complex(1.0, 0.0),
                        HistoryGrid::zero(mode.tau(), n + 1), InputSignal(), T,
                        dt);
}

StateNorm state_norm(const Trajectory& traj, double t) {
  StateNorm out;
  const double dt = traj.dt;
  const std::size_t n = traj.steps_per_delay();
  const double pos = t / dt;
  const auto i = static_cast<long>(std::llround(pos));
  if (i < 0 || i >= static_cast<long>(traj.z.size()))
    throw std::domain_error("state_norm: t outside the computed trajectory");
  out.snapped = std::abs(pos - static_cast<double>(i)) > 1e-9;
  out.t = static_cast<double>(i) * dt;
  const auto idx = static_cast<std::size_t>(i);
  out.value_sq = std::norm(traj.z[idx]) +
                 window_norm_sq(traj.z, traj.prehistory.samples(), n, dt, idx);
  return out;
}

double trajectory_l2_norm_sq(const Trajectory& traj) {
  std::vector<double> sq(traj.z.size());
  for (std::size_t i = 0; i < traj.z.size(); ++i) sq[i] = std::norm(traj.z[i]);
  return num::simpson_uniform_real(sq, traj.dt);
}

double forcing_norm_empirical(const ModeParams& mode, Complex b,
                              const InputSignal& u, double dt,
                              double decay_tol,
                              const ForcingNormOptions& options) {
  if (!(decay_tol > 0.0 && decay_tol < 1.0))
    throw std::invalid_argument(
        "forcing_norm_empirical: decay_tol must be in (0, 1)");
  const double tau = mode.tau();
  const std::size_t n = aligned_steps_per_delay(tau, dt);
  Stepper stepper(mode, b, Complex(0.0, 0.0),
                  HistoryGrid::zero(tau, n + 1), u, dt);
  const double t_min = u.support_end() + 5.0 * tau;
  const auto max_segments = static_cast<std::size_t>(
      std::ceil(options.horizon_cap_taus));
  const std::vector<Complex>& z = stepper.z();
  const std::vector<Complex> pre(n + 1, Complex(0.0, 0.0));

  double max_sq = 0.0;
  double max_tail_sq = 0.0;  // max over nodes at or past the support end
  const auto tail_start = static_cast<std::size_t>(
      std::ceil(u.support_end() / dt - 1e-9));
  std::size_t scanned = 0;
  bool decayed = false;
  for (std::size_t seg = 0; seg < max_segments && !decayed; ++seg) {
    stepper.advance(n);
    double last_sq = 0.0;
    for (; scanned < z.size(); ++scanned) {
      const double v = std::norm(z[scanned]) +
                       window_norm_sq(z, pre, n, dt, scanned);
      max_sq = std::max(max_sq, v);
      if (scanned >= tail_start) max_tail_sq = std::max(max_tail_sq, v);
      last_sq = v;
    }
    const double t_end = static_cast<double>(z.size() - 1) * dt;
    if (t_end >= t_min && last_sq <= decay_tol * max_sq) decayed = true;
  }
  if (!decayed && options.require_decay)
    throw std::runtime_error(
        "forcing_norm_empirical: state norm did not decay below tolerance "
        "within the horizon cap");
  return std::sqrt(max_tail_sq);
}

DecayNormResult fundamental_l2_norm_sq(const ModeParams& mode, double dt,
                                       double trailing_rel, double max_taus) {
  const double tau = mode.tau();
  const std::size_t n = aligned_steps_per_delay(tau, dt);
  Stepper stepper(mode, Complex(0.0, 0.0), Complex(1.0, 0.0),
                  HistoryGrid::zero(tau, n + 1), InputSignal(), dt);
  const std::vector<Complex>& z = stepper.z();
  const auto max_segments =
      static_cast<std::size_t>(std::ceil(max_taus));
  DecayNormResult out;
  double total = 0.0;
  for (std::size_t seg = 0; seg < max_segments; ++seg) {
    stepper.advance(n);
    std::vector<double> sq(n + 1);
    const std::size_t base = seg * n;
    for (std::size_t j = 0; j <= n; ++j) sq[j] = std::norm(z[base + j]);
    const double seg_energy = num::simpson_uniform_real(sq, dt);
    total += seg_energy;
    out.horizon = static_cast<double>(z.size() - 1) * dt;
    if (seg >= 1 && seg_energy < trailing_rel * total) {
      out.converged = true;
      break;
    }
  }
  out.norm_sq = total;
  return out;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << "t,z_re,z_im,state_norm_sq\n";
  char buf[160];
  for (std::size_t i = 0; i < traj.z.size(); ++i) {
    const StateNorm sn = state_norm(traj, traj.time_at(i));
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n",
                  traj.time_at(i), traj.z[i].real(), traj.z[i].imag(),
                  sn.value_sq);
    out << buf;
  }
}

InputSignal bandlimited_signal(std::mt19937_64& rng, double tau, double dt) {
  const std::size_t n = aligned_steps_per_delay(tau, dt);
  const std::size_t count = 4 * n + 1;
  const double support = 4.0 * tau;
  const auto terms =
      static_cast<std::size_t>(1 + static_cast<std::size_t>(
                                       num::uniform01(rng) * 8.0) % 8);
  std::vector<double> freq(terms), phase(terms), amp(terms);
  for (std::size_t j = 0; j < terms; ++j) {
    freq[j] = (0.25 + 5.75 * num::uniform01(rng)) / tau;
    phase[j] = 2.0 * kPi * num::uniform01(rng);
    amp[j] = 0.3 + 0.7 * num::uniform01(rng);
  }
  std::vector<Complex> samples(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double window = 0.5 * (1.0 - std::cos(2.0 * kPi * t / support));
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < terms; ++j)
      acc += amp[j] * std::exp(Complex(0.0, freq[j] * t + phase[j]));
    samples[i] = window * acc;
  }
  return InputSignal(std::move(samples), dt);
}

}  // namespace delaycert
