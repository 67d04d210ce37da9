#pragma once

#include <iosfwd>
#include <random>
#include <vector>

#include "delaycert/quasipoly.hpp"
#include "delaycert/resolvent.hpp"

namespace delaycert {

/// Finitely supported input on a uniform grid over [0, support_end], extended
/// by zero beyond the support.  The squared L2 norm is the trapezoid rule on
/// the samples and is cached at construction.
class InputSignal {
 public:
  InputSignal();  // the zero signal (empty support)
  InputSignal(std::vector<Complex> samples, double step);

  const std::vector<Complex>& samples() const { return samples_; }
  double step() const { return step_; }
  double support_end() const { return support_end_; }
  double norm_sq() const { return norm_sq_; }

  /// Cubic interpolation inside the support, exactly zero outside.
  Complex value(double t) const;

 private:
  std::vector<Complex> samples_;
  double step_;
  double support_end_;
  double norm_sq_;
};

/// Forced trajectory of dz/dt = lambda z(t - tau) + b u(t) on a uniform grid.
struct Trajectory {
  ModeParams mode;
  Complex b;
  double dt = 0.0;                 // divides tau: dt = tau / n, n >= 16
  std::vector<Complex> z;          // nodes 0, dt, ..., (z.size()-1) dt
  HistoryGrid prehistory;          // resampled onto the dt grid over [-tau, 0]
  bool classical_initial = false;  // prehistory(0) matched x0 within 1e-9

  double time_at(std::size_t i) const { return static_cast<double>(i) * dt; }
  double total_time() const {
    return z.empty() ? 0.0 : static_cast<double>(z.size() - 1) * dt;
  }
  std::size_t steps_per_delay() const;
};

/// Method-of-steps integration over [0, T].  dt must divide tau with at least
/// 16 steps per delay interval; T must be nonnegative.  Delayed samples come
/// from the stored solution (or the prehistory) through cubic interpolation;
/// each step applies the classical 4-stage update.
Trajectory step_integrate(const ModeParams& mode, Complex b, Complex x0,
                          const HistoryGrid& prehistory, const InputSignal& u,
                          double T, double dt);

/// Trajectory of the scalar fundamental solution: x0 = 1, zero prehistory,
/// no input.  The initial pair (1, 0) is a mild solution, so the classical
/// continuity condition is intentionally not satisfied.
Trajectory fundamental_solution(const ModeParams& mode, double T, double dt);

struct StateNorm {
  double t = 0.0;         // node the evaluation snapped to
  double value_sq = 0.0;  // |z(t)|^2 + integral of |z(t+s)|^2 over [-tau, 0]
  bool snapped = false;   // true when the request was off the grid
};

/// Squared delayed-state norm at time t; the history integral uses the
/// trapezoid rule on the trajectory grid (prehistory for t < tau).
StateNorm state_norm(const Trajectory& traj, double t);

/// Squared L2(0, T) norm of the trajectory by composite Simpson on the grid.
double trajectory_l2_norm_sq(const Trajectory& traj);

struct ForcingNormOptions {
  double horizon_cap_taus = 200.0;
  bool require_decay = true;  // throw when the cap is hit before decay
};

/// Empirical forcing norm: integrates from rest under u, continues for at
/// least 5 tau past the support until the squared state norm falls below
/// decay_tol times its running maximum, and returns the supremum of the state
/// norm over t >= support_end.
double forcing_norm_empirical(const ModeParams& mode, Complex b,
                              const InputSignal& u, double dt,
                              double decay_tol = 1e-8,
                              const ForcingNormOptions& options = {});

struct DecayNormResult {
  double norm_sq = 0.0;  // squared L2(0, T) norm of the fundamental solution
  double horizon = 0.0;  // the T the trailing-energy rule settled on
  bool converged = false;
};

/// Fundamental-solution energy with T chosen by the trailing-energy rule: the
/// last delay window must hold less than trailing_rel of the total energy.
DecayNormResult fundamental_l2_norm_sq(const ModeParams& mode, double dt,
                                       double trailing_rel = 1e-8,
                                       double max_taus = 4000.0);

/// Columns: t, Re z, Im z, state_norm_sq.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

/// Deterministic test input: up to eight sinusoids under a Hann window
/// supported on [0, 4 tau], sampled at step dt.
InputSignal bandlimited_signal(std::mt19937_64& rng, double tau, double dt);

}  // namespace delaycert
