#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "delaycert/admissibility.hpp"
#include "delaycert/quasipoly.hpp"
#include "delaycert/resolvent.hpp"
#include "delaycert/simulate.hpp"

using delaycert::Complex;
using delaycert::HistoryGrid;
using delaycert::InputSignal;
using delaycert::ModeParams;
using delaycert::Trajectory;

namespace {

Complex node_of(const Trajectory& traj, double t) {
  const auto i = static_cast<std::size_t>(std::llround(t / traj.dt));
  REQUIRE(i < traj.z.size());
  REQUIRE(std::abs(traj.time_at(i) - t) < 1e-12);
  return traj.z[i];
}

}  // namespace

TEST_CASE("input signal stores support and trapezoid energy") {
  const InputSignal zero;
  CHECK(zero.norm_sq() == 0.0);
  CHECK(zero.support_end() == 0.0);
  CHECK(zero.value(0.3) == Complex(0.0, 0.0));

  // samples of u(t) = 2t on [0, 1]
  std::vector<Complex> ramp;
  for (int i = 0; i <= 4; ++i) ramp.emplace_back(0.5 * i, 0.0);
  const InputSignal u(ramp, 0.25);
  CHECK(u.support_end() == doctest::Approx(1.0).epsilon(1e-15));
  // trapezoid rule on |u|^2 samples {0, 1/4, 1, 9/4, 4}
  CHECK(u.norm_sq() == doctest::Approx(1.375).epsilon(1e-14));
  CHECK(std::abs(u.value(0.3) - Complex(0.6, 0.0)) < 1e-12);
  CHECK(u.value(-0.1) == Complex(0.0, 0.0));
  CHECK(u.value(1.2) == Complex(0.0, 0.0));

  CHECK_THROWS_AS(InputSignal({Complex(1.0, 0.0)}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("step integration rejects bad grids and horizons") {
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  const HistoryGrid pre = HistoryGrid::zero(1.0, 65);
  const InputSignal u;
  // fewer than 16 steps per delay interval
  CHECK_THROWS_AS(
      delaycert::step_integrate(mode, Complex(0, 0), Complex(1, 0), pre, u,
                                1.0, 0.25),
      std::invalid_argument);
  // dt does not divide tau
  CHECK_THROWS_AS(
      delaycert::step_integrate(mode, Complex(0, 0), Complex(1, 0), pre, u,
                                1.0, (1.0 + 1e-5) / 64.0),
      std::invalid_argument);
  // negative horizon
  CHECK_THROWS_AS(
      delaycert::step_integrate(mode, Complex(0, 0), Complex(1, 0), pre, u,
                                -1.0, 1.0 / 64.0),
      std::invalid_argument);
  // prehistory built for a different delay interval
  CHECK_THROWS_AS(
      delaycert::step_integrate(mode, Complex(0, 0), Complex(1, 0),
                                HistoryGrid::zero(2.0, 65), u, 1.0,
                                1.0 / 64.0),
      std::invalid_argument);
}

TEST_CASE("integration reproduces the piecewise-polynomial solution exactly") {
  // dz/dt = -z(t-1), z = 1 on [-1, 0]: the solution is 1 - t on [0, 1] and
  // 1 - t + (t-1)^2/2 on [1, 2]
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  const double dt = 1.0 / 64.0;
  const Trajectory traj = delaycert::step_integrate(
      mode, Complex(0.0, 0.0), Complex(1.0, 0.0),
      HistoryGrid::constant(Complex(1.0, 0.0), 1.0, 65), InputSignal(), 2.0,
      dt);
  CHECK(traj.classical_initial);
  CHECK(traj.total_time() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(node_of(traj, 0.5) - Complex(0.5, 0.0)) < 1e-13);
  CHECK(std::abs(node_of(traj, 1.0) - Complex(0.0, 0.0)) < 1e-13);
  CHECK(std::abs(node_of(traj, 1.5) - Complex(-0.375, 0.0)) < 1e-13);
  CHECK(std::abs(node_of(traj, 2.0) - Complex(-0.5, 0.0)) < 1e-13);
}

TEST_CASE("fundamental solution carries the initial jump exactly") {
  // x0 = 1 over a zero prehistory: z = 1 on [0, 1], 2 - t on [1, 2], and
  // t^2/2 - 3t + 4 on [2, 3]
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  const Trajectory traj =
      delaycert::fundamental_solution(mode, 3.0, 1.0 / 64.0);
  CHECK_FALSE(traj.classical_initial);
  CHECK(std::abs(node_of(traj, 0.0) - Complex(1.0, 0.0)) == 0.0);
  CHECK(std::abs(node_of(traj, 1.0) - Complex(1.0, 0.0)) < 1e-13);
  CHECK(std::abs(node_of(traj, 1.5) - Complex(0.5, 0.0)) < 1e-13);
  CHECK(std::abs(node_of(traj, 2.0) - Complex(0.0, 0.0)) < 1e-13);
  CHECK(std::abs(node_of(traj, 3.0) - Complex(-0.5, 0.0)) < 1e-13);
}

TEST_CASE("fundamental solution decays at the spectral rate") {
  // rightmost characteristic root has real part -0.318...; the envelope
  // 5 e^{-0.3 t} leaves margin for the oscillatory amplitude
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  const Trajectory traj =
      delaycert::fundamental_solution(mode, 60.0, 1.0 / 64.0);
  for (std::size_t i = 0; i < traj.z.size(); ++i) {
    const double t = traj.time_at(i);
    if (t < 20.0) continue;
    CHECK(std::abs(traj.z[i]) <= 5.0 * std::exp(-0.3 * t));
  }
}

TEST_CASE("trajectories are linear in the forcing and the initial data") {
  const ModeParams mode(Complex(-0.8, 0.3), 1.0);
  const Complex b(0.7, -0.2);
  const double dt = 1.0 / 64.0;
  std::vector<Complex> pre_samples(65);
  for (int j = 0; j <= 64; ++j)
    pre_samples[static_cast<std::size_t>(j)] =
        Complex(std::sin(0.3 * j), 0.1 * j / 64.0);
  const HistoryGrid pre(pre_samples, 1.0);
  const Complex x0(0.4, 0.1);
  std::mt19937_64 rng(20240817);
  const InputSignal u = delaycert::bandlimited_signal(rng, 1.0, dt);

  const Trajectory full =
      delaycert::step_integrate(mode, b, x0, pre, u, 5.0, dt);
  const Trajectory homog =
      delaycert::step_integrate(mode, b, x0, pre, InputSignal(), 5.0, dt);
  const Trajectory forced = delaycert::step_integrate(
      mode, b, Complex(0, 0), HistoryGrid::zero(1.0, 65), u, 5.0, dt);
  REQUIRE(full.z.size() == homog.z.size());
  REQUIRE(full.z.size() == forced.z.size());
  for (std::size_t i = 0; i < full.z.size(); ++i)
    CHECK(std::abs(full.z[i] - (homog.z[i] + forced.z[i])) <=
          1e-10 * (1.0 + std::abs(full.z[i])));

  // doubling the input doubles the forced response
  std::vector<Complex> doubled(u.samples());
  for (Complex& v : doubled) v *= 2.0;
  const InputSignal u2(doubled, u.step());
  const Trajectory forced2 = delaycert::step_integrate(
      mode, b, Complex(0, 0), HistoryGrid::zero(1.0, 65), u2, 5.0, dt);
  for (std::size_t i = 0; i < forced.z.size(); ++i)
    CHECK(std::abs(forced2.z[i] - 2.0 * forced.z[i]) <=
          1e-10 * (1.0 + std::abs(forced2.z[i])));
}

TEST_CASE("state norm combines the point value with the history window") {
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  const double dt = 1.0 / 64.0;

  // the rest trajectory has zero norm everywhere
  const Trajectory rest = delaycert::step_integrate(
      mode, Complex(0, 0), Complex(0, 0), HistoryGrid::zero(1.0, 65),
      InputSignal(), 3.0, dt);
  CHECK(delaycert::state_norm(rest, 2.0).value_sq == 0.0);

  // a constant unit trajectory with unit prehistory: 1 + tau everywhere
  Trajectory ones{mode, Complex(0, 0), dt,
                  std::vector<Complex>(193, Complex(1.0, 0.0)),
                  HistoryGrid::constant(Complex(1.0, 0.0), 1.0, 65), true};
  CHECK(delaycert::state_norm(ones, 0.0).value_sq ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(delaycert::state_norm(ones, 2.0).value_sq ==
        doctest::Approx(2.0).epsilon(1e-14));

  // fundamental solution at t = 1: |z(1)|^2 = 1 plus unit energy on [0, 1]
  const Trajectory fund =
      delaycert::fundamental_solution(mode, 2.0, dt);
  const delaycert::StateNorm at1 = delaycert::state_norm(fund, 1.0);
  CHECK_FALSE(at1.snapped);
  CHECK(at1.t == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(at1.value_sq == doctest::Approx(2.0).epsilon(1e-13));

  // off-grid requests snap to the nearest node and say so
  const delaycert::StateNorm off =
      delaycert::state_norm(fund, 1.0 + 0.3 * dt);
  CHECK(off.snapped);
  CHECK(off.t == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(delaycert::state_norm(fund, 5.0), std::domain_error);
  CHECK_THROWS_AS(delaycert::state_norm(fund, -0.5), std::domain_error);
}

TEST_CASE("empirical forcing norm vanishes without excitation") {
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  const double dt = 1.0 / 64.0;
  CHECK(delaycert::forcing_norm_empirical(mode, Complex(1, 0), InputSignal(),
                                          dt) == 0.0);
  std::mt19937_64 rng(7);
  const InputSignal u = delaycert::bandlimited_signal(rng, 1.0, dt);
  CHECK(delaycert::forcing_norm_empirical(mode, Complex(0, 0), u, dt) == 0.0);
}

TEST_CASE("empirical forcing norm respects the admissibility constant") {
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  const double dt = 1.0 / 64.0;
  const double C = delaycert::mode_bound(mode, Complex(1.0, 0.0)).C;
  const InputSignal u(std::vector<Complex>(65, Complex(1.0, 0.0)), dt);
  CHECK(u.norm_sq() == doctest::Approx(1.0).epsilon(1e-14));
  const double sup =
      delaycert::forcing_norm_empirical(mode, Complex(1.0, 0.0), u, dt);
  CHECK(sup > 0.05);  // the response is not trivial
  CHECK(sup * sup <= C * u.norm_sq() * 1.05);
}

TEST_CASE("empirical forcing norm reports a horizon that is too short") {
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  const double dt = 1.0 / 64.0;
  const InputSignal u(std::vector<Complex>(65, Complex(1.0, 0.0)), dt);
  delaycert::ForcingNormOptions tight;
  tight.horizon_cap_taus = 6.0;
  CHECK_THROWS_AS(
      delaycert::forcing_norm_empirical(mode, Complex(1, 0), u, dt, 1e-12,
                                        tight),
      std::runtime_error);
  tight.require_decay = false;
  const double partial = delaycert::forcing_norm_empirical(
      mode, Complex(1, 0), u, dt, 1e-12, tight);
  CHECK(partial > 0.0);
}

TEST_CASE("fundamental energy matches the frequency-domain integral") {
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  const delaycert::FrequencyIntegral fi =
      delaycert::frequency_integral(mode, 1e-6);
  const delaycert::DecayNormResult fund =
      delaycert::fundamental_l2_norm_sq(mode, 1.0 / 64.0);
  CHECK(fund.converged);
  CHECK(std::abs(fund.norm_sq - fi.value) <= 1e-3 * fi.value);
}

TEST_CASE("fundamental energy converges under grid refinement") {
  // pin the horizon so only the step size changes between runs
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  const auto energy = [&](double dt) {
    return delaycert::fundamental_l2_norm_sq(mode, dt, 1e-12, 40.0).norm_sq;
  };
  const double e64 = energy(1.0 / 64.0);
  const double e128 = energy(1.0 / 128.0);
  const double e256 = energy(1.0 / 256.0);
  const double d1 = std::abs(e64 - e128);
  const double d2 = std::abs(e128 - e256);
  REQUIRE(d2 > 0.0);
  CHECK(d1 / d2 >= 3.0);
}

TEST_CASE("trajectory csv lists time, state, and norm columns") {
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  const Trajectory traj =
      delaycert::fundamental_solution(mode, 2.0, 1.0 / 32.0);
  std::ostringstream out;
  delaycert::write_trajectory_csv(traj, out);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "t,z_re,z_im,state_norm_sq");
  std::size_t rows = 0;
  double t, re, im, sq;
  char c;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    REQUIRE((row >> t >> c >> re >> c >> im >> c >> sq));
    if (rows == 0) {
      CHECK(t == 0.0);
      CHECK(re == 1.0);
      CHECK(im == 0.0);
    }
    ++rows;
  }
  CHECK(rows == traj.z.size());
}

TEST_CASE("bandlimited test signals are seeded and windowed") {
  const double dt = 1.0 / 64.0;
  std::mt19937_64 a(99), b(99), c(100);
  const InputSignal ua = delaycert::bandlimited_signal(a, 1.0, dt);
  const InputSignal ub = delaycert::bandlimited_signal(b, 1.0, dt);
  const InputSignal uc = delaycert::bandlimited_signal(c, 1.0, dt);
  REQUIRE(ua.samples().size() == ub.samples().size());
  for (std::size_t i = 0; i < ua.samples().size(); ++i)
    CHECK(ua.samples()[i] == ub.samples()[i]);
  CHECK(ua.support_end() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(ua.norm_sq() > 0.0);
  // the window pins both ends of the support to zero
  CHECK(std::abs(ua.samples().front()) == 0.0);
  CHECK(std::abs(ua.samples().back()) < 1e-12);
  // a different seed gives a different signal
  bool differs = false;
  for (std::size_t i = 0; i < ua.samples().size(); ++i)
    if (ua.samples()[i] != uc.samples()[i]) differs = true;
  CHECK(differs);
}
