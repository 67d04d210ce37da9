#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "delaycert/quasipoly.hpp"
#include "delaycert/resolvent.hpp"
#include "oracles.hpp"

using delaycert::Complex;
using delaycert::HistoryGrid;
using delaycert::ModeParams;

namespace {
constexpr double kPi = 3.14159265358979323846;

HistoryGrid sampled(double tau, std::size_t count,
                    const std::function<Complex(double)>& f) {
  std::vector<Complex> v(count);
  for (std::size_t j = 0; j < count; ++j)
    v[j] = f(-tau + tau * static_cast<double>(j) /
                       static_cast<double>(count - 1));
  return HistoryGrid(std::move(v), tau);
}
}  // namespace

TEST_CASE("history grid validates its geometry") {
  CHECK_THROWS(HistoryGrid(std::vector<Complex>{Complex(1.0, 0.0)}, 1.0));
  CHECK_THROWS(HistoryGrid(std::vector<Complex>(5, Complex(0.0, 0.0)), 0.0));
  const HistoryGrid g = HistoryGrid::constant(Complex(2.0, 0.0), 1.5, 7);
  CHECK(g.count() == 7);
  CHECK(g.step() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(g.value(-0.37) - Complex(2.0, 0.0)) < 1e-12);
}

TEST_CASE("scalar resolvent is the reciprocal characteristic function") {
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  CHECK(std::abs(delaycert::resolvent_psi(mode, Complex(0.0, 0.0)) -
                 Complex(1.0, 0.0)) < 1e-15);

  // 1/(cos 1 + i(1 - sin 1)) spelled out in the test's own arithmetic
  const Complex expected =
      1.0 / Complex(std::cos(1.0), 1.0 - std::sin(1.0));
  CHECK(std::abs(delaycert::resolvent_psi(mode, Complex(0.0, 1.0)) -
                 expected) < 1e-14);

  const ModeParams boundary(std::polar(kPi / 4.0, 3.0 * kPi / 4.0), 1.0);
  CHECK_THROWS_AS(delaycert::resolvent_psi(boundary, Complex(0.0, kPi / 4.0)),
                  delaycert::PoleError);
}

TEST_CASE("resolvent identity on random points") {
  std::mt19937_64 rng(811);
  const ModeParams mode(Complex(-0.7, 0.3), 0.8);
  for (int trial = 0; trial < 100; ++trial) {
    const Complex s1(4.0 * oracle::uniform01(rng) - 2.0,
                     6.0 * oracle::uniform01(rng) - 3.0);
    const Complex s2(4.0 * oracle::uniform01(rng) - 2.0,
                     6.0 * oracle::uniform01(rng) - 3.0);
    if (std::abs(s1 - s2) < 1e-3) continue;
    const Complex p1 = delaycert::eval_charfun(mode, s1);
    const Complex p2 = delaycert::eval_charfun(mode, s2);
    if (std::abs(p1) < 1e-3 || std::abs(p2) < 1e-3) continue;
    const Complex r1 = delaycert::resolvent_psi(mode, s1);
    const Complex r2 = delaycert::resolvent_psi(mode, s2);
    CHECK(std::abs((r1 - r2) - r1 * (p2 - p1) * r2) <=
          1e-12 * (1.0 + std::abs(r1) * std::abs(r2)));
  }
}

TEST_CASE("history integral operator") {
  const double tau = 1.0;
  const HistoryGrid zero = HistoryGrid::zero(tau, 129);
  CHECK(std::abs(delaycert::resolvent_a0_apply(Complex(0.3, 1.1), zero,
                                               -0.4)) == 0.0);

  // s = 0, f = 1: plain length of the interval
  const HistoryGrid ones = HistoryGrid::constant(Complex(1.0, 0.0), tau, 257);
  CHECK(std::abs(delaycert::resolvent_a0_apply(Complex(0.0, 0.0), ones,
                                               -tau) -
                 Complex(tau, 0.0)) < 1e-10);

  // s = 1, f(t) = e^t: integrand collapses to the constant e^r
  const HistoryGrid expgrid =
      sampled(tau, 257, [](double t) { return Complex(std::exp(t), 0.0); });
  CHECK(std::abs(delaycert::resolvent_a0_apply(Complex(1.0, 0.0), expgrid,
                                               -1.0) -
                 Complex(0.36787944117144233, 0.0)) < 1e-9);

  // r = 0 integrates over nothing
  CHECK(std::abs(delaycert::resolvent_a0_apply(Complex(1.0, 0.0), expgrid,
                                               0.0)) == 0.0);
  CHECK_THROWS(delaycert::resolvent_a0_apply(Complex(0.0, 0.0), ones, -1.5));
  CHECK_THROWS(delaycert::resolvent_a0_apply(Complex(0.0, 0.0), ones, 0.5));
}

TEST_CASE("history integral against dense quadrature on random data") {
  std::mt19937_64 rng(822);
  const double tau = 1.3;
  const auto f = [](double t) {
    return Complex(std::sin(3.0 * t) + 0.2, std::cos(2.0 * t));
  };
  const HistoryGrid grid = sampled(tau, 513, f);
  for (int trial = 0; trial < 12; ++trial) {
    const Complex s(2.0 * oracle::uniform01(rng) - 1.0,
                    4.0 * oracle::uniform01(rng) - 2.0);
    const double r = -tau + (tau - 1e-3) * oracle::uniform01(rng);
    const Complex got = delaycert::resolvent_a0_apply(s, grid, r);
    const auto re = [&](double t) {
      return (std::exp(s * (r - t)) * f(t)).real();
    };
    const auto im = [&](double t) {
      return (std::exp(s * (r - t)) * f(t)).imag();
    };
    const Complex want(oracle::integrate(re, r, 0.0),
                       oracle::integrate(im, r, 0.0));
    CHECK(std::abs(got - want) < 2e-5 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("history integral refines at second order or better") {
  // s = 2 keeps the integrand genuinely curved: e^{2(r-t)} e^t = e^{-2} e^{-t}
  const double tau = 1.0;
  const auto f = [](double t) { return Complex(std::exp(t), 0.0); };
  const Complex s(2.0, 0.0);
  const Complex exact(std::exp(-2.0) * (std::exp(1.0) - 1.0), 0.0);
  double prev_err = -1.0;
  for (std::size_t count : {33, 65, 129}) {
    const double err =
        std::abs(delaycert::resolvent_a0_apply(s, sampled(tau, count, f),
                                               -1.0) -
                 exact);
    if (prev_err > 0.0) CHECK(prev_err / err >= 3.0);
    prev_err = err;
  }
}

TEST_CASE("input block of the resolvent") {
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  const delaycert::ResolventBlock zero =
      delaycert::resolvent_block_apply(mode, Complex(0.0, 0.0),
                                       Complex(0.4, 0.2));
  CHECK(std::abs(zero.state) == 0.0);
  for (std::size_t j = 0; j < zero.history.count(); ++j)
    CHECK(std::abs(zero.history.samples()[j]) == 0.0);

  const delaycert::ResolventBlock unit =
      delaycert::resolvent_block_apply(mode, Complex(1.0, 0.0),
                                       Complex(0.0, 0.0));
  CHECK(std::abs(unit.state - Complex(1.0, 0.0)) < 1e-14);
  for (std::size_t j = 0; j < unit.history.count(); ++j)
    CHECK(std::abs(unit.history.samples()[j] - Complex(1.0, 0.0)) < 1e-14);

  const delaycert::ResolventBlock two =
      delaycert::resolvent_block_apply(mode, Complex(2.0, 0.0),
                                       Complex(1.0, 0.0));
  CHECK(std::abs(two.state - Complex(1.4621171572600098, 0.0)) < 1e-12);
  // history nodes carry the exponential profile state * e^{s sigma}
  const double sigma = -0.5;
  CHECK(std::abs(two.history.value(sigma) -
                 two.state * std::exp(Complex(1.0, 0.0) * sigma)) < 1e-6);

  const ModeParams boundary(std::polar(kPi / 4.0, 3.0 * kPi / 4.0), 1.0);
  CHECK_THROWS_AS(delaycert::resolvent_block_apply(
                      boundary, Complex(1.0, 0.0), Complex(0.0, kPi / 4.0)),
                  delaycert::PoleError);
}

TEST_CASE("boundary trace norm closed form") {
  const ModeParams mode(Complex(-1.0, 0.0), 1.0);
  CHECK(delaycert::trace_norm_sq_r21(mode, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  const ModeParams wide(Complex(-1.0, 0.0), 2.0);
  CHECK(delaycert::trace_norm_sq_r21(wide, 0.0) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(delaycert::trace_norm_sq_r21(mode, 1.0) ==
        doctest::Approx(3.1539967582218700).epsilon(1e-13));

  // cross-check against the test's own quadrature of the trace integrand
  const Complex r = delaycert::resolvent_psi(mode, Complex(0.0, 1.0));
  const auto integrand = [&](double t) {
    return std::norm(std::exp(Complex(0.0, 1.0) * t) * r);
  };
  CHECK(delaycert::trace_norm_sq_r21(mode, 1.0) ==
        doctest::Approx(oracle::integrate(integrand, -1.0, 0.0))
            .epsilon(1e-9));
}

TEST_CASE("trace norm equals tau times the squared resolvent") {
  std::mt19937_64 rng(833);
  for (int trial = 0; trial < 60; ++trial) {
    const double tau = 0.2 + 2.0 * oracle::uniform01(rng);
    const Complex lambda = oracle::random_member(rng, tau);
    const ModeParams mode(lambda, tau);
    const double omega = 8.0 * (oracle::uniform01(rng) - 0.5);
    const double lhs = delaycert::trace_norm_sq_r21(mode, omega);
    const double rhs =
        tau * std::norm(delaycert::resolvent_psi(mode, Complex(0.0, omega)));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}
