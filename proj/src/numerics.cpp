#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

namespace delaycert {
namespace num {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Kronrod 15-point nodes on [-1, 1] (nonnegative half) and weights, with the
// embedded 7-point Gauss weights on the even-indexed nodes.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                           0.3818300505051189, 0.4179591836734694};

struct Panel {
  double a, b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  // index mapping: 7 +/- pairs then the centre node
  double resk = 0.0, resg = 0.0, resabs = 0.0;
  const double fc = f(c);
  fv[14] = fc;
  resk = kWgk[7] * fc;
  resabs = std::abs(resk);
  resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double f1 = f(c - x);
    const double f2 = f(c + x);
    fv[2 * j] = f1;
    fv[2 * j + 1] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] *
              (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
  resasc *= std::abs(h);
  resabs *= std::abs(h);
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(err, 50.0 * eps * resabs);
  return Panel{a, b, resk * h, err};
}

}  // namespace

Complex lambert_w(Complex z, int branch) {
  if (z == Complex(0.0, 0.0)) {
    if (branch == 0) return Complex(0.0, 0.0);
    throw std::runtime_error("lambert_w: z = 0 is singular on branch " +
                             std::to_string(branch));
  }
  Complex w;
  const double two_pi_k = 2.0 * kPi * static_cast<double>(branch);
  if (branch == 0 && std::abs(z) < 0.5) {
    // series seed around the origin, safe distance from the -1/e branch point
    w = z * (1.0 - z + 1.5 * z * z);
    if (std::abs(z + std::exp(-1.0)) < 0.25) {
      const Complex p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
      w = -1.0 + p - p * p / 3.0;
    }
  } else {
    const Complex l1 = std::log(z) + Complex(0.0, two_pi_k);
    w = l1 - std::log(l1);
  }
  for (int it = 0; it < 64; ++it) {
    const Complex ew = std::exp(w);
    const Complex wew = w * ew;
    const Complex r = wew - z;
    const double scale = std::abs(wew) + std::abs(z);
    if (std::abs(r) <= 1e-14 * (scale + 1.0)) {
      // one Newton touch-up, then done
      const Complex d = ew * (w + 1.0);
      if (std::abs(d) > 0.0) w -= (w * ew - z) / d;
      return w;
    }
    // Halley step on f(w) = w e^w - z
    const Complex fp = ew * (w + 1.0);
    const Complex fpp = ew * (w + 2.0);
    const Complex denom = fp - r * fpp / (2.0 * fp);
    if (std::abs(denom) == 0.0) break;
    const Complex step = r / denom;
    w -= step;
    if (std::abs(step) <= 1e-16 * (std::abs(w) + 1.0)) {
      const Complex d2 = std::exp(w) * (w + 1.0);
      if (std::abs(d2) > 0.0) w -= (w * std::exp(w) - z) / d2;
      return w;
    }
  }
  const Complex r = w * std::exp(w) - z;
  if (std::abs(r) <= 1e-10 * (std::abs(z) + 1.0)) return w;
  throw std::runtime_error("lambert_w: no convergence on branch " +
                           std::to_string(branch));
}

QuadResult integrate_adaptive(const std::function<double(double)>& f,
                              const std::vector<double>& breakpoints,
                              double rel_tol, double abs_tol,
                              std::size_t max_intervals) {
  QuadResult out;
  if (breakpoints.size() < 2) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Panel> heap;
  double total = 0.0, err = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) continue;
    Panel p = gk15(f, breakpoints[i], breakpoints[i + 1]);
    total += p.value;
    err += p.error;
    heap.push(p);
    ++count;
    out.evaluations += 15;
  }
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) &&
         count < max_intervals && !heap.empty()) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) continue;  // width at rounding floor
    Panel l = gk15(f, worst.a, mid);
    Panel r = gk15(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++count;
    out.evaluations += 30;
  }
  out.value = total;
  out.error = err;
  out.converged = err <= std::max(abs_tol, rel_tol * std::abs(total));
  return out;
}

Complex simpson_uniform(const std::vector<Complex>& samples, double h) {
  const std::size_t n = samples.size();
  if (n < 2) return Complex(0.0, 0.0);
  std::size_t intervals = n - 1;
  Complex acc(0.0, 0.0);
  std::size_t i = 0;
  if (intervals == 1)
    return 0.5 * h * (samples[0] + samples[1]);
  if (intervals % 2 == 1) {
    // close with a 3/8 panel so the composite stays fourth order
    const std::size_t s = n - 4;
    acc += 0.375 * h *
           (samples[s] + 3.0 * samples[s + 1] + 3.0 * samples[s + 2] +
            samples[s + 3]);
    intervals -= 3;
  }
  for (; i < intervals; i += 2)
    acc += (h / 3.0) * (samples[i] + 4.0 * samples[i + 1] + samples[i + 2]);
  return acc;
}

double simpson_uniform_real(const std::vector<double>& samples, double h) {
  std::vector<Complex> c(samples.begin(), samples.end());
  return simpson_uniform(c, h).real();
}

double trapezoid_uniform(const std::vector<double>& samples, double h) {
  if (samples.size() < 2) return 0.0;
  double acc = 0.5 * (samples.front() + samples.back());
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) acc += samples[i];
  return acc * h;
}

Complex cubic_interp(const Complex* samples, std::size_t n, double x) {
  if (n == 0) return Complex(0.0, 0.0);
  if (n == 1) return samples[0];
  if (x <= 0.0) x = 0.0;
  if (x >= static_cast<double>(n - 1)) x = static_cast<double>(n - 1);
  if (n < 4) {
    // linear fallback on short grids
    std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(x), n - 2);
    const double t = x - static_cast<double>(j);
    return (1.0 - t) * samples[j] + t * samples[j + 1];
  }
  std::size_t j = static_cast<std::size_t>(x);
  if (j > 0) --j;  // centre the 4-point stencil
  j = std::min(j, n - 4);
  const double t = x - static_cast<double>(j);
  // Lagrange basis on nodes 0,1,2,3 evaluated at t
  const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return l0 * samples[j] + l1 * samples[j + 1] + l2 * samples[j + 2] +
         l3 * samples[j + 3];
}

Complex cubic_interp(const std::vector<Complex>& samples, double x) {
  return cubic_interp(samples.data(), samples.size(), x);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace num
}  // namespace delaycert
