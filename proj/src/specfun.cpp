#include "qprkit/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qprkit/errors.hpp"

namespace qprkit::specfun {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoOverSqrtPi = 2.0 * std::numbers::inv_sqrtpi;

// erf(x) = 2/sqrt(pi) exp(-x^2) sum_n (2x^2)^n x / (1*3*...*(2n+1)).
// Every term is positive, so the sum is free of cancellation for |x| < 3.
double erf_series(double x) {
  const double two_x2 = 2.0 * x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 500; ++n) {
    term *= two_x2 / (2.0 * n + 1.0);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return kTwoOverSqrtPi * std::exp(-x * x) * sum;
}

// erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// evaluated with the modified Lentz algorithm; x >= 3.
double erfc_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = f;
  double d = 0.0;
  for (int n = 1; n < 1000; ++n) {
    const double a = 0.5 * n;
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x * x) * std::numbers::inv_sqrtpi / f;
}

double newton_z_quantile(double p) {
  // Solve erf(z / sqrt 2) = p on z >= 0. For p > 1/2 the residual is taken
  // on the upper tail so that p close to 1 keeps full relative precision.
  const double q = 1.0 - p;
  auto residual = [&](double z) {
    const double w = z / std::numbers::sqrt2;
    return p > 0.5 ? q - erfc(w) : erf(w) - p;
  };
  auto density = [](double z) {
    return std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * z * z);
  };

  double lo = 0.0;
  double hi = std::sqrt(50.0);
  while (residual(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double r = residual(z);
    if (r == 0.0) return z;
    if (r < 0.0) {
      lo = z;
    } else {
      hi = z;
    }
    const double dens = density(z);
    double next = dens > 0.0 ? z - r / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 1e-16 * std::max(1.0, z)) return next;
    z = next;
    if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
  }
  return z;
}

double simpson_step(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
    return left + right + diff / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double erf(double x) {
  if (std::isnan(x)) return x;
  const double ax = std::abs(x);
  if (ax < 3.0) return erf_series(x);
  if (std::isinf(ax)) return std::copysign(1.0, x);
  return std::copysign(1.0 - erfc_continued_fraction(ax), x);
}

double erfc(double x) {
  if (std::isnan(x)) return x;
  if (x == kInf) return 0.0;
  if (x == -kInf) return 2.0;
  if (x >= 3.0) return erfc_continued_fraction(x);
  if (x <= -3.0) return 2.0 - erfc_continued_fraction(-x);
  return 1.0 - erf_series(x);
}

double chi2_1_cdf(double b) {
  if (!(b >= 0.0)) throw DomainError("chi2_1_cdf: argument must be >= 0");
  return erf(std::sqrt(0.5 * b));
}

double chi2_1_sf(double b) {
  if (!(b >= 0.0)) throw DomainError("chi2_1_sf: argument must be >= 0");
  return erfc(std::sqrt(0.5 * b));
}

double chi2_1_pdf(double b) {
  if (!(b >= 0.0)) throw DomainError("chi2_1_pdf: argument must be >= 0");
  if (b == 0.0) return kInf;
  return std::exp(-0.5 * b) / std::sqrt(2.0 * std::numbers::pi * b);
}

double chi2_1_partial_mean(double b) {
  if (!(b >= 0.0)) throw DomainError("chi2_1_partial_mean: argument must be >= 0");
  if (std::isinf(b)) return 1.0;
  return chi2_1_cdf(b) - std::sqrt(2.0 * b / std::numbers::pi) * std::exp(-0.5 * b);
}

double chi2_1_inv_cdf(double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw DomainError("chi2_1_inv_cdf: probability must lie in [0, 1)");
  }
  if (p == 0.0) return 0.0;
  const double z = newton_z_quantile(p);
  return z * z;
}

double bessel_k0(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k0: argument must be > 0");
  if (std::isinf(x)) return 0.0;
  if (x <= 2.0) {
    // K0 = -(ln(x/2) + gamma) I0(x) + sum_{k>=1} H_k (x^2/4)^k / (k!)^2
    const double y = 0.25 * x * x;
    double term = 1.0;
    double i0 = 1.0;
    double tail = 0.0;
    double harmonic = 0.0;
    for (int k = 1; k < 100; ++k) {
      term *= y / (static_cast<double>(k) * k);
      harmonic += 1.0 / k;
      i0 += term;
      tail += harmonic * term;
      if (term < 1e-18 * i0) break;
    }
    return -(std::log(0.5 * x) + kEulerGamma) * i0 + tail;
  }
  // K0(x) = exp(-x) int_0^inf exp(-x (cosh t - 1)) dt. The integrand is
  // entire and decays double-exponentially, so the trapezoid rule converges
  // geometrically in the step size.
  constexpr double h = 0.125;
  double sum = 0.5;
  for (int i = 1; i < 2000; ++i) {
    const double s = std::sinh(0.5 * i * h);
    const double term = std::exp(-2.0 * x * s * s);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return std::exp(-x) * h * sum;
}

GaussCdfFamily gauss_cdf_family(double z, GaussParams g) {
  if (!(g.sigma > 0.0)) throw DomainError("gauss_cdf_family: sigma must be > 0");
  if (z == kInf) return {1.0, 0.0, 0.0};
  if (z == -kInf) return {0.0, 0.0, 0.0};
  const double s2 = g.sigma * g.sigma;
  const double phi = 0.5 * erfc(-z / (g.sigma * std::numbers::sqrt2));
  const double dens = std::exp(-0.5 * z * z / s2) /
                      (g.sigma * std::sqrt(2.0 * std::numbers::pi));
  return {phi, dens, -(z / s2) * dens};
}

double gauss_interval_prob(double lo, double hi, GaussParams g) {
  if (!(g.sigma > 0.0)) throw DomainError("gauss_interval_prob: sigma must be > 0");
  if (!(lo < hi)) return 0.0;
  const double scale = 1.0 / (g.sigma * std::numbers::sqrt2);
  if (lo >= 0.0) return 0.5 * (erfc(lo * scale) - erfc(hi * scale));
  if (hi <= 0.0) return 0.5 * (erfc(-hi * scale) - erfc(-lo * scale));
  return 1.0 - 0.5 * erfc(-lo * scale) - 0.5 * erfc(hi * scale);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace qprkit::specfun
