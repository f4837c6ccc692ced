#pragma once

#include <functional>

namespace qprkit::specfun {

/// Standard deviation of the additive Gaussian noise.
struct GaussParams {
  double sigma = 1.0;
};

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Error function. Series for |x| < 3, Lentz continued fraction beyond.
double erf(double x);
/// Complementary error function, accurate in relative terms for large x.
double erfc(double x);

/// c.d.f. of the chi-square law with one degree of freedom,
/// gamma(b/2, 1/2) / sqrt(pi) = erf(sqrt(b/2)). Throws DomainError for b < 0.
double chi2_1_cdf(double b);
/// Upper tail 1 - chi2_1_cdf(b), without cancellation.
double chi2_1_sf(double b);
/// Density; +inf at 0.
double chi2_1_pdf(double b);
/// Partial first moment: integral of t * pdf(t) over [0, b]. Equals the
/// chi-square(3) c.d.f.
double chi2_1_partial_mean(double b);

/// Quantile of chi2_1_cdf for p in [0, 1). Bracketed Newton iteration.
double chi2_1_inv_cdf(double p);

/// Modified Bessel function of the second kind, order zero, x > 0.
double bessel_k0(double x);

/// N(0, sigma^2) c.d.f. with its first two derivatives at z.
struct GaussCdfFamily {
  double Phi = 0.0;
  double Phi_prime = 0.0;
  double Phi_double_prime = 0.0;
};
GaussCdfFamily gauss_cdf_family(double z, GaussParams g);

/// P(lo <= Z < hi) for Z ~ N(0, sigma^2); either bound may be infinite.
/// Uses whichever tail keeps the difference free of cancellation.
double gauss_interval_prob(double lo, double hi, GaussParams g);

/// Adaptive Simpson quadrature on [a, b] to absolute tolerance `tol`.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12, int max_depth = 50);

}  // namespace qprkit::specfun
