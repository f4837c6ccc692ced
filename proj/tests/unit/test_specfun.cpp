#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "qprkit/errors.hpp"
#include "qprkit/specfun.hpp"

using namespace qprkit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace sf = qprkit::specfun;

TEST_CASE("erf basic values", "[specfun]") {
  CHECK(sf::erf(0.0) == 0.0);
  CHECK_THAT(sf::erf(6.0), WithinAbs(1.0, 1e-12));
  // mpmath, 30 digits
  CHECK_THAT(sf::erf(0.1), WithinAbs(0.1124629160182849, 1e-14));
  CHECK_THAT(sf::erf(1.0), WithinAbs(0.8427007929497149, 1e-14));
  CHECK_THAT(sf::erf(2.5), WithinAbs(0.999593047982555, 1e-14));
  CHECK_THAT(sf::erf(3.5), WithinAbs(0.9999992569016276, 1e-14));
  CHECK_THAT(sf::erf(5.0), WithinAbs(0.9999999999984626, 1e-15));
}

TEST_CASE("erf is odd and agrees with the C library", "[specfun]") {
  for (double x = -7.0; x <= 7.0; x += 0.037) {
    CHECK(sf::erf(-x) == -sf::erf(x));
    CHECK_THAT(sf::erf(x), WithinAbs(std::erf(x), 1e-12));
  }
}

TEST_CASE("erfc keeps relative accuracy in the tail", "[specfun]") {
  CHECK_THAT(sf::erfc(0.5), WithinRel(0.4795001221869535, 1e-13));
  CHECK_THAT(sf::erfc(3.5), WithinRel(7.430983723414128e-07, 1e-12));
  CHECK_THAT(sf::erfc(6.0), WithinRel(2.1519736712498913e-17, 1e-12));
  CHECK_THAT(sf::erfc(10.0), WithinRel(2.088487583762545e-45, 1e-12));
  CHECK_THAT(sf::erfc(-2.0), WithinRel(2.0 - std::erfc(2.0), 1e-14));
}

TEST_CASE("chi2_1_cdf", "[specfun]") {
  CHECK(sf::chi2_1_cdf(0.0) == 0.0);
  CHECK_THAT(sf::chi2_1_cdf(2.7056), WithinAbs(0.9, 1e-3));
  CHECK_THAT(sf::chi2_1_cdf(3.4698), WithinAbs(0.9375, 1e-3));
  CHECK_THAT(sf::chi2_1_cdf(0.1), WithinAbs(0.24817036595415073, 1e-14));
  CHECK_THAT(sf::chi2_1_cdf(1.0), WithinAbs(0.6826894921370859, 1e-14));
  CHECK_THAT(sf::chi2_1_cdf(10.0), WithinAbs(0.9984345977419975, 1e-14));
  CHECK_THROWS_AS(sf::chi2_1_cdf(-0.1), DomainError);
  CHECK_THAT(sf::chi2_1_cdf(1e6), WithinAbs(1.0, 1e-15));

  double prev = -1.0;
  for (double b = 0.0; b <= 30.0; b += 0.05) {
    const double c = sf::chi2_1_cdf(b);
    CHECK(c > prev);
    CHECK_THAT(c + sf::chi2_1_sf(b), WithinAbs(1.0, 1e-14));
    prev = c;
  }
}

TEST_CASE("chi2_1_partial_mean matches quadrature", "[specfun]") {
  for (double b : {0.01, 0.5, 1.0, 3.0, 12.0}) {
    const double q = sf::integrate([](double t) { return t * sf::chi2_1_pdf(t); }, 1e-300, b,
                                   1e-13);
    // t * pdf(t) = sqrt(t) e^{-t/2} / sqrt(2 pi) is integrable at 0.
    CHECK_THAT(sf::chi2_1_partial_mean(b), WithinAbs(q, 1e-9));
  }
}

TEST_CASE("chi2_1_inv_cdf", "[specfun]") {
  CHECK(sf::chi2_1_inv_cdf(0.0) == 0.0);
  CHECK_THAT(sf::chi2_1_inv_cdf(0.9), WithinAbs(2.7056, 1e-3));
  CHECK_THAT(sf::chi2_1_inv_cdf(0.5), WithinAbs(0.45494, 1e-4));
  // scipy.stats.chi2.ppf
  CHECK_THAT(sf::chi2_1_inv_cdf(0.1), WithinRel(0.01579077409343122, 1e-10));
  CHECK_THAT(sf::chi2_1_inv_cdf(0.99), WithinRel(6.6348966010212145, 1e-10));
  CHECK_THAT(sf::chi2_1_inv_cdf(0.999999), WithinRel(23.92812697687947, 1e-9));
  CHECK_THROWS_AS(sf::chi2_1_inv_cdf(1.0), DomainError);
  CHECK_THROWS_AS(sf::chi2_1_inv_cdf(-0.01), DomainError);
  for (int i = 0; i <= 999; ++i) {
    const double p = i / 1000.0;
    CHECK_THAT(sf::chi2_1_cdf(sf::chi2_1_inv_cdf(p)), WithinAbs(p, 1e-10));
  }
}

TEST_CASE("bessel_k0", "[specfun]") {
  // Oracle: direct quadrature of int_0^inf exp(-x cosh t) dt.
  auto oracle = [](double x) {
    return sf::integrate([x](double t) { return std::exp(-x * std::cosh(t)); }, 0.0,
                         std::acosh(1.0 + 60.0 / x), 1e-14);
  };
  for (double x : {0.01, 0.1, 1.0, 2.0, 5.0}) {
    CHECK_THAT(sf::bessel_k0(x), WithinAbs(oracle(x), 1e-8));
  }
  CHECK_THAT(sf::bessel_k0(1.0), WithinRel(0.42102443824070834, 1e-10));
  CHECK_THAT(sf::bessel_k0(2.5), WithinRel(0.06234755320036619, 1e-10));
  CHECK_THAT(sf::bessel_k0(5.0), WithinRel(0.0036910983340425942, 1e-10));
  CHECK_THAT(sf::bessel_k0(20.0), WithinRel(5.741237815336525e-10, 1e-9));
  const double x = 1e-4;
  CHECK_THAT(sf::bessel_k0(x) - (-std::log(x / 2.0) - sf::kEulerGamma), WithinAbs(0.0, 1e-6));
  CHECK_THROWS_AS(sf::bessel_k0(0.0), DomainError);
  CHECK_THROWS_AS(sf::bessel_k0(-1.0), DomainError);
}

TEST_CASE("gauss_cdf_family", "[specfun]") {
  const auto f0 = sf::gauss_cdf_family(0.0, {1.0});
  CHECK_THAT(f0.Phi, WithinAbs(0.5, 1e-15));
  CHECK_THAT(f0.Phi_prime, WithinAbs(1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15));
  CHECK(f0.Phi_double_prime == 0.0);

  const double inf = std::numeric_limits<double>::infinity();
  const auto fp = sf::gauss_cdf_family(inf, {1.0});
  const auto fm = sf::gauss_cdf_family(-inf, {1.0});
  CHECK(fp.Phi == 1.0);
  CHECK(fm.Phi == 0.0);
  CHECK(fp.Phi_prime == 0.0);
  CHECK(fm.Phi_double_prime == 0.0);

  CHECK_THAT(sf::gauss_cdf_family(1.0, {2.0}).Phi, WithinAbs(0.6914624612740131, 1e-12));
  CHECK_THROWS_AS(sf::gauss_cdf_family(0.0, {0.0}), DomainError);

  const double h = 1e-5;
  for (double sigma : {0.3, 1.0, 2.5}) {
    for (double z = -3.0; z <= 3.0; z += 0.25) {
      const auto f = sf::gauss_cdf_family(z, {sigma});
      const auto up = sf::gauss_cdf_family(z + h, {sigma});
      const auto dn = sf::gauss_cdf_family(z - h, {sigma});
      CHECK_THAT(f.Phi_prime, WithinAbs((up.Phi - dn.Phi) / (2 * h), 1e-6));
      CHECK_THAT(f.Phi_double_prime, WithinAbs((up.Phi_prime - dn.Phi_prime) / (2 * h), 1e-5));
    }
  }
}

TEST_CASE("gauss_interval_prob", "[specfun]") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THAT(sf::gauss_interval_prob(-inf, inf, {1.7}), WithinAbs(1.0, 1e-15));
  CHECK(sf::gauss_interval_prob(1.0, 1.0, {1.0}) == 0.0);
  CHECK_THAT(sf::gauss_interval_prob(-1.0, 1.0, {1.0}), WithinAbs(std::erf(1.0 / std::sqrt(2.0)), 1e-15));
  // Far tail: relative accuracy survives where 1 - Phi would cancel.
  CHECK_THAT(sf::gauss_interval_prob(10.0, inf, {1.0}), WithinRel(0.5 * std::erfc(10.0 / std::sqrt(2.0)), 1e-12));
  CHECK_THAT(sf::gauss_interval_prob(-inf, -10.0, {1.0}), WithinRel(0.5 * std::erfc(10.0 / std::sqrt(2.0)), 1e-12));
}

TEST_CASE("adaptive Simpson", "[specfun]") {
  CHECK_THAT(sf::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi),
             WithinAbs(2.0, 1e-11));
  CHECK(sf::integrate([](double x) { return x; }, 1.0, 1.0) == 0.0);
}
