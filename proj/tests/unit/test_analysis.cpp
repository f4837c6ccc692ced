#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "qprkit/analysis.hpp"
#include "qprkit/measurement.hpp"
#include "qprkit/rng.hpp"
#include "qprkit/specfun.hpp"

using namespace qprkit;
using Catch::Matchers::WithinAbs;

namespace {

// Unit x2 with x1^T x2 = rho.
Eigen::VectorXd partner(const Eigen::VectorXd& x1, double rho, std::uint64_t seed) {
  Eigen::VectorXd w = gen_unit_sphere(static_cast<int>(x1.size()), seed).x_star;
  w -= w.dot(x1) * x1;
  w.normalize();
  return rho * x1 + std::sqrt(1 - rho * rho) * w;
}

}  // namespace

TEST_CASE("pair geometry", "[analysis]") {
  const Eigen::Vector3d e1(1, 0, 0), e2(0, 1, 0);
  const auto g = pair_geometry(e1, e2);
  CHECK_THAT(g.rho, WithinAbs(0.0, 1e-15));
  CHECK_THAT(g.nu1, WithinAbs(1.0, 1e-12));

  const auto g6 = pair_geometry(e1, Eigen::Vector3d(0.6, 0.8, 0));
  CHECK_THAT(g6.rho, WithinAbs(0.6, 1e-15));
  CHECK_THAT(g6.nu1, WithinAbs(0.8, 1e-12));

  CHECK_THROWS_AS(pair_geometry(e1, -e1), DegenerateError);
  CHECK_THROWS_AS(pair_geometry(e1, Eigen::Vector3d(2, 0, 0)), DomainError);

  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto x1 = gen_unit_sphere(7, s).x_star;
    const auto x2 = gen_unit_sphere(7, s + 500).x_star;
    const auto p = pair_geometry(x1, x2);
    CHECK_THAT(p.nu1 * p.nu1 + p.rho * p.rho, WithinAbs(1.0, 1e-10));
    const Eigen::MatrixXd V = x1 * x1.transpose() - x2 * x2.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
    const auto& ev = es.eigenvalues();
    CHECK_THAT(ev[0], WithinAbs(-p.nu1, 1e-10));
    CHECK_THAT(ev[6], WithinAbs(p.nu1, 1e-10));
    for (int i = 1; i < 6; ++i) CHECK(std::abs(ev[i]) < 1e-10);
    CHECK((p.frame.transpose() * p.frame - Eigen::Matrix2d::Identity()).norm() < 1e-10);
    CHECK((V * p.frame.col(0) - p.nu1 * p.frame.col(0)).norm() < 1e-10);
    CHECK((V * p.frame.col(1) + p.nu1 * p.frame.col(1)).norm() < 1e-10);

    // b1 - b2 = nu1 (a1~^2 - a2~^2) for every sampling vector.
    const auto E = MeasurementEnsemble::gaussian(20, 7, s);
    const Eigen::VectorXd d = intensities(E, x1) - intensities(E, x2);
    const Eigen::MatrixXd c = E.rows() * p.frame;
    for (int i = 0; i < 20; ++i) {
      const double rhs = p.nu1 * std::abs(c(i, 0) * c(i, 0) - c(i, 1) * c(i, 1));
      CHECK(std::abs(d[i]) >= rhs - 1e-10);
    }
  }
}

TEST_CASE("collision function", "[analysis]") {
  CHECK(g_exact(0.0) == 0.0);
  CHECK(g_hat(0.0) == 0.0);
  // Frozen from an arbitrary-precision quadrature of K0.
  CHECK_THAT(g_exact(0.1), WithinAbs(0.21782865029748175, 1e-9));
  CHECK_THAT(g_exact(0.5), WithinAbs(0.590211795836599, 1e-9));
  CHECK_THAT(g_exact(1.0), WithinAbs(0.7910063369953477, 1e-9));
  CHECK_THAT(g_exact(2.0), WithinAbs(0.9381711105244077, 1e-9));
  CHECK_THAT(g_exact(4.0), WithinAbs(0.9935403743842295, 1e-9));
  CHECK(g_exact(20.0) > 0.9999);
  CHECK(g_exact(20.0) <= 1.0);
  // The exponential fit is loosest near 0.3; the worst gap on a 50-point grid
  // over [0, 4] is 0.0752244 by arbitrary-precision quadrature.
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) worst = std::max(worst, std::abs(g_exact(4.0 * i / 49) - g_hat(4.0 * i / 49)));
  CHECK_THAT(worst, WithinAbs(0.0752244, 1e-6));
  for (double d = 0.05; d <= 4.0 + 1e-12; d += 0.05) {
    CHECK(g_exact(d) > g_exact(d - 0.05));
    CHECK(g_hat(d) > g_hat(d - 0.05));
  }
}

TEST_CASE("variance-gamma density integrates to one", "[analysis]") {
  // Symmetric; integrate (0, 60] after u = w^2 to remove the log singularity.
  const double half = specfun::integrate(
      [](double w) { return w == 0.0 ? 0.0 : 2.0 * w * variance_gamma_pdf(w * w); }, 0.0,
      std::sqrt(60.0), 1e-12);
  CHECK_THAT(2.0 * half, WithinAbs(1.0, 1e-6));
  CHECK(std::isinf(variance_gamma_pdf(0.0)));
  CHECK(variance_gamma_pdf(1.3) == variance_gamma_pdf(-1.3));
}

TEST_CASE("error probability bounds", "[analysis]") {
  CHECK(pe1_bound(0.0, 0.3) == 0.0);
  CHECK_THAT(pe1_bound(1.1162, 0.6), WithinAbs(0.8928, 1e-3));
  CHECK(pe1_bound(0.5, 0.9) > pe1_bound(0.5, 0.5));
  CHECK(pe1_bound(0.5, 0.999999) > 0.999);
  CHECK_THROWS_AS(pe1_bound(0.5, 1.0), DegenerateError);

  CHECK(pe2_bound(0.0) == 1.0);
  CHECK_THAT(pe2_bound(2.7056), WithinAbs(0.1, 1e-3));
  CHECK(pe2_bound(200.0) < 1e-40);

  const Quantizer q16 = design_equiprobable(16);
  CHECK_THAT(pe_max(q16, 0.6), WithinAbs(0.9552, 1e-3));
  const auto rep = distinguishability(q16, 0.6, 0.01);
  CHECK_FALSE(rep.vacuous);
  REQUIRE(rep.m_min);
  CHECK(*rep.m_min == 101);
  CHECK(m_min(0.9552, 0.01) == 101);
  CHECK(m_min(0.5, 0.25) == 2);
  CHECK_THROWS_AS(m_min(1.0, 0.01), DomainError);
  CHECK_THROWS_AS(m_min(0.5, 0.0), DomainError);

  const auto perfect = distinguishability(1e-9, 80.0, 0.0, 0.01);
  CHECK(perfect.pe_max < 1e-8);

  const auto coarse = distinguishability(design_equiprobable(2), 0.9, 0.01);
  CHECK(coarse.vacuous);
  CHECK(coarse.pe_max == 1.0);
  CHECK_FALSE(coarse.m_min);
}

TEST_CASE("single-measurement collisions stay below the bound", "[analysis]") {
  const Quantizer q = design_equiprobable(16);
  const int n = 16;
  const auto x1 = gen_unit_sphere(n, 3).x_star;
  const auto x2 = partner(x1, 0.6, 4);
  REQUIRE_THAT(x1.dot(x2), WithinAbs(0.6, 1e-12));
  const auto E = MeasurementEnsemble::gaussian(100000, n, 5);
  const Eigen::VectorXd b1 = intensities(E, x1), b2 = intensities(E, x2);
  int same = 0;
  for (int i = 0; i < E.m(); ++i) same += q.encode(b1[i]) == q.encode(b2[i]);
  const double rate = same / 100000.0;
  CHECK(rate <= pe_max(q, 0.6));
}

TEST_CASE("noise robustness factor", "[analysis]") {
  const Quantizer q2 = design_equiprobable(2);
  CHECK(robustness_factor_mc(q2, 0.0, 10, 1) == 1.0);
  // Exact value 0.8628920 from one-dimensional quadrature.
  CHECK_THAT(robustness_factor_mc(q2, 0.1, 10000, 7), WithinAbs(0.8628920, 3 * std::sqrt(0.863 * 0.137 / 10000)));
  CHECK(robustness_factor_mc(q2, 0.1, 5000, 3) == robustness_factor_mc(q2, 0.1, 5000, 3));

  const Quantizer q8 = design_equiprobable(8);
  const int N = 20000;
  const double band = 3.0 * std::sqrt(0.25 / N);
  double prev = 1.0;
  for (double s2 : {0.01, 0.05, 0.1, 0.2, 0.5, 1.0}) {
    const double p = robustness_factor_mc(q8, s2, N, 11);
    CHECK(p <= prev + band);
    prev = p;
  }
  CHECK_THROWS_AS(robustness_factor_mc(q8, 0.1, 0, 1), ConfigError);
}

TEST_CASE("cost sandwich at the ground truth", "[analysis]") {
  const auto E = MeasurementEnsemble::gaussian(30, 5, 1);
  const auto x = gen_unit_sphere(5, 2).x_star;
  const Quantizer q = design_equiprobable(8);
  const auto obs = acquire(E, x, q, 0.0, 0);
  const auto r = cost_sandwich_check(E, obs, x, x, 20.0);
  CHECK_THAT(r.f, WithinAbs(0.0, 1e-12));
  CHECK(r.f_lower <= 0.0);
  CHECK_THAT(r.rho_x, WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS(cost_sandwich_check(E, obs, x, x, 1.0), ConfigError);
}

TEST_CASE("cost sandwich bounds on random instances", "[analysis][property]") {
  const double d0 = 12.0;
  int bounded = 0, lower_violations = 0, p4 = 0, p5 = 0, p6 = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const int n = 4 + static_cast<int>(s % 5), m = 10 + static_cast<int>(s % 21);
    const int k = 2 << (s % 4);
    const auto E = MeasurementEnsemble::gaussian(m, n, 10000 + s);
    const auto xs = gen_unit_sphere(n, 20000 + s).x_star;
    const auto x = gen_unit_sphere(n, 30000 + s).x_star;
    const Quantizer q = s % 2 ? design_equiprobable(k) : design_lloyd_max(k);
    if (q.tau(k - 1) > d0) continue;
    const auto obs = acquire(E, xs, q, 0.0, 0);
    const auto r = cost_sandwich_check(E, obs, xs, x, d0);
    if (r.q_minus_f < -1e-9 * (1 + r.q)) ++lower_violations;
    CHECK(r.p_bounded > 0.0);
    CHECK(r.p_bounded <= 1.0);
    if (!r.bounded) continue;
    ++bounded;
    if (r.q_minus_f > r.gap_upper) ++p4;
    if (r.f > r.f_upper) ++p5;
    if (r.f < r.f_lower) ++p6;
  }
  INFO("bounded instances: " << bounded);
  CHECK(bounded > 500);
  CHECK(lower_violations == 0);
  CHECK(p4 == 0);
  CHECK(p5 == 0);
  CHECK(p6 == 0);
}
