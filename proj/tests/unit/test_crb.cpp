#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "qprkit/crb.hpp"
#include "qprkit/measurement.hpp"
#include "qprkit/rng.hpp"

using namespace qprkit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi); }

// log P(bin j | u) for intensity u^2 plus N(0, sigma^2) noise, open outer edges.
double log_bin_prob(const Quantizer& q, int j, double u, double sigma) {
  const double lo = j == 1 ? -INFINITY : (q.tau(j - 1) - u * u) / sigma;
  const double hi = j == q.levels() ? INFINITY : (q.tau(j) - u * u) / sigma;
  return std::log(Phi(hi) - Phi(lo));
}

}  // namespace

TEST_CASE("beta bar basics", "[crb]") {
  const Quantizer q = design_equiprobable(8);
  CHECK(beta_bar(0.0, q, 0.3) == 0.0);
  CHECK_THROWS_AS(beta_bar(1.0, q, 0.0), DomainError);
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const double u = 3 * rng.normal();
    const double s = 0.01 + rng.uniform();
    CHECK(beta_bar(u, q, s) <= 0.0);
  }
}

TEST_CASE("two-level case reduces to the binary expression", "[crb]") {
  const Quantizer q = design_equiprobable(2);
  const double tau = q.tau(1);
  for (double u : {0.2, 0.7, 1.1, 1.9}) {
    for (double sigma : {0.1, 0.4, 1.0}) {
      const double z = (tau - u * u) / sigma;
      const double d = phi(z) / sigma;
      const double F = Phi(z);
      const double expect = -4 * u * u * d * d / (F * (1 - F));
      CHECK_THAT(beta_bar(u, q, sigma), WithinRel(expect, 1e-10));
    }
  }
}

TEST_CASE("beta bar equals the expected log-likelihood curvature", "[crb]") {
  // Per-bin second derivative by central differences, then averaged over
  // 10^6 simulated noisy observations.
  Rng pick(3);
  for (int c = 0; c < 4; ++c) {
    const int k = 4 << (c % 2);
    const Quantizer q = design_equiprobable(k);
    const double u = 0.4 + 1.2 * pick.uniform();
    const double sigma = 0.2 + 0.6 * pick.uniform();
    const double h = 1e-4;
    std::vector<double> curv(k + 1);
    for (int j = 1; j <= k; ++j) {
      curv[j] = (log_bin_prob(q, j, u + h, sigma) - 2 * log_bin_prob(q, j, u, sigma) +
                 log_bin_prob(q, j, u - h, sigma)) / (h * h);
    }
    Rng rng(100 + c);
    const int N = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < N; ++t) {
      const double v = curv[q.encode(u * u + sigma * rng.normal())];
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / N;
    const double se = std::sqrt((sum2 / N - mean * mean) / N);
    INFO("u=" << u << " sigma=" << sigma << " mc=" << mean << " se=" << se);
    CHECK(std::abs(beta_bar(u, q, sigma) - mean) <= 3 * se + 1e-6 * std::abs(mean));
  }
}

TEST_CASE("Fisher matrix", "[crb]") {
  const auto E = MeasurementEnsemble::gaussian(40, 5, 2);
  const Quantizer q = design_equiprobable(8);
  CHECK(fisher_matrix(E, Eigen::VectorXd::Zero(5), q, 0.2).isZero(0.0));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto x = gen_unit_sphere(5, s).x_star;
    const Eigen::MatrixXd F = fisher_matrix(E, x, q, 0.05 + 0.1 * static_cast<double>(s));
    CHECK((F - F.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
  CHECK_THROWS_AS(fisher_matrix(E, Eigen::VectorXd::Zero(4), q, 0.2), DimensionError);
}

TEST_CASE("score statistics match the Fisher matrix", "[crb][property]") {
  const int n = 3, m = 12, N = 100000;
  for (std::uint64_t inst = 0; inst < 10; ++inst) {
    const auto E = MeasurementEnsemble::gaussian(m, n, 50 + inst);
    const auto x = gen_unit_sphere(n, 60 + inst).x_star;
    const Quantizer q = design_equiprobable(inst % 2 ? 4 : 8);
    const double sigma = 0.3 + 0.05 * static_cast<double>(inst);
    const Eigen::MatrixXd F = fisher_matrix(E, x, q, sigma);

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
    std::vector<Eigen::VectorXd> draws;
    draws.reserve(N);
    for (int t = 0; t < N; ++t) {
      const auto obs = acquire(E, x, q, sigma, derive_seed(inst, t));
      draws.push_back(score(E, x, q, sigma, obs.bins));
      mean += draws.back();
      second += draws.back() * draws.back().transpose();
    }
    mean /= N;
    second /= N;

    for (int a = 0; a < n; ++a) {
      double var = 0.0;
      for (const auto& d : draws) var += (d[a] - mean[a]) * (d[a] - mean[a]);
      var /= N - 1;
      CHECK(std::abs(mean[a]) <= 4 * std::sqrt(var / N));
    }
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double v = 0.0;
        for (const auto& d : draws) {
          const double p = d[a] * d[b] - second(a, b);
          v += p * p;
        }
        const double se = std::sqrt(v / (N - 1) / N);
        INFO("instance " << inst << " entry " << a << "," << b);
        CHECK(std::abs(second(a, b) - F(a, b)) <= 5 * se);
      }
    }
  }
}

TEST_CASE("score is the likelihood gradient", "[crb]") {
  const auto E = MeasurementEnsemble::gaussian(15, 4, 8);
  const auto x = gen_unit_sphere(4, 9).x_star;
  const Quantizer q = design_equiprobable(8);
  const auto obs = acquire(E, x, q, 0.3, 10);
  const Eigen::VectorXd g = score(E, x, q, 0.3, obs.bins);
  const double h = 1e-6;
  for (int a = 0; a < 4; ++a) {
    Eigen::VectorXd xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    const double fd = (log_likelihood(E, xp, q, 0.3, obs.bins) -
                       log_likelihood(E, xm, q, 0.3, obs.bins)) / (2 * h);
    CHECK_THAT(g[a], WithinAbs(fd, 1e-6 * (1 + std::abs(fd))));
  }
}

TEST_CASE("pseudo-inverse trace", "[crb]") {
  CHECK_THAT(crb_trace(2.5 * Eigen::MatrixXd::Identity(4, 4)), WithinAbs(4 / 2.5, 1e-14));
  const auto r = crb_from_fim(Eigen::Vector2d(2, 0).asDiagonal().toDenseMatrix());
  CHECK_THAT(r.crb_trace, WithinAbs(0.5, 1e-15));
  CHECK(r.rank_deficient);
  CHECK(r.eigen_cutoff_used == 1e-10);
  CHECK_FALSE(crb_from_fim(Eigen::MatrixXd::Identity(3, 3)).rank_deficient);
  CHECK_THROWS_AS(crb_from_fim(Eigen::MatrixXd::Zero(3, 3)), DegenerateError);
}

TEST_CASE("input SNR calibration", "[crb]") {
  const auto E = MeasurementEnsemble::gaussian(100, 8, 4);
  const auto x = gen_two_sinusoid(8).x_star;
  const double sigma = sigma_for_input_snr(E, x, 27.5);
  CHECK_THAT(input_snr_db(E, x, sigma), WithinAbs(27.5, 1e-10));
  const Eigen::VectorXd b = intensities(E, x);
  CHECK_THAT(input_snr_db(E, x, 0.1),
             WithinAbs(10 * std::log10(b.squaredNorm() / (100 * 0.01)), 1e-12));
}

TEST_CASE("bound tightens as the noise drops", "[crb]") {
  const int n = 32, m = 320;
  const auto E = MeasurementEnsemble::gaussian(m, n, 12);
  const auto x = gen_two_sinusoid(n).x_star;
  const Quantizer q = design_equiprobable(8);
  double prev = INFINITY;
  for (double snr = 0.0; snr <= 30.0; snr += 5.0) {
    const double c = compute_crb(E, x, q, sigma_for_input_snr(E, x, snr)).crb_trace;
    CHECK(c <= prev);
    prev = c;
  }
}

TEST_CASE("four-level Lloyd-Max Fisher matrix is nearly singular at high SNR", "[crb]") {
  const int n = 32, m = 320;
  const Quantizer q = design_lloyd_max(4);
  int flagged = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto E = MeasurementEnsemble::gaussian(m, n, 70 + s);
    const auto x = gen_two_sinusoid(n).x_star;
    const auto r = compute_crb(E, x, q, sigma_for_input_snr(E, x, 45.0));
    flagged += r.rank_deficient;
  }
  CHECK(flagged >= 3);
}
