#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "qprkit/measurement.hpp"
#include "qprkit/quantizer.hpp"

namespace qprkit {

/// Spectral data of V = x1 x1^T - x2 x2^T for a pair of unit signals.
struct PairGeometry {
  double rho = 0.0;  ///< |x1^T x2|
  double nu1 = 0.0;  ///< magnitude of the two nonzero eigenvalues of V
  /// n x 2 orthonormal columns: eigenvectors for +nu1 and -nu1.
  Eigen::MatrixXd frame;
  /// All eigenvalues of V, ascending.
  Eigen::VectorXd spectrum;
};

/// Throws DomainError for non-unit inputs and DegenerateError when
/// x1 = +-x2.
PairGeometry pair_geometry(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2);

/// (2/pi) int_0^d K0(u) du, the c.d.f. of |a1^2 - a2^2| / 2 for independent
/// standard normals.
double g_exact(double delta_prime);
/// 1 - exp(-1.6 d).
double g_hat(double delta_prime);

/// Density of a1^2 - a2^2: K0(|u| / 2) / (2 pi). +inf at u = 0.
double variance_gamma_pdf(double u);

/// Probability that two signals with correlation rho land in the same finite
/// bin: g_hat(delta / sqrt(1 - rho^2)). Throws DegenerateError for rho >= 1.
double pe1_bound(double delta, double rho);
/// Saturation probability 1 - chi2_1_cdf(tau_{k-1}).
double pe2_bound(double tau_penultimate);

struct DistinguishabilityReport {
  double delta = 0.0;
  double rho = 0.0;
  double pe1 = 0.0;
  double pe2 = 0.0;
  /// min(1, pe1 + pe2).
  double pe_max = 0.0;
  /// pe1 + pe2 >= 1: the bound says nothing.
  bool vacuous = false;
  /// Measurements needed for a collision probability of at most eps; unset
  /// when the bound is vacuous or no eps was given.
  std::optional<int> m_min;
};

DistinguishabilityReport distinguishability(double delta, double tau_penultimate, double rho,
                                            std::optional<double> eps = std::nullopt);
DistinguishabilityReport distinguishability(const Quantizer& q, double rho,
                                            std::optional<double> eps = std::nullopt);
double pe_max(const Quantizer& q, double rho);

/// ceil(log eps / log pe) for pe, eps in (0, 1).
int m_min(double pe, double eps);

/// Monte-Carlo estimate of P(Q(b) = Q(b + xi)) with b ~ chi-square(1) and
/// xi ~ N(0, sigma_xi_sq). Deterministic for a fixed seed.
double robustness_factor_mc(const Quantizer& q, double sigma_xi_sq, int n_trial,
                            std::uint64_t seed);

struct CostSandwich {
  double f = 0.0;  ///< F(x x^T)
  double q = 0.0;  ///< Q(x x^T)
  double q_minus_f = 0.0;
  double rho_x = 0.0;
  double gap_upper = 0.0;  ///< bound on Q - F
  double f_upper = 0.0;    ///< bounds on F in terms of rho_x
  double f_lower = 0.0;
  /// Every lifted trace of x x^T and x* x*^T lies in [0, d0].
  bool bounded = false;
  /// [chi2_1_cdf(d0)]^m, the probability of the bounded event.
  double p_bounded = 0.0;
};

/// Evaluates the cost and its sandwich bounds at X = x x^T for an
/// observation of x_star. Throws ConfigError if d0 < tau_{k-1}.
CostSandwich cost_sandwich_check(const MeasurementEnsemble& E, const QuantizedObservation& obs,
                                 const Eigen::VectorXd& x_star, const Eigen::VectorXd& x,
                                 double d0);

}  // namespace qprkit
