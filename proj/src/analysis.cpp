#include "qprkit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qprkit/errors.hpp"
#include "qprkit/objective.hpp"
#include "qprkit/rng.hpp"
#include "qprkit/specfun.hpp"

namespace qprkit {
namespace {

constexpr double kUnitTol = 1e-9;
// Beyond this the K0 tail mass is below 1e-17.
constexpr double kK0Cutoff = 40.0;

void require_unit(const Eigen::VectorXd& x, const char* name) {
  if (std::abs(x.norm() - 1.0) > kUnitTol) {
    throw DomainError(std::string("pair_geometry: ") + name + " must have unit norm");
  }
}

}  // namespace

PairGeometry pair_geometry(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2) {
  if (x1.size() != x2.size()) throw DimensionError("pair_geometry: size mismatch");
  require_unit(x1, "x1");
  require_unit(x2, "x2");
  PairGeometry g;
  g.rho = std::min(1.0, std::abs(x1.dot(x2)));
  if (1.0 - g.rho < 1e-12) throw DegenerateError("pair_geometry: collinear signals");

  const Eigen::MatrixXd V = x1 * x1.transpose() - x2 * x2.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
  const Eigen::Index n = V.rows();
  g.spectrum = es.eigenvalues();
  g.nu1 = 0.5 * (g.spectrum[n - 1] - g.spectrum[0]);
  g.frame.resize(n, 2);
  g.frame.col(0) = es.eigenvectors().col(n - 1);
  g.frame.col(1) = es.eigenvectors().col(0);
  return g;
}

double g_exact(double d) {
  if (!(d >= 0.0)) throw DomainError("g_exact: argument must be nonnegative");
  if (d == 0.0) return 0.0;
  // u = w^2 removes the logarithmic singularity of K0 at the origin.
  const double w_hi = std::sqrt(std::min(d, kK0Cutoff));
  const double area = specfun::integrate(
      [](double w) { return w == 0.0 ? 0.0 : 2.0 * w * specfun::bessel_k0(w * w); }, 0.0, w_hi,
      1e-12);
  return std::clamp(2.0 / std::numbers::pi * area, 0.0, 1.0);
}

double g_hat(double d) {
  if (!(d >= 0.0)) throw DomainError("g_hat: argument must be nonnegative");
  return 1.0 - std::exp(-1.6 * d);
}

double variance_gamma_pdf(double u) {
  if (u == 0.0) return std::numeric_limits<double>::infinity();
  return specfun::bessel_k0(std::abs(u) / 2.0) / (2.0 * std::numbers::pi);
}

double pe1_bound(double delta, double rho) {
  if (!(delta >= 0.0)) throw DomainError("pe1_bound: delta must be nonnegative");
  if (rho < 0.0) throw DomainError("pe1_bound: rho must be nonnegative");
  if (rho >= 1.0) throw DegenerateError("pe1_bound: rho must be below 1");
  return g_hat(delta / std::sqrt(1.0 - rho * rho));
}

double pe2_bound(double tau_penultimate) { return specfun::chi2_1_sf(tau_penultimate); }

int m_min(double pe, double eps) {
  if (!(pe > 0.0 && pe < 1.0)) throw DomainError("m_min: pe must lie in (0, 1)");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("m_min: eps must lie in (0, 1)");
  return std::max(1, static_cast<int>(std::ceil(std::log(eps) / std::log(pe))));
}

DistinguishabilityReport distinguishability(double delta, double tau_penultimate, double rho,
                                            std::optional<double> eps) {
  DistinguishabilityReport r;
  r.delta = delta;
  r.rho = rho;
  r.pe1 = pe1_bound(delta, rho);
  r.pe2 = pe2_bound(tau_penultimate);
  const double raw = r.pe1 + r.pe2;
  r.vacuous = raw >= 1.0;
  r.pe_max = std::min(1.0, raw);
  if (eps && !r.vacuous && r.pe_max > 0.0) r.m_min = m_min(r.pe_max, *eps);
  return r;
}

DistinguishabilityReport distinguishability(const Quantizer& q, double rho,
                                            std::optional<double> eps) {
  return distinguishability(precision_delta(q), q.tau(q.levels() - 1), rho, eps);
}

double pe_max(const Quantizer& q, double rho) { return distinguishability(q, rho).pe_max; }

double robustness_factor_mc(const Quantizer& q, double sigma_xi_sq, int n_trial,
                            std::uint64_t seed) {
  if (n_trial < 1) throw ConfigError("robustness_factor_mc: n_trial must be >= 1");
  if (!(sigma_xi_sq >= 0.0)) throw DomainError("robustness_factor_mc: variance must be >= 0");
  if (sigma_xi_sq == 0.0) return 1.0;
  const double sigma = std::sqrt(sigma_xi_sq);
  Rng rng(seed);
  long hits = 0;
  for (int t = 0; t < n_trial; ++t) {
    const double z = rng.normal();
    const double b = z * z;
    const double xi = sigma * rng.normal();
    hits += q.encode(b) == q.encode(b + xi);
  }
  return static_cast<double>(hits) / n_trial;
}

CostSandwich cost_sandwich_check(const MeasurementEnsemble& E, const QuantizedObservation& obs,
                                 const Eigen::VectorXd& x_star, const Eigen::VectorXd& x,
                                 double d0) {
  const Quantizer& q = obs.quantizer;
  const int k = q.levels();
  const double tau_sat = q.tau(k - 1);
  if (d0 < tau_sat) throw ConfigError("cost_sandwich_check: d0 must be >= tau_{k-1}");
  if (x.size() != E.n() || x_star.size() != E.n()) {
    throw DimensionError("cost_sandwich_check: signal dimension mismatch");
  }
  const int m = E.m();
  const double delta = precision_delta(q);
  const double dsq = delta_sq(q);

  CostSandwich r;
  const auto X = LiftedEstimate::from_vector(x);
  const Eigen::VectorXd t = X.traces(E);
  const Eigen::VectorXd t_star = intensities(E, x_star);
  r.f = cost_F(BinPartition(obs), q, t);
  r.q = cost_Q(obs.symbols(), t);
  r.q_minus_f = r.q - r.f;
  r.bounded = t.minCoeff() >= 0.0 && t.maxCoeff() <= d0 && t_star.maxCoeff() <= d0;
  r.p_bounded = std::pow(specfun::chi2_1_cdf(d0), m);

  r.rho_x = std::min(1.0, std::abs(x_star.dot(x)));
  const double nu_sq = 1.0 - r.rho_x * r.rho_x;
  double sum_sq_plus = 0.0;   // sum (a1^2 + a2^2)^2
  double sum_plus = 0.0;      // sum (a1^2 + a2^2)
  double sum_sq_minus = 0.0;  // sum (a1^2 - a2^2)^2
  if (nu_sq > 1e-24) {
    const PairGeometry g = pair_geometry(x_star, x);
    const Eigen::MatrixXd coords = E.rows() * g.frame;
    for (int i = 0; i < m; ++i) {
      const double p = coords(i, 0) * coords(i, 0);
      const double n = coords(i, 1) * coords(i, 1);
      sum_sq_plus += (p + n) * (p + n);
      sum_plus += p + n;
      sum_sq_minus += (p - n) * (p - n);
    }
  }
  const double w_max = std::max(delta, d0 - tau_sat);
  const double q_gap = 0.5 * m * std::max(delta * delta + 2.0 * delta * d0, dsq);
  r.gap_upper = q_gap;
  r.f_upper = 0.5 * m * std::max(delta * delta, (d0 - tau_sat) * (d0 - tau_sat)) +
                  nu_sq * sum_sq_plus;
  r.f_lower = 0.5 * nu_sq * sum_sq_minus - std::sqrt(nu_sq) * w_max * sum_plus - q_gap;
  return r;
}

}  // namespace qprkit
