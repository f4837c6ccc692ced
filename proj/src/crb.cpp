#include "qprkit/crb.hpp"

#include <cmath>
#include <limits>

#include "qprkit/errors.hpp"
#include "qprkit/specfun.hpp"

namespace qprkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinBinProb = 1e-300;

void require_sigma(double sigma) {
  if (!(sigma > 0.0)) throw DomainError("crb: sigma must be > 0");
}

// Thresholds with the open ends used by the likelihood.
double edge(const Quantizer& q, int j) {
  if (j == 0) return -kInf;
  return q.tau(j);
}

void require_bins(const MeasurementEnsemble& E, const Quantizer& q, const std::vector<int>& bins) {
  if (static_cast<int>(bins.size()) != E.m()) throw DimensionError("crb: bin count mismatch");
  for (int b : bins) {
    if (b < 1 || b > q.levels()) throw DomainError("crb: bin index out of range");
  }
}

}  // namespace

double beta_bar(double u, const Quantizer& q, double sigma, int* skipped) {
  require_sigma(sigma);
  if (u == 0.0) return 0.0;
  const specfun::GaussParams g{sigma};
  const double u2 = u * u;
  double sum = 0.0;
  double dens_lo = 0.0;  // Phi'(-inf)
  for (int j = 1; j <= q.levels(); ++j) {
    const double lo = edge(q, j - 1) - u2;
    const double hi = edge(q, j) - u2;
    const double dens_hi = specfun::gauss_cdf_family(hi, g).Phi_prime;
    const double p = specfun::gauss_interval_prob(lo, hi, g);
    if (p < kMinBinProb) {
      if (skipped) ++*skipped;
    } else {
      const double diff = dens_hi - dens_lo;
      sum += diff * diff / p;
    }
    dens_lo = dens_hi;
  }
  return -4.0 * u2 * sum;
}

Eigen::MatrixXd fisher_matrix(const MeasurementEnsemble& E, const Eigen::VectorXd& x_star,
                              const Quantizer& q, double sigma, int* skipped) {
  if (x_star.size() != E.n()) throw DimensionError("fisher_matrix: signal dimension mismatch");
  require_sigma(sigma);
  const Eigen::VectorXd u = E.rows() * x_star;
  Eigen::VectorXd w(E.m());
  for (int i = 0; i < E.m(); ++i) w[i] = -beta_bar(u[i], q, sigma, skipped);
  Eigen::MatrixXd fim = E.rows().transpose() * w.asDiagonal() * E.rows();
  return 0.5 * (fim + fim.transpose());
}

CrbResult crb_from_fim(Eigen::MatrixXd fim, double cutoff) {
  if (fim.rows() != fim.cols()) throw DimensionError("crb: FIM must be square");
  CrbResult r;
  r.eigen_cutoff_used = cutoff;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fim, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double top = ev.size() ? ev.maxCoeff() : 0.0;
  if (!(top > 0.0)) throw DegenerateError("uninformative measurements");
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff * top) {
      r.crb_trace += 1.0 / ev[i];
    } else {
      r.rank_deficient = true;
    }
  }
  r.fim = std::move(fim);
  return r;
}

double crb_trace(const Eigen::MatrixXd& fim, double cutoff) {
  return crb_from_fim(fim, cutoff).crb_trace;
}

CrbResult compute_crb(const MeasurementEnsemble& E, const Eigen::VectorXd& x_star,
                      const Quantizer& q, double sigma, double cutoff) {
  int skipped = 0;
  CrbResult r = crb_from_fim(fisher_matrix(E, x_star, q, sigma, &skipped), cutoff);
  r.skipped_bins = skipped;
  return r;
}

double input_snr_db(const MeasurementEnsemble& E, const Eigen::VectorXd& x_star, double sigma) {
  require_sigma(sigma);
  const Eigen::VectorXd b = intensities(E, x_star);
  return 10.0 * std::log10(b.squaredNorm() / (E.m() * sigma * sigma));
}

double sigma_for_input_snr(const MeasurementEnsemble& E, const Eigen::VectorXd& x_star,
                           double snr_db) {
  const Eigen::VectorXd b = intensities(E, x_star);
  const double power = b.squaredNorm() / E.m();
  if (!(power > 0.0)) throw DegenerateError("sigma_for_input_snr: zero signal power");
  return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

double log_likelihood(const MeasurementEnsemble& E, const Eigen::VectorXd& x,
                      const Quantizer& q, double sigma, const std::vector<int>& bins) {
  require_sigma(sigma);
  require_bins(E, q, bins);
  const specfun::GaussParams g{sigma};
  const Eigen::VectorXd b = intensities(E, x);
  double ll = 0.0;
  for (int i = 0; i < E.m(); ++i) {
    const int j = bins[i];
    ll += std::log(specfun::gauss_interval_prob(edge(q, j - 1) - b[i], edge(q, j) - b[i], g));
  }
  return ll;
}

Eigen::VectorXd score(const MeasurementEnsemble& E, const Eigen::VectorXd& x, const Quantizer& q,
                      double sigma, const std::vector<int>& bins) {
  require_sigma(sigma);
  require_bins(E, q, bins);
  const specfun::GaussParams g{sigma};
  const Eigen::VectorXd u = E.rows() * x;
  Eigen::VectorXd w(E.m());
  for (int i = 0; i < E.m(); ++i) {
    const int j = bins[i];
    const double u2 = u[i] * u[i];
    const double lo = edge(q, j - 1) - u2;
    const double hi = edge(q, j) - u2;
    const double p = specfun::gauss_interval_prob(lo, hi, g);
    const double d_lo = specfun::gauss_cdf_family(lo, g).Phi_prime;
    const double d_hi = specfun::gauss_cdf_family(hi, g).Phi_prime;
    w[i] = p > 0.0 ? 2.0 * u[i] * (d_lo - d_hi) / p : 0.0;
  }
  return E.rows().transpose() * w;
}

}  // namespace qprkit
