#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qprkit/measurement.hpp"
#include "qprkit/quantizer.hpp"

namespace qprkit {

/// Expected curvature of one measurement's log-likelihood with respect to
/// u = a^T x, for noise N(0, sigma^2) added before quantization. Thresholds
/// are taken as tau_0 = -inf, tau_k = +inf. Bins with probability below
/// 1e-300 are skipped and counted in `skipped`. Result is <= 0.
/// Throws DomainError for sigma <= 0.
double beta_bar(double u, const Quantizer& q, double sigma, int* skipped = nullptr);

/// -sum_i beta_bar(a_i^T x*) a_i a_i^T.
Eigen::MatrixXd fisher_matrix(const MeasurementEnsemble& E, const Eigen::VectorXd& x_star,
                              const Quantizer& q, double sigma, int* skipped = nullptr);

struct CrbResult {
  Eigen::MatrixXd fim;
  /// Trace of the eigenvalue pseudo-inverse of the FIM.
  double crb_trace = 0.0;
  /// Some eigenvalue fell below cutoff * lambda_max and was discarded.
  bool rank_deficient = false;
  double eigen_cutoff_used = 0.0;
  int skipped_bins = 0;
};

/// Pseudo-inverse trace with relative eigenvalue cutoff. Throws
/// DegenerateError ("uninformative measurements") for a zero FIM.
CrbResult crb_from_fim(Eigen::MatrixXd fim, double cutoff = 1e-10);
double crb_trace(const Eigen::MatrixXd& fim, double cutoff = 1e-10);

CrbResult compute_crb(const MeasurementEnsemble& E, const Eigen::VectorXd& x_star,
                      const Quantizer& q, double sigma, double cutoff = 1e-10);

/// 10 log10( sum_i (a_i^T x*)^4 / (m sigma^2) ).
double input_snr_db(const MeasurementEnsemble& E, const Eigen::VectorXd& x_star, double sigma);
/// Noise level giving the requested input SNR.
double sigma_for_input_snr(const MeasurementEnsemble& E, const Eigen::VectorXd& x_star,
                           double snr_db);

/// Log-likelihood of observed bins at x under the noisy quantized model.
double log_likelihood(const MeasurementEnsemble& E, const Eigen::VectorXd& x,
                      const Quantizer& q, double sigma, const std::vector<int>& bins);
/// Gradient of log_likelihood with respect to x.
Eigen::VectorXd score(const MeasurementEnsemble& E, const Eigen::VectorXd& x, const Quantizer& q,
                      double sigma, const std::vector<int>& bins);

}  // namespace qprkit
