#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "qprkit/measurement.hpp"

namespace qprkit {

/// Global-sign-invariant reconstruction SNR in dB; +inf when x_hat = +-x_star.
/// Throws DomainError for a zero reference.
double reconstruction_snr(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star);

/// Reciprocal of the linear reconstruction SNR,
/// min_{alpha = +-1} |alpha x_hat - x_star|^2 / |x_star|^2.
double reconstruction_mse(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star);

/// Fraction of rows whose noiseless bin for x_hat equals `bins`.
double consistency_upsilon(const MeasurementEnsemble& E, const Quantizer& q,
                           const Eigen::VectorXd& x_hat, const std::vector<int>& bins);
/// Compares against the noiseless bins of x_star.
double consistency_upsilon(const MeasurementEnsemble& E, const Quantizer& q,
                           const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star);

struct ReconReport {
  double snr_db = 0.0;
  double mse = 0.0;
  double upsilon = 0.0;
};

ReconReport make_report(const MeasurementEnsemble& E, const Quantizer& q,
                        const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star);

/// Mean and sample standard deviation of dB values. Infinite entries (exact
/// recoveries) are left out of the moments and counted separately.
struct DbSummary {
  double mean = 0.0;
  double stddev = 0.0;
  int finite_count = 0;
  int exact_hits = 0;
};
DbSummary summarize_db(std::span<const double> values_db);

}  // namespace qprkit
