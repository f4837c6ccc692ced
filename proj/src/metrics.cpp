#include "qprkit/metrics.hpp"

#include <cmath>
#include <limits>

namespace qprkit {

double reconstruction_mse(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star) {
  if (x_hat.size() != x_star.size()) throw DimensionError("reconstruction_mse: size mismatch");
  const double ref = x_star.squaredNorm();
  if (ref == 0.0) throw DomainError("reconstruction_mse: reference signal is zero");
  const double err = std::min((x_hat - x_star).squaredNorm(), (x_hat + x_star).squaredNorm());
  return err / ref;
}

double reconstruction_snr(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star) {
  const double mse = reconstruction_mse(x_hat, x_star);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(mse);
}

double consistency_upsilon(const MeasurementEnsemble& E, const Quantizer& q,
                           const Eigen::VectorXd& x_hat, const std::vector<int>& bins) {
  if (static_cast<int>(bins.size()) != E.m()) {
    throw DimensionError("consistency_upsilon: bin count does not match ensemble");
  }
  const Eigen::VectorXd b = intensities(E, x_hat);
  int hits = 0;
  for (int i = 0; i < E.m(); ++i) hits += q.encode(b[i]) == bins[i];
  return static_cast<double>(hits) / E.m();
}

double consistency_upsilon(const MeasurementEnsemble& E, const Quantizer& q,
                           const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star) {
  const Eigen::VectorXd b = intensities(E, x_star);
  std::vector<int> bins(E.m());
  for (int i = 0; i < E.m(); ++i) bins[i] = q.encode(b[i]);
  return consistency_upsilon(E, q, x_hat, bins);
}

ReconReport make_report(const MeasurementEnsemble& E, const Quantizer& q,
                        const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_star) {
  ReconReport r;
  r.mse = reconstruction_mse(x_hat, x_star);
  r.snr_db = r.mse == 0.0 ? std::numeric_limits<double>::infinity() : -10.0 * std::log10(r.mse);
  r.upsilon = consistency_upsilon(E, q, x_hat, x_star);
  return r;
}

DbSummary summarize_db(std::span<const double> values_db) {
  DbSummary s;
  double sum = 0.0;
  for (double v : values_db) {
    if (std::isinf(v) && v > 0) {
      ++s.exact_hits;
    } else if (std::isfinite(v)) {
      sum += v;
      ++s.finite_count;
    }
  }
  if (s.finite_count == 0) return s;
  s.mean = sum / s.finite_count;
  if (s.finite_count > 1) {
    double ss = 0.0;
    for (double v : values_db) {
      if (std::isfinite(v)) ss += (v - s.mean) * (v - s.mean);
    }
    s.stddev = std::sqrt(ss / (s.finite_count - 1));
  }
  return s;
}

}  // namespace qprkit
