#include "qprkit/measurement.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "qprkit/rng.hpp"

namespace qprkit {
namespace {

void check_dim(const MeasurementEnsemble& E, Eigen::Index n, const char* what) {
  if (n != E.n()) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(n) +
                         " does not match ensemble n = " + std::to_string(E.n()));
  }
}

Eigen::VectorXd normalized_gaussian(int n, Rng& rng) {
  Eigen::VectorXd x(n);
  do {
    for (int i = 0; i < n; ++i) x[i] = rng.normal();
  } while (x.norm() == 0.0);
  return x / x.norm();
}

}  // namespace

MeasurementEnsemble::MeasurementEnsemble(Eigen::MatrixXd rows, std::uint64_t seed)
    : rows_(std::move(rows)), seed_(seed) {
  if (rows_.rows() < 1 || rows_.cols() < 1) {
    throw ConfigError("measurement ensemble needs m >= 1 and n >= 1");
  }
}

MeasurementEnsemble MeasurementEnsemble::gaussian(int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw ConfigError("measurement ensemble needs m >= 1 and n >= 1");
  Rng rng(seed);
  Eigen::MatrixXd a(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  return MeasurementEnsemble(std::move(a), seed);
}

std::string MeasurementEnsemble::to_text() const {
  std::string out;
  char buf[64];
  for (int i = 0; i < m(); ++i) {
    for (int j = 0; j < n(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", rows_(i, j));
      if (j) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Eigen::VectorXd QuantizedObservation::symbols() const {
  Eigen::VectorXd y(m());
  for (int i = 0; i < m(); ++i) y[i] = quantizer.symbol(bins[i]);
  return y;
}

std::string QuantizedObservation::to_csv() const {
  std::string out = "index,bin,symbol\n";
  char buf[96];
  for (int i = 0; i < m(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", i + 1, bins[i], quantizer.symbol(bins[i]));
    out += buf;
  }
  return out;
}

Eigen::VectorXd intensities(const MeasurementEnsemble& E, const Eigen::VectorXd& x) {
  check_dim(E, x.size(), "intensities");
  return (E.rows() * x).array().square().matrix();
}

Eigen::VectorXd lifted_traces(const MeasurementEnsemble& E, const Eigen::MatrixXd& X) {
  if (X.rows() != X.cols()) throw DimensionError("lifted_traces: X must be square");
  check_dim(E, X.rows(), "lifted_traces");
  return (E.rows() * X).cwiseProduct(E.rows()).rowwise().sum();
}

QuantizedObservation acquire(const MeasurementEnsemble& E, const Eigen::VectorXd& x_star,
                             const Quantizer& q, double sigma_xi, std::uint64_t noise_seed) {
  if (!(sigma_xi >= 0.0)) throw ConfigError("acquire: sigma_xi must be >= 0");
  const Eigen::VectorXd b = intensities(E, x_star);
  Rng rng(noise_seed);
  std::vector<int> bins(E.m());
  for (int i = 0; i < E.m(); ++i) {
    const double noise = sigma_xi > 0.0 ? sigma_xi * rng.normal() : 0.0;
    bins[i] = q.encode(b[i] + noise);
  }
  return QuantizedObservation{std::move(bins), q, sigma_xi};
}

GroundTruth gen_two_sinusoid(int n) {
  if (n < 2) throw ConfigError("gen_two_sinusoid: n must be >= 2");
  Eigen::VectorXd x(n);
  for (int l = 0; l < n; ++l) {
    const double t = static_cast<double>(l) / n;
    x[l] = 1.5 * std::sin(4.0 * std::numbers::pi * t) + 2.5 * std::cos(14.0 * std::numbers::pi * t);
  }
  return {x / x.norm(), std::nullopt};
}

GroundTruth gen_unit_sphere(int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("gen_unit_sphere: n must be >= 1");
  Rng rng(seed);
  return {normalized_gaussian(n, rng), std::nullopt};
}

GroundTruth gen_sparse(int n, int s, std::uint64_t seed) {
  if (n < 1 || s < 1 || s > n) throw ConfigError("gen_sparse: need 1 <= s <= n");
  Rng rng(seed);
  // Partial Fisher-Yates: the first s entries form a uniform s-subset.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < s; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  const Eigen::VectorXd values = normalized_gaussian(s, rng);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < s; ++i) x[idx[i]] = values[i];
  return {x, s};
}

}  // namespace qprkit
