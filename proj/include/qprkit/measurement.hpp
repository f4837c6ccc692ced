#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qprkit/quantizer.hpp"

namespace qprkit {

/// m Gaussian sampling vectors a_i in R^n, stored as the rows of an m x n
/// matrix. Entries are i.i.d. N(0, 1) drawn row-major from Rng(seed).
class MeasurementEnsemble {
public:
  static MeasurementEnsemble gaussian(int m, int n, std::uint64_t seed);
  /// Wraps explicit rows (tests, imported data). Seed is recorded as 0.
  explicit MeasurementEnsemble(Eigen::MatrixXd rows, std::uint64_t seed = 0);

  int m() const noexcept { return static_cast<int>(rows_.rows()); }
  int n() const noexcept { return static_cast<int>(rows_.cols()); }
  std::uint64_t seed() const noexcept { return seed_; }
  const Eigen::MatrixXd& rows() const noexcept { return rows_; }
  auto row(int i) const { return rows_.row(i); }

  /// Row-major text matrix, one row per line, %.17g.
  std::string to_text() const;

private:
  Eigen::MatrixXd rows_;
  std::uint64_t seed_;
};

/// Unit-norm ground-truth signal, optionally with a known support size.
struct GroundTruth {
  Eigen::VectorXd x_star;
  std::optional<int> sparsity;
};

/// Bins observed for each sampling vector, with the quantizer that produced
/// them and the pre-quantization noise level (0 when noiseless).
struct QuantizedObservation {
  std::vector<int> bins;
  Quantizer quantizer;
  double sigma_xi = 0.0;

  int m() const noexcept { return static_cast<int>(bins.size()); }
  /// Codebook values y_i = s_{bins[i]}.
  Eigen::VectorXd symbols() const;
  /// CSV with header "index,bin,symbol"; index and bin are 1-based.
  std::string to_csv() const;
};

/// b_i = (a_i^T x)^2.
Eigen::VectorXd intensities(const MeasurementEnsemble& E, const Eigen::VectorXd& x);

/// a_i^T X a_i for symmetric X, without forming a_i a_i^T.
Eigen::VectorXd lifted_traces(const MeasurementEnsemble& E, const Eigen::MatrixXd& X);

/// bins_i = encode((a_i^T x)^2 + xi_i) with xi_i ~ N(0, sigma_xi^2) drawn from
/// Rng(noise_seed). sigma_xi = 0 draws nothing.
QuantizedObservation acquire(const MeasurementEnsemble& E, const Eigen::VectorXd& x_star,
                             const Quantizer& q, double sigma_xi, std::uint64_t noise_seed);

/// x_l = C [1.5 sin(4 pi (l-1)/n) + 2.5 cos(14 pi (l-1)/n)], normalized.
GroundTruth gen_two_sinusoid(int n);
/// Normalized Gaussian draw.
GroundTruth gen_unit_sphere(int n, std::uint64_t seed);
/// Uniformly random support of size s with a uniform-on-sphere profile.
GroundTruth gen_sparse(int n, int s, std::uint64_t seed);

}  // namespace qprkit
