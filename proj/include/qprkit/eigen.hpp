#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace qprkit {

struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

enum class EigenMethod {
  Auto,   ///< Dense for n <= 64, power iteration above.
  Dense,  ///< Full symmetric eigendecomposition.
  Power,  ///< Shifted power iteration, dense fallback for n <= 64.
};

struct PowerOptions {
  double tol = 1e-10;
  int max_iter = 5000;
  std::uint64_t restart_seed = 0x5eed;
};

/// Largest (algebraic) eigenvalue of a symmetric matrix with a unit
/// eigenvector whose first nonzero coordinate is positive. `warm` seeds the
/// power iteration when given. Throws ConvergenceError if power iteration
/// stalls and no dense fallback applies.
Eigenpair top_eigenpair(const Eigen::MatrixXd& Y, EigenMethod method = EigenMethod::Auto,
                        const Eigen::VectorXd* warm = nullptr, const PowerOptions& opts = {});

/// Flips v so its first coordinate with |v_i| > 1e-12 |v| is positive.
void canonical_sign(Eigen::VectorXd& v);

}  // namespace qprkit
