#include "qprkit/eigen.hpp"

#include <cmath>

#include "qprkit/errors.hpp"
#include "qprkit/rng.hpp"

namespace qprkit {
namespace {

constexpr int kDenseLimit = 64;

Eigenpair dense_top(const Eigen::MatrixXd& Y) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Y);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("symmetric eigensolver failed", std::nan(""));
  }
  const Eigen::Index last = Y.rows() - 1;
  return {es.eigenvalues()[last], es.eigenvectors().col(last)};
}

// Power iteration on Y + r I with r the Gershgorin radius, which makes the
// spectrum nonnegative so the dominant eigenvalue is lambda_max(Y) + r.
bool power_top(const Eigen::MatrixXd& Y, Eigen::VectorXd v, const PowerOptions& opts,
               Eigenpair& out, double& residual) {
  const double shift = Y.cwiseAbs().rowwise().sum().maxCoeff();
  const Eigen::Index n = Y.rows();
  if (shift == 0.0) {
    out = {0.0, Eigen::VectorXd::Unit(n, 0)};
    residual = 0.0;
    return true;
  }
  v.normalize();
  Eigen::VectorXd w(n);
  for (int it = 0; it < opts.max_iter; ++it) {
    w.noalias() = Y * v;
    const double mu = v.dot(w);
    residual = (w - mu * v).norm();
    if (residual <= opts.tol * shift) {
      out = {mu, v};
      return true;
    }
    w += shift * v;
    v = w / w.norm();
  }
  return false;
}

}  // namespace

void canonical_sign(Eigen::VectorXd& v) {
  const double thresh = 1e-12 * v.norm();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > thresh) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

Eigenpair top_eigenpair(const Eigen::MatrixXd& Y, EigenMethod method, const Eigen::VectorXd* warm,
                        const PowerOptions& opts) {
  if (Y.rows() != Y.cols() || Y.rows() == 0) {
    throw DimensionError("top_eigenpair: matrix must be square and nonempty");
  }
  const Eigen::Index n = Y.rows();
  if (method == EigenMethod::Auto) {
    method = n <= kDenseLimit ? EigenMethod::Dense : EigenMethod::Power;
  }

  Eigenpair out;
  if (method == EigenMethod::Dense) {
    out = dense_top(Y);
  } else {
    Rng rng(opts.restart_seed);
    Eigen::VectorXd start(n);
    if (warm && warm->size() == n && warm->norm() > 0.0) {
      start = *warm;
    } else {
      for (Eigen::Index i = 0; i < n; ++i) start[i] = rng.normal();
    }
    double residual = 0.0;
    bool ok = power_top(Y, start, opts, out, residual);
    if (!ok) {
      // Restart from a fresh random vector in case the start was nearly
      // orthogonal to the top eigenspace.
      for (Eigen::Index i = 0; i < n; ++i) start[i] = rng.normal();
      ok = power_top(Y, start, opts, out, residual);
    }
    if (!ok) {
      if (n > kDenseLimit) {
        throw ConvergenceError("power iteration did not converge, residual " +
                                   std::to_string(residual),
                               residual);
      }
      out = dense_top(Y);
    }
  }
  canonical_sign(out.vector);
  return out;
}

}  // namespace qprkit
