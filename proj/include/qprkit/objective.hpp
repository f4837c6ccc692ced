#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "qprkit/measurement.hpp"
#include "qprkit/quantizer.hpp"

namespace qprkit {

/// One-sided quadratic: u^2/2 for u <= 0, else 0.
inline double one_sided_f(double u) { return u <= 0.0 ? 0.5 * u * u : 0.0; }
/// Its derivative: u for u <= 0, else 0.
inline double one_sided_f_prime(double u) { return u <= 0.0 ? u : 0.0; }

/// Row indices grouped by observed bin (the sets H_1..H_k).
class BinPartition {
public:
  BinPartition(std::vector<int> bins, int levels);
  explicit BinPartition(const QuantizedObservation& obs)
      : BinPartition(obs.bins, obs.quantizer.levels()) {}

  int m() const noexcept { return static_cast<int>(bins_.size()); }
  int levels() const noexcept { return static_cast<int>(members_.size()); }
  const std::vector<int>& bins() const noexcept { return bins_; }
  /// Rows encoded with symbol s_j, j = 1..k.
  const std::vector<int>& members(int j) const { return members_.at(j - 1); }
  int count(int j) const { return static_cast<int>(members(j).size()); }

private:
  std::vector<int> bins_;
  std::vector<std::vector<int>> members_;
};

/// Rank-one PSD matrix lambda v v^T kept in factored form.
struct LiftedEstimate {
  double lambda = 0.0;
  Eigen::VectorXd v;

  static LiftedEstimate zero(int n);
  /// Lifts x to x x^T: lambda = |x|^2, v = x / |x| (v = e_1 when x = 0).
  static LiftedEstimate from_vector(const Eigen::VectorXd& x);

  /// sqrt(lambda) v.
  Eigen::VectorXd x() const { return std::sqrt(lambda) * v; }
  Eigen::MatrixXd dense() const { return lambda * v * v.transpose(); }
  /// a_i^T X a_i = lambda (a_i^T v)^2 in O(mn).
  Eigen::VectorXd traces(const MeasurementEnsemble& E) const;
};

/// Symmetric matrix held as sum_r w_r u_r u_r^T. Holds the accelerated
/// iterate Y = (1 + beta) X_new - beta X_old without forming n x n storage.
struct FactoredSym {
  std::vector<std::pair<double, Eigen::VectorXd>> terms;

  static FactoredSym from(const LiftedEstimate& X);
  Eigen::MatrixXd dense(int n) const;
  Eigen::VectorXd traces(const MeasurementEnsemble& E) const;
};

// Costs and gradient weights expressed through the lifted traces
// T_i = Tr(A_i X). Every gradient has the form sum_i w_i a_i a_i^T.

double cost_F(const BinPartition& part, const Quantizer& q, const Eigen::VectorXd& traces);
Eigen::VectorXd grad_F_weights(const BinPartition& part, const Quantizer& q,
                               const Eigen::VectorXd& traces);

/// Two-sided squared loss 1/2 sum (y_i - T_i)^2.
double cost_Q(const Eigen::VectorXd& y, const Eigen::VectorXd& traces);
Eigen::VectorXd grad_Q_weights(const Eigen::VectorXd& y, const Eigen::VectorXd& traces);

/// sum_i w_i a_i a_i^T.
Eigen::MatrixXd weighted_outer_sum(const MeasurementEnsemble& E, const Eigen::VectorXd& w);

// Matrix-argument conveniences.
double cost_F(const BinPartition& part, const MeasurementEnsemble& E, const Quantizer& q,
              const Eigen::MatrixXd& X);
double cost_F(const BinPartition& part, const MeasurementEnsemble& E, const Quantizer& q,
              const LiftedEstimate& X);
Eigen::MatrixXd grad_F(const BinPartition& part, const MeasurementEnsemble& E,
                       const Quantizer& q, const Eigen::MatrixXd& X);
Eigen::MatrixXd grad_F(const BinPartition& part, const MeasurementEnsemble& E,
                       const Quantizer& q, const LiftedEstimate& X);
double cost_Q(const Eigen::VectorXd& y, const MeasurementEnsemble& E, const Eigen::MatrixXd& X);
Eigen::MatrixXd grad_Q(const Eigen::VectorXd& y, const MeasurementEnsemble& E,
                       const Eigen::MatrixXd& X);

/// Step-size grid lo, lo + step, ..., hi.
struct LineSearchGrid {
  double lo = 0.0;
  double hi = 0.005;
  double step = 1e-5;

  int points() const;
  double at(int i) const { return lo + i * step; }
};

/// Grid minimizer of eta -> cost(X - eta G). Ties resolve to the smaller
/// step, so lo is returned when the cost is flat.
double line_search(const std::function<double(double)>& cost_along_ray,
                   const LineSearchGrid& grid);

/// C0 = 2 sum_i |a_i|^4, a global Lipschitz constant of grad F.
double lipschitz_bound(const MeasurementEnsemble& E);

}  // namespace qprkit
