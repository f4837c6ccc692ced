#include "qprkit/objective.hpp"

#include <cmath>

namespace qprkit {
namespace {

void check_part(const BinPartition& part, const Quantizer& q, Eigen::Index m) {
  if (part.m() != m) throw DimensionError("bin partition size does not match measurement count");
  if (part.levels() != q.levels()) {
    throw DimensionError("bin partition levels do not match quantizer");
  }
}

}  // namespace

BinPartition::BinPartition(std::vector<int> bins, int levels)
    : bins_(std::move(bins)), members_(levels) {
  if (levels < 2) throw ConfigError("bin partition needs at least 2 levels");
  for (int i = 0; i < m(); ++i) {
    const int j = bins_[i];
    if (j < 1 || j > levels) throw ConfigError("bin index out of range");
    members_[j - 1].push_back(i);
  }
}

LiftedEstimate LiftedEstimate::zero(int n) {
  return {0.0, Eigen::VectorXd::Unit(n, 0)};
}

LiftedEstimate LiftedEstimate::from_vector(const Eigen::VectorXd& x) {
  const double nrm = x.norm();
  if (nrm == 0.0) return zero(static_cast<int>(x.size()));
  return {nrm * nrm, x / nrm};
}

Eigen::VectorXd LiftedEstimate::traces(const MeasurementEnsemble& E) const {
  if (v.size() != E.n()) throw DimensionError("lifted estimate dimension mismatch");
  return lambda * (E.rows() * v).array().square().matrix();
}

FactoredSym FactoredSym::from(const LiftedEstimate& X) {
  FactoredSym out;
  out.terms.emplace_back(X.lambda, X.v);
  return out;
}

Eigen::MatrixXd FactoredSym::dense(int n) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [w, u] : terms) out.noalias() += w * u * u.transpose();
  return out;
}

Eigen::VectorXd FactoredSym::traces(const MeasurementEnsemble& E) const {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(E.m());
  for (const auto& [w, u] : terms) {
    if (u.size() != E.n()) throw DimensionError("factored matrix dimension mismatch");
    if (w != 0.0) t += w * (E.rows() * u).array().square().matrix();
  }
  return t;
}

double cost_F(const BinPartition& part, const Quantizer& q, const Eigen::VectorXd& traces) {
  check_part(part, q, traces.size());
  const int k = q.levels();
  double total = 0.0;
  for (int i = 0; i < part.m(); ++i) {
    const int j = part.bins()[i];
    const double t = traces[i];
    if (j < k) total += one_sided_f(q.tau(j) - t);
    total += one_sided_f(t - q.tau(j - 1));
  }
  return total;
}

Eigen::VectorXd grad_F_weights(const BinPartition& part, const Quantizer& q,
                               const Eigen::VectorXd& traces) {
  check_part(part, q, traces.size());
  const int k = q.levels();
  Eigen::VectorXd w(part.m());
  for (int i = 0; i < part.m(); ++i) {
    const int j = part.bins()[i];
    const double t = traces[i];
    double wi = one_sided_f_prime(t - q.tau(j - 1));
    if (j < k) wi -= one_sided_f_prime(q.tau(j) - t);
    w[i] = wi;
  }
  return w;
}

double cost_Q(const Eigen::VectorXd& y, const Eigen::VectorXd& traces) {
  if (y.size() != traces.size()) throw DimensionError("cost_Q: size mismatch");
  return 0.5 * (y - traces).squaredNorm();
}

Eigen::VectorXd grad_Q_weights(const Eigen::VectorXd& y, const Eigen::VectorXd& traces) {
  if (y.size() != traces.size()) throw DimensionError("grad_Q: size mismatch");
  return traces - y;
}

Eigen::MatrixXd weighted_outer_sum(const MeasurementEnsemble& E, const Eigen::VectorXd& w) {
  if (w.size() != E.m()) throw DimensionError("weighted_outer_sum: weight count mismatch");
  Eigen::MatrixXd G = E.rows().transpose() * w.asDiagonal() * E.rows();
  // Symmetrize away rounding asymmetry.
  return 0.5 * (G + G.transpose());
}

double cost_F(const BinPartition& part, const MeasurementEnsemble& E, const Quantizer& q,
              const Eigen::MatrixXd& X) {
  return cost_F(part, q, lifted_traces(E, X));
}

double cost_F(const BinPartition& part, const MeasurementEnsemble& E, const Quantizer& q,
              const LiftedEstimate& X) {
  return cost_F(part, q, X.traces(E));
}

Eigen::MatrixXd grad_F(const BinPartition& part, const MeasurementEnsemble& E,
                       const Quantizer& q, const Eigen::MatrixXd& X) {
  return weighted_outer_sum(E, grad_F_weights(part, q, lifted_traces(E, X)));
}

Eigen::MatrixXd grad_F(const BinPartition& part, const MeasurementEnsemble& E,
                       const Quantizer& q, const LiftedEstimate& X) {
  return weighted_outer_sum(E, grad_F_weights(part, q, X.traces(E)));
}

double cost_Q(const Eigen::VectorXd& y, const MeasurementEnsemble& E, const Eigen::MatrixXd& X) {
  return cost_Q(y, lifted_traces(E, X));
}

Eigen::MatrixXd grad_Q(const Eigen::VectorXd& y, const MeasurementEnsemble& E,
                       const Eigen::MatrixXd& X) {
  return weighted_outer_sum(E, grad_Q_weights(y, lifted_traces(E, X)));
}

int LineSearchGrid::points() const {
  if (!(step > 0.0) || !(lo >= 0.0) || !(hi >= lo)) {
    throw ConfigError("line-search grid needs step > 0 and 0 <= lo <= hi");
  }
  return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

double line_search(const std::function<double(double)>& cost_along_ray,
                   const LineSearchGrid& grid) {
  const int n = grid.points();
  double best_eta = grid.at(0);
  double best = cost_along_ray(best_eta);
  for (int i = 1; i < n; ++i) {
    const double eta = grid.at(i);
    const double c = cost_along_ray(eta);
    if (c < best) {
      best = c;
      best_eta = eta;
    }
  }
  return best_eta;
}

double lipschitz_bound(const MeasurementEnsemble& E) {
  return 2.0 * E.rows().rowwise().squaredNorm().array().square().sum();
}

}  // namespace qprkit
