#include "qprkit/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "qprkit/metrics.hpp"

namespace qprkit {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Loss selected by the config, expressed on lifted traces.
class TraceLoss {
public:
  TraceLoss(const Problem& p, Loss loss)
      : loss_(loss), part_(p.observation), q_(p.observation.quantizer),
        y_(p.observation.symbols()) {}

  double cost(const Eigen::VectorXd& t) const {
    return loss_ == Loss::OneSidedF ? cost_F(part_, q_, t) : cost_Q(y_, t);
  }
  Eigen::VectorXd weights(const Eigen::VectorXd& t) const {
    return loss_ == Loss::OneSidedF ? grad_F_weights(part_, q_, t) : grad_Q_weights(y_, t);
  }

private:
  Loss loss_;
  BinPartition part_;
  const Quantizer& q_;
  Eigen::VectorXd y_;
};

struct StepResult {
  LiftedEstimate x;
  double eta = 0.0;
  bool zero_gradient = false;
};

// One projected gradient step from `base`: line search on the unprojected
// ray base - eta G, rank-one projection, optional hard thresholding.
StepResult projected_step(const Problem& p, const SolverConfig& cfg, const TraceLoss& loss,
                          const FactoredSym& base, const Eigen::VectorXd* warm) {
  const auto& E = p.ensemble;
  const int n = E.n();
  const Eigen::VectorXd t_base = base.traces(E);
  const Eigen::VectorXd w = loss.weights(t_base);

  StepResult out;
  Eigen::MatrixXd Z = base.dense(n);
  if (w.isZero(0.0)) {
    out.zero_gradient = true;
    out.eta = cfg.grid.lo;
  } else {
    const Eigen::MatrixXd G = weighted_outer_sum(E, w);
    const Eigen::VectorXd t_grad = (E.rows() * G).cwiseProduct(E.rows()).rowwise().sum();
    if (cfg.fixed_step) {
      out.eta = *cfg.fixed_step;
    } else {
      Eigen::VectorXd t_eta(t_base.size());
      out.eta = line_search(
          [&](double eta) {
            t_eta = t_base - eta * t_grad;
            return loss.cost(t_eta);
          },
          cfg.grid);
    }
    Z -= out.eta * G;
  }
  out.x = rank1_project(Z, cfg.eigen, warm);
  if (cfg.sparsity && *cfg.sparsity < n) {
    out.x = LiftedEstimate::from_vector(hard_threshold(out.x.x(), *cfg.sparsity));
  }
  return out;
}

LiftedEstimate initial_estimate(const Problem& p, const SolverConfig& cfg) {
  const int n = p.ensemble.n();
  if (cfg.init == Init::Zero) return LiftedEstimate::zero(n);
  return LiftedEstimate{1.0, spectral_init(p.ensemble, p.observation.symbols())};
}

void validate(const Problem& p, const SolverConfig& cfg) {
  if (cfg.n_iter < 1) throw ConfigError("solver: n_iter must be >= 1");
  if (cfg.sparsity && (*cfg.sparsity < 1 || *cfg.sparsity > p.ensemble.n())) {
    throw ConfigError("solver: sparsity must satisfy 1 <= s <= n");
  }
  if (p.observation.m() != p.ensemble.m()) {
    throw DimensionError("solver: observation size does not match ensemble");
  }
  if (p.x_star && p.x_star->size() != p.ensemble.n()) {
    throw DimensionError("solver: reference signal dimension mismatch");
  }
  cfg.grid.points();
}

TraceRow make_row(const Problem& p, int iter, double cost, const Eigen::VectorXd& x, double eta,
                  double beta) {
  TraceRow r;
  r.iter = iter;
  r.cost = cost;
  r.snr_db = p.x_star ? reconstruction_snr(x, *p.x_star) : kNan;
  r.upsilon = consistency_upsilon(p.ensemble, p.observation.quantizer, x, p.observation.bins);
  r.eta = eta;
  r.beta = beta;
  return r;
}

void pad_trace(SolverTrace& trace, int n_iter) {
  while (static_cast<int>(trace.rows.size()) < n_iter) {
    TraceRow r = trace.rows.back();
    r.iter += 1;
    r.eta = 0.0;
    trace.rows.push_back(r);
  }
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

LiftedEstimate rank1_project(const Eigen::MatrixXd& Y, EigenMethod method,
                             const Eigen::VectorXd* warm) {
  if (Y.rows() != Y.cols()) throw DimensionError("rank1_project: matrix must be square");
  const Eigenpair top = top_eigenpair(Y, method, warm);
  return {std::max(top.value, 0.0), top.vector};
}

Eigen::VectorXd hard_threshold(const Eigen::VectorXd& x, int s) {
  const auto n = static_cast<int>(x.size());
  if (s < 1 || s > n) throw ConfigError("hard_threshold: need 1 <= s <= n");
  if (s == n) return x;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return std::abs(x[a]) > std::abs(x[b]); });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < s; ++i) out[idx[i]] = x[idx[i]];
  return out;
}

Eigen::VectorXd spectral_init(const MeasurementEnsemble& E, const Eigen::VectorXd& y) {
  if (y.size() != E.m()) throw DimensionError("spectral_init: symbol count mismatch");
  const Eigen::MatrixXd S = weighted_outer_sum(E, y) / E.m();
  if (S.isZero(0.0)) throw DegenerateError("degenerate spectral matrix");
  return top_eigenpair(S).vector;
}

SolverConfig SolverConfig::qpr() { return {}; }

SolverConfig SolverConfig::qpr_a() {
  SolverConfig c;
  c.algorithm = Algorithm::Apgd;
  return c;
}

SolverConfig SolverConfig::sqpr(int s) {
  SolverConfig c = qpr();
  c.sparsity = s;
  return c;
}

SolverConfig SolverConfig::sqpr_a(int s) {
  SolverConfig c = qpr_a();
  c.sparsity = s;
  return c;
}

SolverConfig SolverConfig::pl() {
  SolverConfig c;
  c.loss = Loss::SquaredQ;
  c.init = Init::Spectral;
  c.stop_when_consistent = false;
  return c;
}

SolverConfig SolverConfig::pl_a() {
  SolverConfig c = pl();
  c.algorithm = Algorithm::Apgd;
  return c;
}

SolverConfig SolverConfig::altmin() {
  SolverConfig c;
  c.algorithm = Algorithm::AltMin;
  c.loss = Loss::SquaredQ;
  c.init = Init::Spectral;
  c.stop_when_consistent = false;
  return c;
}

SolverConfig preset_by_name(const std::string& name, std::optional<int> sparsity) {
  auto need_s = [&]() {
    if (!sparsity) throw ConfigError("algorithm '" + name + "' needs a sparsity level");
    return *sparsity;
  };
  if (name == "qpr") return SolverConfig::qpr();
  if (name == "qpr-a") return SolverConfig::qpr_a();
  if (name == "sqpr") return SolverConfig::sqpr(need_s());
  if (name == "sqpr-a") return SolverConfig::sqpr_a(need_s());
  if (name == "pl") return SolverConfig::pl();
  if (name == "pl-a") return SolverConfig::pl_a();
  if (name == "altmin") return SolverConfig::altmin();
  throw ConfigError("unknown algorithm '" + name + "'");
}

std::string SolverTrace::to_csv() const {
  std::string out = "iter,cost,snr_db,upsilon,eta,beta\n";
  for (const auto& r : rows) {
    out += std::to_string(r.iter) + ',' + fmt_double(r.cost) + ',' + fmt_double(r.snr_db) + ',' +
           fmt_double(r.upsilon) + ',' + fmt_double(r.eta) + ',' + fmt_double(r.beta) + '\n';
  }
  return out;
}

SolverTrace run_pgd(const Problem& p, const SolverConfig& cfg) {
  validate(p, cfg);
  const TraceLoss loss(p, cfg.loss);
  LiftedEstimate X = initial_estimate(p, cfg);

  SolverTrace trace;
  trace.rows.reserve(cfg.n_iter);
  for (int t = 1; t <= cfg.n_iter; ++t) {
    const StepResult step = projected_step(p, cfg, loss, FactoredSym::from(X), &X.v);
    if (t == 1 && step.zero_gradient && cfg.init == Init::Zero) {
      throw DegenerateError("degenerate initialization: zero gradient at X = 0");
    }
    X = step.x;
    const Eigen::VectorXd x = X.x();
    trace.rows.push_back(make_row(p, t, loss.cost(X.traces(p.ensemble)), x, step.eta, 0.0));
    trace.stopped_at = t;
    if (cfg.stop_when_consistent && trace.rows.back().upsilon == 1.0) break;
  }
  trace.x_hat = X.x();
  pad_trace(trace, cfg.n_iter);
  return trace;
}

SolverTrace run_apgd(const Problem& p, const SolverConfig& cfg) {
  validate(p, cfg);
  const TraceLoss loss(p, cfg.loss);
  LiftedEstimate X_prev = initial_estimate(p, cfg);
  FactoredSym Y = FactoredSym::from(X_prev);
  double theta = 1.0;

  SolverTrace trace;
  trace.rows.reserve(cfg.n_iter);
  for (int t = 1; t <= cfg.n_iter; ++t) {
    const StepResult step = projected_step(p, cfg, loss, Y, &X_prev.v);
    if (t == 1 && step.zero_gradient && cfg.init == Init::Zero) {
      throw DegenerateError("degenerate initialization: zero gradient at X = 0");
    }
    const LiftedEstimate& X = step.x;
    const double theta_next = 2.0 / (1.0 + std::sqrt(1.0 + 4.0 / (theta * theta)));
    const double beta = theta_next * (1.0 / theta - 1.0);
    Y.terms.clear();
    Y.terms.emplace_back((1.0 + beta) * X.lambda, X.v);
    if (beta != 0.0 && X_prev.lambda != 0.0) Y.terms.emplace_back(-beta * X_prev.lambda, X_prev.v);

    const Eigen::VectorXd x = X.x();
    trace.rows.push_back(make_row(p, t, loss.cost(X.traces(p.ensemble)), x, step.eta, beta));
    trace.stopped_at = t;
    X_prev = X;
    theta = theta_next;
    if (cfg.stop_when_consistent && trace.rows.back().upsilon == 1.0) break;
  }
  trace.x_hat = X_prev.x();
  pad_trace(trace, cfg.n_iter);
  return trace;
}

SolverTrace run_altmin(const Problem& p, const SolverConfig& cfg) {
  validate(p, cfg);
  const auto& A = p.ensemble.rows();
  const Eigen::VectorXd y = p.observation.symbols();
  if ((y.array() < 0.0).any()) throw ConfigError("altmin: symbols must be nonnegative");
  const Eigen::VectorXd magnitude = y.array().sqrt();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < A.cols()) throw DegenerateError("altmin: rank-deficient least-squares system");

  Eigen::VectorXd x = spectral_init(p.ensemble, y) * std::sqrt(y.mean());
  SolverTrace trace;
  trace.rows.reserve(cfg.n_iter);
  for (int t = 1; t <= cfg.n_iter; ++t) {
    const Eigen::VectorXd proj = A * x;
    Eigen::VectorXd target(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      target[i] = proj[i] < 0.0 ? -magnitude[i] : magnitude[i];
    }
    x = qr.solve(target);
    const double residual = 0.5 * (target - A * x).squaredNorm();
    trace.rows.push_back(make_row(p, t, residual, x, 0.0, 0.0));
    trace.stopped_at = t;
  }
  trace.x_hat = x;
  return trace;
}

SolverTrace run_solver(const Problem& p, const SolverConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::Pgd: return run_pgd(p, cfg);
    case Algorithm::Apgd: return run_apgd(p, cfg);
    case Algorithm::AltMin: return run_altmin(p, cfg);
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace qprkit
