#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qprkit/eigen.hpp"
#include "qprkit/measurement.hpp"
#include "qprkit/objective.hpp"

namespace qprkit {

/// Nearest rank-one PSD matrix in Frobenius norm: max(lambda_max, 0) v v^T.
LiftedEstimate rank1_project(const Eigen::MatrixXd& Y, EigenMethod method = EigenMethod::Auto,
                             const Eigen::VectorXd* warm = nullptr);

/// Keeps the s largest-magnitude entries (ties to the lower index).
Eigen::VectorXd hard_threshold(const Eigen::VectorXd& x, int s);

/// Unit top eigenvector of (1/m) sum_i y_i a_i a_i^T. Throws DegenerateError
/// when that matrix vanishes.
Eigen::VectorXd spectral_init(const MeasurementEnsemble& E, const Eigen::VectorXd& y);

enum class Algorithm { Pgd, Apgd, AltMin };
enum class Loss { OneSidedF, SquaredQ };
enum class Init { Zero, Spectral };

struct SolverConfig {
  Algorithm algorithm = Algorithm::Pgd;
  Loss loss = Loss::OneSidedF;
  /// Support size for hard thresholding; unset keeps all n entries.
  std::optional<int> sparsity;
  int n_iter = 100;
  LineSearchGrid grid;
  Init init = Init::Zero;
  std::uint64_t seed = 0;
  /// Stop once the iterate reproduces every observed bin (one-sided loss).
  bool stop_when_consistent = true;
  /// Bypasses the line search with a constant step.
  std::optional<double> fixed_step;
  EigenMethod eigen = EigenMethod::Auto;

  // Presets for the named algorithms.
  static SolverConfig qpr();
  static SolverConfig qpr_a();
  static SolverConfig sqpr(int s);
  static SolverConfig sqpr_a(int s);
  static SolverConfig pl();
  static SolverConfig pl_a();
  static SolverConfig altmin();
};

/// Looks up a preset by its CLI name: qpr, qpr-a, sqpr, sqpr-a, pl, pl-a,
/// altmin. Sparse presets require `sparsity`.
SolverConfig preset_by_name(const std::string& name, std::optional<int> sparsity = std::nullopt);

struct Problem {
  const MeasurementEnsemble& ensemble;
  const QuantizedObservation& observation;
  /// Reference signal for SNR reporting only; never read by the solvers.
  const Eigen::VectorXd* x_star = nullptr;
};

struct TraceRow {
  int iter = 0;
  double cost = 0.0;
  double snr_db = 0.0;
  double upsilon = 0.0;
  double eta = 0.0;
  double beta = 0.0;
};

/// Per-iteration record. Always n_iter rows; after an early stop the final
/// state is repeated.
struct SolverTrace {
  std::vector<TraceRow> rows;
  Eigen::VectorXd x_hat;
  int stopped_at = 0;

  /// Header "iter,cost,snr_db,upsilon,eta,beta"; infinite SNR is "inf".
  std::string to_csv() const;
  double final_snr_db() const { return rows.empty() ? 0.0 : rows.back().snr_db; }
};

SolverTrace run_pgd(const Problem& problem, const SolverConfig& cfg);
SolverTrace run_apgd(const Problem& problem, const SolverConfig& cfg);
SolverTrace run_altmin(const Problem& problem, const SolverConfig& cfg);
/// Dispatches on cfg.algorithm.
SolverTrace run_solver(const Problem& problem, const SolverConfig& cfg);

}  // namespace qprkit
