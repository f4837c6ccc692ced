#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qprkit/config.hpp"
#include "qprkit/metrics.hpp"
#include "qprkit/quantizer.hpp"
#include "qprkit/solvers.hpp"

namespace qprkit {

enum class QuantizerKind { Equiprobable, LloydMax };
enum class SignalKind { UnitSphere, TwoSinusoid, Sparse };

QuantizerKind parse_quantizer_kind(const std::string& s);  ///< "eq" or "lmq"
std::string to_string(QuantizerKind kind);
Quantizer make_quantizer(QuantizerKind kind, int k,
                         LastSymbolRule rule = LastSymbolRule::TwoDelta);

/// The codebook each preset expects: one-sided presets use EQ, the
/// squared-loss baselines use LMQ.
QuantizerKind default_quantizer_for(const std::string& algorithm);

/// Experiment description. Keys of the flat config file match the CLI flag
/// names: n, m, k, quantizer, algorithms, sigma-xi, snr-grid, sparsity,
/// signal, trials, ensembles, noise-draws, iters, seed, out.
struct ExperimentConfig {
  int n = 32;
  int m = 320;
  int k = 8;
  /// Unset: each algorithm gets default_quantizer_for(name).
  std::optional<QuantizerKind> quantizer;
  std::vector<std::string> algorithms{"qpr", "qpr-a"};
  double sigma_xi = 0.0;
  std::vector<double> snr_grid_db{25.0, 30.0, 35.0};
  std::optional<int> sparsity;
  SignalKind signal = SignalKind::UnitSphere;
  int n_trials = 20;
  int n_ensembles = 5;
  int n_noise = 5;
  int n_iter = 100;
  std::uint64_t base_seed = 1;
  std::string out = ".";

  /// Reads keys from a config map, falling back to the defaults above.
  /// Throws ConfigError for invalid values.
  static ExperimentConfig from_map(const ConfigMap& c);
  void validate() const;
};

/// Seeds of one trial's independent random streams.
struct TrialSeeds {
  std::uint64_t ensemble;
  std::uint64_t signal;
  std::uint64_t noise;
};
/// base_seed + trial index, split into sub-streams.
TrialSeeds trial_seeds(std::uint64_t base_seed, int trial);

struct TrialOutcome {
  int trial = 0;
  std::string algorithm;
  bool ok = false;
  /// Failure came from a numerical routine rather than bad input.
  bool numerical_failure = false;
  std::string error;
  SolverTrace trace;
  double final_snr_db = 0.0;
  double final_upsilon = 0.0;
};

struct AlgorithmSummary {
  std::string algorithm;
  std::string quantizer;
  int trials = 0;
  int failures = 0;
  DbSummary snr;
  double mean_upsilon = 0.0;
  double std_upsilon = 0.0;
};

struct RunResult {
  /// Indexed [algorithm][trial].
  std::vector<std::vector<TrialOutcome>> outcomes;
  std::vector<AlgorithmSummary> summaries;

  int failures() const;
  /// Header "algorithm,quantizer,trials,failures,mean_snr_db,std_snr_db,
  /// exact_hits,mean_upsilon,std_upsilon". dB means exclude exact hits.
  std::string aggregate_csv() const;
};

/// All algorithms see the same ensemble, signal and noise in each trial.
/// Trials run on a worker pool; results do not depend on the worker count.
RunResult run_experiment(const ExperimentConfig& cfg);

struct CrbRow {
  double input_snr_db = 0.0;
  double crb_db = 0.0;
  std::string quantizer;
  int k = 0;
  bool rank_deficient = false;
};
struct MseRow {
  double input_snr_db = 0.0;
  double mse_db = 0.0;
  std::string algorithm;
  std::string quantizer;
  int k = 0;
  int failures = 0;
};
struct CrbSweep {
  std::vector<CrbRow> crb;
  std::vector<MseRow> mse;
  /// Header "input_snr_db,crb_db,quantizer,k,rank_deficient".
  std::string crb_csv() const;
  /// Header "input_snr_db,mse_db,algorithm,quantizer,k,failures".
  std::string mse_csv() const;
};

/// For each input SNR: CRB under EQ and LMQ (pseudo-inverse trace averaged
/// over ensembles) and the linear-average MSE of each algorithm over
/// n_ensembles x n_noise runs on the two-sinusoid signal.
CrbSweep run_crb_sweep(const ExperimentConfig& cfg);

/// Header "delta,rho,pe1,pe2,pe_max,m_min"; vacuous rows carry m_min
/// "vacuous".
std::string distinguishability_csv(const std::vector<double>& deltas,
                                   const std::vector<double>& rhos, double tau_penultimate,
                                   double eps);
/// Header "k,sigma_sq,p_r".
std::string robustness_csv(const std::vector<int>& ks, const std::vector<double>& sigma_sqs,
                           int n_trial, std::uint64_t seed);

/// Worker count: QPRKIT_THREADS if set, else hardware concurrency; never
/// more than `jobs`.
int worker_count(int jobs);

/// Runs body(0..jobs-1) on worker_count(jobs) threads.
void parallel_for(int jobs, const std::function<void(int)>& body);

/// Formats a double with %.17g; infinities as "inf"/"-inf".
std::string format_number(double v);

}  // namespace qprkit
