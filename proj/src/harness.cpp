#include "qprkit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "qprkit/analysis.hpp"
#include "qprkit/crb.hpp"
#include "qprkit/errors.hpp"
#include "qprkit/measurement.hpp"
#include "qprkit/rng.hpp"

namespace qprkit {
namespace {

enum StreamTag : std::uint64_t { kEnsembleTag = 1, kSignalTag = 2, kNoiseTag = 3 };

GroundTruth make_signal(const ExperimentConfig& cfg, const TrialSeeds& seeds) {
  switch (cfg.signal) {
    case SignalKind::UnitSphere: return gen_unit_sphere(cfg.n, seeds.signal);
    case SignalKind::TwoSinusoid: return gen_two_sinusoid(cfg.n);
    case SignalKind::Sparse:
      if (!cfg.sparsity) throw ConfigError("sparse signal needs a sparsity level");
      return gen_sparse(cfg.n, *cfg.sparsity, seeds.signal);
  }
  throw ConfigError("unknown signal kind");
}

SignalKind parse_signal(const std::string& s) {
  if (s == "sphere") return SignalKind::UnitSphere;
  if (s == "sinusoid") return SignalKind::TwoSinusoid;
  if (s == "sparse") return SignalKind::Sparse;
  throw ConfigError("unknown signal '" + s + "' (expected sphere, sinusoid or sparse)");
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// One codebook per algorithm, built once per experiment.
std::vector<Quantizer> quantizers_for(const ExperimentConfig& cfg,
                                      std::vector<QuantizerKind>& kinds) {
  std::optional<Quantizer> eq, lmq;
  std::vector<Quantizer> out;
  for (const auto& name : cfg.algorithms) {
    const QuantizerKind kind = cfg.quantizer.value_or(default_quantizer_for(name));
    auto& slot = kind == QuantizerKind::Equiprobable ? eq : lmq;
    if (!slot) slot = make_quantizer(kind, cfg.k);
    out.push_back(*slot);
    kinds.push_back(kind);
  }
  return out;
}

SolverConfig solver_config_for(const ExperimentConfig& cfg, const std::string& name,
                               std::uint64_t seed) {
  SolverConfig sc = preset_by_name(name, cfg.sparsity);
  sc.n_iter = cfg.n_iter;
  sc.seed = seed;
  return sc;
}

TrialOutcome run_one(const Problem& p, const SolverConfig& sc, int trial,
                     const std::string& name) {
  TrialOutcome o;
  o.trial = trial;
  o.algorithm = name;
  try {
    o.trace = run_solver(p, sc);
    o.ok = true;
    o.final_snr_db = o.trace.final_snr_db();
    o.final_upsilon = o.trace.rows.back().upsilon;
  } catch (const ConvergenceError& e) {
    o.numerical_failure = true;
    o.error = e.what();
  } catch (const DegenerateError& e) {
    o.numerical_failure = true;
    o.error = e.what();
  } catch (const std::exception& e) {
    o.error = e.what();
  }
  return o;
}

}  // namespace

QuantizerKind parse_quantizer_kind(const std::string& s) {
  if (s == "eq") return QuantizerKind::Equiprobable;
  if (s == "lmq") return QuantizerKind::LloydMax;
  throw ConfigError("unknown quantizer kind '" + s + "' (expected eq or lmq)");
}

std::string to_string(QuantizerKind kind) {
  return kind == QuantizerKind::Equiprobable ? "eq" : "lmq";
}

Quantizer make_quantizer(QuantizerKind kind, int k, LastSymbolRule rule) {
  if (kind == QuantizerKind::Equiprobable) return design_equiprobable(k, rule);
  return design_lloyd_max(k);
}

QuantizerKind default_quantizer_for(const std::string& algorithm) {
  if (algorithm == "pl" || algorithm == "pl-a" || algorithm == "altmin") {
    return QuantizerKind::LloydMax;
  }
  return QuantizerKind::Equiprobable;
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& c) {
  ExperimentConfig cfg;
  cfg.n = get_int(c, "n", cfg.n);
  cfg.m = get_int(c, "m", 10 * cfg.n);
  cfg.k = get_int(c, "k", cfg.k);
  const std::string qk = get_string(c, "quantizer", "auto");
  if (qk != "auto") cfg.quantizer = parse_quantizer_kind(qk);
  cfg.algorithms = get_list(c, "algorithms", cfg.algorithms);
  cfg.sigma_xi = get_double(c, "sigma-xi", cfg.sigma_xi);
  cfg.snr_grid_db = get_double_list(c, "snr-grid", cfg.snr_grid_db);
  if (c.count("sparsity")) cfg.sparsity = get_int(c, "sparsity", 0);
  cfg.signal = parse_signal(get_string(c, "signal", cfg.sparsity ? "sparse" : "sphere"));
  cfg.n_trials = get_int(c, "trials", cfg.n_trials);
  cfg.n_ensembles = get_int(c, "ensembles", cfg.n_ensembles);
  cfg.n_noise = get_int(c, "noise-draws", cfg.n_noise);
  cfg.n_iter = get_int(c, "iters", cfg.n_iter);
  const double seed = get_double(c, "seed", 1.0);
  if (seed < 0.0 || seed != std::floor(seed)) throw ConfigError("seed must be a nonnegative integer");
  cfg.base_seed = static_cast<std::uint64_t>(seed);
  cfg.out = get_string(c, "out", cfg.out);
  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  if (n < 1 || m < 1) throw ConfigError("n and m must be positive");
  if (k < 2) throw ConfigError("k must be >= 2");
  if (n_trials < 1 || n_ensembles < 1 || n_noise < 1) throw ConfigError("trial counts must be >= 1");
  if (n_iter < 1) throw ConfigError("iters must be >= 1");
  if (sigma_xi < 0.0) throw ConfigError("sigma-xi must be >= 0");
  if (sparsity && (*sparsity < 1 || *sparsity > n)) throw ConfigError("sparsity must be in [1, n]");
  if (algorithms.empty()) throw ConfigError("no algorithms given");
  for (const auto& a : algorithms) preset_by_name(a, sparsity.value_or(n));
}

TrialSeeds trial_seeds(std::uint64_t base_seed, int trial) {
  const std::uint64_t s = base_seed + static_cast<std::uint64_t>(trial);
  return {derive_seed(s, kEnsembleTag), derive_seed(s, kSignalTag), derive_seed(s, kNoiseTag)};
}

int RunResult::failures() const {
  int f = 0;
  for (const auto& s : summaries) f += s.failures;
  return f;
}

std::string RunResult::aggregate_csv() const {
  std::string out =
      "algorithm,quantizer,trials,failures,mean_snr_db,std_snr_db,exact_hits,mean_upsilon,"
      "std_upsilon\n";
  for (const auto& s : summaries) {
    out += s.algorithm + ',' + s.quantizer + ',' + std::to_string(s.trials) + ',' +
           std::to_string(s.failures) + ',' + format_number(s.snr.mean) + ',' +
           format_number(s.snr.stddev) + ',' + std::to_string(s.snr.exact_hits) + ',' +
           format_number(s.mean_upsilon) + ',' + format_number(s.std_upsilon) + '\n';
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<QuantizerKind> kinds;
  const std::vector<Quantizer> quantizers = quantizers_for(cfg, kinds);
  const auto n_alg = cfg.algorithms.size();

  RunResult result;
  result.outcomes.assign(n_alg, std::vector<TrialOutcome>(cfg.n_trials));
  parallel_for(cfg.n_trials, [&](int t) {
    const TrialSeeds seeds = trial_seeds(cfg.base_seed, t);
    const auto E = MeasurementEnsemble::gaussian(cfg.m, cfg.n, seeds.ensemble);
    const GroundTruth truth = make_signal(cfg, seeds);
    for (std::size_t a = 0; a < n_alg; ++a) {
      const auto obs = acquire(E, truth.x_star, quantizers[a], cfg.sigma_xi, seeds.noise);
      const Problem p{E, obs, &truth.x_star};
      result.outcomes[a][t] =
          run_one(p, solver_config_for(cfg, cfg.algorithms[a], cfg.base_seed + t), t,
                  cfg.algorithms[a]);
    }
  });

  for (std::size_t a = 0; a < n_alg; ++a) {
    AlgorithmSummary s;
    s.algorithm = cfg.algorithms[a];
    s.quantizer = to_string(kinds[a]);
    s.trials = cfg.n_trials;
    std::vector<double> snr, ups;
    for (const auto& o : result.outcomes[a]) {
      if (!o.ok) {
        ++s.failures;
        continue;
      }
      snr.push_back(o.final_snr_db);
      ups.push_back(o.final_upsilon);
    }
    s.snr = summarize_db(snr);
    s.mean_upsilon = mean_of(ups);
    s.std_upsilon = stddev_of(ups);
    result.summaries.push_back(s);
  }
  return result;
}

std::string CrbSweep::crb_csv() const {
  std::string out = "input_snr_db,crb_db,quantizer,k,rank_deficient\n";
  for (const auto& r : crb) {
    out += format_number(r.input_snr_db) + ',' + format_number(r.crb_db) + ',' + r.quantizer +
           ',' + std::to_string(r.k) + ',' + (r.rank_deficient ? "true" : "false") + '\n';
  }
  return out;
}

std::string CrbSweep::mse_csv() const {
  std::string out = "input_snr_db,mse_db,algorithm,quantizer,k,failures\n";
  for (const auto& r : mse) {
    out += format_number(r.input_snr_db) + ',' + format_number(r.mse_db) + ',' + r.algorithm +
           ',' + r.quantizer + ',' + std::to_string(r.k) + ',' + std::to_string(r.failures) +
           '\n';
  }
  return out;
}

CrbSweep run_crb_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<QuantizerKind> kinds;
  const std::vector<Quantizer> quantizers = quantizers_for(cfg, kinds);
  const Quantizer q_eq = make_quantizer(QuantizerKind::Equiprobable, cfg.k);
  const Quantizer q_lmq = make_quantizer(QuantizerKind::LloydMax, cfg.k);
  const auto n_alg = cfg.algorithms.size();
  const int n_ens = cfg.n_ensembles;
  const int n_noise = cfg.n_noise;

  std::vector<MeasurementEnsemble> ensembles;
  std::vector<GroundTruth> truths;
  for (int e = 0; e < n_ens; ++e) {
    const TrialSeeds seeds = trial_seeds(cfg.base_seed, e);
    ensembles.push_back(MeasurementEnsemble::gaussian(cfg.m, cfg.n, seeds.ensemble));
    truths.push_back(make_signal(cfg, seeds));
  }

  CrbSweep sweep;
  for (double snr_db : cfg.snr_grid_db) {
    std::vector<double> sigmas(n_ens);
    for (int e = 0; e < n_ens; ++e) {
      sigmas[e] = sigma_for_input_snr(ensembles[e], truths[e].x_star, snr_db);
    }

    for (const auto* q : {&q_eq, &q_lmq}) {
      CrbRow row;
      row.input_snr_db = snr_db;
      row.quantizer = q == &q_eq ? "eq" : "lmq";
      row.k = cfg.k;
      double total = 0.0;
      int used = 0;
      for (int e = 0; e < n_ens; ++e) {
        try {
          const CrbResult r = compute_crb(ensembles[e], truths[e].x_star, *q, sigmas[e]);
          total += r.crb_trace;
          ++used;
          row.rank_deficient = row.rank_deficient || r.rank_deficient;
        } catch (const DegenerateError&) {
          row.rank_deficient = true;
        }
      }
      row.crb_db = used ? 10.0 * std::log10(total / used)
                        : std::numeric_limits<double>::infinity();
      sweep.crb.push_back(row);
    }

    // mse[a][job], job = e * n_noise + r.
    const int jobs = n_ens * n_noise;
    std::vector<std::vector<double>> mse(n_alg, std::vector<double>(jobs, -1.0));
    parallel_for(jobs, [&](int job) {
      const int e = job / n_noise;
      const int r = job % n_noise;
      const auto& E = ensembles[e];
      const auto& x = truths[e].x_star;
      const std::uint64_t noise_seed = derive_seed(trial_seeds(cfg.base_seed, e).noise, r);
      for (std::size_t a = 0; a < n_alg; ++a) {
        const auto obs = acquire(E, x, quantizers[a], sigmas[e], noise_seed);
        const Problem p{E, obs, &x};
        const TrialOutcome o =
            run_one(p, solver_config_for(cfg, cfg.algorithms[a], noise_seed), job,
                    cfg.algorithms[a]);
        if (o.ok) mse[a][job] = reconstruction_mse(o.trace.x_hat, x);
      }
    });
    for (std::size_t a = 0; a < n_alg; ++a) {
      MseRow row;
      row.input_snr_db = snr_db;
      row.algorithm = cfg.algorithms[a];
      row.quantizer = to_string(kinds[a]);
      row.k = cfg.k;
      std::vector<double> ok;
      for (double v : mse[a]) {
        if (v < 0.0) {
          ++row.failures;
        } else {
          ok.push_back(v);
        }
      }
      row.mse_db = ok.empty() ? std::numeric_limits<double>::quiet_NaN()
                              : 10.0 * std::log10(mean_of(ok));
      sweep.mse.push_back(row);
    }
  }
  return sweep;
}

std::string distinguishability_csv(const std::vector<double>& deltas,
                                   const std::vector<double>& rhos, double tau_penultimate,
                                   double eps) {
  std::string out = "delta,rho,pe1,pe2,pe_max,m_min\n";
  for (double d : deltas) {
    for (double rho : rhos) {
      const auto r = distinguishability(d, tau_penultimate, rho, eps);
      out += format_number(d) + ',' + format_number(rho) + ',' + format_number(r.pe1) + ',' +
             format_number(r.pe2) + ',' + format_number(r.pe_max) + ',' +
             (r.m_min ? std::to_string(*r.m_min) : std::string("vacuous")) + '\n';
    }
  }
  return out;
}

std::string robustness_csv(const std::vector<int>& ks, const std::vector<double>& sigma_sqs,
                           int n_trial, std::uint64_t seed) {
  std::string out = "k,sigma_sq,p_r\n";
  for (int k : ks) {
    const Quantizer q = design_equiprobable(k);
    for (double s2 : sigma_sqs) {
      out += std::to_string(k) + ',' + format_number(s2) + ',' +
             format_number(robustness_factor_mc(q, s2, n_trial, seed)) + '\n';
    }
  }
  return out;
}

int worker_count(int jobs) {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("QPRKIT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = cap;
  }
  return std::max(1, std::min(n, jobs));
}

void parallel_for(int jobs, const std::function<void(int)>& body) {
  const int workers = worker_count(jobs);
  if (workers <= 1) {
    for (int j = 0; j < jobs; ++j) body(j);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (int j = next++; j < jobs; j = next++) {
      try {
        body(j);
      } catch (...) {
        if (!failed.exchange(true)) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace qprkit
