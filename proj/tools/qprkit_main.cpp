// qprkit command-line front end.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "qprkit/analysis.hpp"
#include "qprkit/config.hpp"
#include "qprkit/errors.hpp"
#include "qprkit/harness.hpp"
#include "qprkit/quantizer.hpp"
#include "qprkit/rng.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kPartial = 2, kNumerical = 3 };

using qprkit::ConfigMap;

// String-valued flags that are folded into a ConfigMap after parsing, so a
// flag given on the command line overrides the same key from --config.
struct FlagSet {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    options[key] = app->add_option("--" + key, values[key], help);
  }
  ConfigMap resolve() const {
    ConfigMap c;
    if (!config_path.empty()) c = qprkit::load_config_file(config_path);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) c[key] = values.at(key);
    }
    return c;
  }
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw qprkit::ConfigError("cannot write '" + path.string() + "'");
  f << content;
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    write_file(out, content);
  }
}

int cmd_design_quant(const ConfigMap& c) {
  using namespace qprkit;
  const int k = get_int(c, "k", 8);
  const auto kind = parse_quantizer_kind(get_string(c, "kind", "eq"));
  const std::string rule_name = get_string(c, "last-symbol", "two-delta");
  LastSymbolRule rule = LastSymbolRule::TwoDelta;
  if (rule_name == "half-delta") {
    rule = LastSymbolRule::HalfDelta;
  } else if (rule_name != "two-delta") {
    throw ConfigError("last-symbol must be two-delta or half-delta");
  }
  const int samples = get_int(c, "samples", 100000);
  if (samples < 1) throw ConfigError("samples must be >= 1");
  const auto seed = static_cast<std::uint64_t>(get_int(c, "seed", 1));

  const Quantizer q = make_quantizer(kind, k, rule);
  Rng rng(seed);
  std::vector<double> b(samples);
  for (auto& v : b) {
    const double z = rng.normal();
    v = z * z;
  }
  const std::string out = get_string(c, "out", "");
  if (!out.empty()) write_file(out, q.to_text());

  std::printf("kind=%s k=%d\n", to_string(kind).c_str(), k);
  std::printf("delta=%.6f\n", precision_delta(q));
  std::printf("delta_sq=%.6f\n", delta_sq(q));
  std::printf("tau_penultimate=%.6f\n", q.tau(k - 1));
  std::printf("quantization_snr_db=%.4f (pooled, %d samples)\n", quantization_snr(q, b), samples);
  std::printf("quantization_snr_db_batched=%.4f (mean over batches of 320)\n",
              average_quantization_snr(q, b, 320));
  if (out.empty()) std::cout << q.to_text();
  return kOk;
}

int cmd_run(const ConfigMap& c) {
  using namespace qprkit;
  const auto cfg = ExperimentConfig::from_map(c);
  const RunResult r = run_experiment(cfg);
  const std::filesystem::path dir(cfg.out);
  for (const auto& per_alg : r.outcomes) {
    for (const auto& o : per_alg) {
      if (!o.ok) {
        std::fprintf(stderr, "trial %d (%s) failed: %s\n", o.trial, o.algorithm.c_str(),
                     o.error.c_str());
        continue;
      }
      write_file(dir / ("trace_" + o.algorithm + "_" + std::to_string(o.trial) + ".csv"),
                 o.trace.to_csv());
    }
  }
  const std::string agg = r.aggregate_csv();
  write_file(dir / "aggregate.csv", agg);
  std::cout << agg;

  int total = 0, numerical = 0;
  for (const auto& per_alg : r.outcomes) {
    for (const auto& o : per_alg) {
      if (!o.ok) {
        ++total;
        numerical += o.numerical_failure;
      }
    }
  }
  const int runs = static_cast<int>(r.outcomes.size()) * cfg.n_trials;
  if (total == 0) return kOk;
  if (total == runs && numerical == total) return kNumerical;
  return kPartial;
}

int cmd_crb_sweep(ConfigMap c) {
  using namespace qprkit;
  if (!c.count("signal")) c["signal"] = "sinusoid";
  if (!c.count("algorithms")) c["algorithms"] = "qpr-a";
  const auto cfg = ExperimentConfig::from_map(c);
  const CrbSweep s = run_crb_sweep(cfg);
  const std::filesystem::path dir(cfg.out);
  write_file(dir / "crb.csv", s.crb_csv());
  write_file(dir / "mse.csv", s.mse_csv());
  std::cout << s.crb_csv() << s.mse_csv();
  for (const auto& row : s.mse) {
    if (row.failures > 0) return kPartial;
  }
  return kOk;
}

int cmd_analysis(const ConfigMap& c) {
  using namespace qprkit;
  const std::string table = get_string(c, "table", "bounds");
  const std::string out = get_string(c, "out", "");
  if (table == "bounds") {
    double tau = 0.0;
    std::vector<double> deltas;
    if (c.count("tau")) {
      tau = get_double(c, "tau", 0.0);
    }
    if (c.count("quantizer-file") || !c.count("tau")) {
      Quantizer q = design_equiprobable(get_int(c, "k", 16));
      if (c.count("quantizer-file")) {
        std::ifstream f(get_string(c, "quantizer-file", ""));
        if (!f) throw ConfigError("cannot open quantizer file");
        std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        q = Quantizer::from_text(text);
      }
      if (!c.count("tau")) tau = q.tau(q.levels() - 1);
      deltas = {precision_delta(q)};
    }
    deltas = get_double_list(c, "delta", deltas);
    const auto rhos = get_double_list(c, "rho", {0.6});
    emit(out, distinguishability_csv(deltas, rhos, tau, get_double(c, "eps", 0.01)));
    return kOk;
  }
  if (table == "robustness") {
    std::vector<int> ks;
    for (double k : get_double_list(c, "ks", {2, 8, 32})) ks.push_back(static_cast<int>(k));
    const auto s2 = get_double_list(c, "sigma-sq", {0.0, 0.025, 0.05, 0.075, 0.1});
    emit(out, robustness_csv(ks, s2, get_int(c, "trials", 10000),
                             static_cast<std::uint64_t>(get_int(c, "seed", 1))));
    return kOk;
  }
  throw ConfigError("table must be bounds or robustness");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized phase retrieval toolkit"};
  app.require_subcommand(1);

  FlagSet design, run, sweep, analysis;

  auto* d = app.add_subcommand("design-quant", "Design a quantizer and summarize it");
  d->add_option("--config", design.config_path, "key=value settings file");
  design.add(d, "k", "number of levels (>= 2)");
  design.add(d, "kind", "eq or lmq");
  design.add(d, "last-symbol", "two-delta or half-delta (eq only)");
  design.add(d, "samples", "chi-square samples for the SNR summary");
  design.add(d, "seed", "seed for the SNR sample");
  design.add(d, "out", "write the quantizer record here");

  const std::vector<std::pair<std::string, std::string>> experiment_flags = {
      {"n", "signal length"},
      {"m", "number of measurements (default 10 n)"},
      {"k", "quantizer levels"},
      {"quantizer", "eq, lmq or auto"},
      {"algorithms", "comma list of qpr, qpr-a, sqpr, sqpr-a, pl, pl-a, altmin"},
      {"sparsity", "support size s"},
      {"signal", "sphere, sinusoid or sparse"},
      {"iters", "iterations per run"},
      {"seed", "base seed"},
      {"out", "output directory"},
  };
  auto* r = app.add_subcommand("run", "Monte Carlo reconstruction trials");
  r->add_option("--config", run.config_path, "key=value settings file");
  for (const auto& [key, help] : experiment_flags) run.add(r, key, help);
  run.add(r, "sigma-xi", "noise standard deviation before quantization");
  run.add(r, "trials", "number of trials");

  auto* s = app.add_subcommand("crb-sweep", "MSE against the Cramer-Rao bound");
  s->add_option("--config", sweep.config_path, "key=value settings file");
  for (const auto& [key, help] : experiment_flags) sweep.add(s, key, help);
  sweep.add(s, "snr-grid", "input SNR values in dB (list or a:b:step)");
  sweep.add(s, "ensembles", "sensing ensembles per grid point");
  sweep.add(s, "noise-draws", "noise realizations per ensemble");

  auto* a = app.add_subcommand("analysis", "Distinguishability and robustness tables");
  a->add_option("--config", analysis.config_path, "key=value settings file");
  analysis.add(a, "table", "bounds or robustness");
  analysis.add(a, "k", "levels of the equiprobable quantizer");
  analysis.add(a, "quantizer-file", "quantizer record from design-quant");
  analysis.add(a, "tau", "saturation threshold tau_{k-1}");
  analysis.add(a, "delta", "precision grid");
  analysis.add(a, "rho", "correlation grid");
  analysis.add(a, "eps", "target collision probability");
  analysis.add(a, "ks", "levels for the robustness table");
  analysis.add(a, "sigma-sq", "noise variance grid");
  analysis.add(a, "trials", "Monte Carlo draws per point");
  analysis.add(a, "seed", "Monte Carlo seed");
  analysis.add(a, "out", "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*d) return cmd_design_quant(design.resolve());
    if (*r) return cmd_run(run.resolve());
    if (*s) return cmd_crb_sweep(sweep.resolve());
    if (*a) return cmd_analysis(analysis.resolve());
  } catch (const qprkit::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const qprkit::DimensionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const qprkit::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  }
  return kUsage;
}
