#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qprkit/errors.hpp"

namespace qprkit {

/// k-level scalar quantizer on intensities.
///
/// Bins are numbered 1..k. Bin j covers [tau_{j-1}, tau_j) with tau_0 = 0 and
/// tau_k = +inf; the interior thresholds tau_1..tau_{k-1} are stored. Each bin
/// carries one codebook symbol s_j with tau_{j-1} < s_j < tau_j. Values are
/// immutable once constructed.
class Quantizer {
public:
  /// Validates ordering and symbol placement; throws ConfigError.
  Quantizer(std::vector<double> thresholds, std::vector<double> symbols);

  int levels() const noexcept { return static_cast<int>(symbols_.size()); }

  /// tau_j for j = 0..k, with tau_0 = 0 and tau_k = +inf.
  double tau(int j) const;
  /// s_j for j = 1..k.
  double symbol(int j) const;

  std::span<const double> thresholds() const noexcept { return thresholds_; }
  std::span<const double> symbols() const noexcept { return symbols_; }

  /// Bin index j with tau_{j-1} <= u < tau_j. Negative inputs (possible once
  /// noise is added before quantization) land in bin 1.
  int encode(double u) const;
  double quantize(double u) const { return symbol(encode(u)); }

  /// Same thresholds, different codebook.
  Quantizer with_symbols(std::vector<double> symbols) const;

  /// Plain-text record: k, thresholds, symbols, one per line, %.17g.
  std::string to_text() const;
  static Quantizer from_text(const std::string& text);

  friend bool operator==(const Quantizer&, const Quantizer&) = default;

private:
  std::vector<double> thresholds_;
  std::vector<double> symbols_;
};

/// Placement of the codebook symbol for the unbounded last bin of an
/// equiprobable design: tau_{k-1} + 2 delta or tau_{k-1} + delta / 2.
enum class LastSymbolRule { TwoDelta, HalfDelta };

/// Thresholds at the j/k quantiles of chi-square(1), interior symbols at
/// bin midpoints. Throws ConfigError for k < 2.
Quantizer design_equiprobable(int k, LastSymbolRule rule = LastSymbolRule::TwoDelta);

/// Lloyd-Max failed to settle; carries the last iterate.
class LloydMaxError : public ConvergenceError {
public:
  LloydMaxError(const std::string& what, double movement, Quantizer last)
      : ConvergenceError(what, movement), last_(std::move(last)) {}
  const Quantizer& last_iterate() const noexcept { return last_; }

private:
  Quantizer last_;
};

struct LloydMaxOptions {
  double tol = 1e-8;
  int max_iter = 10000;
  /// Called with each iterate (after the centroid and midpoint updates).
  std::function<void(const Quantizer&)> observer;
};

/// Centroid/midpoint fixed point for the chi-square(1) density, started from
/// the equiprobable thresholds. Centroids use the closed-form partial moments
/// of chi-square(1).
Quantizer design_lloyd_max(int k, const LloydMaxOptions& opts = {});

/// Conditional mean E[b | lo <= b < hi] for b ~ chi-square(1).
double chi2_1_centroid(double lo, double hi);

/// Expected squared error E[(b - Q(b))^2] under chi-square(1).
double expected_distortion(const Quantizer& q);

/// Largest finite bin width, max_{1<=j<=k-1} (tau_j - tau_{j-1}).
double precision_delta(const Quantizer& q);

/// max_{1<=j<=k} (s_j^2 - tau_{j-1}^2).
double delta_sq(const Quantizer& q);

/// 10 log10(sum b^2 / sum (b - Q(b))^2) pooled over all samples; +inf when the
/// distortion is exactly zero.
double quantization_snr(const Quantizer& q, std::span<const double> b);

/// Mean of quantization_snr over consecutive batches of `batch` samples
/// (trailing remainder dropped). Infinite batches are skipped.
double average_quantization_snr(const Quantizer& q, std::span<const double> b,
                                std::size_t batch);

}  // namespace qprkit
