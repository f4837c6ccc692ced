#include "qprkit/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "qprkit/specfun.hpp"

namespace qprkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Moments of chi-square(1) restricted to [x, inf):
//   tail0 = P(b >= x), tail1 = E[b; b >= x], tail2 = E[b^2; b >= x].
// Partial moments are chi-square(3) and chi-square(5) tails in disguise.
struct TailMoments {
  double p0, p1, p2;
};

TailMoments tail_moments(double x) {
  if (std::isinf(x)) return {0.0, 0.0, 0.0};
  const double sf = specfun::chi2_1_sf(x);
  const double e = std::exp(-0.5 * x);
  const double p1 = sf + std::sqrt(2.0 * x / std::numbers::pi) * e;
  const double p2 = 3.0 * p1 + 4.0 * std::pow(0.5 * x, 1.5) * e * std::numbers::inv_sqrtpi;
  return {sf, p1, p2};
}

// Same moments over [0, x), evaluated directly to avoid cancellation when x is
// small.
TailMoments head_moments(double x) {
  if (std::isinf(x)) return {1.0, 1.0, 3.0};
  const double cdf = specfun::chi2_1_cdf(x);
  const double e = std::exp(-0.5 * x);
  const double p1 = cdf - std::sqrt(2.0 * x / std::numbers::pi) * e;
  const double p2 = 3.0 * p1 - 4.0 * std::pow(0.5 * x, 1.5) * e * std::numbers::inv_sqrtpi;
  return {cdf, p1, p2};
}

TailMoments interval_moments(double lo, double hi) {
  if (hi <= 1.0) {
    const auto a = head_moments(lo);
    const auto b = head_moments(hi);
    return {b.p0 - a.p0, b.p1 - a.p1, b.p2 - a.p2};
  }
  const auto a = tail_moments(lo);
  const auto b = tail_moments(hi);
  return {a.p0 - b.p0, a.p1 - b.p1, a.p2 - b.p2};
}

std::vector<double> centroids(const std::vector<double>& thresholds) {
  const std::size_t k = thresholds.size() + 1;
  std::vector<double> s(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double lo = j == 0 ? 0.0 : thresholds[j - 1];
    const double hi = j + 1 == k ? kInf : thresholds[j];
    s[j] = chi2_1_centroid(lo, hi);
  }
  return s;
}

std::vector<double> parse_line(const std::string& line) {
  std::istringstream is(line);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ConfigError("quantizer record: bad number '" + tok + "'");
    }
    if (used != tok.size()) throw ConfigError("quantizer record: bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

Quantizer::Quantizer(std::vector<double> thresholds, std::vector<double> symbols)
    : thresholds_(std::move(thresholds)), symbols_(std::move(symbols)) {
  const std::size_t k = symbols_.size();
  if (k < 2) throw ConfigError("quantizer needs at least 2 levels");
  if (thresholds_.size() + 1 != k) {
    throw ConfigError("quantizer needs k-1 interior thresholds for k symbols");
  }
  double prev = 0.0;
  for (double t : thresholds_) {
    if (!(t > prev) || !std::isfinite(t)) {
      throw ConfigError("quantizer thresholds must be finite and strictly increasing from 0");
    }
    prev = t;
  }
  for (int j = 1; j <= levels(); ++j) {
    const double s = symbol(j);
    if (!(s > tau(j - 1) && s < tau(j)) || !std::isfinite(s)) {
      throw ConfigError("quantizer symbol s_" + std::to_string(j) +
                        " must lie strictly inside its interval");
    }
  }
}

double Quantizer::tau(int j) const {
  if (j < 0 || j > levels()) throw ConfigError("threshold index out of range");
  if (j == 0) return 0.0;
  if (j == levels()) return kInf;
  return thresholds_[j - 1];
}

double Quantizer::symbol(int j) const {
  if (j < 1 || j > levels()) throw ConfigError("bin index out of range");
  return symbols_[j - 1];
}

int Quantizer::encode(double u) const {
  // Count of thresholds <= u gives j - 1.
  const auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), u);
  return static_cast<int>(it - thresholds_.begin()) + 1;
}

Quantizer Quantizer::with_symbols(std::vector<double> symbols) const {
  return Quantizer(thresholds_, std::move(symbols));
}

std::string Quantizer::to_text() const {
  std::string out = std::to_string(levels()) + "\n";
  char buf[64];
  auto write_row = [&](std::span<const double> row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      if (i) out += ' ';
      out += buf;
    }
    out += '\n';
  };
  write_row(thresholds_);
  write_row(symbols_);
  return out;
}

Quantizer Quantizer::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string l1, l2, l3;
  if (!std::getline(is, l1) || !std::getline(is, l2) || !std::getline(is, l3)) {
    throw ConfigError("quantizer record: expected 3 lines");
  }
  const auto head = parse_line(l1);
  if (head.size() != 1 || head[0] != std::floor(head[0])) {
    throw ConfigError("quantizer record: first line must be the level count");
  }
  auto thresholds = parse_line(l2);
  auto symbols = parse_line(l3);
  if (static_cast<double>(symbols.size()) != head[0]) {
    throw ConfigError("quantizer record: symbol count does not match k");
  }
  return Quantizer(std::move(thresholds), std::move(symbols));
}

Quantizer design_equiprobable(int k, LastSymbolRule rule) {
  if (k < 2) throw ConfigError("design_equiprobable: k must be >= 2");
  std::vector<double> t(k - 1);
  for (int j = 1; j < k; ++j) {
    t[j - 1] = specfun::chi2_1_inv_cdf(static_cast<double>(j) / k);
  }
  double delta = 0.0;
  double prev = 0.0;
  for (double tj : t) {
    delta = std::max(delta, tj - prev);
    prev = tj;
  }
  std::vector<double> s(k);
  prev = 0.0;
  for (int j = 0; j < k - 1; ++j) {
    s[j] = 0.5 * (prev + t[j]);
    prev = t[j];
  }
  s[k - 1] = t.back() + (rule == LastSymbolRule::TwoDelta ? 2.0 * delta : 0.5 * delta);
  return Quantizer(std::move(t), std::move(s));
}

double chi2_1_centroid(double lo, double hi) {
  if (!(lo >= 0.0 && hi > lo)) throw DomainError("chi2_1_centroid: need 0 <= lo < hi");
  const auto m = interval_moments(lo, hi);
  if (!(m.p0 > 0.0)) {
    // Interval beyond double precision of the tail; fall back to the
    // asymptotic mean excess of 2 for an exponential-like tail.
    return std::isinf(hi) ? lo + 2.0 : 0.5 * (lo + hi);
  }
  return std::clamp(m.p1 / m.p0, lo, hi);
}

double expected_distortion(const Quantizer& q) {
  double d = 0.0;
  for (int j = 1; j <= q.levels(); ++j) {
    const auto m = interval_moments(q.tau(j - 1), q.tau(j));
    const double s = q.symbol(j);
    d += m.p2 - 2.0 * s * m.p1 + s * s * m.p0;
  }
  return d;
}

Quantizer design_lloyd_max(int k, const LloydMaxOptions& opts) {
  if (k < 2) throw ConfigError("design_lloyd_max: k must be >= 2");
  if (!(opts.tol > 0.0)) throw ConfigError("design_lloyd_max: tol must be > 0");
  const Quantizer start = design_equiprobable(k);
  std::vector<double> t(start.thresholds().begin(), start.thresholds().end());
  double movement = kInf;
  for (int it = 0; it < opts.max_iter; ++it) {
    const auto s = centroids(t);
    movement = 0.0;
    for (int j = 0; j < k - 1; ++j) {
      const double next = 0.5 * (s[j] + s[j + 1]);
      movement = std::max(movement, std::abs(next - t[j]));
      t[j] = next;
    }
    if (opts.observer) opts.observer(Quantizer(t, centroids(t)));
    if (movement < opts.tol) return Quantizer(t, centroids(t));
  }
  throw LloydMaxError("design_lloyd_max: no convergence within max_iter", movement,
                      Quantizer(t, centroids(t)));
}

double precision_delta(const Quantizer& q) {
  double delta = 0.0;
  for (int j = 1; j <= q.levels() - 1; ++j) {
    delta = std::max(delta, q.tau(j) - q.tau(j - 1));
  }
  return delta;
}

double delta_sq(const Quantizer& q) {
  double out = -kInf;
  for (int j = 1; j <= q.levels(); ++j) {
    const double lo = q.tau(j - 1);
    out = std::max(out, q.symbol(j) * q.symbol(j) - lo * lo);
  }
  return out;
}

double quantization_snr(const Quantizer& q, std::span<const double> b) {
  if (b.empty()) throw ConfigError("quantization_snr: no samples");
  double signal = 0.0;
  double noise = 0.0;
  for (double v : b) {
    const double e = v - q.quantize(v);
    signal += v * v;
    noise += e * e;
  }
  if (noise == 0.0) return kInf;
  return 10.0 * std::log10(signal / noise);
}

double average_quantization_snr(const Quantizer& q, std::span<const double> b,
                                std::size_t batch) {
  if (batch == 0 || b.size() < batch) {
    throw ConfigError("average_quantization_snr: need at least one full batch");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t start = 0; start + batch <= b.size(); start += batch) {
    const double snr = quantization_snr(q, b.subspan(start, batch));
    if (std::isinf(snr)) continue;
    sum += snr;
    ++count;
  }
  return count ? sum / static_cast<double>(count) : kInf;
}

}  // namespace qprkit
