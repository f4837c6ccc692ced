#pragma once

#include <cstdint>
#include <random>

namespace qprkit {

/// Seedable source of uniform and Gaussian variates.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the standard.
/// Uniforms take the top 53 bits of each draw; Gaussians use the Box-Muller
/// transform implemented here (std::normal_distribution is
/// implementation-defined), so every stream is reproducible across
/// platforms and standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_open_left();
  /// Standard normal.
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Mixes a base seed with a stream tag (splitmix64 finalizer) so that
/// sub-streams of one trial (ensemble, signal, noise) are decorrelated.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

}  // namespace qprkit
