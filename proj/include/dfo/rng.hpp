#pragma once

#include <cstdint>
#include <random>

namespace dfo {

std::uint64_t splitmix64(std::uint64_t& state);

/// Seedable 64-bit generator. The variate transforms are written out here
/// rather than taken from <random> so that streams are identical across
/// standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for (base_seed, stream), e.g. one per run.
  static Rng derive(std::uint64_t base_seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n). n must be positive.
  std::size_t index(std::size_t n);
  double normal(double mean, double stddev);
  double cauchy(double location, double scale);

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dfo
