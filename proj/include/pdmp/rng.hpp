#pragma once

#include <cstdint>
#include <random>

namespace pdmp {

/// SplitMix64 finalizer. Used to derive independent replica streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of replica `index` under `master_seed`:
///   splitmix64(splitmix64(master_seed) ^ splitmix64(index + 1)).
/// A pure function of the pair, so adding replicas never perturbs earlier ones.
constexpr std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 1));
}

/// One random stream per trajectory. Not thread-safe; never share across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_replica(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(replica_seed(master_seed, index));
  }

  /// Unit-rate exponential variate, strictly positive.
  double exponential() {
    double e = 0.0;
    while (e <= 0.0) e = exp_(engine_);
    return e;
  }

  double exponential(double rate) { return exponential() / rate; }

  double normal() { return normal_(engine_); }

  /// Uniform on [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(engine_); }

  /// +1 or -1 with equal probability.
  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

  /// Chi-square variate with `dof` degrees of freedom.
  double chi_squared(double dof) { return std::chi_squared_distribution<double>(dof)(engine_); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::exponential_distribution<double> exp_{1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace pdmp
