// Bit-reproducible pseudo-random streams.
//
// All Monte-Carlo code in this library draws from xoshiro256** generators
// seeded through splitmix64, one generator per (seed, stream index). Results
// therefore do not depend on thread count or scheduling.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace wdro {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

/// Derives a 64-bit seed for sub-stream `index` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);
  /// Generator for sub-stream `index` of `seed`.
  static Xoshiro256 for_stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

 private:
  std::array<std::uint64_t, 4> s_;
};

/// Inverse-CDF sampler for Binomial(n, theta) over a precomputed table.
class BinomialSampler {
 public:
  BinomialSampler(int n, double theta);
  int operator()(Xoshiro256& rng) const;
  int n() const { return n_; }
  double theta() const { return theta_; }
  /// Probability mass function on {0, ..., n}.
  const std::vector<double>& pmf() const { return pmf_; }

 private:
  int n_;
  double theta_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

/// Binomial(n, theta) pmf on {0, ..., n}, evaluated in log space.
std::vector<double> binomial_pmf(int n, double theta);

}  // namespace wdro
