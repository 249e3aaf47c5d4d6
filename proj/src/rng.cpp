#include "wdro/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wdro {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 a(seed);
  SplitMix64 b(index ^ 0xD1B54A32D192ED03ULL);
  return a.next() ^ rotl(b.next(), 17);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  SplitMix64 sm(seed);
  for (auto& word : s_) word = sm.next();
}

Xoshiro256 Xoshiro256::for_stream(std::uint64_t seed, std::uint64_t index) {
  return Xoshiro256(derive_seed(seed, index));
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Xoshiro256::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::vector<double> binomial_pmf(int n, double theta) {
  if (n < 0) throw std::invalid_argument("binomial_pmf: n must be nonnegative");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("binomial_pmf: theta outside [0,1]");
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (theta == 0.0) {
    pmf.front() = 1.0;
    return pmf;
  }
  if (theta == 1.0) {
    pmf.back() = 1.0;
    return pmf;
  }
  const double log_theta = std::log(theta);
  const double log_comp = std::log1p(-theta);
  const double log_nfact = std::lgamma(n + 1.0);
  for (int k = 0; k <= n; ++k) {
    const double log_p = log_nfact - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * log_theta +
                         (n - k) * log_comp;
    pmf[k] = std::exp(log_p);
  }
  return pmf;
}

BinomialSampler::BinomialSampler(int n, double theta) : n_(n), theta_(theta), pmf_(binomial_pmf(n, theta)) {
  cdf_.resize(pmf_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    acc += pmf_[k];
    cdf_[k] = acc;
  }
  cdf_.back() = 1.0;
}

int BinomialSampler::operator()(Xoshiro256& rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<int>(it - cdf_.begin());
}

}  // namespace wdro
