#pragma once

#include "riemann_kit/types.hpp"

#include <cstdint>

namespace riemann_kit {

/// Counter-based generator: value(i) = splitmix64_finalize(seed + (i+1)*GOLDEN).
/// Stateless in the counter, so parallel sweeps and reordered sampling produce
/// identical streams; documented in the README determinism contract.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t counter) const {
    std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1) with 53 bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Axis-aligned box sampler with rejection against a predicate. Sample k uses
/// counters k*dim .. k*dim+dim-1, so accepted points do not depend on how many
/// candidates other threads examined.
class BoxSampler {
 public:
  BoxSampler(SplitMix64 rng, Vec lo, Vec hi)
      : rng_(rng), lo_(std::move(lo)), hi_(std::move(hi)) {}

  Vec point(std::uint64_t k) const {
    const int d = static_cast<int>(lo_.size());
    Vec x(d);
    for (int j = 0; j < d; ++j)
      x(j) = rng_.uniform(k * static_cast<std::uint64_t>(d) + j, lo_(j), hi_(j));
    return x;
  }

  /// n accepted points; aborts after 1000*n rejections.
  std::vector<Vec> sample(int n, const std::function<bool(const Vec&)>& accept) const {
    std::vector<Vec> pts;
    pts.reserve(n);
    std::uint64_t k = 0;
    const std::uint64_t budget = 1000ull * static_cast<std::uint64_t>(n);
    while (static_cast<int>(pts.size()) < n) {
      if (k >= budget + static_cast<std::uint64_t>(n))
        throw SolveError("sampler: rejection budget exhausted");
      Vec x = point(k++);
      if (!accept || accept(x)) pts.push_back(std::move(x));
    }
    return pts;
  }

 private:
  SplitMix64 rng_;
  Vec lo_, hi_;
};

}  // namespace riemann_kit
