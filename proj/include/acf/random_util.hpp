#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

// Seed derivation and sampling helpers. Everything here is deterministic
// given the engine state: we use std::mt19937_64 (whose output sequence the
// standard pins down exactly) and hand-rolled sampling on top of it, because
// the std:: distribution algorithms are implementation-defined and would
// break byte-identical reproducibility.

namespace acf {

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One master seed fans out into independent sub-seeds keyed by (tag, index).
inline uint64_t DeriveSeed(uint64_t seed, uint64_t tag, uint64_t index = 0) {
  uint64_t h = SplitMix64(seed ^ (tag * 0x9e3779b97f4a7c15ULL));
  return SplitMix64(h ^ (index * 0xc2b2ae3d27d4eb4fULL));
}

// Well-known derivation tags, so independent consumers never share a stream.
enum SeedTag : uint64_t {
  kSeedBucketHash = 1,
  kSeedFingerprintHash = 2,
  kSeedPkOffset = 3,
  kSeedTableRng = 4,
  kSeedAdaptRng = 5,
  kSeedWorkload = 6,
  kSeedTrial = 7,
  kSeedModel = 8,
  kSeedOracle = 9,
};

using Rng = std::mt19937_64;

// Unbiased uniform integer in [0, n) via 128-bit multiply (Lemire).
inline uint64_t UniformBelow(Rng& rng, uint64_t n) {
  unsigned __int128 m = (unsigned __int128)rng() * n;
  auto lo = (uint64_t)m;
  if (lo < n) {
    uint64_t t = (0 - n) % n;
    while (lo < t) {
      m = (unsigned __int128)rng() * n;
      lo = (uint64_t)m;
    }
  }
  return (uint64_t)(m >> 64);
}

// Uniform double in [0, 1) with 53 random bits.
inline double UniformDouble(Rng& rng) {
  return (double)(rng() >> 11) * 0x1.0p-53;
}

// Geometric number of Bernoulli(p) trials up to and including the first
// success. Returns a value > cap (without exact magnitude) once it is known
// to exceed cap, so callers can skip ahead cheaply in long simulations.
inline uint64_t GeometricTrials(Rng& rng, double p, uint64_t cap) {
  if (p <= 0.0) return cap + 1;
  if (p >= 1.0) return 1;
  double u = UniformDouble(rng);
  // P[T > t] = (1-p)^t; invert the tail.
  double t = std::log1p(-u) / std::log1p(-p);
  if (t >= (double)cap) return cap + 1;
  return (uint64_t)t + 1;
}

// Poisson sampler: inversion for small means, Hörmann's PTRS transformed
// rejection for large ones. O(1) for any mean.
inline uint64_t SamplePoisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) {
    double limit = std::exp(-mean);
    double prod = 1.0;
    uint64_t k = 0;
    for (;;) {
      prod *= UniformDouble(rng);
      if (prod <= limit) return k;
      ++k;
    }
  }
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double u = UniformDouble(rng) - 0.5;
    double v = UniformDouble(rng);
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr && kf >= 0) return (uint64_t)kf;
    if (kf < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        kf * log_mean - mean - std::lgamma(kf + 1.0)) {
      return (uint64_t)kf;
    }
  }
}

inline int SampleBinomialSmall(Rng& rng, int n, double p) {
  int k = 0;
  for (int i = 0; i < n; ++i) k += (UniformDouble(rng) < p) ? 1 : 0;
  return k;
}

// Zipf(theta) over ranks 1..n: P(rank r) proportional to r^-theta.
// Precomputed CDF + binary search; theta = 0 degenerates to uniform.
class ZipfSampler {
 public:
  ZipfSampler(size_t n, double theta) : n_(n), theta_(theta) {
    if (n == 0) throw std::invalid_argument("ZipfSampler: empty domain");
    if (theta < 0) throw std::invalid_argument("ZipfSampler: negative skew");
    if (theta > 0) {
      cdf_.resize(n);
      double acc = 0.0;
      for (size_t r = 1; r <= n; ++r) {
        acc += std::pow((double)r, -theta);
        cdf_[r - 1] = acc;
      }
      total_ = acc;
    }
  }

  // Returns a 0-based index (rank-1).
  size_t Sample(Rng& rng) const {
    if (theta_ == 0.0) return (size_t)UniformBelow(rng, n_);
    double u = UniformDouble(rng) * total_;
    size_t lo = 0, hi = n_ - 1;
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      if (cdf_[mid] < u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

  size_t domain() const { return n_; }

 private:
  size_t n_;
  double theta_;
  double total_ = 0.0;
  std::vector<double> cdf_;
};

}  // namespace acf
