#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "acf/random_util.hpp"

// Seedable hash family shared by the tables and filters: per-subtable bucket
// indices h_i(x), a family of fingerprint functions f_j(x), and the
// partial-key bucket offset. All functions are derived from one keyed 64-bit
// byte hash by mixing (master_seed, role tag, function index) into the seed,
// so a single master seed reproduces every hash decision exactly.

namespace acf {

// Elements are opaque byte strings (binary-safe), at most 255 bytes.
using Element = std::string;

inline constexpr size_t kMaxElementBytes = 255;

// MurmurHash64A-style keyed byte hash. Fast and empirically uniform; every
// randomized decision in the library funnels through this plus mt19937_64.
inline uint64_t HashBytes(const void* data, size_t len, uint64_t seed) {
  const uint64_t m = 0xc6a4a7935bd1e995ULL;
  const int r = 47;
  uint64_t h = seed ^ (len * m);
  const auto* p = (const unsigned char*)data;
  const unsigned char* end = p + (len & ~size_t(7));
  while (p != end) {
    uint64_t k;
    std::memcpy(&k, p, 8);
    p += 8;
    k *= m;
    k ^= k >> r;
    k *= m;
    h ^= k;
    h *= m;
  }
  size_t left = len & 7;
  if (left) {
    uint64_t tail = 0;
    std::memcpy(&tail, p, left);
    h ^= tail;
    h *= m;
  }
  h ^= h >> r;
  h *= m;
  h ^= h >> r;
  return h;
}

inline uint64_t HashElement(const Element& x, uint64_t seed) {
  return HashBytes(x.data(), x.size(), seed);
}

struct HashConfig {
  uint64_t master_seed = 0;
  int d = 4;                 // number of subtables (bucket hash functions)
  int bucket_bits = 12;      // log2(buckets per subtable)
  int fingerprint_bits = 8;  // a': width of each fingerprint
  int family_size = 1;       // number of fingerprint functions f_0..f_{k-1}

  void Validate() const {
    if (d < 1 || d > 8) throw std::invalid_argument("HashConfig: d out of range");
    if (bucket_bits < 0 || bucket_bits > 30)
      throw std::invalid_argument("HashConfig: bucket_bits out of range");
    if (fingerprint_bits < 1 || fingerprint_bits > 30)
      throw std::invalid_argument("HashConfig: fingerprint_bits out of range");
    if (family_size < 1 || family_size > 256)
      throw std::invalid_argument("HashConfig: family_size out of range");
  }
};

class HashFamily {
 public:
  explicit HashFamily(const HashConfig& cfg) : cfg_(cfg) {
    cfg.Validate();
    buckets_ = 1u << cfg.bucket_bits;
    fp_mask_ = (cfg.fingerprint_bits == 32)
                   ? 0xffffffffu
                   : ((1u << cfg.fingerprint_bits) - 1);
    for (int i = 0; i < cfg.d; ++i)
      bucket_seed_[i] = DeriveSeed(cfg.master_seed, kSeedBucketHash, (uint64_t)i);
    pk_seed_ = DeriveSeed(cfg.master_seed, kSeedPkOffset);
    // When every fingerprint in the family fits into one 64-bit digest we
    // slice them all from a single hash; otherwise each function gets its
    // own keyed hash. Either way distinct function ids are independent.
    sliced_ = (int64_t)cfg.family_size * cfg.fingerprint_bits <= 64;
    if (sliced_) {
      fp_seeds_.push_back(DeriveSeed(cfg.master_seed, kSeedFingerprintHash));
    } else {
      for (int j = 0; j < cfg.family_size; ++j)
        fp_seeds_.push_back(
            DeriveSeed(cfg.master_seed, kSeedFingerprintHash, (uint64_t)j));
    }
  }

  uint32_t BucketIndex(const Element& x, int table) const {
    if (table < 0 || table >= cfg_.d)
      throw std::out_of_range("HashFamily::BucketIndex: table out of range");
    return (uint32_t)(HashElement(x, bucket_seed_[table]) & (buckets_ - 1));
  }

  uint32_t Fingerprint(const Element& x, int func_id) const {
    CheckFuncId(func_id);
    if (sliced_) return Slice(HashElement(x, fp_seeds_[0]), func_id);
    return (uint32_t)(HashElement(x, fp_seeds_[func_id]) & fp_mask_);
  }

  // Hot-path helper: fetches all fingerprints of x with one or family_size
  // hash evaluations depending on the slicing mode.
  class Probe {
   public:
    Probe(const HashFamily& hf, const Element& x) : hf_(hf), x_(x) {
      if (hf.sliced_) digest_ = HashElement(x, hf.fp_seeds_[0]);
    }
    uint32_t Get(int func_id) const {
      hf_.CheckFuncId(func_id);
      if (hf_.sliced_) return hf_.Slice(digest_, func_id);
      return (uint32_t)(HashElement(x_, hf_.fp_seeds_[func_id]) & hf_.fp_mask_);
    }

   private:
    const HashFamily& hf_;
    const Element& x_;
    uint64_t digest_ = 0;
  };
  Probe MakeProbe(const Element& x) const { return Probe(*this, x); }

  // Partial-key alternate-bucket offset: uniform over [0, buckets).
  uint32_t PkOffset(uint32_t fp) const {
    uint64_t v = fp;
    return (uint32_t)(HashBytes(&v, sizeof(v), pk_seed_) & (buckets_ - 1));
  }

  uint32_t buckets() const { return buckets_; }
  uint32_t fp_mask() const { return fp_mask_; }
  bool sliced() const { return sliced_; }
  const HashConfig& config() const { return cfg_; }

 private:
  void CheckFuncId(int func_id) const {
    if (func_id < 0 || func_id >= cfg_.family_size)
      throw std::out_of_range("HashFamily: fingerprint func_id out of range");
  }
  uint32_t Slice(uint64_t digest, int func_id) const {
    return (uint32_t)(digest >> (func_id * cfg_.fingerprint_bits)) & fp_mask_;
  }

  HashConfig cfg_;
  uint32_t buckets_;
  uint32_t fp_mask_;
  bool sliced_;
  uint64_t bucket_seed_[8];
  uint64_t pk_seed_;
  std::vector<uint64_t> fp_seeds_;
};

}  // namespace acf
