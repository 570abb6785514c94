#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "acf/cuckoo_table.hpp"
#include "acf/filter_common.hpp"

// Non-adaptive baselines.
//
// MirrorFilter4x1: d=4 single-cell buckets, one fixed a-bit fingerprint per
// element, backed by (and mirroring) the main cuckoo table — exactly the
// structure the adaptive variants start from, minus adaptation.
//
// PkFilter2x4: classic partial-key cuckoo filter, one array of 4-cell
// buckets, alternate bucket = bucket XOR offset(fingerprint). Stores no
// elements, so displacements need only the fingerprint.

namespace acf {

// Expected false-positive probability of a fresh non-member query against a
// d-by-c filter at the given load with a-bit fingerprints: each of the d*c
// visible cells is occupied with probability `load` and matches with
// probability 2^-a.
inline double ExpectedFpp(int d, int c, double load, int bits) {
  return (double)d * c * load * std::pow(2.0, -bits);
}

class MirrorFilter4x1 final : public Filter {
 public:
  MirrorFilter4x1(size_t total_cells, int bits, uint64_t seed,
                  int max_kicks = kDefaultMaxKicks);

  InsertResult Insert(const Element& x) override;
  bool Erase(const Element& x) override;
  bool Lookup(const Element& x) const override;
  QueryOutcome Query(const Element& x) override;

  double Load() const override { return table_.Load(); }
  size_t size() const override { return table_.size(); }
  const FilterStats& stats() const override { return stats_; }

  const CuckooTable& table() const { return table_; }
  struct CellView {
    bool occupied;
    uint32_t fp;
  };
  CellView ViewCell(int table, uint32_t bucket) const {
    const Cell& cell = cells_[(size_t)table * hashes_.buckets() + bucket];
    return {cell.occupied, cell.fp};
  }
  // Full-scan mirror invariant: filter cell occupied iff table cell is, and
  // the fingerprint equals f_0(element).
  bool CheckMirror() const;

 private:
  struct Cell {
    uint32_t fp = 0;
    bool occupied = false;
  };
  size_t Flat(const CellAddress& a) const {
    return (size_t)a.table * hashes_.buckets() + a.bucket;
  }

  HashFamily hashes_;
  CuckooTable table_;
  std::vector<Cell> cells_;
  FilterStats stats_;
  int max_kicks_;
};

class PkFilter2x4 final : public Filter {
 public:
  // total_cells = buckets * 4; candidate buckets per element: 2.
  PkFilter2x4(size_t total_cells, int bits, uint64_t seed,
              int max_kicks = kDefaultMaxKicks);

  // Assumes x is not already present (partial-key filters cannot check).
  InsertResult Insert(const Element& x) override;
  // Removes one stored copy of x's fingerprint; only call for elements that
  // were actually inserted.
  bool Erase(const Element& x) override;
  bool Lookup(const Element& x) const override;
  // No backing table: positives are unconfirmed.
  QueryOutcome Query(const Element& x) override;

  double Load() const override { return (double)size_ / (double)cells_.size(); }
  size_t size() const override { return size_; }
  const FilterStats& stats() const override { return stats_; }

  uint32_t buckets() const { return buckets_; }
  uint32_t AltBucket(uint32_t bucket, uint32_t fp) const {
    return bucket ^ hashes_.PkOffset(fp);
  }
  const HashFamily& hashes() const { return hashes_; }
  struct CellView {
    bool occupied;
    uint32_t fp;
  };
  CellView ViewCell(uint32_t bucket, int cell) const {
    const Cell& c = cells_[Flat(bucket, cell)];
    return {c.occupied, c.fp};
  }

 private:
  static constexpr int kCells = 4;
  struct Cell {
    uint32_t fp = 0;
    bool occupied = false;
  };
  size_t Flat(uint32_t bucket, int cell) const {
    return (size_t)bucket * kCells + cell;
  }
  bool PlaceInBucket(uint32_t bucket, uint32_t fp);
  int FindInBucket(uint32_t bucket, uint32_t fp) const;

  HashFamily hashes_;
  uint32_t buckets_;
  std::vector<Cell> cells_;
  size_t size_ = 0;
  FilterStats stats_;
  Rng rng_;
  int max_kicks_;
};

}  // namespace acf
