#pragma once

#include <cstdint>
#include <vector>

#include "acf/cuckoo_table.hpp"
#include "acf/filter_common.hpp"

// Adaptive cuckoo filter, multi-cell variant: d=2 subtables of 4-cell
// buckets. There are no selector bits; instead each cell position k has its
// own fingerprint function f_k, and every cell stores f_k(element) for its
// position. A confirmed false positive at cell j swaps that cell with a
// uniformly chosen other cell of the bucket — in the main table and the
// filter alike — re-fingerprinting both residents, so the offending query
// key almost surely stops matching.

namespace acf {

class AcfMulti final : public Filter {
 public:
  // total_cells = 2 * 4 * buckets; bits = a per fingerprint.
  AcfMulti(size_t total_cells, int bits, uint64_t seed,
           int max_kicks = kDefaultMaxKicks);

  InsertResult Insert(const Element& x) override;
  bool Erase(const Element& x) override;
  bool Lookup(const Element& x) const override;
  QueryOutcome Query(const Element& x) override;

  double Load() const override { return table_.Load(); }
  size_t size() const override { return table_.size(); }
  const FilterStats& stats() const override { return stats_; }

  int bits() const { return bits_; }
  const CuckooTable& table() const { return table_; }

  struct CellView {
    bool occupied;
    uint32_t fp;
  };
  CellView ViewCell(const CellAddress& a) const {
    const Cell& cell = cells_[Flat(a)];
    return {cell.occupied, cell.fp};
  }

  // Swaps cells j and k of one bucket in table and filter, rewriting both
  // fingerprints for their new positions. Exposed because adaptation is
  // exactly one such swap with k drawn at random.
  void SwapWithin(int table, uint32_t bucket, int j, int k);

  bool CheckMirror() const;

 private:
  static constexpr int kCells = 4;
  struct Cell {
    uint32_t fp = 0;
    bool occupied = false;
  };
  size_t Flat(const CellAddress& a) const {
    return ((size_t)a.table * hashes_.buckets() + a.bucket) * kCells + a.cell;
  }
  void RefreshCell(const CellAddress& a);

  int bits_;
  HashFamily hashes_;
  CuckooTable table_;
  std::vector<Cell> cells_;
  FilterStats stats_;
  Rng adapt_rng_;
  int max_kicks_;
};

}  // namespace acf
