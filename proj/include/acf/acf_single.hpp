#pragma once

#include <cstdint>
#include <vector>

#include "acf/cuckoo_table.hpp"
#include "acf/filter_common.hpp"

// Adaptive cuckoo filter, single-cell variant: d=4 subtables, one cell per
// bucket. Each filter cell packs an s-bit hash selector alpha next to an
// (a-s)-bit fingerprint f_alpha(element). A confirmed false positive bumps
// alpha (mod 2^s) and rewrites the fingerprint under the new function, so
// the offending query key stops matching while the stored element stays
// findable.

namespace acf {

struct AcfSingleOptions {
  // Default: alpha moves with the element when cuckoo displacement relocates
  // it (prior adaptations keep their effect; f_alpha does not depend on the
  // bucket). Set to true to reset alpha to 0 on every relocation instead.
  bool alpha_reset_on_move = false;
  int max_kicks = kDefaultMaxKicks;
};

class AcfSingle final : public Filter {
 public:
  // total_cells = 4 * buckets; bits = a (selector + fingerprint); 1 <= s <= 3
  // and s < bits.
  AcfSingle(size_t total_cells, int bits, int s, uint64_t seed,
            AcfSingleOptions opts = {});

  InsertResult Insert(const Element& x) override;
  bool Erase(const Element& x) override;
  bool Lookup(const Element& x) const override;
  QueryOutcome Query(const Element& x) override;

  double Load() const override { return table_.Load(); }
  size_t size() const override { return table_.size(); }
  const FilterStats& stats() const override { return stats_; }

  int bits() const { return bits_; }
  int s() const { return s_; }
  const CuckooTable& table() const { return table_; }

  struct CellView {
    bool occupied;
    uint8_t alpha;
    uint32_t fp;
  };
  CellView ViewCell(int table, uint32_t bucket) const {
    const Cell& cell = cells_[(size_t)table * hashes_.buckets() + bucket];
    return {cell.occupied, cell.alpha, cell.fp};
  }

  // Mirror invariant: cell occupancy matches the table and every occupied
  // cell holds fp = f_alpha(element).
  bool CheckMirror() const;

 private:
  struct Cell {
    uint32_t fp = 0;
    uint8_t alpha = 0;
    bool occupied = false;
  };
  size_t Flat(const CellAddress& a) const {
    return (size_t)a.table * hashes_.buckets() + a.bucket;
  }
  void Adapt(const CellAddress& at);

  int bits_;
  int s_;
  AcfSingleOptions opts_;
  HashFamily hashes_;
  CuckooTable table_;
  std::vector<Cell> cells_;
  FilterStats stats_;
};

}  // namespace acf
