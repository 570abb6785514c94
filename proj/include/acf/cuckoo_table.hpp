#pragma once

#include <cstdint>
#include <vector>

#include "acf/hashing.hpp"
#include "acf/random_util.hpp"

// d-ary bucketized cuckoo hash table storing full elements. This is the
// "main table" (slow store stand-in) that backs the mirrored filters; it
// reports every displacement it performs so a filter can replay the exact
// same moves against its fingerprint array.

namespace acf {

inline constexpr int kDefaultMaxKicks = 500;

struct TableGeometry {
  int d = 4;             // subtables
  int c = 1;             // cells per bucket
  uint32_t buckets = 4096;  // per subtable; must be a power of two

  size_t cells() const { return (size_t)d * c * buckets; }
  void Validate() const {
    if (d < 1 || d > 8) throw std::invalid_argument("TableGeometry: d out of range");
    if (c < 1 || c > 8) throw std::invalid_argument("TableGeometry: c out of range");
    // With a single candidate cell there is nowhere to kick an evictee
    // except straight back, so eviction could never terminate.
    if (d * c < 2)
      throw std::invalid_argument("TableGeometry: need at least two cells per element");
    if (buckets == 0 || (buckets & (buckets - 1)) != 0)
      throw std::invalid_argument("TableGeometry: buckets must be a power of two");
  }
};

struct CellAddress {
  int table = 0;
  uint32_t bucket = 0;
  int cell = 0;
  bool operator==(const CellAddress&) const = default;
};

// One completed relocation of a displaced element during insertion.
struct Move {
  Element element;
  CellAddress from;
  CellAddress to;
};

struct InsertOutcome {
  bool ok = false;
  // Where the inserted element itself landed. Valid whenever self_placed;
  // with max_kicks = 0 and every candidate bucket full, even the new element
  // cannot be placed and self_placed stays false.
  bool self_placed = false;
  CellAddress addr;
  std::vector<Move> moves;  // displaced-element relocations, in order
  Element unplaced;         // the element left homeless when !ok
};

class CuckooTable {
 public:
  // The hash family is shared with the filter mirroring this table and must
  // outlive it. rng_seed drives eviction-victim choices only.
  CuckooTable(const TableGeometry& geo, const HashFamily* hashes,
              uint64_t rng_seed);

  // Inserts x, displacing residents as needed (at most max_kicks kicks).
  // Duplicate inserts are a usage error. On failure the table still holds
  // every element it reported placed; exactly the returned `unplaced`
  // element (the final evictee) has been dropped.
  InsertOutcome Insert(const Element& x, int max_kicks = kDefaultMaxKicks);

  // Removes x if present; reports where it was.
  bool Erase(const Element& x, CellAddress* where = nullptr);

  bool Find(const Element& x, CellAddress* where = nullptr) const;

  // Swaps two cells of the same bucket (either may be empty). Used by the
  // multi-cell filter's adaptation, which reorders bucket residents.
  void SwapCells(const CellAddress& u, const CellAddress& v);

  bool Occupied(const CellAddress& a) const { return CellAt(a).occupied; }
  const Element& At(const CellAddress& a) const { return CellAt(a).key; }

  size_t size() const { return size_; }
  double Load() const { return (double)size_ / (double)geo_.cells(); }
  const TableGeometry& geometry() const { return geo_; }
  const HashFamily& hashes() const { return *hashes_; }

  // Scans bucket (table, bucket) for x; returns the cell index or -1.
  int FindInBucket(int table, uint32_t bucket, const Element& x) const;

 private:
  struct Cell {
    Element key;
    bool occupied = false;
  };

  size_t CellIndex(int table, uint32_t bucket, int cell) const {
    return ((size_t)table * geo_.buckets + bucket) * geo_.c + cell;
  }
  Cell& CellAt(const CellAddress& a) {
    CheckAddress(a);
    return cells_[CellIndex(a.table, a.bucket, a.cell)];
  }
  const Cell& CellAt(const CellAddress& a) const {
    CheckAddress(a);
    return cells_[CellIndex(a.table, a.bucket, a.cell)];
  }
  void CheckAddress(const CellAddress& a) const;

  // First empty cell among x's candidate buckets, scanning subtables in
  // order and cells in order within each bucket.
  bool FindFreeCell(const Element& x, CellAddress* out) const;

  TableGeometry geo_;
  const HashFamily* hashes_;
  std::vector<Cell> cells_;
  size_t size_ = 0;
  Rng rng_;
};

}  // namespace acf
