#include "acf/cuckoo_table.hpp"

#include <stdexcept>

namespace acf {

CuckooTable::CuckooTable(const TableGeometry& geo, const HashFamily* hashes,
                         uint64_t rng_seed)
    : geo_(geo), hashes_(hashes), rng_(rng_seed) {
  geo.Validate();
  if (hashes == nullptr)
    throw std::invalid_argument("CuckooTable: null hash family");
  const HashConfig& hc = hashes->config();
  if (hc.d < geo.d || hashes->buckets() != geo.buckets)
    throw std::invalid_argument("CuckooTable: hash family mismatch");
  cells_.resize(geo.cells());
}

void CuckooTable::CheckAddress(const CellAddress& a) const {
  if (a.table < 0 || a.table >= geo_.d || a.bucket >= geo_.buckets ||
      a.cell < 0 || a.cell >= geo_.c)
    throw std::out_of_range("CuckooTable: bad cell address");
}

bool CuckooTable::FindFreeCell(const Element& x, CellAddress* out) const {
  for (int t = 0; t < geo_.d; ++t) {
    uint32_t b = hashes_->BucketIndex(x, t);
    for (int k = 0; k < geo_.c; ++k) {
      if (!cells_[CellIndex(t, b, k)].occupied) {
        *out = {t, b, k};
        return true;
      }
    }
  }
  return false;
}

int CuckooTable::FindInBucket(int table, uint32_t bucket,
                              const Element& x) const {
  for (int k = 0; k < geo_.c; ++k) {
    const Cell& cell = cells_[CellIndex(table, bucket, k)];
    if (cell.occupied && cell.key == x) return k;
  }
  return -1;
}

bool CuckooTable::Find(const Element& x, CellAddress* where) const {
  for (int t = 0; t < geo_.d; ++t) {
    uint32_t b = hashes_->BucketIndex(x, t);
    int k = FindInBucket(t, b, x);
    if (k >= 0) {
      if (where) *where = {t, b, k};
      return true;
    }
  }
  return false;
}

InsertOutcome CuckooTable::Insert(const Element& x, int max_kicks) {
  if (x.size() > kMaxElementBytes)
    throw std::invalid_argument("CuckooTable::Insert: element exceeds 255 bytes");
  if (Find(x)) throw std::logic_error("CuckooTable::Insert: duplicate element");

  InsertOutcome out;
  Element cur = x;
  bool cur_is_new = true;
  // Cell the current element was just evicted from; never re-chosen as the
  // next victim cell (avoids trivial two-cycles).
  CellAddress came_from;
  bool have_came_from = false;
  int kicks = 0;

  for (;;) {
    CellAddress free;
    if (FindFreeCell(cur, &free)) {
      cells_[CellIndex(free.table, free.bucket, free.cell)] = {cur, true};
      ++size_;
      if (cur_is_new) {
        out.self_placed = true;
        out.addr = free;
      } else {
        out.moves.push_back({cur, came_from, free});
      }
      out.ok = true;
      return out;
    }

    if (kicks >= max_kicks) {
      // Every eviction replaced one resident with the carried element, so
      // the count is already right: the new element is in, `cur` is out.
      out.ok = false;
      out.unplaced = cur;
      return out;
    }
    ++kicks;

    // Victim: uniform subtable, uniform cell within the candidate bucket,
    // re-drawn if it would send the element straight back where it came from.
    CellAddress victim;
    do {
      victim.table = (int)UniformBelow(rng_, (uint64_t)geo_.d);
      victim.bucket = hashes_->BucketIndex(cur, victim.table);
      victim.cell = (int)UniformBelow(rng_, (uint64_t)geo_.c);
    } while (have_came_from && victim == came_from);

    Cell& vc = cells_[CellIndex(victim.table, victim.bucket, victim.cell)];
    Element evicted = std::move(vc.key);
    vc.key = cur;

    if (cur_is_new) {
      out.self_placed = true;
      out.addr = victim;
    } else {
      out.moves.push_back({cur, came_from, victim});
    }

    cur = std::move(evicted);
    cur_is_new = false;
    came_from = victim;
    have_came_from = true;
  }
}

bool CuckooTable::Erase(const Element& x, CellAddress* where) {
  CellAddress at;
  if (!Find(x, &at)) return false;
  cells_[CellIndex(at.table, at.bucket, at.cell)] = {Element(), false};
  --size_;
  if (where) *where = at;
  return true;
}

void CuckooTable::SwapCells(const CellAddress& u, const CellAddress& v) {
  CheckAddress(u);
  CheckAddress(v);
  if (u.table != v.table || u.bucket != v.bucket)
    throw std::invalid_argument("CuckooTable::SwapCells: different buckets");
  std::swap(cells_[CellIndex(u.table, u.bucket, u.cell)],
            cells_[CellIndex(v.table, v.bucket, v.cell)]);
}

}  // namespace acf
