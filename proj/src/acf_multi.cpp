#include "acf/acf_multi.hpp"

#include <bit>
#include <stdexcept>

namespace acf {

namespace {
uint32_t BucketsFor2x4(size_t total_cells) {
  if (total_cells == 0 || total_cells % 8 != 0)
    throw std::invalid_argument("AcfMulti: total cells must be 2*4*buckets");
  size_t b = total_cells / 8;
  if (!std::has_single_bit(b) || b > (1u << 30))
    throw std::invalid_argument("AcfMulti: buckets must be a power of two");
  return (uint32_t)b;
}
}  // namespace

AcfMulti::AcfMulti(size_t total_cells, int bits, uint64_t seed, int max_kicks)
    : bits_(bits),
      hashes_(HashConfig{
          .master_seed = seed,
          .d = 2,
          .bucket_bits = std::countr_zero(BucketsFor2x4(total_cells)),
          .fingerprint_bits = bits,
          .family_size = kCells,
      }),
      table_(TableGeometry{2, kCells, 1u << hashes_.config().bucket_bits},
             &hashes_, DeriveSeed(seed, kSeedTableRng)),
      cells_(total_cells),
      adapt_rng_(DeriveSeed(seed, kSeedAdaptRng)),
      max_kicks_(max_kicks) {}

InsertResult AcfMulti::Insert(const Element& x) {
  InsertOutcome out = table_.Insert(x, max_kicks_);
  // Fingerprint function is the destination cell's position.
  if (out.self_placed)
    cells_[Flat(out.addr)] = {hashes_.Fingerprint(x, out.addr.cell), true};
  for (const Move& mv : out.moves)
    cells_[Flat(mv.to)] = {hashes_.Fingerprint(mv.element, mv.to.cell), true};
  return {out.ok, out.unplaced};
}

bool AcfMulti::Erase(const Element& x) {
  CellAddress at;
  if (!table_.Erase(x, &at)) return false;
  cells_[Flat(at)] = {0, false};
  return true;
}

bool AcfMulti::Lookup(const Element& x) const {
  HashFamily::Probe probe = hashes_.MakeProbe(x);
  for (int t = 0; t < 2; ++t) {
    uint32_t b = hashes_.BucketIndex(x, t);
    size_t base = ((size_t)t * hashes_.buckets() + b) * kCells;
    for (int k = 0; k < kCells; ++k) {
      const Cell& cell = cells_[base + k];
      if (cell.occupied && cell.fp == probe.Get(k)) return true;
    }
  }
  return false;
}

QueryOutcome AcfMulti::Query(const Element& x) {
  ++stats_.queries;
  HashFamily::Probe probe = hashes_.MakeProbe(x);
  for (int t = 0; t < 2; ++t) {
    uint32_t b = hashes_.BucketIndex(x, t);
    size_t base = ((size_t)t * hashes_.buckets() + b) * kCells;
    for (int k = 0; k < kCells; ++k) {
      const Cell& cell = cells_[base + k];
      if (cell.occupied && cell.fp == probe.Get(k)) {
        ++stats_.slow_checks;
        if (table_.FindInBucket(t, b, x) >= 0)
          return QueryOutcome::kTruePositive;
        // Adapt: swap the matching cell with a uniform other cell of the
        // bucket (which may be empty — a swap into the hole).
        int other = (int)UniformBelow(adapt_rng_, kCells - 1);
        if (other >= k) ++other;
        SwapWithin(t, b, k, other);
        ++stats_.adaptations;
        return QueryOutcome::kFalsePositiveAdapted;
      }
    }
  }
  return QueryOutcome::kNegative;
}

void AcfMulti::RefreshCell(const CellAddress& a) {
  Cell& cell = cells_[Flat(a)];
  if (table_.Occupied(a))
    cell = {hashes_.Fingerprint(table_.At(a), a.cell), true};
  else
    cell = {0, false};
}

void AcfMulti::SwapWithin(int table, uint32_t bucket, int j, int k) {
  if (j == k) throw std::invalid_argument("AcfMulti::SwapWithin: j == k");
  CellAddress u{table, bucket, j};
  CellAddress v{table, bucket, k};
  table_.SwapCells(u, v);
  RefreshCell(u);
  RefreshCell(v);
}

bool AcfMulti::CheckMirror() const {
  for (int t = 0; t < 2; ++t) {
    for (uint32_t b = 0; b < hashes_.buckets(); ++b) {
      for (int k = 0; k < kCells; ++k) {
        CellAddress a{t, b, k};
        const Cell& cell = cells_[Flat(a)];
        if (cell.occupied != table_.Occupied(a)) return false;
        if (cell.occupied && cell.fp != hashes_.Fingerprint(table_.At(a), k))
          return false;
      }
    }
  }
  return true;
}

}  // namespace acf
