#include "acf/baseline_filter.hpp"

#include <bit>
#include <stdexcept>

namespace acf {

namespace {
uint32_t BucketsFor(size_t total_cells, int d, int c, const char* who) {
  size_t per = (size_t)d * c;
  if (total_cells == 0 || total_cells % per != 0)
    throw std::invalid_argument(std::string(who) + ": bad cell count");
  size_t b = total_cells / per;
  if (!std::has_single_bit(b) || b > (1u << 30))
    throw std::invalid_argument(std::string(who) +
                                ": buckets must be a power of two");
  return (uint32_t)b;
}
}  // namespace

// ---------------------------------------------------------------- 4x1 mirror

MirrorFilter4x1::MirrorFilter4x1(size_t total_cells, int bits, uint64_t seed,
                                 int max_kicks)
    : hashes_(HashConfig{
          .master_seed = seed,
          .d = 4,
          .bucket_bits =
              std::countr_zero(BucketsFor(total_cells, 4, 1, "MirrorFilter4x1")),
          .fingerprint_bits = bits,
          .family_size = 1,
      }),
      table_(TableGeometry{4, 1, 1u << hashes_.config().bucket_bits}, &hashes_,
             DeriveSeed(seed, kSeedTableRng)),
      cells_(total_cells),
      max_kicks_(max_kicks) {}

InsertResult MirrorFilter4x1::Insert(const Element& x) {
  InsertOutcome out = table_.Insert(x, max_kicks_);
  if (out.self_placed)
    cells_[Flat(out.addr)] = {hashes_.Fingerprint(x, 0), true};
  for (const Move& mv : out.moves)
    cells_[Flat(mv.to)] = {hashes_.Fingerprint(mv.element, 0), true};
  return {out.ok, out.unplaced};
}

bool MirrorFilter4x1::Erase(const Element& x) {
  CellAddress at;
  if (!table_.Erase(x, &at)) return false;
  cells_[Flat(at)] = {0, false};
  return true;
}

bool MirrorFilter4x1::Lookup(const Element& x) const {
  uint32_t fp = hashes_.Fingerprint(x, 0);
  for (int t = 0; t < 4; ++t) {
    const Cell& cell =
        cells_[(size_t)t * hashes_.buckets() + hashes_.BucketIndex(x, t)];
    if (cell.occupied && cell.fp == fp) return true;
  }
  return false;
}

QueryOutcome MirrorFilter4x1::Query(const Element& x) {
  ++stats_.queries;
  uint32_t fp = hashes_.Fingerprint(x, 0);
  for (int t = 0; t < 4; ++t) {
    uint32_t b = hashes_.BucketIndex(x, t);
    const Cell& cell = cells_[(size_t)t * hashes_.buckets() + b];
    if (cell.occupied && cell.fp == fp) {
      ++stats_.slow_checks;
      return table_.FindInBucket(t, b, x) >= 0 ? QueryOutcome::kTruePositive
                                               : QueryOutcome::kFalsePositive;
    }
  }
  return QueryOutcome::kNegative;
}

bool MirrorFilter4x1::CheckMirror() const {
  for (int t = 0; t < 4; ++t) {
    for (uint32_t b = 0; b < hashes_.buckets(); ++b) {
      CellAddress a{t, b, 0};
      const Cell& cell = cells_[Flat(a)];
      if (cell.occupied != table_.Occupied(a)) return false;
      if (cell.occupied && cell.fp != hashes_.Fingerprint(table_.At(a), 0))
        return false;
    }
  }
  return true;
}

// --------------------------------------------------------------- partial-key

PkFilter2x4::PkFilter2x4(size_t total_cells, int bits, uint64_t seed,
                         int max_kicks)
    : hashes_(HashConfig{
          .master_seed = seed,
          .d = 1,
          .bucket_bits =
              std::countr_zero(BucketsFor(total_cells, 1, kCells, "PkFilter2x4")),
          .fingerprint_bits = bits,
          .family_size = 1,
      }),
      buckets_(hashes_.buckets()),
      cells_(total_cells),
      rng_(DeriveSeed(seed, kSeedTableRng)),
      max_kicks_(max_kicks) {}

int PkFilter2x4::FindInBucket(uint32_t bucket, uint32_t fp) const {
  for (int k = 0; k < kCells; ++k) {
    const Cell& cell = cells_[Flat(bucket, k)];
    if (cell.occupied && cell.fp == fp) return k;
  }
  return -1;
}

bool PkFilter2x4::PlaceInBucket(uint32_t bucket, uint32_t fp) {
  for (int k = 0; k < kCells; ++k) {
    Cell& cell = cells_[Flat(bucket, k)];
    if (!cell.occupied) {
      cell = {fp, true};
      ++size_;
      return true;
    }
  }
  return false;
}

InsertResult PkFilter2x4::Insert(const Element& x) {
  if (x.size() > kMaxElementBytes)
    throw std::invalid_argument("PkFilter2x4::Insert: element exceeds 255 bytes");
  uint32_t fp = hashes_.Fingerprint(x, 0);
  uint32_t b1 = hashes_.BucketIndex(x, 0);
  uint32_t b2 = AltBucket(b1, fp);
  if (PlaceInBucket(b1, fp) || PlaceInBucket(b2, fp)) return {true, {}};

  // Both candidates full: kick fingerprints along their alternate buckets.
  uint32_t cur = fp;
  uint32_t bucket = (UniformBelow(rng_, 2) == 0) ? b1 : b2;
  int came_from_cell = -1;  // set when the next bucket equals this bucket
  for (int kick = 0; kick < max_kicks_; ++kick) {
    int victim;
    do {
      victim = (int)UniformBelow(rng_, kCells);
    } while (victim == came_from_cell);
    std::swap(cur, cells_[Flat(bucket, victim)].fp);
    uint32_t next = AltBucket(bucket, cur);
    came_from_cell = (next == bucket) ? victim : -1;
    bucket = next;
    if (PlaceInBucket(bucket, cur)) return {true, {}};
  }
  // The displacement chain failed; one resident fingerprint is dropped. Its
  // owning element is unknown (only fingerprints are stored).
  return {false, {}};
}

bool PkFilter2x4::Erase(const Element& x) {
  uint32_t fp = hashes_.Fingerprint(x, 0);
  uint32_t b1 = hashes_.BucketIndex(x, 0);
  for (uint32_t b : {b1, AltBucket(b1, fp)}) {
    int k = FindInBucket(b, fp);
    if (k >= 0) {
      cells_[Flat(b, k)] = {0, false};
      --size_;
      return true;
    }
  }
  return false;
}

bool PkFilter2x4::Lookup(const Element& x) const {
  uint32_t fp = hashes_.Fingerprint(x, 0);
  uint32_t b1 = hashes_.BucketIndex(x, 0);
  return FindInBucket(b1, fp) >= 0 || FindInBucket(AltBucket(b1, fp), fp) >= 0;
}

QueryOutcome PkFilter2x4::Query(const Element& x) {
  ++stats_.queries;
  return Lookup(x) ? QueryOutcome::kPositive : QueryOutcome::kNegative;
}

}  // namespace acf
