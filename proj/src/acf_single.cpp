#include "acf/acf_single.hpp"

#include <bit>
#include <stdexcept>

namespace acf {

namespace {
uint32_t BucketsFor4x1(size_t total_cells) {
  if (total_cells == 0 || total_cells % 4 != 0)
    throw std::invalid_argument("AcfSingle: total cells must be 4*buckets");
  size_t b = total_cells / 4;
  if (!std::has_single_bit(b) || b > (1u << 30))
    throw std::invalid_argument("AcfSingle: buckets must be a power of two");
  return (uint32_t)b;
}
int ValidatedS(int bits, int s) {
  if (s < 1 || s > 3) throw std::invalid_argument("AcfSingle: s must be 1..3");
  if (bits - s < 1)
    throw std::invalid_argument("AcfSingle: fingerprint needs bits > s");
  return s;
}
}  // namespace

AcfSingle::AcfSingle(size_t total_cells, int bits, int s, uint64_t seed,
                     AcfSingleOptions opts)
    : bits_(bits),
      s_(ValidatedS(bits, s)),
      opts_(opts),
      hashes_(HashConfig{
          .master_seed = seed,
          .d = 4,
          .bucket_bits = std::countr_zero(BucketsFor4x1(total_cells)),
          .fingerprint_bits = bits - s,
          .family_size = 1 << s,
      }),
      table_(TableGeometry{4, 1, 1u << hashes_.config().bucket_bits}, &hashes_,
             DeriveSeed(seed, kSeedTableRng)),
      cells_(total_cells) {}

InsertResult AcfSingle::Insert(const Element& x) {
  InsertOutcome out = table_.Insert(x, opts_.max_kicks);
  // Fresh inserts start at alpha = 0; displaced elements carry the alpha
  // they had in the cell they were kicked out of (unless configured to
  // reset). Each placement lands exactly where the next displaced element
  // departed from, so reading the target cell before overwriting it yields
  // the alpha that element carries forward.
  uint8_t carry = 0;
  auto place = [&](const CellAddress& addr, const Element& e) {
    Cell& cell = cells_[Flat(addr)];
    uint8_t departing = cell.alpha;
    uint8_t alpha = opts_.alpha_reset_on_move ? 0 : carry;
    cell = {hashes_.Fingerprint(e, alpha), alpha, true};
    carry = departing;
  };
  if (out.self_placed) place(out.addr, x);
  for (const Move& mv : out.moves) place(mv.to, mv.element);
  return {out.ok, out.unplaced};
}

bool AcfSingle::Erase(const Element& x) {
  CellAddress at;
  if (!table_.Erase(x, &at)) return false;
  cells_[Flat(at)] = {0, 0, false};
  return true;
}

bool AcfSingle::Lookup(const Element& x) const {
  HashFamily::Probe probe = hashes_.MakeProbe(x);
  for (int t = 0; t < 4; ++t) {
    const Cell& cell =
        cells_[(size_t)t * hashes_.buckets() + hashes_.BucketIndex(x, t)];
    if (cell.occupied && cell.fp == probe.Get(cell.alpha)) return true;
  }
  return false;
}

QueryOutcome AcfSingle::Query(const Element& x) {
  ++stats_.queries;
  HashFamily::Probe probe = hashes_.MakeProbe(x);
  for (int t = 0; t < 4; ++t) {
    uint32_t b = hashes_.BucketIndex(x, t);
    const Cell& cell = cells_[(size_t)t * hashes_.buckets() + b];
    if (cell.occupied && cell.fp == probe.Get(cell.alpha)) {
      ++stats_.slow_checks;
      if (table_.FindInBucket(t, b, x) >= 0) return QueryOutcome::kTruePositive;
      Adapt({t, b, 0});
      return QueryOutcome::kFalsePositiveAdapted;
    }
  }
  return QueryOutcome::kNegative;
}

void AcfSingle::Adapt(const CellAddress& at) {
  // The matching cell is occupied (mirror invariant), so the table holds its
  // element; re-fingerprint it under the next selector.
  Cell& cell = cells_[Flat(at)];
  cell.alpha = (uint8_t)((cell.alpha + 1) & ((1 << s_) - 1));
  cell.fp = hashes_.Fingerprint(table_.At(at), cell.alpha);
  ++stats_.adaptations;
}

bool AcfSingle::CheckMirror() const {
  for (int t = 0; t < 4; ++t) {
    for (uint32_t b = 0; b < hashes_.buckets(); ++b) {
      CellAddress a{t, b, 0};
      const Cell& cell = cells_[Flat(a)];
      if (cell.occupied != table_.Occupied(a)) return false;
      if (cell.occupied) {
        if (cell.alpha >= (1 << s_)) return false;
        if (cell.fp != hashes_.Fingerprint(table_.At(a), cell.alpha))
          return false;
      }
    }
  }
  return true;
}

}  // namespace acf
