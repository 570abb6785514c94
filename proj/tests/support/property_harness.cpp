#include "support/property_harness.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "acf/acf_multi.hpp"
#include "acf/acf_single.hpp"
#include "acf/baseline_filter.hpp"
#include "acf/random_util.hpp"

namespace acf::testing {

namespace {

using experiment::Variant;

Element KeyOf(uint64_t i) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "k%010llx", (unsigned long long)i);
  return Element(buf);
}

struct SnapCell {
  bool occ = false;
  uint32_t fp = 0;
  uint8_t alpha = 0;
  Element key;  // backing-table element; empty for the fingerprint-only filter
  bool operator==(const SnapCell&) const = default;
};

// Owns one filter with its concrete type still visible, so the audits can
// read cells and compute candidate buckets uniformly across variants.
struct Rig {
  std::unique_ptr<Filter> filter;
  AcfSingle* single = nullptr;
  AcfMulti* multi = nullptr;
  MirrorFilter4x1* base4 = nullptr;
  PkFilter2x4* pk = nullptr;
  Variant variant = Variant::kBaseline4x1;

  static Rig Make(Variant v, int s, int bits, size_t total_cells,
                  int max_kicks, uint64_t seed, bool alpha_reset) {
    Rig r;
    r.variant = v;
    switch (v) {
      case Variant::kBaseline4x1: {
        auto p = std::make_unique<MirrorFilter4x1>(total_cells, bits, seed,
                                                   max_kicks);
        r.base4 = p.get();
        r.filter = std::move(p);
        break;
      }
      case Variant::kBaselinePk2x4: {
        // The fingerprint-only filter cannot name the element a failed
        // insert drops, which would poison shadow bookkeeping; give it the
        // full displacement budget so failures cannot happen at these loads.
        auto p = std::make_unique<PkFilter2x4>(total_cells, bits, seed,
                                               kDefaultMaxKicks);
        r.pk = p.get();
        r.filter = std::move(p);
        break;
      }
      case Variant::kAcfSingle: {
        AcfSingleOptions opts;
        opts.alpha_reset_on_move = alpha_reset;
        opts.max_kicks = max_kicks;
        auto p = std::make_unique<AcfSingle>(total_cells, bits, s, seed, opts);
        r.single = p.get();
        r.filter = std::move(p);
        break;
      }
      case Variant::kAcfMulti: {
        auto p = std::make_unique<AcfMulti>(total_cells, bits, seed, max_kicks);
        r.multi = p.get();
        r.filter = std::move(p);
        break;
      }
    }
    return r;
  }

  const HashFamily* TableHashes() const {
    if (single) return &single->table().hashes();
    if (multi) return &multi->table().hashes();
    if (base4) return &base4->table().hashes();
    return nullptr;
  }

  bool TableFind(const Element& x) const {
    if (single) return single->table().Find(x);
    if (multi) return multi->table().Find(x);
    if (base4) return base4->table().Find(x);
    return false;
  }

  bool Mirror() const {
    if (single) return single->CheckMirror();
    if (multi) return multi->CheckMirror();
    if (base4) return base4->CheckMirror();
    return true;  // nothing to mirror
  }

  std::vector<SnapCell> Snapshot() const {
    std::vector<SnapCell> snap;
    if (single) {
      uint32_t B = single->table().geometry().buckets;
      snap.resize((size_t)4 * B);
      for (int t = 0; t < 4; ++t)
        for (uint32_t b = 0; b < B; ++b) {
          auto v = single->ViewCell(t, b);
          SnapCell& c = snap[(size_t)t * B + b];
          c = {v.occupied, v.fp, v.alpha,
               v.occupied ? single->table().At({t, b, 0}) : Element()};
        }
    } else if (multi) {
      uint32_t B = multi->table().geometry().buckets;
      snap.resize((size_t)8 * B);
      for (int t = 0; t < 2; ++t)
        for (uint32_t b = 0; b < B; ++b)
          for (int k = 0; k < 4; ++k) {
            CellAddress a{t, b, k};
            auto v = multi->ViewCell(a);
            snap[((size_t)t * B + b) * 4 + k] = {
                v.occupied, v.fp, 0,
                v.occupied ? multi->table().At(a) : Element()};
          }
    } else if (base4) {
      uint32_t B = base4->table().geometry().buckets;
      snap.resize((size_t)4 * B);
      for (int t = 0; t < 4; ++t)
        for (uint32_t b = 0; b < B; ++b) {
          auto v = base4->ViewCell(t, b);
          snap[(size_t)t * B + b] = {
              v.occupied, v.fp, 0,
              v.occupied ? base4->table().At({t, b, 0}) : Element()};
        }
    } else {
      uint32_t B = pk->buckets();
      snap.resize((size_t)B * 4);
      for (uint32_t b = 0; b < B; ++b)
        for (int k = 0; k < 4; ++k) {
          auto v = pk->ViewCell(b, k);
          snap[(size_t)b * 4 + k] = {v.occupied, v.fp, 0, Element()};
        }
    }
    return snap;
  }

  // Snapshot indices adaptation for key x is allowed to touch.
  std::vector<size_t> CandidateCells(const Element& x) const {
    std::vector<size_t> out;
    if (single || base4) {
      const HashFamily& hf = *TableHashes();
      for (int t = 0; t < 4; ++t)
        out.push_back((size_t)t * hf.buckets() + hf.BucketIndex(x, t));
    } else if (multi) {
      const HashFamily& hf = *TableHashes();
      for (int t = 0; t < 2; ++t) {
        size_t base = ((size_t)t * hf.buckets() + hf.BucketIndex(x, t)) * 4;
        for (int k = 0; k < 4; ++k) out.push_back(base + k);
      }
    } else {
      uint32_t b1 = pk->hashes().BucketIndex(x, 0);
      uint32_t b2 = pk->AltBucket(b1, pk->hashes().Fingerprint(x, 0));
      for (uint32_t b : {b1, b2})
        for (int k = 0; k < 4; ++k) out.push_back((size_t)b * 4 + k);
    }
    return out;
  }
};

struct Shadow {
  std::vector<Element> members;
  std::unordered_map<Element, size_t> index;

  bool Contains(const Element& x) const { return index.count(x) != 0; }
  void Add(const Element& x) {
    index[x] = members.size();
    members.push_back(x);
  }
  void Remove(const Element& x) {
    auto it = index.find(x);
    size_t i = it->second;
    index.erase(it);
    if (i + 1 != members.size()) {
      members[i] = std::move(members.back());
      index[members[i]] = i;
    }
    members.pop_back();
  }
  const Element& Sample(Rng& rng) const {
    return members[UniformBelow(rng, members.size())];
  }
};

bool OutcomeAllowed(Variant v, bool member, QueryOutcome out) {
  if (member && out == QueryOutcome::kNegative) return false;
  switch (v) {
    case Variant::kBaseline4x1:
      return member ? (out == QueryOutcome::kTruePositive ||
                       out == QueryOutcome::kFalsePositive)
                    : (out == QueryOutcome::kNegative ||
                       out == QueryOutcome::kFalsePositive);
    case Variant::kBaselinePk2x4:
      return member ? out == QueryOutcome::kPositive
                    : (out == QueryOutcome::kNegative ||
                       out == QueryOutcome::kPositive);
    case Variant::kAcfSingle:
    case Variant::kAcfMulti:
      return member ? (out == QueryOutcome::kTruePositive ||
                       out == QueryOutcome::kFalsePositiveAdapted)
                    : (out == QueryOutcome::kNegative ||
                       out == QueryOutcome::kFalsePositiveAdapted);
  }
  return false;
}

}  // namespace

PropertyReport RunFilterProperty(Variant variant, int s, int bits,
                                 size_t total_cells, int max_kicks,
                                 uint64_t seed, uint64_t ops) {
  PropertyReport rep;
  auto fail = [&](uint64_t op, const std::string& msg) {
    rep.ok = false;
    rep.detail = "op " + std::to_string(op) + ": " + msg;
  };
  try {
    Rig rig = Rig::Make(variant, s, bits, total_cells, max_kicks, seed,
                        /*alpha_reset=*/false);
    Filter& f = *rig.filter;
    Rng rng(DeriveSeed(seed, SeedTag::kSeedOracle, 1));
    Shadow shadow;
    const uint64_t universe = total_cells * 3;
    const size_t member_cap = (size_t)(0.86 * (double)total_cells);
    const bool mirrored = variant != Variant::kBaselinePk2x4;
    const int states = 1 << s;

    for (uint64_t op = 0; op < ops && rep.ok; ++op) {
      rep.ops = op + 1;
      uint64_t roll = UniformBelow(rng, 100);
      bool want_insert = (roll < 45 || shadow.members.size() < 8) &&
                         shadow.members.size() < member_cap;

      if (want_insert) {
        Element x = KeyOf(UniformBelow(rng, universe));
        if (shadow.Contains(x)) {
          QueryOutcome out = f.Query(x);
          if (!OutcomeAllowed(variant, true, out))
            fail(op, "stored element query returned a disallowed outcome");
        } else {
          InsertResult r = f.Insert(x);
          if (mirrored) {
            shadow.Add(x);
            if (!r.ok) {
              // The filter keeps x and drops exactly the element it names
              // (possibly x itself).
              if (!shadow.Contains(r.unplaced)) {
                fail(op, "failed insert dropped an element that was never stored");
              } else {
                shadow.Remove(r.unplaced);
                if (rig.TableFind(r.unplaced))
                  fail(op, "dropped element still present in the table");
              }
            }
          } else {
            if (!r.ok)
              fail(op, "fingerprint-only insert failed below its feasible load");
            else
              shadow.Add(x);
          }
          if (rep.ok && shadow.Contains(x) && !f.Lookup(x))
            fail(op, "freshly inserted element does not pass the filter");
          if (rep.ok && mirrored && rig.TableFind(x) != shadow.Contains(x))
            fail(op, "table membership diverged from the shadow set");
        }
      } else if (roll < 70) {
        if (mirrored && roll % 5 == 0) {
          Element never = KeyOf(universe + UniformBelow(rng, 100000));
          if (f.Erase(never))
            fail(op, "erase of a never-inserted element succeeded");
        } else if (!shadow.members.empty()) {
          Element x = shadow.Sample(rng);
          if (!f.Erase(x)) {
            fail(op, "erase of a stored element failed");
          } else {
            shadow.Remove(x);
            if (mirrored && rig.TableFind(x))
              fail(op, "erased element still present in the table");
          }
        }
      } else {
        Element x = (UniformBelow(rng, 10) == 0)
                        ? KeyOf(universe + UniformBelow(rng, 100000))
                        : KeyOf(UniformBelow(rng, universe));
        QueryOutcome out = f.Query(x);
        if (!OutcomeAllowed(variant, shadow.Contains(x), out))
          fail(op, "query outcome disallowed for its ground truth");
      }

      // Constant-time membership probe: no stored element may be missed.
      if (rep.ok && !shadow.members.empty() && !f.Lookup(shadow.Sample(rng)))
        fail(op, "stored element does not pass the filter");

      // Snapshot audit: queries may only mutate what adaptation allows.
      if (rep.ok && op % 128 == 0) {
        Element x = KeyOf(UniformBelow(rng, universe));
        std::vector<SnapCell> before = rig.Snapshot();
        uint64_t adapts_before = f.stats().adaptations;
        QueryOutcome out = f.Query(x);
        std::vector<SnapCell> after = rig.Snapshot();
        ++rep.locality_checks;
        if (!OutcomeAllowed(variant, shadow.Contains(x), out))
          fail(op, "audited query outcome disallowed for its ground truth");
        std::vector<size_t> diffs;
        for (size_t i = 0; i < before.size() && diffs.size() <= 4; ++i)
          if (!(before[i] == after[i])) diffs.push_back(i);
        bool adapted = out == QueryOutcome::kFalsePositiveAdapted;
        uint64_t delta = f.stats().adaptations - adapts_before;
        if (rep.ok && delta != (adapted ? 1u : 0u))
          fail(op, "adaptation counter out of step with the query outcome");
        if (rep.ok && !adapted && !diffs.empty())
          fail(op, "query mutated cells without a confirmed false positive");
        if (rep.ok && adapted) {
          ++rep.adaptations_seen;
          std::vector<size_t> cand = rig.CandidateCells(x);
          for (size_t i : diffs)
            if (std::find(cand.begin(), cand.end(), i) == cand.end())
              fail(op, "adaptation touched a cell outside the candidate buckets");
          if (rep.ok && variant == Variant::kAcfSingle) {
            if (diffs.size() != 1) {
              fail(op, "selector adaptation touched more than one cell");
            } else {
              const SnapCell& b = before[diffs[0]];
              const SnapCell& a = after[diffs[0]];
              if (!b.occ || !a.occ || b.key != a.key)
                fail(op, "selector adaptation moved or replaced the element");
              else if (a.alpha != ((b.alpha + 1) & (states - 1)))
                fail(op, "selector did not advance by one (mod 2^s)");
              else if (a.fp != rig.TableHashes()->Fingerprint(a.key, a.alpha))
                fail(op, "adapted fingerprint not recomputed under new selector");
            }
          }
          if (rep.ok && variant == Variant::kAcfMulti) {
            if (diffs.size() != 2 || diffs[0] / 4 != diffs[1] / 4) {
              fail(op, "swap adaptation did not touch exactly two cells of one bucket");
            } else {
              const SnapCell &b0 = before[diffs[0]], &b1 = before[diffs[1]];
              const SnapCell &a0 = after[diffs[0]], &a1 = after[diffs[1]];
              if (a0.occ != b1.occ || a1.occ != b0.occ || a0.key != b1.key ||
                  a1.key != b0.key) {
                fail(op, "swap adaptation did not exchange the two residents");
              } else {
                const HashFamily& hf = *rig.TableHashes();
                if ((a0.occ &&
                     a0.fp != hf.Fingerprint(a0.key, (int)(diffs[0] % 4))) ||
                    (a1.occ &&
                     a1.fp != hf.Fingerprint(a1.key, (int)(diffs[1] % 4))))
                  fail(op, "swapped fingerprints not rewritten for new positions");
              }
            }
          }
        }
      }

      // Full-structure audit.
      if (rep.ok && op % 512 == 0) {
        if (!rig.Mirror())
          fail(op, "fingerprint mirror diverged from the table");
        else if (f.size() != shadow.members.size())
          fail(op, "structure size diverged from the shadow set");
      }
    }

    if (rep.ok) {
      if (!rig.Mirror()) fail(ops, "final mirror check failed");
      for (const Element& m : shadow.members) {
        if (!rep.ok) break;
        if (!f.Lookup(m)) fail(ops, "stored element lost by the end of the run");
      }
      if (rep.ok && f.size() != shadow.members.size())
        fail(ops, "final size diverged from the shadow set");
    }
  } catch (const std::exception& e) {
    rep.ok = false;
    rep.detail = std::string("exception: ") + e.what();
  }
  return rep;
}

PropertyReport RunTableProperty(int d, int c, uint32_t buckets, uint64_t seed,
                                uint64_t ops) {
  PropertyReport rep;
  auto fail = [&](uint64_t op, const std::string& msg) {
    rep.ok = false;
    rep.detail = "op " + std::to_string(op) + ": " + msg;
  };
  try {
    HashConfig hc;
    hc.master_seed = seed;
    hc.d = d;
    hc.bucket_bits = std::countr_zero(buckets);
    hc.fingerprint_bits = 8;
    hc.family_size = 1;
    HashFamily hf(hc);
    CuckooTable tab({d, c, buckets}, &hf, DeriveSeed(seed, SeedTag::kSeedTableRng));
    Rng rng(DeriveSeed(seed, SeedTag::kSeedOracle, 2));
    Shadow shadow;
    std::unordered_map<Element, CellAddress> addr_of;
    const size_t cells = tab.geometry().cells();
    const uint64_t universe = cells * 3;
    const size_t cap = (size_t)(0.88 * (double)cells);

    for (uint64_t op = 0; op < ops && rep.ok; ++op) {
      rep.ops = op + 1;
      uint64_t roll = UniformBelow(rng, 100);
      bool want_insert = (roll < 45 || shadow.members.size() < 8) &&
                         shadow.members.size() < cap;

      if (want_insert) {
        Element x = KeyOf(UniformBelow(rng, universe));
        if (shadow.Contains(x)) continue;
        InsertOutcome out = tab.Insert(x, 32);
        // Replay the displacement log: it must chain cell-to-cell and agree
        // with the address map at every hop.
        if (out.self_placed) addr_of[x] = out.addr;
        CellAddress prev = out.addr;
        for (size_t i = 0; i < out.moves.size() && rep.ok; ++i) {
          const Move& mv = out.moves[i];
          if (!(mv.from == prev)) {
            fail(op, "displacement log does not chain cell to cell");
            break;
          }
          auto it = addr_of.find(mv.element);
          if (it == addr_of.end() || !(it->second == mv.from)) {
            fail(op, "displaced element was not at its logged source cell");
            break;
          }
          it->second = mv.to;
          prev = mv.to;
        }
        if (!rep.ok) break;
        if (out.ok) {
          shadow.Add(x);
        } else {
          shadow.Add(x);
          if (!shadow.Contains(out.unplaced)) {
            fail(op, "failed insert dropped an element that was never stored");
          } else {
            if (!(addr_of[out.unplaced] == prev))
              fail(op, "dropped element was not the last one displaced");
            addr_of.erase(out.unplaced);
            shadow.Remove(out.unplaced);
            if (rep.ok && tab.Find(out.unplaced))
              fail(op, "dropped element still present");
          }
        }
        if (rep.ok && shadow.Contains(x)) {
          CellAddress a = addr_of[x];
          if (!tab.Occupied(a) || tab.At(a) != x)
            fail(op, "inserted element not at its reported address");
        }
      } else if (roll < 70) {
        if (roll % 5 == 0) {
          Element never = KeyOf(universe + UniformBelow(rng, 100000));
          if (tab.Erase(never))
            fail(op, "erase of a never-inserted element succeeded");
        } else if (!shadow.members.empty()) {
          Element x = shadow.Sample(rng);
          CellAddress where;
          if (!tab.Erase(x, &where)) {
            fail(op, "erase of a stored element failed");
          } else {
            if (!(where == addr_of[x]))
              fail(op, "element erased from an unexpected cell");
            addr_of.erase(x);
            shadow.Remove(x);
          }
        }
      } else {
        Element x = KeyOf(UniformBelow(rng, universe));
        CellAddress where;
        bool found = tab.Find(x, &where);
        if (found != shadow.Contains(x)) {
          fail(op, "find() disagrees with the shadow set");
        } else if (found) {
          if (!(where == addr_of[x]))
            fail(op, "find() reported an address the moves never produced");
          else if (tab.FindInBucket(where.table, where.bucket, x) != where.cell)
            fail(op, "bucket scan disagrees with find()");
        }
      }

      if (rep.ok && op % 256 == 0) {
        if (tab.size() != shadow.members.size()) {
          fail(op, "table size diverged from the shadow set");
        } else {
          for (const auto& [e, a] : addr_of) {
            if (!tab.Occupied(a) || tab.At(a) != e) {
              fail(op, "address map diverged from table contents");
              break;
            }
          }
        }
      }
    }

    if (rep.ok && tab.size() != shadow.members.size())
      fail(ops, "final table size diverged from the shadow set");
  } catch (const std::exception& e) {
    rep.ok = false;
    rep.detail = std::string("exception: ") + e.what();
  }
  return rep;
}

}  // namespace acf::testing
