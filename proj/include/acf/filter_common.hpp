#pragma once

#include <cstdint>
#include <cstddef>

#include "acf/hashing.hpp"

namespace acf {

// Outcome of one query against a filter.
//
// Table-backed filters confirm every filter hit against the main table, so
// they can tell true positives from detected false positives themselves. The
// plain partial-key filter has no table and only reports positive/negative;
// the caller classifies it with ground truth.
enum class QueryOutcome {
  kNegative,              // no filter cell matched
  kTruePositive,          // filter hit confirmed by the table
  kFalsePositive,         // filter hit, table miss, no adaptation (baseline)
  kFalsePositiveAdapted,  // filter hit, table miss, one adaptation performed
  kPositive,              // unconfirmed filter hit (partial-key baseline)
};

struct FilterStats {
  uint64_t queries = 0;
  uint64_t slow_checks = 0;  // table-bucket reads triggered by filter hits
  uint64_t adaptations = 0;
};

struct InsertResult {
  bool ok = false;
  // On failure, the element that ended up without a home (the final evictee
  // of the displacement chain; possibly the inserted element itself).
  Element unplaced;
};

// Minimal polymorphic surface the experiment driver runs streams through.
class Filter {
 public:
  virtual ~Filter() = default;
  virtual InsertResult Insert(const Element& x) = 0;
  virtual bool Erase(const Element& x) = 0;
  virtual bool Lookup(const Element& x) const = 0;
  virtual QueryOutcome Query(const Element& x) = 0;
  virtual double Load() const = 0;
  virtual size_t size() const = 0;
  virtual const FilterStats& stats() const = 0;
};

}  // namespace acf
