#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "acf/hashing.hpp"
#include "acf/random_util.hpp"

// Workload construction: synthetic member/negative sets with uniform or
// Zipf-skewed query streams, flow-trace loading (one key per line), trace
// splitting into stored/queried sets, and a skew-matched surrogate trace
// generator for when real packet traces are unavailable.

namespace acf::workload {

// The A/S ratios experiments sweep over.
const std::vector<int>& SupportedRatios();
bool RatioSupported(int ratio);

// An ordered query stream over a pool of distinct keys. Kept as indices so
// tens of millions of queries over a bounded key set stay compact.
struct QueryStream {
  std::vector<Element> keys;      // distinct keys
  std::vector<uint8_t> is_member; // per key: ground-truth membership
  std::vector<uint32_t> order;    // the stream, as indices into keys

  size_t size() const { return order.size(); }
  const Element& KeyAt(size_t i) const { return keys[order[i]]; }
  bool MemberAt(size_t i) const { return is_member[order[i]] != 0; }
};

struct SyntheticSpec {
  size_t total_cells = 1u << 14;  // m
  double target_load = 0.95;
  int ratio = 10;                 // A/S; must be a supported ratio
  double mean_queries = 100;      // n_e: mean queries per negative key
  double skew = 0.0;              // Zipf exponent over negatives; 0 = uniform
  uint64_t max_queries = 20'000'000;  // stream cap (0 = uncapped)
  uint64_t seed = 0;

  void Validate() const;
};

struct SyntheticWorkload {
  std::vector<Element> members;  // S: inserted into the filter under test
  QueryStream stream;            // all-negative query stream over A keys
  size_t negatives = 0;          // |A| = ratio * |S|
  double effective_mean_queries = 0;  // N/|A| after the cap
};

// |S| = round(target_load * m) fresh random 8-byte keys; A = ratio * |S|
// distinct non-member keys; stream of min(n_e * A, cap) draws, uniform or
// Zipf(skew) by key rank.
SyntheticWorkload GenSynthetic(const SyntheticSpec& spec);

// A flow trace: distinct flow keys in first-arrival order plus the packet
// sequence as indices into them.
struct Trace {
  std::vector<Element> flows;
  std::vector<uint32_t> packets;
};

// Parses one key per line; '#' lines and blank lines are skipped; keys are
// arbitrary byte strings up to 255 bytes. Errors on unreadable or empty
// input.
Trace LoadTrace(const std::string& path);
Trace ParseTrace(std::istream& in, const std::string& name);

// Raised when no power-of-two table satisfies the load window for a split.
struct SizingError : std::runtime_error {
  SizingError(const std::string& msg, int suggestion)
      : std::runtime_error(msg), suggested_ratio(suggestion) {}
  int suggested_ratio;  // nearest feasible A/S ratio, -1 if none
};

struct TraceSplit {
  size_t stored = 0;       // |S|: first distinct flows, inserted
  size_t total_cells = 0;  // chosen m = d*c*buckets
  uint32_t buckets = 0;    // per subtable
  double load = 0;         // |S| / m
};

// Splits F_total distinct flows into |S| = round(F/(1+ratio)) stored flows
// and the rest negatives, and picks the smallest power-of-two bucket count
// whose load lands in [target_load - 0.05, target_load]. Throws SizingError
// (with the nearest feasible ratio) when the window cannot be met.
TraceSplit SplitTrace(size_t total_flows, int ratio, int d, int c,
                      double target_load = 0.95);

// Query stream over the trace: every packet, ground truth = "flow is among
// the first `stored` distinct flows".
QueryStream MakeTraceStream(const Trace& trace, size_t stored);

struct TraceGenSpec {
  uint64_t flows = 0;
  uint64_t packets = 0;   // must be >= flows; every flow appears at least once
  double skew = 0.75;     // Zipf exponent over flow ranks
  uint64_t seed = 0;
};

// Writes a surrogate trace (one flow key per line, '#' header comments) with
// exactly `flows` distinct keys and ~`packets` lines, sizes Zipf(skew)
// distributed. Returns the number of packet lines written.
uint64_t GenTrace(const TraceGenSpec& spec, std::ostream& out);
uint64_t GenTraceFile(const TraceGenSpec& spec, const std::string& path);

}  // namespace acf::workload
