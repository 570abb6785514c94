#pragma once

#include <cstdint>

#include "acf/random_util.hpp"

// Asymptotic false-positive-rate models for the adaptive filters, plus the
// operation-cost model. Bucket occupancies and per-bucket query pools are
// Poissonized; the single-cell bucket rate is an exact truncated sum over
// collision counts, the multi-cell bucket rate simulates the 24-state
// resident-ordering Markov chain, and both table-level rates aggregate
// buckets weighted by their share of the query stream.

namespace acf::model {

inline constexpr double kDefaultTailEps = 1e-9;

// Probability that a query key colliding under the current selector needed
// exactly k earlier false positives before the bucket stopped matching it:
// (1 - e^-mu)^k * e^-mu with mu = zeta * 2^-a'.
double PStop(int k, double zeta, int a_prime);

// Long-run false-positive rate of one occupied single-cell bucket with s
// selector bits and a'-bit fingerprints, probed by a pool of zeta distinct
// non-member keys for n total queries. Sums the "stopped after k adaptations"
// terms plus the unresolvable-cycle term over all-positive collision-count
// vectors; each count is truncated at the smallest Z_max whose Poisson tail
// mass is below tail_eps.
double BucketFprSingle(double zeta, int a_prime, int s, double n,
                       double tail_eps = kDefaultTailEps);

struct TableModelParams {
  uint32_t buckets = 4096;    // per subtable
  int d = 4;                  // subtables
  double load = 0.95;         // occupied fraction of cells
  double negatives = 0;       // A: distinct non-member keys in the stream
  double total_queries = 0;   // N: stream length (n_e = N / A)

  void Validate() const;
};

// Table-level FPR for the single-cell variant: buckets' collider counts are
// Poisson(A/b), per-bucket query counts Poisson(zeta*N/A), each bucket's
// rate weighted by its share j/N of the stream.
double TableFprSingle(const TableModelParams& tp, int a_prime, int s,
                      double tail_eps = kDefaultTailEps);

// Collision counts for one 4-cell bucket: z[e][p] = how many of the zeta
// pool keys collide with resident e's fingerprint at position p. Rows of
// absent residents (e >= occupancy) stay zero.
struct ZVector {
  int z[4][4] = {};
};

ZVector SampleZVector(uint64_t zeta, int bits, int occupancy, Rng& rng);

// Simulates the resident-permutation chain of one bucket for n queries
// (false positive at position p with probability z[perm[p]][p]/zeta, then p
// is swapped with a uniform other cell), returning false positives per
// query averaged over `reps` runs. Detects absorbing orderings and skips
// ahead geometrically between hits.
double BucketFprMulti(const ZVector& zv, uint64_t zeta, uint64_t n, Rng& rng,
                      int reps = 1);

struct Estimate {
  double value = 0;
  double std_error = 0;
};

// Monte Carlo table-level FPR for the multi-cell variant: samples buckets
// (zeta ~ Poisson(A/b), occupancy ~ Binomial(4, load), Z-vector, query count
// ~ Poisson(zeta*N/A)) and weights each bucket's chain rate by j/N.
Estimate TableFprMulti(const TableModelParams& tp, int bits, uint64_t samples,
                       Rng& rng);

// Operation-mix cost model.
struct CostParams {
  double p_lookup = 1, p_insert = 0, p_delete = 0;  // must sum to 1
  double q_member = 0;    // fraction of lookups that hit stored elements
  double q_fp = 0;        // false-positive rate for the non-member lookups
  double cost_insert = 0, cost_delete = 0;
  double cost_positive = 0;  // lookup that goes to the slow store
  double cost_negative = 0;  // lookup resolved by the filter alone
};

double ExpectedCost(const CostParams& cp);

}  // namespace acf::model
