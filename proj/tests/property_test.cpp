#include "support/property_harness.hpp"

#include <cstdint>

#include "doctest.h"

using namespace acf;
using namespace acf::testing;

// Randomized insert/erase/query soak against shadow bookkeeping: no false
// negatives ever, every adaptation touches only the queried key's candidate
// cells, mirrors stay consistent. The acceptance gate runs the same harness
// at 100 seeds per variant; this keeps a fast canary in the unit suite.

TEST_CASE("table survives a randomized op soak with full replay checking") {
  for (uint64_t seed : {11u, 12u}) {
    PropertyReport r4 = RunTableProperty(4, 1, 256, seed, 60000);
    CHECK_MESSAGE(r4.ok, r4.detail);
    PropertyReport r2 = RunTableProperty(2, 4, 128, seed, 60000);
    CHECK_MESSAGE(r2.ok, r2.detail);
  }
}

TEST_CASE("filters hold their invariants under random churn") {
  const size_t kCells = 1024;
  const int kBits = 6;
  const int kKicks = 8;
  const uint64_t kOps = 100000;

  SUBCASE("baseline-4x1") {
    for (uint64_t seed : {1u, 2u, 3u}) {
      PropertyReport rep = RunFilterProperty(experiment::Variant::kBaseline4x1,
                                             1, kBits, kCells, kKicks, seed, kOps);
      CHECK_MESSAGE(rep.ok, "seed ", seed, ": ", rep.detail);
      CHECK(rep.ops == kOps);
    }
  }
  SUBCASE("baseline-pk-2x4") {
    for (uint64_t seed : {1u, 2u, 3u}) {
      PropertyReport rep = RunFilterProperty(experiment::Variant::kBaselinePk2x4,
                                             1, kBits, kCells, kKicks, seed, kOps);
      CHECK_MESSAGE(rep.ok, "seed ", seed, ": ", rep.detail);
    }
  }
  SUBCASE("acf-single, each selector width") {
    for (int s : {1, 2, 3}) {
      PropertyReport rep = RunFilterProperty(experiment::Variant::kAcfSingle, s,
                                             kBits, kCells, kKicks, 5 + s, kOps);
      CHECK_MESSAGE(rep.ok, "s=", s, ": ", rep.detail);
      // At 6-bit cells the churn stream must trip real adaptations, or the
      // locality audit never exercised its interesting branch.
      CHECK(rep.adaptations_seen > 0);
    }
  }
  SUBCASE("acf-multi") {
    for (uint64_t seed : {1u, 2u, 3u}) {
      PropertyReport rep = RunFilterProperty(experiment::Variant::kAcfMulti, 1,
                                             kBits, kCells, kKicks, seed, kOps);
      CHECK_MESSAGE(rep.ok, "seed ", seed, ": ", rep.detail);
      CHECK(rep.adaptations_seen > 0);
    }
  }
}
