#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "acf/analytic_model.hpp"
#include "acf/filter_common.hpp"
#include "acf/workload.hpp"

// Experiment driver: builds a filter variant, loads it to the target
// occupancy, replays a query stream, and reports measured vs predicted
// false-positive rates. Sweeps emit one CSV row per parameter cell. Given
// the same master seed, every run and sweep is bit-for-bit reproducible.

namespace acf::experiment {

enum class Variant {
  kBaseline4x1,    // mirrored fixed-fingerprint filter, d=4, c=1
  kBaselinePk2x4,  // partial-key cuckoo filter, 2 candidate 4-cell buckets
  kAcfSingle,      // adaptive, selector bits, d=4, c=1
  kAcfMulti,       // adaptive, per-cell functions, d=2, c=4
};

const char* VariantName(Variant v);
int VariantD(Variant v);
int VariantC(Variant v);
// Accepts the plain names plus "acf-single-s<k>" to pin selector bits.
bool ParseVariant(const std::string& token, Variant* v, int* s);

struct ExperimentSpec {
  Variant variant = Variant::kAcfSingle;
  int s = 1;          // selector bits (acf-single only)
  int bits = 8;       // a: bits per filter cell
  size_t total_cells = 1u << 14;  // m
  int ratio = 10;     // A/S
  double mean_queries = 100;  // n_e
  double skew = 0.0;
  int trials = 10;
  double target_load = 0.95;
  uint64_t max_queries = 20'000'000;  // per-trial stream cap; 0 = uncapped
  uint64_t seed = 0;
  bool compute_model = true;
  bool alpha_reset_on_move = false;
  int max_kicks = 500;
  uint64_t model_samples = 30'000;  // bucket samples for the multi-cell model

  void Validate() const;
};

struct FprReport {
  double measured_fpr = 0;
  double measured_fpr_sd = 0;  // sample stddev of per-trial rates
  uint64_t fp_count = 0;
  uint64_t negative_query_count = 0;
  uint64_t positive_query_count = 0;
  uint64_t adaptation_count = 0;
  uint64_t slow_check_count = 0;
  uint64_t insert_failures = 0;  // always 0: load failures abort the run
  double realized_load = 0;
  std::optional<double> model_fpr;
  double model_std_error = 0;
  double wall_time_s = 0;
  int trials = 0;
  size_t sized_cells = 0;  // trace runs: table size chosen from the trace
  std::vector<double> trial_fprs;
};

std::unique_ptr<Filter> MakeFilter(const ExperimentSpec& spec, uint64_t seed);

// Synthetic negatives-only stream per the spec; one fresh workload and hash
// seeding per trial, all derived from spec.seed.
FprReport RunSynthetic(const ExperimentSpec& spec);

// Trace replay: table sized from the trace's distinct-flow count and
// spec.ratio, first |S| flows stored, every packet queried. mean_queries,
// skew and max_queries in the spec are ignored (the trace decides); the
// analytic model is not evaluated (it assumes Poissonized uniform streams).
FprReport RunTrace(const workload::Trace& trace, const ExperimentSpec& spec);

// Analytic prediction alone (no simulation) for the ACF variants.
model::Estimate PredictFpr(const ExperimentSpec& spec);

// --- CSV ---------------------------------------------------------------

extern const char* kCsvHeader;

struct CsvRow {
  ExperimentSpec spec;
  // Overrides for trace rows, where n_e/skew come from the data.
  std::optional<double> n_e_override;
  bool skew_blank = false;
  std::optional<FprReport> report;  // nullopt => failed row
};

std::string FormatCsvRow(const CsvRow& row);

struct SweepSpec {
  std::vector<std::pair<Variant, int>> variants;  // (variant, s)
  std::vector<int> bits_list = {8, 12, 16};
  std::vector<int> ratios;  // defaults to all supported ratios
  size_t total_cells = 1u << 14;
  double mean_queries = 10;
  double skew = 0.0;
  int trials = 3;
  double target_load = 0.95;
  uint64_t max_queries = 20'000'000;
  uint64_t seed = 0;
  bool compute_model = true;
  int max_kicks = 500;
  uint64_t model_samples = 30'000;
};

// Runs the full grid (sorted by variant, selector bits, cell bits, ratio),
// writing the header plus one row per cell to `csv`. Individual cell
// failures become status=failed rows (diagnostics to `log` if non-null);
// returns false if any cell failed.
bool Sweep(const SweepSpec& sweep, std::ostream& csv, std::ostream* log);

}  // namespace acf::experiment
