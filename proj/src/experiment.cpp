#include "acf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "acf/acf_multi.hpp"
#include "acf/acf_single.hpp"
#include "acf/baseline_filter.hpp"
#include "acf/random_util.hpp"

namespace acf::experiment {

const char* VariantName(Variant v) {
  switch (v) {
    case Variant::kBaseline4x1: return "baseline-4x1";
    case Variant::kBaselinePk2x4: return "baseline-pk-2x4";
    case Variant::kAcfSingle: return "acf-single";
    case Variant::kAcfMulti: return "acf-multi";
  }
  throw std::invalid_argument("unknown variant");
}

int VariantD(Variant v) {
  return (v == Variant::kBaselinePk2x4 || v == Variant::kAcfMulti) ? 2 : 4;
}

int VariantC(Variant v) {
  return (v == Variant::kBaselinePk2x4 || v == Variant::kAcfMulti) ? 4 : 1;
}

bool ParseVariant(const std::string& token, Variant* v, int* s) {
  if (token == "baseline-4x1") { *v = Variant::kBaseline4x1; return true; }
  if (token == "baseline-pk-2x4" || token == "baseline-pk") {
    *v = Variant::kBaselinePk2x4;
    return true;
  }
  if (token == "acf-multi") { *v = Variant::kAcfMulti; return true; }
  if (token == "acf-single") { *v = Variant::kAcfSingle; return true; }
  if (token.rfind("acf-single-s", 0) == 0 && token.size() == 13) {
    char k = token[12];
    if (k >= '1' && k <= '3') {
      *v = Variant::kAcfSingle;
      if (s != nullptr) *s = k - '0';
      return true;
    }
  }
  return false;
}

void ExperimentSpec::Validate() const {
  if (bits < 4 || bits > 30) throw std::invalid_argument("bits must be in [4,30]");
  if (variant == Variant::kAcfSingle) {
    if (s < 1 || s > 3) throw std::invalid_argument("s must be in [1,3]");
    if (bits - s < 1) throw std::invalid_argument("bits-s must be >= 1");
  }
  if (!workload::RatioSupported(ratio)) {
    throw std::invalid_argument("unsupported ratio: " + std::to_string(ratio));
  }
  size_t dc = static_cast<size_t>(VariantD(variant)) * VariantC(variant);
  if (total_cells < dc || total_cells % dc != 0) {
    throw std::invalid_argument("total_cells must be a multiple of d*c");
  }
  if (!(target_load > 0.0 && target_load <= 1.0)) {
    throw std::invalid_argument("target_load must be in (0,1]");
  }
  if (!(mean_queries > 0.0)) throw std::invalid_argument("mean_queries must be > 0");
  if (skew < 0.0) throw std::invalid_argument("skew must be >= 0");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (max_kicks < 1) throw std::invalid_argument("max_kicks must be >= 1");
  if (model_samples < 100) throw std::invalid_argument("model_samples must be >= 100");
}

std::unique_ptr<Filter> MakeFilter(const ExperimentSpec& spec, uint64_t seed) {
  switch (spec.variant) {
    case Variant::kBaseline4x1:
      return std::make_unique<MirrorFilter4x1>(spec.total_cells, spec.bits, seed,
                                               spec.max_kicks);
    case Variant::kBaselinePk2x4:
      return std::make_unique<PkFilter2x4>(spec.total_cells, spec.bits, seed,
                                           spec.max_kicks);
    case Variant::kAcfSingle: {
      AcfSingleOptions opts;
      opts.alpha_reset_on_move = spec.alpha_reset_on_move;
      opts.max_kicks = spec.max_kicks;
      return std::make_unique<AcfSingle>(spec.total_cells, spec.bits, spec.s, seed,
                                         opts);
    }
    case Variant::kAcfMulti:
      return std::make_unique<AcfMulti>(spec.total_cells, spec.bits, seed,
                                        spec.max_kicks);
  }
  throw std::invalid_argument("unknown variant");
}

namespace {

struct StreamCounters {
  uint64_t fp = 0;
  uint64_t neg = 0;
  uint64_t pos = 0;
};

// Replays a stream, counting detected false-positive events (filter match
// that the backing table then rejects) against the ground-truth split of
// the queries. A stored element must never come back negative.
StreamCounters Replay(Filter& filter, const workload::QueryStream& stream) {
  StreamCounters c;
  size_t n = stream.size();
  for (size_t i = 0; i < n; ++i) {
    QueryOutcome out = filter.Query(stream.KeyAt(i));
    if (stream.MemberAt(i)) {
      ++c.pos;
      if (out == QueryOutcome::kNegative) {
        throw std::logic_error("stored element reported negative (filter bug)");
      }
      if (out == QueryOutcome::kFalsePositive ||
          out == QueryOutcome::kFalsePositiveAdapted) {
        ++c.fp;  // a decoy cell matched before the element's own cell
      }
    } else {
      ++c.neg;
      if (out != QueryOutcome::kNegative) ++c.fp;
    }
  }
  return c;
}

void InsertAll(Filter& filter, const std::vector<Element>& members,
               const char* what) {
  for (size_t i = 0; i < members.size(); ++i) {
    InsertResult r = filter.Insert(members[i]);
    if (!r.ok) {
      std::ostringstream msg;
      msg << what << ": insertion failed at element " << i + 1 << " of "
          << members.size() << " (load " << filter.Load()
          << "); lower the target load or enlarge the table";
      throw std::runtime_error(msg.str());
    }
  }
}

struct SyntheticSizes {
  size_t stored;
  size_t negatives;
  uint64_t queries;
};

SyntheticSizes SizesFor(const ExperimentSpec& spec) {
  SyntheticSizes z;
  z.stored = static_cast<size_t>(
      std::llround(spec.target_load * static_cast<double>(spec.total_cells)));
  z.negatives = z.stored * static_cast<size_t>(spec.ratio);
  double want = spec.mean_queries * static_cast<double>(z.negatives);
  z.queries = static_cast<uint64_t>(std::llround(want));
  if (spec.max_queries > 0 && z.queries > spec.max_queries) {
    z.queries = spec.max_queries;
  }
  return z;
}

double SampleStddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

void Aggregate(FprReport* rep) {
  rep->measured_fpr =
      rep->negative_query_count == 0
          ? 0.0
          : static_cast<double>(rep->fp_count) /
                static_cast<double>(rep->negative_query_count);
  rep->measured_fpr_sd = SampleStddev(rep->trial_fprs);
  if (rep->trials > 0) rep->realized_load /= rep->trials;
}

}  // namespace

model::Estimate PredictFpr(const ExperimentSpec& spec) {
  spec.Validate();
  SyntheticSizes z = SizesFor(spec);
  double load = static_cast<double>(z.stored) / static_cast<double>(spec.total_cells);
  switch (spec.variant) {
    case Variant::kBaseline4x1:
      return {ExpectedFpp(4, 1, load, spec.bits), 0.0};
    case Variant::kBaselinePk2x4:
      return {ExpectedFpp(2, 4, load, spec.bits), 0.0};
    case Variant::kAcfSingle: {
      model::TableModelParams p;
      p.buckets = spec.total_cells / 4;
      p.d = 4;
      p.load = load;
      p.negatives = static_cast<double>(z.negatives);
      p.total_queries = static_cast<double>(z.queries);
      return {model::TableFprSingle(p, spec.bits - spec.s, spec.s), 0.0};
    }
    case Variant::kAcfMulti: {
      model::TableModelParams p;
      p.buckets = spec.total_cells / 8;
      p.d = 2;
      p.load = load;
      p.negatives = static_cast<double>(z.negatives);
      p.total_queries = static_cast<double>(z.queries);
      Rng rng(DeriveSeed(spec.seed, SeedTag::kSeedModel, 0));
      return model::TableFprMulti(p, spec.bits, spec.model_samples, rng);
    }
  }
  throw std::invalid_argument("unknown variant");
}

FprReport RunSynthetic(const ExperimentSpec& spec) {
  spec.Validate();
  auto t0 = std::chrono::steady_clock::now();
  FprReport rep;
  rep.trials = spec.trials;
  for (int t = 0; t < spec.trials; ++t) {
    uint64_t trial_seed = DeriveSeed(spec.seed, SeedTag::kSeedTrial, t);
    workload::SyntheticSpec ws;
    ws.total_cells = spec.total_cells;
    ws.target_load = spec.target_load;
    ws.ratio = spec.ratio;
    ws.mean_queries = spec.mean_queries;
    ws.skew = spec.skew;
    ws.max_queries = spec.max_queries;
    ws.seed = trial_seed;
    workload::SyntheticWorkload wl = workload::GenSynthetic(ws);

    std::unique_ptr<Filter> filter = MakeFilter(spec, trial_seed);
    InsertAll(*filter, wl.members, VariantName(spec.variant));
    rep.realized_load += filter->Load();

    StreamCounters c = Replay(*filter, wl.stream);
    rep.fp_count += c.fp;
    rep.negative_query_count += c.neg;
    rep.positive_query_count += c.pos;
    const FilterStats& st = filter->stats();
    rep.adaptation_count += st.adaptations;
    rep.slow_check_count += st.slow_checks;
    rep.trial_fprs.push_back(
        c.neg == 0 ? 0.0 : static_cast<double>(c.fp) / static_cast<double>(c.neg));
  }
  Aggregate(&rep);
  if (spec.compute_model) {
    model::Estimate e = PredictFpr(spec);
    rep.model_fpr = e.value;
    rep.model_std_error = e.std_error;
  }
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

FprReport RunTrace(const workload::Trace& trace, const ExperimentSpec& spec) {
  spec.Validate();
  auto t0 = std::chrono::steady_clock::now();
  int d = VariantD(spec.variant);
  int c = VariantC(spec.variant);
  workload::TraceSplit split =
      workload::SplitTrace(trace.flows.size(), spec.ratio, d, c, spec.target_load);

  ExperimentSpec sized = spec;
  sized.total_cells = split.total_cells;
  sized.Validate();

  workload::QueryStream stream = workload::MakeTraceStream(trace, split.stored);
  std::vector<Element> members(stream.keys.begin(),
                               stream.keys.begin() + split.stored);

  FprReport rep;
  rep.trials = spec.trials;
  rep.sized_cells = split.total_cells;
  for (int t = 0; t < spec.trials; ++t) {
    uint64_t trial_seed = DeriveSeed(spec.seed, SeedTag::kSeedTrial, t);
    std::unique_ptr<Filter> filter = MakeFilter(sized, trial_seed);
    InsertAll(*filter, members, VariantName(spec.variant));
    rep.realized_load += filter->Load();

    StreamCounters sc = Replay(*filter, stream);
    rep.fp_count += sc.fp;
    rep.negative_query_count += sc.neg;
    rep.positive_query_count += sc.pos;
    const FilterStats& st = filter->stats();
    rep.adaptation_count += st.adaptations;
    rep.slow_check_count += st.slow_checks;
    rep.trial_fprs.push_back(
        sc.neg == 0 ? 0.0
                    : static_cast<double>(sc.fp) / static_cast<double>(sc.neg));
  }
  Aggregate(&rep);
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// --- CSV -----------------------------------------------------------------

const char* kCsvHeader =
    "variant,d,c,s,a,ratio,n_e,skew,trials,measured_fpr,model_fpr,fp_count,"
    "neg_queries,adaptations,realized_load,seed,status";

namespace {

std::string Fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace

std::string FormatCsvRow(const CsvRow& row) {
  const ExperimentSpec& s = row.spec;
  std::ostringstream out;
  out << VariantName(s.variant) << ',' << VariantD(s.variant) << ','
      << VariantC(s.variant) << ',';
  if (s.variant == Variant::kAcfSingle) out << s.s;
  out << ',' << s.bits << ',' << s.ratio << ',';
  out << Fmt(row.n_e_override.value_or(s.mean_queries)) << ',';
  if (!row.skew_blank) out << Fmt(s.skew);
  out << ',' << s.trials << ',';
  if (row.report.has_value()) {
    const FprReport& r = *row.report;
    out << Fmt(r.measured_fpr) << ',';
    if (r.model_fpr.has_value()) out << Fmt(*r.model_fpr);
    out << ',' << r.fp_count << ',' << r.negative_query_count << ','
        << r.adaptation_count << ',' << Fmt(r.realized_load) << ',' << s.seed
        << ",ok";
  } else {
    out << ",,,,,," << s.seed << ",failed";
  }
  return out.str();
}

bool Sweep(const SweepSpec& sweep, std::ostream& csv, std::ostream* log) {
  std::vector<std::pair<Variant, int>> variants = sweep.variants;
  for (auto& vs : variants) {
    if (vs.first != Variant::kAcfSingle) vs.second = 0;
  }
  std::sort(variants.begin(), variants.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) {
                return static_cast<int>(a.first) < static_cast<int>(b.first);
              }
              return a.second < b.second;
            });
  variants.erase(std::unique(variants.begin(), variants.end()), variants.end());
  if (variants.empty()) throw std::invalid_argument("sweep: no variants given");

  std::vector<int> bits = sweep.bits_list;
  std::sort(bits.begin(), bits.end());
  bits.erase(std::unique(bits.begin(), bits.end()), bits.end());
  if (bits.empty()) throw std::invalid_argument("sweep: no bit widths given");

  std::vector<int> ratios =
      sweep.ratios.empty() ? workload::SupportedRatios() : sweep.ratios;
  std::sort(ratios.begin(), ratios.end());
  ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());

  csv << kCsvHeader << '\n';
  bool all_ok = true;
  for (const auto& [variant, s] : variants) {
    for (int b : bits) {
      for (int ratio : ratios) {
        ExperimentSpec spec;
        spec.variant = variant;
        spec.s = variant == Variant::kAcfSingle ? std::max(1, s) : 1;
        spec.bits = b;
        spec.total_cells = sweep.total_cells;
        spec.ratio = ratio;
        spec.mean_queries = sweep.mean_queries;
        spec.skew = sweep.skew;
        spec.trials = sweep.trials;
        spec.target_load = sweep.target_load;
        spec.max_queries = sweep.max_queries;
        spec.seed = sweep.seed;
        spec.compute_model = sweep.compute_model;
        spec.max_kicks = sweep.max_kicks;
        spec.model_samples = sweep.model_samples;

        CsvRow row;
        row.spec = spec;
        try {
          row.report = RunSynthetic(spec);
        } catch (const std::exception& e) {
          all_ok = false;
          if (log != nullptr) {
            *log << "[sweep] " << VariantName(variant) << " a=" << b
                 << " ratio=" << ratio << " failed: " << e.what() << '\n';
          }
        }
        // Flushed per row so an interrupted sweep loses at most one row.
        csv << FormatCsvRow(row) << '\n' << std::flush;
      }
    }
  }
  return all_ok;
}

}  // namespace acf::experiment
