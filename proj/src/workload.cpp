#include "acf/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace acf::workload {

const std::vector<int>& SupportedRatios() {
  static const std::vector<int> kRatios = {1,  2,  3,  4,  5,  10, 20, 30,
                                           40, 50, 60, 70, 80, 90, 100};
  return kRatios;
}

bool RatioSupported(int ratio) {
  const auto& rs = SupportedRatios();
  return std::find(rs.begin(), rs.end(), ratio) != rs.end();
}

void SyntheticSpec::Validate() const {
  if (total_cells == 0)
    throw std::invalid_argument("SyntheticSpec: total_cells == 0");
  if (target_load <= 0 || target_load > 1)
    throw std::invalid_argument("SyntheticSpec: target_load outside (0,1]");
  if (!RatioSupported(ratio))
    throw std::invalid_argument("SyntheticSpec: unsupported A/S ratio " +
                                std::to_string(ratio));
  if (mean_queries <= 0)
    throw std::invalid_argument("SyntheticSpec: mean_queries <= 0");
  if (skew < 0) throw std::invalid_argument("SyntheticSpec: negative skew");
}

namespace {
Element KeyBytes(uint64_t v) {
  return Element(reinterpret_cast<const char*>(&v), sizeof(v));
}
}  // namespace

SyntheticWorkload GenSynthetic(const SyntheticSpec& spec) {
  spec.Validate();
  Rng rng(DeriveSeed(spec.seed, kSeedWorkload));

  size_t stored = (size_t)std::llround(spec.target_load * spec.total_cells);
  size_t negatives = (size_t)spec.ratio * stored;
  if (negatives > std::numeric_limits<uint32_t>::max())
    throw std::invalid_argument("GenSynthetic: negative pool too large");

  // Distinct 8-byte keys; S first, then A disjoint from it.
  std::unordered_set<uint64_t> used;
  used.reserve(stored + negatives);
  auto fresh_key = [&]() {
    for (;;) {
      uint64_t v = rng();
      if (used.insert(v).second) return v;
    }
  };

  SyntheticWorkload wl;
  wl.members.reserve(stored);
  for (size_t i = 0; i < stored; ++i) wl.members.push_back(KeyBytes(fresh_key()));

  wl.negatives = negatives;
  wl.stream.keys.reserve(negatives);
  for (size_t i = 0; i < negatives; ++i)
    wl.stream.keys.push_back(KeyBytes(fresh_key()));
  wl.stream.is_member.assign(negatives, 0);

  double want = spec.mean_queries * (double)negatives;
  uint64_t n = (uint64_t)std::llround(want);
  if (spec.max_queries > 0 && n > spec.max_queries) n = spec.max_queries;
  if (n == 0) n = 1;
  wl.effective_mean_queries = (double)n / (double)negatives;

  ZipfSampler zipf(negatives, spec.skew);
  wl.stream.order.reserve(n);
  for (uint64_t i = 0; i < n; ++i)
    wl.stream.order.push_back((uint32_t)zipf.Sample(rng));
  return wl;
}

Trace ParseTrace(std::istream& in, const std::string& name) {
  Trace trace;
  std::unordered_map<Element, uint32_t> index;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line.size() > kMaxElementBytes)
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": key exceeds 255 bytes");
    auto [it, fresh] = index.try_emplace(line, (uint32_t)trace.flows.size());
    if (fresh) {
      if (trace.flows.size() >= std::numeric_limits<uint32_t>::max())
        throw std::runtime_error(name + ": too many distinct flows");
      trace.flows.push_back(line);
    }
    trace.packets.push_back(it->second);
  }
  if (in.bad()) throw std::runtime_error(name + ": read error");
  if (trace.packets.empty())
    throw std::runtime_error(name + ": trace contains no keys");
  return trace;
}

Trace LoadTrace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open trace file");
  return ParseTrace(in, path);
}

namespace {
// Smallest power-of-two bucket count whose load falls inside the window;
// load decreases as buckets double, so only the first candidate at or below
// target_load can qualify.
bool FeasibleSplit(size_t stored, int d, int c, double target_load,
                   TraceSplit* out) {
  if (stored == 0) return false;
  for (uint32_t k = 0; k <= 30; ++k) {
    size_t m = (size_t)d * c * (1ull << k);
    double load = (double)stored / (double)m;
    if (load > target_load) continue;
    if (load < target_load - 0.05) return false;
    if (out) *out = {stored, m, (uint32_t)(1u << k), load};
    return true;
  }
  return false;
}
}  // namespace

TraceSplit SplitTrace(size_t total_flows, int ratio, int d, int c,
                      double target_load) {
  if (!RatioSupported(ratio))
    throw std::invalid_argument("SplitTrace: unsupported A/S ratio " +
                                std::to_string(ratio));
  if (total_flows == 0) throw std::invalid_argument("SplitTrace: no flows");

  size_t stored = (size_t)std::llround((double)total_flows / (1.0 + ratio));
  TraceSplit split;
  if (FeasibleSplit(stored, d, c, target_load, &split)) return split;

  int best = -1;
  for (int r : SupportedRatios()) {
    size_t s = (size_t)std::llround((double)total_flows / (1.0 + r));
    if (!FeasibleSplit(s, d, c, target_load, nullptr)) continue;
    if (best < 0 || std::abs(r - ratio) < std::abs(best - ratio)) best = r;
  }
  std::string msg =
      "SplitTrace: ratio " + std::to_string(ratio) + " gives |S|=" +
      std::to_string(stored) + ", outside the [" +
      std::to_string(target_load - 0.05) + ", " + std::to_string(target_load) +
      "] load window for power-of-two tables";
  msg += best >= 0 ? "; nearest feasible ratio is " + std::to_string(best)
                   : "; no supported ratio is feasible";
  throw SizingError(msg, best);
}

QueryStream MakeTraceStream(const Trace& trace, size_t stored) {
  if (stored > trace.flows.size())
    throw std::invalid_argument("MakeTraceStream: stored exceeds flow count");
  QueryStream qs;
  qs.keys = trace.flows;
  qs.is_member.assign(trace.flows.size(), 0);
  for (size_t i = 0; i < stored; ++i) qs.is_member[i] = 1;
  qs.order = trace.packets;
  return qs;
}

uint64_t GenTrace(const TraceGenSpec& spec, std::ostream& out) {
  if (spec.flows == 0) throw std::invalid_argument("GenTrace: no flows");
  if (spec.packets < spec.flows)
    throw std::invalid_argument("GenTrace: need at least one packet per flow");
  if (spec.skew < 0) throw std::invalid_argument("GenTrace: negative skew");

  // Flow keys: short distinct tokens; rank order equals key order, so low
  // indices are the heavy hitters.
  std::vector<Element> keys;
  keys.reserve(spec.flows);
  char buf[24];
  for (uint64_t i = 0; i < spec.flows; ++i) {
    std::snprintf(buf, sizeof(buf), "f%010llx", (unsigned long long)i);
    keys.emplace_back(buf);
  }

  out << "# surrogate flow trace\n";
  out << "# flows=" << spec.flows << " packets=" << spec.packets
      << " skew=" << spec.skew << " seed=" << spec.seed << "\n";

  Rng rng(DeriveSeed(spec.seed, kSeedWorkload));
  ZipfSampler zipf(spec.flows, spec.skew);
  std::vector<uint8_t> seen(spec.flows, 0);
  uint64_t written = 0;
  for (uint64_t i = 0; i < spec.packets; ++i) {
    size_t f = zipf.Sample(rng);
    seen[f] = 1;
    out << keys[f] << '\n';
    ++written;
  }
  // Every flow must exist in the file; tail flows that never came up get one
  // packet each at the end.
  for (uint64_t f = 0; f < spec.flows; ++f) {
    if (!seen[f]) {
      out << keys[f] << '\n';
      ++written;
    }
  }
  if (!out) throw std::runtime_error("GenTrace: write error");
  return written;
}

uint64_t GenTraceFile(const TraceGenSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  uint64_t n = GenTrace(spec, out);
  out.flush();
  if (!out) throw std::runtime_error(path + ": write error");
  return n;
}

}  // namespace acf::workload
