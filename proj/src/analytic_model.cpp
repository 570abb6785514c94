#include "acf/analytic_model.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace acf::model {

namespace {

double PoissonPmf(double lambda, double k) {
  if (lambda <= 0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

// Poisson(lambda) pmf over a support that carries all but < eps of the mass
// (lower and upper tails each below eps). Computed outward from the mode so
// large lambdas stay stable.
struct PoissonRange {
  long lo = 0;
  std::vector<double> pmf;

  PoissonRange(double lambda, double eps) {
    if (lambda <= 0) {
      lo = 0;
      pmf = {1.0};
      return;
    }
    long mode = (long)lambda;
    double pm = PoissonPmf(lambda, (double)mode);
    // Walk down from the mode until the remaining lower mass is below eps.
    std::vector<double> down;
    double p = pm;
    long k = mode;
    while (k > 0 && p > eps * 1e-3) {
      p *= (double)k / lambda;  // pmf(k-1) = pmf(k) * k / lambda
      --k;
      down.push_back(p);
    }
    lo = k;
    pmf.assign(down.rbegin(), down.rend());
    pmf.push_back(pm);
    p = pm;
    k = mode;
    while (p > eps * 1e-3 || k < mode + 2) {
      p *= lambda / (double)(k + 1);  // pmf(k+1)
      ++k;
      pmf.push_back(p);
    }
  }
};

// Smallest Z_max with upper-tail mass P[Poisson(mu) > Z_max] < eps.
long PoissonTailCutoff(double mu, double eps) {
  if (mu <= 0) return 0;
  double cum = 0.0;
  double p = std::exp(-mu);
  long k = 0;
  for (;;) {
    cum += p;
    if (1.0 - cum < eps) return k;
    ++k;
    p *= mu / (double)k;
    if (k > 10'000'000) throw std::runtime_error("Poisson cutoff diverged");
  }
}

// Adaptive Simpson on [a, b] for a smooth integrand.
template <typename F>
double SimpsonRec(const F& f, double a, double b, double fa, double fm,
                  double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return SimpsonRec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         SimpsonRec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double Integrate(const F& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return SimpsonRec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// The unresolvable-cycle term of the single-cell bucket: all 2^s collision
// counts positive, rate 2^s / (sum_i zeta/Z_i). Summing the truncated
// Z-vectors directly costs Z_max^(2^s); instead use
//   1/A = integral_0^inf exp(-A t) dt
// which turns the sum into 2^s * integral_0^inf g(t)^(2^s) dt with
//   g(t) = sum_{z=1..Z_max} Poisson(mu, z) e^(-t zeta / z),
// exactly equal to the truncated sum, evaluated in O(Z_max * quad points).
double CycleTerm(double zeta, double mu, int k_funcs, double tail_eps) {
  long zmax = PoissonTailCutoff(mu, tail_eps);
  if (zmax < 1) return 0.0;
  std::vector<double> pmf(zmax + 1);
  for (long z = 1; z <= zmax; ++z) pmf[z] = PoissonPmf(mu, (double)z);
  auto g = [&](double t) {
    double acc = 0.0;
    for (long z = 1; z <= zmax; ++z) acc += pmf[z] * std::exp(-t * zeta / z);
    return acc;
  };
  auto integrand = [&](double t) {
    double v = g(t);
    double acc = 1.0;
    for (int i = 0; i < k_funcs; ++i) acc *= v;
    return acc;
  };
  // g(t) <= (1 - e^-mu) e^(-t zeta / zmax): past T the integrand is below
  // ~1e-16 of its peak.
  double upper = (double)zmax / ((double)k_funcs * zeta) * 40.0 +
                 (double)zmax / zeta;
  double scale = integrand(0.0);
  if (scale <= 0) return 0.0;
  double val = Integrate(integrand, 0.0, upper, scale * 1e-12);
  return (double)k_funcs * val;
}

}  // namespace

double PStop(int k, double zeta, int a_prime) {
  if (k < 0) throw std::invalid_argument("PStop: k must be >= 0");
  if (zeta < 0) throw std::invalid_argument("PStop: zeta must be >= 0");
  if (a_prime < 1) throw std::invalid_argument("PStop: a_prime must be >= 1");
  double mu = zeta * std::pow(2.0, -a_prime);
  return std::pow(-std::expm1(-mu), k) * std::exp(-mu);
}

double BucketFprSingle(double zeta, int a_prime, int s, double n,
                       double tail_eps) {
  if (zeta < 0) throw std::invalid_argument("BucketFprSingle: zeta < 0");
  if (a_prime < 1) throw std::invalid_argument("BucketFprSingle: a_prime < 1");
  if (s < 0 || s > 8) throw std::invalid_argument("BucketFprSingle: bad s");
  if (n < 1) throw std::invalid_argument("BucketFprSingle: n < 1");
  if (tail_eps <= 0 || tail_eps >= 1)
    throw std::invalid_argument("BucketFprSingle: bad tail_eps");
  if (zeta == 0) return 0.0;

  double mu = zeta * std::pow(2.0, -a_prime);
  int k_funcs = 1 << s;
  double stop = -std::expm1(-mu);  // 1 - e^-mu
  double no_match = std::exp(-mu);

  // Keys resolved after i = 1..2^s - 1 false positives each contribute i
  // hits within the n queries.
  double term1 = 0.0;
  double pow_stop = 1.0;
  for (int i = 1; i < k_funcs; ++i) {
    pow_stop *= stop;
    term1 += pow_stop * no_match * ((double)i / n);
  }
  return term1 + CycleTerm(zeta, mu, k_funcs, tail_eps);
}

void TableModelParams::Validate() const {
  if (buckets == 0) throw std::invalid_argument("TableModelParams: no buckets");
  if (d < 1) throw std::invalid_argument("TableModelParams: d < 1");
  if (load < 0 || load > 1)
    throw std::invalid_argument("TableModelParams: load outside [0,1]");
  if (negatives < 0)
    throw std::invalid_argument("TableModelParams: negatives < 0");
  if (total_queries < 0)
    throw std::invalid_argument("TableModelParams: total_queries < 0");
}

double TableFprSingle(const TableModelParams& tp, int a_prime, int s,
                      double tail_eps) {
  tp.Validate();
  // No colliding negatives, or no queries: nothing can false-positive.
  if (tp.negatives == 0 || tp.total_queries == 0) return 0.0;
  double e_b = tp.negatives / (double)tp.buckets;
  double n_e = tp.total_queries / tp.negatives;
  double inv_2a = std::pow(2.0, -a_prime);
  int k_funcs = 1 << s;

  PoissonRange zr(e_b, tail_eps);
  double acc = 0.0;
  for (size_t zi = 0; zi < zr.pmf.size(); ++zi) {
    double zeta = (double)(zr.lo + (long)zi);
    if (zeta < 1) continue;
    double pz = zr.pmf[zi];
    if (pz <= 0) continue;

    double mu = zeta * inv_2a;
    double stop = -std::expm1(-mu);
    double no_match = std::exp(-mu);
    // F(zeta, j) = k1/j + k2: split off the 1/j part so the bucket constants
    // are computed once per zeta.
    double k1 = 0.0, pow_stop = 1.0;
    for (int i = 1; i < k_funcs; ++i) {
      pow_stop *= stop;
      k1 += pow_stop * no_match * (double)i;
    }
    double k2 = CycleTerm(zeta, mu, k_funcs, tail_eps);

    // Queries hitting this bucket: j ~ Poisson(zeta * n_e); each bucket's
    // rate F(zeta, j) weighted by j/N.
    PoissonRange jr(zeta * n_e, tail_eps);
    double inner = 0.0;
    for (size_t ji = 0; ji < jr.pmf.size(); ++ji) {
      double j = (double)(jr.lo + (long)ji);
      if (j < 1) continue;
      inner += jr.pmf[ji] * (k1 / j + k2) * (j / tp.total_queries);
    }
    acc += pz * inner;
  }
  return (double)tp.buckets * tp.d * tp.load * acc;
}

ZVector SampleZVector(uint64_t zeta, int bits, int occupancy, Rng& rng) {
  if (occupancy < 0 || occupancy > 4)
    throw std::invalid_argument("SampleZVector: occupancy outside 0..4");
  if (bits < 1) throw std::invalid_argument("SampleZVector: bits < 1");
  ZVector zv;
  double mu = (double)zeta * std::pow(2.0, -bits);
  for (int e = 0; e < occupancy; ++e)
    for (int p = 0; p < 4; ++p) zv.z[e][p] = (int)SamplePoisson(rng, mu);
  return zv;
}

double BucketFprMulti(const ZVector& zv, uint64_t zeta, uint64_t n, Rng& rng,
                      int reps) {
  if (zeta == 0 || n == 0) return 0.0;
  if (reps < 1) throw std::invalid_argument("BucketFprMulti: reps < 1");
  double total_rate = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    int perm[4] = {0, 1, 2, 3};
    uint64_t left = n;
    uint64_t fps = 0;
    for (;;) {
      long hit_sum = 0;
      for (int p = 0; p < 4; ++p) hit_sum += zv.z[perm[p]][p];
      if (hit_sum == 0) break;  // absorbing ordering: no key still matches
      double q = std::min(1.0, (double)hit_sum / (double)zeta);
      uint64_t steps = GeometricTrials(rng, q, left);
      if (steps > left) break;
      left -= steps;
      ++fps;
      // Which position fired, proportional to its collision count.
      long roll = (long)UniformBelow(rng, (uint64_t)hit_sum);
      int pos = 0;
      for (; pos < 4; ++pos) {
        roll -= zv.z[perm[pos]][pos];
        if (roll < 0) break;
      }
      int other = (int)UniformBelow(rng, 3);
      if (other >= pos) ++other;
      std::swap(perm[pos], perm[other]);
      if (left == 0) break;
    }
    total_rate += (double)fps / (double)n;
  }
  return total_rate / reps;
}

Estimate TableFprMulti(const TableModelParams& tp, int bits, uint64_t samples,
                       Rng& rng) {
  tp.Validate();
  if (samples == 0) throw std::invalid_argument("TableFprMulti: no samples");
  if (tp.negatives == 0 || tp.total_queries == 0) return {0.0, 0.0};
  double e_b = tp.negatives / (double)tp.buckets;
  double n_e = tp.total_queries / tp.negatives;

  double sum = 0.0, sum_sq = 0.0;
  for (uint64_t i = 0; i < samples; ++i) {
    double w = 0.0;
    uint64_t zeta = SamplePoisson(rng, e_b);
    if (zeta > 0) {
      int occ = SampleBinomialSmall(rng, 4, tp.load);
      if (occ > 0) {
        ZVector zv = SampleZVector(zeta, bits, occ, rng);
        uint64_t j = SamplePoisson(rng, (double)zeta * n_e);
        if (j > 0) {
          double rate = BucketFprMulti(zv, zeta, j, rng, 1);
          w = rate * (double)j / tp.total_queries;
        }
      }
    }
    sum += w;
    sum_sq += w * w;
  }
  double scale = (double)tp.buckets * tp.d;
  double mean = sum / (double)samples;
  double var = std::max(0.0, sum_sq / (double)samples - mean * mean);
  return {scale * mean,
          scale * std::sqrt(var / (double)std::max<uint64_t>(samples - 1, 1))};
}

double ExpectedCost(const CostParams& cp) {
  for (double v : {cp.p_lookup, cp.p_insert, cp.p_delete, cp.q_member, cp.q_fp})
    if (v < 0 || v > 1)
      throw std::invalid_argument("ExpectedCost: probability outside [0,1]");
  if (std::fabs(cp.p_lookup + cp.p_insert + cp.p_delete - 1.0) > 1e-9)
    throw std::invalid_argument("ExpectedCost: operation mix must sum to 1");
  double slow = (cp.q_member + (1.0 - cp.q_member) * cp.q_fp) * cp.cost_positive;
  double fast = (1.0 - cp.q_member) * (1.0 - cp.q_fp) * cp.cost_negative;
  return cp.p_lookup * (slow + fast) + cp.p_insert * cp.cost_insert +
         cp.p_delete * cp.cost_delete;
}

}  // namespace acf::model
