#include "deadneuron/experiments.hpp"

#include "deadneuron/arrangement.hpp"
#include "deadneuron/intercepts.hpp"
#include "deadneuron/rng.hpp"
#include "deadneuron/simplex.hpp"
#include "deadneuron/stability.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace deadneuron {

namespace {

// Draws that cannot be scored (non-generic first layer, verdict within float
// tolerance of zero, undefined intercepts) are replaced by the next attempt
// substream of the same sample index, so every kept draw is i.i.d. and the
// report always contains exactly `samples` scored draws.
constexpr int kMaxResamples = 100;

// Splits sample indices into contiguous blocks, one worker per block, and
// sums the per-worker tallies. Tallies hold integer counters only, so the
// merged result is identical for every worker count.
template <class Tally, class Attempt>
Tally run_tallied(long long samples, int threads, Tally proto, const Attempt& attempt) {
  auto run_block = [&attempt](long long lo, long long hi, Tally& tally) {
    for (long long s = lo; s < hi; ++s) {
      int a = 0;
      for (; a <= kMaxResamples; ++a)
        if (attempt(s, a, tally)) break;
      if (a > kMaxResamples)
        throw NotGenericError("estimate: resample budget exhausted for one sample");
    }
  };

  const int workers =
      static_cast<int>(std::max<long long>(1, std::min<long long>(threads, samples)));
  if (workers == 1) {
    Tally tally = proto;
    run_block(0, samples, tally);
    return tally;
  }

  std::vector<Tally> tallies(static_cast<size_t>(workers), proto);
  std::vector<std::exception_ptr> failures(static_cast<size_t>(workers));
  std::vector<std::thread> pool;
  const long long chunk = (samples + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const long long lo = static_cast<long long>(w) * chunk;
    const long long hi = std::min(samples, lo + chunk);
    pool.emplace_back([&, w, lo, hi] {
      try {
        run_block(lo, hi, tallies[static_cast<size_t>(w)]);
      } catch (...) {
        failures[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  Tally merged = proto;
  for (const Tally& tally : tallies) merged.merge(tally);
  return merged;
}

struct StableTally {
  long long hits = 0;
  long long allneg = 0;
  long long marginal = 0;
  long long degenerate = 0;

  void merge(const StableTally& o) {
    hits += o.hits;
    allneg += o.allneg;
    marginal += o.marginal;
    degenerate += o.degenerate;
  }
};

Architecture shallow_arch(int n0, int n1) {
  Architecture arch;
  arch.sizes = {n0, n1, 1};
  return arch;
}

double frequency(long long hits, long long samples) {
  return samples > 0 ? static_cast<double>(hits) / static_cast<double>(samples) : 0.0;
}

// Binomial standard error of a conditional frequency.
double freq_stderr(double p, long long n) {
  return n > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
}

EstimateReport finish_report(int n0, int n1, std::string mode, long long samples,
                             const StableTally& tally, std::uint64_t seed) {
  EstimateReport rep;
  rep.n0 = n0;
  rep.n1 = n1;
  rep.mode = std::move(mode);
  rep.samples = samples;
  rep.hits = tally.hits;
  rep.all_negative_hits = tally.allneg;
  rep.marginal_discards = tally.marginal;
  rep.degenerate_discards = tally.degenerate;
  rep.p_hat = frequency(tally.hits, samples);
  const WilsonInterval ci = wilson_interval(tally.hits, samples);
  rep.ci_low = ci.low;
  rep.ci_high = ci.high;
  if (n1 <= n0 + 1) rep.theory = theorem_probability(n0, n1).value();
  rep.seed = seed;
  return rep;
}

// Sampling-detector counterpart of estimate_prob_stable, for widths past the
// enumeration cap. No verdict can be marginal or degenerate here: the
// detector scores every draw.
EstimateReport detector_cell(int n0, int n1, const Distribution& dist, long long samples,
                             std::uint64_t seed, int threads) {
  const Architecture arch = shallow_arch(n0, n1);
  const Rng root(seed);
  const DetectorConfig cfg;
  auto attempt = [&arch, &dist, &cfg, root](long long s, int, StableTally& t) {
    Rng sub = root.fork(static_cast<std::uint64_t>(s));
    const NetworkParams params = sample_params(arch, dist, sub.next_u64());
    if (detector_paper_style(params, NeuronRef{}, cfg, sub.next_u64())) ++t.hits;
    if (all_negative_test(params, NeuronRef{})) ++t.allneg;
    return true;
  };
  const StableTally tally = run_tallied(samples, threads, StableTally{}, attempt);
  return finish_report(n0, n1, "detector", samples, tally, seed);
}

CoorientedArrangement<double> random_generic_arrangement(Index m, Index n, Rng& stream) {
  for (int a = 0; a < kMaxResamples; ++a) {
    CoorientedArrangement<double> arr;
    arr.dim = n;
    for (Index i = 0; i < m; ++i) {
      Hyperplane<double> h;
      h.normal.resize(n);
      for (Index j = 0; j < n; ++j) h.normal(j) = stream.uniform_symmetric(1.0);
      h.offset = stream.uniform_symmetric(1.0);
      arr.hyperplanes.push_back(std::move(h));
    }
    if (is_generic(arr)) return arr;
  }
  throw NotGenericError("facet_report: could not draw a generic arrangement");
}

}  // namespace

WilsonInterval wilson_interval(long long hits, long long samples, double z) {
  if (samples < 1) throw UsageError("wilson_interval: need at least one sample");
  if (hits < 0 || hits > samples) throw UsageError("wilson_interval: hits out of range");
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / n;
  const double zz = z * z;
  const double denom = 1.0 + zz / n;
  const double center = (p + zz / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + zz / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

Rational theorem_probability(int n0, int n1) {
  if (n0 < 1 || n1 < 1) throw UsageError("theorem_probability: layer sizes must be positive");
  if (n1 > n0 + 1)
    throw OutOfTheoremRangeError("theorem_probability: no closed form when n1 > n0 + 1");
  if (n1 <= n0) {
    if (n1 + 1 >= 63) throw OverflowError("theorem_probability: denominator overflow");
    return Rational(1, 1LL << (n1 + 1));
  }
  if (2 * n0 + 2 >= 63) throw OverflowError("theorem_probability: denominator overflow");
  return Rational((1LL << n0) + 1, 1LL << (2 * n0 + 2));
}

double sweep_reference(int n0) {
  if (n0 < 1) throw UsageError("sweep_reference: n0 must be positive");
  return std::ldexp(1.0, -2 * (n0 + 1));
}

EstimateReport estimate_prob_stable(int n0, int n1, const Distribution& dist, long long samples,
                                    std::uint64_t seed, int threads) {
  if (n0 < 1 || n1 < 1) throw UsageError("estimate_prob_stable: layer sizes must be positive");
  if (samples < 1) throw UsageError("estimate_prob_stable: need at least one sample");
  if (n1 > kArrangementCap)
    throw SizeLimitError("estimate_prob_stable: width beyond the enumeration cap");
  const Architecture arch = shallow_arch(n0, n1);
  const Rng root(seed);
  auto attempt = [&arch, &dist, root](long long s, int a, StableTally& t) {
    const std::uint64_t draw =
        root.fork(static_cast<std::uint64_t>(s)).fork(static_cast<std::uint64_t>(a)).next_u64();
    const NetworkParams params = sample_params(arch, dist, draw);
    StabilityOutcome outcome;
    try {
      outcome = decide_stability_fast(params, NeuronRef{});
    } catch (const NotGenericError&) {
      ++t.degenerate;
      return false;
    }
    if (outcome == StabilityOutcome::Marginal) {
      ++t.marginal;
      return false;
    }
    if (outcome == StabilityOutcome::Stable) ++t.hits;
    if (all_negative_test(params, NeuronRef{})) ++t.allneg;
    return true;
  };
  const StableTally tally = run_tallied(samples, threads, StableTally{}, attempt);
  return finish_report(n0, n1, "exact", samples, tally, seed);
}

namespace {

struct DeltaTally {
  std::vector<long long> cfg_samples;
  std::vector<long long> cfg_hits;
  long long marginal = 0;
  long long degenerate = 0;

  explicit DeltaTally(size_t configs) : cfg_samples(configs, 0), cfg_hits(configs, 0) {}

  void merge(const DeltaTally& o) {
    for (size_t i = 0; i < cfg_samples.size(); ++i) {
      cfg_samples[i] += o.cfg_samples[i];
      cfg_hits[i] += o.cfg_hits[i];
    }
    marginal += o.marginal;
    degenerate += o.degenerate;
  }
};

}  // namespace

DeltaReport estimate_deltas(int n0, const Distribution& dist, long long samples,
                            std::uint64_t seed, int threads) {
  if (n0 < 1) throw UsageError("estimate_deltas: n0 must be positive");
  if (samples < 1) throw UsageError("estimate_deltas: need at least one sample");
  const int n1 = n0 + 1;
  if (n1 > kArrangementCap) throw SizeLimitError("estimate_deltas: width beyond the enumeration cap");
  const size_t configs = size_t{1} << n1;
  const Architecture arch = shallow_arch(n0, n1);
  const Rng root(seed);
  auto attempt = [&arch, &dist, root](long long s, int a, DeltaTally& t) {
    const std::uint64_t draw =
        root.fork(static_cast<std::uint64_t>(s)).fork(static_cast<std::uint64_t>(a)).next_u64();
    const NetworkParams params = sample_params(arch, dist, draw);
    ConfigurationIndex cfg = 0;
    StabilityOutcome outcome;
    try {
      cfg = configuration_index(params);
      outcome = decide_stability_fast(params, NeuronRef{});
    } catch (const NotGenericError&) {
      ++t.degenerate;
      return false;
    }
    if (outcome == StabilityOutcome::Marginal) {
      ++t.marginal;
      return false;
    }
    const bool hit =
        outcome == StabilityOutcome::Stable && !all_negative_test(params, NeuronRef{});
    ++t.cfg_samples[static_cast<size_t>(cfg)];
    if (hit) ++t.cfg_hits[static_cast<size_t>(cfg)];
    return true;
  };
  const DeltaTally tally = run_tallied(samples, threads, DeltaTally(configs), attempt);

  DeltaReport rep;
  rep.n0 = n0;
  rep.n1 = n1;
  rep.samples = samples;
  rep.marginal_discards = tally.marginal;
  rep.degenerate_discards = tally.degenerate;
  rep.seed = seed;
  for (size_t i = 0; i < configs; ++i) {
    DeltaEntry entry;
    entry.index = static_cast<ConfigurationIndex>(i);
    entry.conditional_samples = tally.cfg_samples[i];
    entry.conditional_hits = tally.cfg_hits[i];
    entry.delta_hat = frequency(tally.cfg_hits[i], tally.cfg_samples[i]);
    rep.delta_sum += entry.delta_hat;
    rep.entries.push_back(entry);
  }
  return rep;
}

namespace {

struct RelationTally {
  std::vector<long long> cfg_samples;
  std::vector<long long> cfg_hits;
  std::vector<long long> h1_hits;  // ratio tuple defined, all components <= 1
  std::vector<long long> s1_hits;  // dominating class matches the configuration axis
  long long marginal = 0;
  long long degenerate = 0;
  long long undefined = 0;

  RelationTally(size_t configs, size_t axes)
      : cfg_samples(configs, 0), cfg_hits(configs, 0), h1_hits(configs, 0), s1_hits(axes, 0) {}

  void merge(const RelationTally& o) {
    for (size_t i = 0; i < cfg_samples.size(); ++i) {
      cfg_samples[i] += o.cfg_samples[i];
      cfg_hits[i] += o.cfg_hits[i];
      h1_hits[i] += o.h1_hits[i];
    }
    for (size_t i = 0; i < s1_hits.size(); ++i) s1_hits[i] += o.s1_hits[i];
    marginal += o.marginal;
    degenerate += o.degenerate;
    undefined += o.undefined;
  }
};

}  // namespace

C0RelationReport check_c0_relation(int n0, const Distribution& dist, long long samples,
                                   std::uint64_t seed, int threads) {
  if (n0 < 1) throw UsageError("check_c0_relation: n0 must be positive");
  if (samples < 1) throw UsageError("check_c0_relation: need at least one sample");
  const int n1 = n0 + 1;
  if (n1 > kArrangementCap)
    throw SizeLimitError("check_c0_relation: width beyond the enumeration cap");
  const size_t configs = size_t{1} << n1;
  const size_t axes = static_cast<size_t>(n1);
  const Architecture arch = shallow_arch(n0, n1);
  const Rng root(seed);
  auto attempt = [&arch, &dist, root, n0](long long s, int a, RelationTally& t) {
    const std::uint64_t draw =
        root.fork(static_cast<std::uint64_t>(s)).fork(static_cast<std::uint64_t>(a)).next_u64();
    const NetworkParams params = sample_params(arch, dist, draw);
    ConfigurationIndex cfg = 0;
    StabilityOutcome outcome;
    InterceptTuple p;
    try {
      cfg = configuration_index(params);
      p = p_plus_intercepts(params.layers[0].W, params.layers[0].b);
      outcome = decide_stability_fast(params, NeuronRef{});
    } catch (const NotGenericError&) {
      ++t.degenerate;
      return false;
    }
    if (outcome == StabilityOutcome::Marginal) {
      ++t.marginal;
      return false;
    }
    Hyperplane<double> h;
    h.normal = params.layers[1].W.row(0).transpose();
    h.offset = params.layers[1].b(0);
    if (!intercept_tuple(h)) {
      ++t.undefined;
      return false;
    }
    const bool hit =
        outcome == StabilityOutcome::Stable && !all_negative_test(params, NeuronRef{});
    ++t.cfg_samples[static_cast<size_t>(cfg)];
    if (hit) ++t.cfg_hits[static_cast<size_t>(cfg)];
    if (const auto cls = classify(p, h)) {
      bool all_le_one = true;
      for (Index j = 0; j < cls->lambdas.size(); ++j)
        if (cls->lambdas(j) > 1.0 + kTolerance) all_le_one = false;
      if (all_le_one) {
        ++t.h1_hits[static_cast<size_t>(cfg)];
        if (cls->tag == PartitionTag::S && cfg >= 1 && cfg <= n0 + 1 &&
            cls->axis == static_cast<Index>(cfg) - 1)
          ++t.s1_hits[static_cast<size_t>(cfg - 1)];
      }
    }
    return true;
  };
  const RelationTally tally = run_tallied(samples, threads, RelationTally(configs, axes), attempt);

  C0RelationReport rep;
  rep.n0 = n0;
  rep.n1 = n1;
  rep.samples = samples;
  rep.c0_samples = tally.cfg_samples[0];
  rep.delta0_hat = frequency(tally.cfg_hits[0], tally.cfg_samples[0]);
  rep.h1_freq = frequency(tally.h1_hits[0], tally.cfg_samples[0]);
  rep.lhs = rep.delta0_hat;
  rep.rhs = rep.h1_freq / 2.0;
  const double se0 = freq_stderr(rep.delta0_hat, tally.cfg_samples[0]);
  const double seh = freq_stderr(rep.h1_freq, tally.cfg_samples[0]) / 2.0;
  rep.sigma = std::sqrt(se0 * se0 + seh * seh);
  rep.marginal_discards = tally.marginal;
  rep.degenerate_discards = tally.degenerate;
  rep.undefined_discards = tally.undefined;
  rep.seed = seed;
  for (int i = 1; i <= n0 + 1; ++i) {
    AxisRelationEntry entry;
    entry.axis = i;
    const size_t low = static_cast<size_t>(i);
    const size_t high = static_cast<size_t>(i + n0 + 1);
    entry.samples_low = tally.cfg_samples[low];
    entry.samples_high = tally.cfg_samples[high];
    entry.delta_low = frequency(tally.cfg_hits[low], tally.cfg_samples[low]);
    entry.delta_high = frequency(tally.cfg_hits[high], tally.cfg_samples[high]);
    entry.lhs = entry.delta_low - entry.delta_high;
    const double s1 = frequency(tally.s1_hits[static_cast<size_t>(i - 1)], tally.cfg_samples[low]);
    entry.rhs = s1 / 2.0;
    const double sel = freq_stderr(entry.delta_low, entry.samples_low);
    const double seh2 = freq_stderr(entry.delta_high, entry.samples_high);
    const double ses = freq_stderr(s1, entry.samples_low) / 2.0;
    entry.sigma = std::sqrt(sel * sel + seh2 * seh2 + ses * ses);
    rep.axis_relations.push_back(entry);
  }
  return rep;
}

std::vector<EstimateReport> conjecture_sweep(int n0, int n1_lo, int n1_hi,
                                             const Distribution& dist,
                                             long long samples_per_cell, std::uint64_t seed,
                                             int threads) {
  if (n0 < 1 || n1_lo < 1) throw UsageError("conjecture_sweep: layer sizes must be positive");
  if (n1_lo > n1_hi) throw UsageError("conjecture_sweep: empty width range");
  if (samples_per_cell < 1) throw UsageError("conjecture_sweep: need at least one sample");
  const Rng root(seed);
  std::vector<EstimateReport> out;
  for (int n1 = n1_lo; n1 <= n1_hi; ++n1) {
    const std::uint64_t cell_seed = root.fork(static_cast<std::uint64_t>(n1)).next_u64();
    if (n1 <= kArrangementCap)
      out.push_back(estimate_prob_stable(n0, n1, dist, samples_per_cell, cell_seed, threads));
    else
      out.push_back(detector_cell(n0, n1, dist, samples_per_cell, cell_seed, threads));
  }
  return out;
}

FacetReport facet_report(long long n0, const std::vector<long long>& ms, std::uint64_t seed) {
  if (n0 < 1) throw UsageError("facet_report: n0 must be positive");
  if (ms.empty()) throw UsageError("facet_report: need at least one hyperplane count");
  const Rng root(seed);
  FacetReport rep;
  rep.n0 = n0;
  for (long long m : ms) {
    if (m <= n0) throw UsageError("facet_report: every m must exceed n0");
    FacetRow row;
    row.m = m;
    const RegionCounts rc = region_counts(m, n0);
    row.regions = rc.total;
    row.bounded = rc.bounded;
    const FacetStats fs = facet_statistics(m, n0);
    row.total_facets = fs.total_facets;
    row.avg_facets = fs.avg_facets.value();
    row.bounded_ratio =
        static_cast<double>(rc.bounded) / static_cast<double>(rc.total - rc.bounded);

    // Empirical columns only where full enumeration stays cheap. The mean
    // facet count over maximally negative regions estimates the average
    // facet count, whose value plus one bounds the expected number of
    // coordinate axes meeting the first-layer image away from the origin.
    if (m <= 10 && n0 <= 3) {
      Rng stream = root.fork(static_cast<std::uint64_t>(m));
      const int trials = m <= 6 ? 60 : 16;
      long long empirical_total = -1;
      double maxneg_mean_sum = 0.0;
      for (int trial = 0; trial < trials; ++trial) {
        const auto arr = random_generic_arrangement(m, n0, stream);
        const auto regions = enumerate_regions(arr);
        long long twice = 0;
        int most_negative = 0;
        for (const auto& reg : regions)
          most_negative = std::max(most_negative, reg.codeword.count_negative());
        long long tie_facets = 0;
        long long ties = 0;
        for (const auto& reg : regions) {
          const int fc = region_facet_count(arr, reg.codeword);
          twice += fc;
          if (reg.codeword.count_negative() == most_negative) {
            tie_facets += fc;
            ++ties;
          }
        }
        if (empirical_total < 0) empirical_total = twice / 2;
        maxneg_mean_sum += static_cast<double>(tie_facets) / static_cast<double>(ties);
      }
      row.empirical_total_facets = empirical_total;
      row.max_negative_facets_mean = maxneg_mean_sum / trials;
      row.axis_intersection_bound = *row.max_negative_facets_mean + 1.0;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

bool half_axis_point_attained(const NetworkParams& params, Index axis, double lambda) {
  const AffineMap& l1 = params.layers.front();
  const Index m = l1.W.rows();
  if (axis < 0 || axis >= m) throw UsageError("half_axis_point_attained: axis out of range");
  if (!(lambda > 0)) throw UsageError("half_axis_point_attained: lambda must be positive");
  std::vector<Constraint<double>> cons;
  for (Index k = 0; k < m; ++k) {
    Constraint<double> c;
    c.normal = l1.W.row(k).transpose();
    if (k == axis) {
      c.offset = l1.b(k) - lambda;
      c.sense = Sense::Ge;
      cons.push_back(c);
      c.sense = Sense::Le;
      cons.push_back(c);
    } else {
      c.offset = l1.b(k);
      c.sense = Sense::Le;
      cons.push_back(c);
    }
  }
  const Vecd objective = Vecd::Zero(l1.W.cols());
  return maximize_linear<double>(objective, cons).status != LpStatus::Infeasible;
}

}  // namespace deadneuron
