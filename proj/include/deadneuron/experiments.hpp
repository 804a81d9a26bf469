#pragma once

#include "deadneuron/core.hpp"
#include "deadneuron/network.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace deadneuron {

// Two-sided 99% normal quantile; every report interval below is a Wilson
// score interval at this level.
inline constexpr double kWilsonZ99 = 2.5758293035489004;

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
};

WilsonInterval wilson_interval(long long hits, long long samples, double z = kWilsonZ99);

// One Monte Carlo cell: the estimated probability that the first neuron of
// the second layer is stably unactivated for architecture (n0, n1, 1).
// Draws whose verdict is marginal at float precision, or whose first layer
// fails the genericity check, are replaced and counted, never scored.
struct EstimateReport {
  int n0 = 0;
  int n1 = 0;
  std::string mode = "exact";  // "exact" decision or sampling "detector"
  long long samples = 0;
  long long hits = 0;
  long long all_negative_hits = 0;  // trivially stable draws: output row all negative
  long long marginal_discards = 0;
  long long degenerate_discards = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::optional<double> theory;  // closed-form value where one exists
  std::uint64_t seed = 0;
};

// Conditional stable-and-not-all-negative frequency per bounded-region
// configuration, for architectures with n1 = n0 + 1.
struct DeltaEntry {
  ConfigurationIndex index = 0;
  long long conditional_samples = 0;
  long long conditional_hits = 0;
  double delta_hat = 0.0;
};

struct DeltaReport {
  int n0 = 0;
  int n1 = 0;
  long long samples = 0;  // kept draws; equals the sum of conditional_samples
  long long marginal_discards = 0;
  long long degenerate_discards = 0;
  double delta_sum = 0.0;  // sum of delta_hat over every configuration
  std::vector<DeltaEntry> entries;  // one per configuration index, in order
  std::uint64_t seed = 0;
};

// Paired-configuration identity: the drop in conditional probability from
// the single-negative configuration at `axis` to its negated twin equals
// half the conditional frequency of the dominating-ratio class at that axis.
struct AxisRelationEntry {
  int axis = 0;  // 1-based, matching the single-negative configuration index
  long long samples_low = 0;   // kept draws in configuration `axis`
  long long samples_high = 0;  // kept draws in configuration `axis + n0 + 1`
  double delta_low = 0.0;
  double delta_high = 0.0;
  double lhs = 0.0;    // delta_low - delta_high
  double rhs = 0.0;    // half the conditional dominating-class frequency
  double sigma = 0.0;  // combined standard error of lhs - rhs
};

struct C0RelationReport {
  int n0 = 0;
  int n1 = 0;
  long long samples = 0;     // kept draws over all configurations
  long long c0_samples = 0;  // kept draws in the all-positive configuration
  double delta0_hat = 0.0;   // conditional hit frequency there
  double h1_freq = 0.0;      // conditional frequency of ratio tuples all <= 1
  double lhs = 0.0;          // delta0_hat
  double rhs = 0.0;          // h1_freq / 2
  double sigma = 0.0;        // combined standard error of lhs - rhs
  std::vector<AxisRelationEntry> axis_relations;  // axes 1 .. n0+1
  long long marginal_discards = 0;
  long long degenerate_discards = 0;
  long long undefined_discards = 0;  // output row without an intercept tuple
  std::uint64_t seed = 0;
};

// Region, facet, and boundedness statistics per hyperplane count, with a
// brute-force cross-check on instances small enough to enumerate.
struct FacetRow {
  long long m = 0;
  long long regions = 0;
  long long bounded = 0;
  long long total_facets = 0;
  double avg_facets = 0.0;     // 2 * total_facets / regions
  double bounded_ratio = 0.0;  // bounded / unbounded
  std::optional<long long> empirical_total_facets;      // enumerated, small m only
  std::optional<double> max_negative_facets_mean;       // maximally negative regions
  std::optional<double> axis_intersection_bound;        // that mean plus one
};

struct FacetReport {
  long long n0 = 0;
  std::vector<FacetRow> rows;
};

// Exact stable-neuron probability for architecture (n0, n1, ...): 1/2^{n1+1}
// when n1 <= n0, (2^{n0}+1)/4^{n0+1} when n1 = n0+1. Wider layers have no
// known closed form and raise OutOfTheoremRangeError.
Rational theorem_probability(int n0, int n1);

// Dashed reference level for sweep charts: 1/4^{n0+1}.
double sweep_reference(int n0);

EstimateReport estimate_prob_stable(int n0, int n1, const Distribution& dist, long long samples,
                                    std::uint64_t seed, int threads = 1);

DeltaReport estimate_deltas(int n0, const Distribution& dist, long long samples,
                            std::uint64_t seed, int threads = 1);

C0RelationReport check_c0_relation(int n0, const Distribution& dist, long long samples,
                                   std::uint64_t seed, int threads = 1);

// One EstimateReport per n1 in [n1_lo, n1_hi]. Cells at or below the
// enumeration cap use the exact decision; wider cells fall back to the
// sampling detector and say so in `mode`.
std::vector<EstimateReport> conjecture_sweep(int n0, int n1_lo, int n1_hi,
                                             const Distribution& dist,
                                             long long samples_per_cell, std::uint64_t seed,
                                             int threads = 1);

FacetReport facet_report(long long n0, const std::vector<long long>& ms,
                         std::uint64_t seed = 0x86f7e437faa5a7fcull);

// Whether lambda * e_axis (lambda > 0, axis 0-based) is a value of the first
// layer map: some input has pre-activation lambda at `axis` and nonpositive
// pre-activation everywhere else.
bool half_axis_point_attained(const NetworkParams& params, Index axis, double lambda);

}  // namespace deadneuron
