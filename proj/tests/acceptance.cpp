// Acceptance harness: eight numbered criteria, one PASS/FAIL line each.
// Run with no arguments for the full battery or --criterion N for one.
// Exit status is 0 iff every executed criterion passes.
#include "deadneuron/arrangement.hpp"
#include "deadneuron/experiments.hpp"
#include "deadneuron/io.hpp"
#include "deadneuron/network.hpp"
#include "deadneuron/rng.hpp"
#include "deadneuron/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <set>
#include <string>
#include <vector>

using namespace deadneuron;

namespace {

int checks_failed = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    std::fprintf(stderr, "  check failed: %s\n", what.c_str());
    ++checks_failed;
  }
}

double binom_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

Architecture arch3(Index n0, Index n1) {
  Architecture a;
  a.sizes = {n0, n1, 1};
  return a;
}

CoorientedArrangement<double> draw_arrangement(Index m, Index n, Rng stream) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng draw = stream.fork(static_cast<std::uint64_t>(attempt));
    CoorientedArrangement<double> arr;
    arr.dim = n;
    for (Index i = 0; i < m; ++i) {
      Hyperplane<double> h;
      h.normal.resize(n);
      for (Index j = 0; j < n; ++j) h.normal(j) = draw.normal(1.0);
      h.offset = draw.normal(1.0);
      arr.hyperplanes.push_back(std::move(h));
    }
    if (is_generic(arr)) return arr;
  }
  throw NotGenericError("acceptance: no generic arrangement after 100 draws");
}

// 1. All-negative-width closed form 1/2^{n1+1} across distributions.
bool criterion1() {
  const long long n = 200000;
  const std::pair<int, int> cells[] = {{2, 1}, {2, 2}, {3, 2}, {3, 3}, {4, 4}};
  const Distribution dists[] = {Distribution::uniform_symmetric(1.0), Distribution::normal(1.0)};
  Rng root(101);
  for (size_t c = 0; c < 5; ++c) {
    for (size_t d = 0; d < 2; ++d) {
      const auto [n0, n1] = cells[c];
      const std::uint64_t seed = root.fork(c).fork(d).next_u64();
      const auto rep = estimate_prob_stable(n0, n1, dists[d], n, seed);
      const double p = std::ldexp(1.0, -(n1 + 1));
      expect(rep.theory && *rep.theory == p,
             "cell (" + std::to_string(n0) + "," + std::to_string(n1) + ") theory annotation");
      expect(std::abs(rep.p_hat - p) <= 3.0 * binom_se(p, double(n)),
             "cell (" + std::to_string(n0) + "," + std::to_string(n1) + ") dist " +
                 std::to_string(d) + " p_hat " + std::to_string(rep.p_hat) + " vs " +
                 std::to_string(p));
    }
  }
  return checks_failed == 0;
}

// 2. Critical-width closed form (2^{n0}+1)/4^{n0+1}, and distribution
// independence of the estimate.
bool criterion2() {
  const long long n = 200000;
  const double theory[] = {0.1875, 0.078125, 0.03515625, 0.0166015625};
  Rng root(202);
  for (int n0 = 1; n0 <= 4; ++n0) {
    const double p = theory[n0 - 1];
    expect(theorem_probability(n0, n0 + 1).value() == p,
           "closed form at n0=" + std::to_string(n0));
    const std::uint64_t s_u = root.fork(static_cast<std::uint64_t>(n0)).fork(0).next_u64();
    const std::uint64_t s_n = root.fork(static_cast<std::uint64_t>(n0)).fork(1).next_u64();
    const auto uni = estimate_prob_stable(n0, n0 + 1, Distribution::uniform_symmetric(1.0), n, s_u);
    const auto nor = estimate_prob_stable(n0, n0 + 1, Distribution::normal(1.0), n, s_n);
    const double se = binom_se(p, double(n));
    expect(std::abs(uni.p_hat - p) <= 3.0 * se,
           "uniform cell n0=" + std::to_string(n0) + " p_hat " + std::to_string(uni.p_hat));
    expect(std::abs(nor.p_hat - p) <= 3.0 * se,
           "normal cell n0=" + std::to_string(n0) + " p_hat " + std::to_string(nor.p_hat));
    expect(std::abs(uni.p_hat - nor.p_hat) <= 3.0 * std::sqrt(2.0) * se,
           "distribution gap at n0=" + std::to_string(n0));
  }
  return checks_failed == 0;
}

// 3. The per-configuration decomposition and the all-positive identity.
bool criterion3() {
  const long long n = 400000;
  Rng root(303);
  const auto rep = estimate_deltas(2, Distribution::uniform_symmetric(1.0), n, root.fork(0).next_u64());
  double sum = 0.0, var_sum = 0.0;
  for (const auto& e : rep.entries) {
    sum += e.delta_hat;
    var_sum += e.delta_hat * (1.0 - e.delta_hat) / double(e.conditional_samples);
  }
  expect(std::abs(sum - 0.125) <= 3.0 * std::sqrt(var_sum), "delta sum vs 1/8");

  for (size_t i = 7; i < rep.entries.size(); ++i) {
    const auto& e = rep.entries[i];
    const double sigma = binom_se(std::max(e.delta_hat, 1.0 / double(e.conditional_samples)),
                                  double(e.conditional_samples));
    expect(e.delta_hat <= 3.0 * sigma, "residual delta at index " + std::to_string(e.index));
  }

  double sum_low = 0.0, var_low = 0.0;
  for (size_t i = 1; i <= 3; ++i) {
    sum_low += rep.entries[i].delta_hat;
    var_low += rep.entries[i].delta_hat * (1.0 - rep.entries[i].delta_hat) /
               double(rep.entries[i].conditional_samples);
  }
  expect(std::abs(sum_low - 0.0625) <= 3.0 * std::sqrt(var_low), "single-negative block vs 1/16");

  const auto c0 = check_c0_relation(2, Distribution::uniform_symmetric(1.0), n,
                                    root.fork(1).next_u64());
  expect(std::abs(c0.lhs - c0.rhs) <= 3.0 * c0.sigma, "delta0 vs half the image-partition rate");
  return checks_failed == 0;
}

// 4. Exact combinatorics over random generic arrangements.
bool criterion4() {
  Rng root(404);
  for (Index dim = 1; dim <= 4; ++dim) {
    for (Index m = 1; m <= 10; ++m) {
      const RegionCounts want = region_counts(m, dim);
      for (int trial = 0; trial < 200; ++trial) {
        const auto arr = draw_arrangement(m, dim, root.fork(dim).fork(m).fork(trial));
        const auto regions = enumerate_regions(arr);
        long long bounded = 0;
        std::set<std::uint32_t> realized;
        for (const auto& r : regions) {
          if (r.bounded) ++bounded;
          realized.insert(r.codeword.mask());
        }
        if (static_cast<long long>(regions.size()) != want.total || bounded != want.bounded) {
          expect(false, "count mismatch at m=" + std::to_string(m) + " n=" + std::to_string(dim) +
                            " trial=" + std::to_string(trial));
          continue;
        }
        if (m == dim + 1) {
          const auto missing = missing_codewords(arr);
          const Codeword* simplex_code = nullptr;
          for (const auto& r : regions)
            if (r.bounded) simplex_code = &r.codeword;
          if (!simplex_code || missing.size() != 1 || !(missing[0] == simplex_code->negated())) {
            expect(false, "missing codeword is not the negated simplex code at m=" +
                              std::to_string(m) + " n=" + std::to_string(dim));
          }
        } else if (m > dim + 1) {
          for (const auto& r : regions)
            if (r.bounded && realized.count(r.codeword.negated().mask()) > 0)
              expect(false, "negated bounded code realized at m=" + std::to_string(m) +
                                " n=" + std::to_string(dim));
        }
      }
    }
  }
  return checks_failed == 0;
}

// 5. Facet statistics: formula vs brute force, and the limit shape in m.
bool criterion5() {
  Rng root(505);
  for (Index dim = 1; dim <= 3; ++dim) {
    for (Index m = dim + 1; m <= 8; ++m) {
      const FacetStats fs = facet_statistics(m, dim);
      for (int trial = 0; trial < 3; ++trial) {
        const auto arr = draw_arrangement(m, dim, root.fork(dim).fork(m).fork(trial));
        long long twice = 0;
        for (const auto& r : enumerate_regions(arr)) twice += region_facet_count(arr, r.codeword);
        expect(twice % 2 == 0, "odd facet incidence total");
        expect(twice / 2 == fs.total_facets,
               "facet total mismatch at m=" + std::to_string(m) + " n=" + std::to_string(dim));
      }
    }
  }
  expect(std::abs(facet_statistics(200, 2).avg_facets.value() - 4.0) < 0.05,
         "average facet count at m=200");
  double prev = facet_statistics(50, 2).avg_facets.value();
  for (long long m = 51; m <= 200; ++m) {
    const double avg = facet_statistics(m, 2).avg_facets.value();
    expect(avg > prev, "average facet count not increasing at m=" + std::to_string(m));
    prev = avg;
  }
  return checks_failed == 0;
}

// 6. Sweep shape: non-increasing within CIs, above the conjectured floor,
// and above the all-negative slice which tracks its closed form.
bool criterion6() {
  const long long n = 50000;
  Rng root(606);
  for (int n0 : {2, 3}) {
    const auto cells = conjecture_sweep(n0, n0 + 1, n0 + 10, Distribution::uniform_symmetric(1.0),
                                        n, root.fork(static_cast<std::uint64_t>(n0)).next_u64());
    const double floor_p = sweep_reference(n0);
    for (size_t k = 0; k < cells.size(); ++k) {
      const auto& c = cells[k];
      expect(c.mode == "exact", "cell mode at n1=" + std::to_string(c.n1));
      expect(c.p_hat >= floor_p - 3.0 * binom_se(floor_p, double(n)),
             "floor violated at n0=" + std::to_string(n0) + " n1=" + std::to_string(c.n1));
      expect(c.hits >= c.all_negative_hits, "all-negative slice exceeds the estimate");
      const double pneg = std::ldexp(1.0, -(c.n1 + 1));
      expect(std::abs(double(c.all_negative_hits) / double(n) - pneg) <=
                 3.0 * binom_se(pneg, double(n)),
             "all-negative rate at n0=" + std::to_string(n0) + " n1=" + std::to_string(c.n1));
      if (k > 0)
        expect(c.ci_low <= cells[k - 1].ci_high,
               "monotonicity break at n0=" + std::to_string(n0) + " n1=" + std::to_string(c.n1));
    }
  }
  return checks_failed == 0;
}

// 7. Detector fidelity against the exact verdict, and the sparse-sampling
// false-positive excess.
bool criterion7() {
  const long long trials = 10000;
  Rng root(707);
  long long kept = 0, agree = 0;
  long long fp_sparse = 0, fn_sparse = 0, kept_sparse = 0;
  DetectorConfig sparse;
  sparse.domain_samples = 100;
  for (long long t = 0; t < trials; ++t) {
    Rng sub = root.fork(static_cast<std::uint64_t>(t));
    const auto params = sample_params(arch3(2, 3), Distribution::uniform_symmetric(1.0),
                                      sub.next_u64());
    StabilityOutcome outcome;
    try {
      outcome = decide_stability_fast(params, NeuronRef{2, 1});
    } catch (const NotGenericError&) {
      continue;
    }
    if (outcome == StabilityOutcome::Marginal) continue;
    const bool truth = outcome == StabilityOutcome::Stable;
    const std::uint64_t det_seed = sub.next_u64();

    const bool verdict = detector_paper_style(params, NeuronRef{2, 1}, DetectorConfig{}, det_seed);
    ++kept;
    if (verdict == truth) ++agree;

    const bool sparse_verdict = detector_paper_style(params, NeuronRef{2, 1}, sparse, det_seed);
    ++kept_sparse;
    if (sparse_verdict && !truth) ++fp_sparse;
    if (!sparse_verdict && truth) ++fn_sparse;
  }
  expect(kept > 9000, "too many discarded trials");
  expect(double(agree) >= 0.99 * double(kept),
         "agreement " + std::to_string(agree) + "/" + std::to_string(kept));
  expect(fp_sparse > fn_sparse, "sparse detector fp=" + std::to_string(fp_sparse) +
                                    " fn=" + std::to_string(fn_sparse));
  return checks_failed == 0;
}

// 8. Byte-identical reports across repeated runs and worker counts.
bool criterion8() {
  const auto dist = Distribution::uniform_symmetric(1.0);

  const std::string est1 = to_csv({estimate_prob_stable(2, 3, dist, 20000, 808, 1)});
  const std::string est2 = to_csv({estimate_prob_stable(2, 3, dist, 20000, 808, 1)});
  const std::string est3 = to_csv({estimate_prob_stable(2, 3, dist, 20000, 808, 3)});
  expect(est1 == est2, "estimate repeat run bytes");
  expect(est1 == est3, "estimate thread-count bytes");

  const auto sweep1 = conjecture_sweep(2, 3, 6, dist, 5000, 809, 1);
  const auto sweep2 = conjecture_sweep(2, 3, 6, dist, 5000, 809, 2);
  expect(to_csv(sweep1) == to_csv(sweep2), "sweep csv bytes");
  expect(to_json(sweep1) == to_json(sweep2), "sweep json bytes");
  expect(sweep_svg(sweep1) == sweep_svg(sweep2), "sweep svg bytes");

  const auto d1 = estimate_deltas(2, dist, 20000, 810, 1);
  const auto d2 = estimate_deltas(2, dist, 20000, 810, 4);
  bool deltas_equal = d1.delta_sum == d2.delta_sum && d1.entries.size() == d2.entries.size();
  for (size_t i = 0; deltas_equal && i < d1.entries.size(); ++i)
    deltas_equal = d1.entries[i].conditional_samples == d2.entries[i].conditional_samples &&
                   d1.entries[i].conditional_hits == d2.entries[i].conditional_hits &&
                   d1.entries[i].delta_hat == d2.entries[i].delta_hat;
  expect(deltas_equal, "delta report fields");

  const auto c1 = check_c0_relation(2, dist, 20000, 811, 1);
  const auto c2 = check_c0_relation(2, dist, 20000, 811, 3);
  bool c0_equal = c1.lhs == c2.lhs && c1.rhs == c2.rhs && c1.sigma == c2.sigma &&
                  c1.axis_relations.size() == c2.axis_relations.size();
  for (size_t i = 0; c0_equal && i < c1.axis_relations.size(); ++i)
    c0_equal = c1.axis_relations[i].lhs == c2.axis_relations[i].lhs &&
               c1.axis_relations[i].rhs == c2.axis_relations[i].rhs;
  expect(c0_equal, "conditional identity report fields");
  return checks_failed == 0;
}

struct Criterion {
  int number;
  const char* summary;
  bool (*run)();
};

const Criterion kCriteria[] = {
    {1, "probability 1/2^(n1+1) reproduced for n1 <= n0 under two distributions", criterion1},
    {2, "probability (2^n0+1)/4^(n0+1) reproduced at n1 = n0+1, distribution-independent",
     criterion2},
    {3, "per-configuration decomposition sums and identities hold at n0 = 2", criterion3},
    {4, "region counts, bounded counts, and codeword omissions exact on random arrangements",
     criterion4},
    {5, "facet statistics match brute force and approach 2*n0", criterion5},
    {6, "width sweep is non-increasing, floored, and dominates the all-negative slice",
     criterion6},
    {7, "sampling detector agrees with the exact verdict and skews toward false positives",
     criterion7},
    {8, "reports are byte-identical across runs and thread counts", criterion8},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > 8) {
    std::fprintf(stderr, "criterion number must be in 1..8\n");
    return 2;
  }

  int failures = 0;
  for (const auto& c : kCriteria) {
    if (only != 0 && c.number != only) continue;
    checks_failed = 0;
    bool pass = false;
    try {
      pass = c.run();
    } catch (const std::exception& e) {
      std::fprintf(stderr, "  criterion %d threw: %s\n", c.number, e.what());
    }
    std::printf("criterion %d: %s - %s\n", c.number, pass ? "PASS" : "FAIL", c.summary);
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
