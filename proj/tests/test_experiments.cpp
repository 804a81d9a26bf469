#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deadneuron/arrangement.hpp"
#include "deadneuron/experiments.hpp"
#include "deadneuron/intercepts.hpp"
#include "deadneuron/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

using namespace deadneuron;

namespace {

Architecture arch3(Index n0, Index n1) {
  Architecture a;
  a.sizes = {n0, n1, 1};
  return a;
}

NetworkParams make_net(Index n0, std::initializer_list<std::initializer_list<double>> w1,
                       std::initializer_list<double> b1) {
  NetworkParams p;
  const Index n1 = static_cast<Index>(b1.size());
  p.arch = arch3(n0, n1);
  AffineMap l1;
  l1.W.resize(n1, n0);
  l1.b.resize(n1);
  Index r = 0;
  for (const auto& row : w1) {
    Index c = 0;
    for (double v : row) l1.W(r, c++) = v;
    ++r;
  }
  Index i = 0;
  for (double v : b1) l1.b(i++) = v;
  AffineMap l2;
  l2.W = Matd::Ones(1, n1);
  l2.b = Vecd::Zero(1);
  p.layers = {l1, l2};
  return p;
}

double binom_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace

TEST_CASE("wilson interval matches hand-computed values and stays clamped") {
  auto mid = wilson_interval(50, 100);
  CHECK(mid.low == doctest::Approx(0.37527962504483984).epsilon(1e-13));
  CHECK(mid.high == doctest::Approx(0.62472037495516016).epsilon(1e-13));

  auto rare = wilson_interval(78, 1000);
  CHECK(rare.low == doctest::Approx(0.058832740432399893).epsilon(1e-13));
  CHECK(rare.high == doctest::Approx(0.102730202746075471).epsilon(1e-13));

  auto none = wilson_interval(0, 100);
  CHECK(none.low == 0.0);
  CHECK(none.high > 0.0);
  CHECK(none.high == doctest::Approx(0.062220687715822971).epsilon(1e-12));

  auto all = wilson_interval(100, 100);
  CHECK(all.high == 1.0);
  CHECK(all.low < 1.0);

  // The interval always brackets the point estimate and shrinks with n.
  for (long long n : {10LL, 100LL, 1000LL, 100000LL}) {
    auto iv = wilson_interval(n / 4, n);
    CHECK(iv.low <= 0.25);
    CHECK(iv.high >= 0.25);
  }
  CHECK(wilson_interval(25, 100).high - wilson_interval(25, 100).low >
        wilson_interval(2500, 10000).high - wilson_interval(2500, 10000).low);

  CHECK_THROWS_AS(wilson_interval(1, 0), UsageError);
  CHECK_THROWS_AS(wilson_interval(-1, 10), UsageError);
  CHECK_THROWS_AS(wilson_interval(11, 10), UsageError);
}

TEST_CASE("closed-form probability covers both width regimes exactly") {
  CHECK(theorem_probability(5, 3) == Rational(1, 16));
  CHECK(theorem_probability(3, 3) == Rational(1, 16));
  CHECK(theorem_probability(1, 1) == Rational(1, 4));
  CHECK(theorem_probability(1, 2) == Rational(3, 16));
  CHECK(theorem_probability(2, 3) == Rational(5, 64));
  CHECK(theorem_probability(3, 4) == Rational(9, 256));
  CHECK(theorem_probability(4, 5) == Rational(17, 1024));
  CHECK(theorem_probability(2, 3).value() == doctest::Approx(0.078125).epsilon(1e-15));

  CHECK_THROWS_AS(theorem_probability(2, 4), OutOfTheoremRangeError);
  CHECK_THROWS_AS(theorem_probability(1, 3), OutOfTheoremRangeError);
  CHECK_THROWS_AS(theorem_probability(0, 1), UsageError);
  CHECK_THROWS_AS(theorem_probability(1, 0), UsageError);
  CHECK_THROWS_AS(theorem_probability(62, 62), OverflowError);
  CHECK_THROWS_AS(theorem_probability(31, 32), OverflowError);

  CHECK(sweep_reference(2) == 0.015625);
  CHECK(sweep_reference(3) == 0.00390625);
  CHECK(sweep_reference(1) == doctest::Approx(theorem_probability(1, 2).value() -
                                              theorem_probability(2, 2).value())
                                  .epsilon(1e-15));
  CHECK_THROWS_AS(sweep_reference(0), UsageError);
}

TEST_CASE("estimates land inside the closed-form bands") {
  struct Cell {
    int n0, n1;
    Distribution dist;
    std::uint64_t seed;
  };
  const Cell cells[] = {{2, 3, Distribution::uniform_symmetric(1.0), 1234},
                        {3, 2, Distribution::normal(1.0), 1234},
                        {1, 1, Distribution::normal(1.0), 11}};
  const long long n = 50000;
  for (const Cell& cell : cells) {
    auto rep = estimate_prob_stable(cell.n0, cell.n1, cell.dist, n, cell.seed);
    INFO("cell (", cell.n0, ",", cell.n1, ") p_hat=", rep.p_hat);
    CHECK(rep.n0 == cell.n0);
    CHECK(rep.n1 == cell.n1);
    CHECK(rep.mode == "exact");
    CHECK(rep.samples == n);
    CHECK(rep.seed == cell.seed);
    REQUIRE(rep.theory.has_value());
    const double th = theorem_probability(cell.n0, cell.n1).value();
    CHECK(*rep.theory == th);
    CHECK(std::abs(rep.p_hat - th) <= 3.0 * binom_se(th, double(n)));
    CHECK(rep.p_hat == double(rep.hits) / double(n));
    CHECK(rep.ci_low <= rep.p_hat);
    CHECK(rep.ci_high >= rep.p_hat);
    auto iv = wilson_interval(rep.hits, rep.samples);
    CHECK(rep.ci_low == iv.low);
    CHECK(rep.ci_high == iv.high);

    // Every all-negative output row is stable, and the sign pattern has
    // probability exactly 1/2^{n1+1} under any sign-symmetric draw.
    CHECK(rep.hits >= rep.all_negative_hits);
    const double pneg = std::ldexp(1.0, -(cell.n1 + 1));
    CHECK(std::abs(double(rep.all_negative_hits) / double(n) - pneg) <=
          3.0 * binom_se(pneg, double(n)));
  }
}

TEST_CASE("estimator rejects empty sampling and oversized widths") {
  const auto dist = Distribution::uniform_symmetric(1.0);
  CHECK_THROWS_AS(estimate_prob_stable(2, 3, dist, 0, 1), UsageError);
  CHECK_THROWS_AS(estimate_prob_stable(0, 3, dist, 10, 1), UsageError);
  CHECK_THROWS_AS(estimate_prob_stable(2, kArrangementCap + 1, dist, 10, 1), SizeLimitError);
  CHECK_THROWS_AS(estimate_deltas(0, dist, 10, 1), UsageError);
  CHECK_THROWS_AS(estimate_deltas(2, dist, 0, 1), UsageError);
  CHECK_THROWS_AS(check_c0_relation(2, dist, 0, 1), UsageError);
  CHECK_THROWS_AS(conjecture_sweep(2, 6, 3, dist, 10, 1), UsageError);
  CHECK_THROWS_AS(conjecture_sweep(2, 3, 4, dist, 0, 1), UsageError);
  CHECK_THROWS_AS(facet_report(0, {4}), UsageError);
  CHECK_THROWS_AS(facet_report(2, {}), UsageError);
  CHECK_THROWS_AS(facet_report(2, {2}), UsageError);
}

TEST_CASE("one-dimensional cell agrees with an independent marginalized average") {
  // Independent oracle for the (1, 2, 1) architecture: the last-layer bias is
  // integrated out in closed form. With g(x) = w1 relu(a1 x + c1) +
  // w2 relu(a2 x + c2), the neuron is stable iff b < -sup g, so conditioned
  // on the six remaining parameters the probability over b ~ U(-1,1) is
  // clamp((1 - sup g)/2, 0, 1). The supremum of a one-dimensional two-kink
  // piecewise-linear function is +inf iff a tail slope points up, else the
  // larger kink value. No region enumeration or linear programming involved.
  const long long n = 200000;
  Rng root(20260819ull);
  double acc = 0.0;
  for (long long s = 0; s < n; ++s) {
    Rng r = root.fork(static_cast<std::uint64_t>(s));
    const double a1 = r.uniform_symmetric(1.0), c1 = r.uniform_symmetric(1.0);
    const double a2 = r.uniform_symmetric(1.0), c2 = r.uniform_symmetric(1.0);
    const double w1 = r.uniform_symmetric(1.0), w2 = r.uniform_symmetric(1.0);
    const double up = (a1 > 0 ? w1 * a1 : 0.0) + (a2 > 0 ? w2 * a2 : 0.0);
    const double down = (a1 < 0 ? w1 * a1 : 0.0) + (a2 < 0 ? w2 * a2 : 0.0);
    if (up > 0.0 || down < 0.0) continue;  // sup is +inf: never stable
    const double t1 = -c1 / a1, t2 = -c2 / a2;
    auto g = [&](double x) {
      const double r1 = a1 * x + c1, r2 = a2 * x + c2;
      return w1 * (r1 > 0 ? r1 : 0.0) + w2 * (r2 > 0 ? r2 : 0.0);
    };
    const double m = std::max(g(t1), g(t2));
    acc += std::clamp((1.0 - m) / 2.0, 0.0, 1.0);
  }
  const double oracle = acc / double(n);
  CHECK(oracle == doctest::Approx(0.1875).epsilon(0.02));
  CHECK(std::abs(oracle - 0.1875) < 0.0035);

  auto rep = estimate_prob_stable(1, 2, Distribution::uniform_symmetric(1.0), 100000, 1234);
  CHECK(std::abs(rep.p_hat - 0.1875) <= 3.0 * binom_se(0.1875, 100000.0));
  CHECK(std::abs(rep.p_hat - oracle) < 0.005);
}

TEST_CASE("delta decomposition at the critical width") {
  const long long n = 400000;
  auto rep = estimate_deltas(2, Distribution::uniform_symmetric(1.0), n, 777);
  CHECK(rep.n0 == 2);
  CHECK(rep.n1 == 3);
  CHECK(rep.samples == n);
  CHECK(rep.marginal_discards == 0);
  CHECK(rep.degenerate_discards == 0);
  REQUIRE(rep.entries.size() == 8);

  long long total = 0, hits = 0;
  double sum = 0.0, var_sum = 0.0;
  for (int i = 0; i < 8; ++i) {
    const auto& e = rep.entries[static_cast<size_t>(i)];
    CHECK(e.index == i);
    CHECK(e.conditional_hits <= e.conditional_samples);
    // Draw signs are i.i.d., so the eight configurations are equally likely.
    CHECK(std::abs(double(e.conditional_samples) - double(n) / 8.0) <=
          3.0 * std::sqrt(double(n) * (1.0 / 8.0) * (7.0 / 8.0)));
    total += e.conditional_samples;
    hits += e.conditional_hits;
    sum += e.delta_hat;
    var_sum += e.delta_hat * (1.0 - e.delta_hat) / double(e.conditional_samples);
  }
  CHECK(total == n);
  CHECK(rep.delta_sum == doctest::Approx(sum).epsilon(1e-12));

  // The deltas sum to 1/2^{n1} = 1/8.
  CHECK(std::abs(rep.delta_sum - 0.125) <= 3.0 * std::sqrt(var_sum));

  // Conditional hits are impossible outside the all-positive block and the
  // two single-sign blocks; for n0 = 2 that leaves only index 7.
  CHECK(rep.entries[7].conditional_hits == 0);

  // The single-negative block alone sums to 1/2^{n0+2} = 1/16.
  double sum_low = 0.0, var_low = 0.0;
  for (int i = 1; i <= 3; ++i) {
    const auto& e = rep.entries[static_cast<size_t>(i)];
    sum_low += e.delta_hat;
    var_low += e.delta_hat * (1.0 - e.delta_hat) / double(e.conditional_samples);
  }
  CHECK(std::abs(sum_low - 0.0625) <= 3.0 * std::sqrt(var_low));

  // Unconditionally, stable-and-not-all-negative has probability 1/4^{n0+1}.
  const double eplus = double(hits) / double(n);
  CHECK(std::abs(eplus - 0.015625) <= 3.0 * binom_se(0.015625, double(n)));
}

TEST_CASE("conditional identities tie the all-positive class to the partition map") {
  const long long n = 200000;
  auto rep = check_c0_relation(2, Distribution::uniform_symmetric(1.0), n, 888);
  CHECK(rep.n0 == 2);
  CHECK(rep.n1 == 3);
  CHECK(rep.samples == n);
  CHECK(rep.undefined_discards == 0);
  CHECK(rep.lhs == rep.delta0_hat);
  CHECK(rep.rhs == doctest::Approx(rep.h1_freq / 2.0).epsilon(1e-12));
  CHECK(std::abs(rep.lhs - rep.rhs) <= 3.0 * rep.sigma);

  REQUIRE(rep.axis_relations.size() == 3);
  double diff_sum = 0.0, diff_var = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto& e = rep.axis_relations[static_cast<size_t>(i)];
    CHECK(e.axis == i + 1);
    CHECK(e.lhs == doctest::Approx(e.delta_low - e.delta_high).epsilon(1e-12));
    INFO("axis ", e.axis, " lhs=", e.lhs, " rhs=", e.rhs, " sigma=", e.sigma);
    CHECK(std::abs(e.lhs - e.rhs) <= 3.0 * e.sigma);
    diff_sum += e.lhs;
    diff_var += e.delta_low * (1.0 - e.delta_low) / double(e.samples_low) +
                e.delta_high * (1.0 - e.delta_high) / double(e.samples_high);
  }

  // Summing the per-axis identities recovers the all-positive delta.
  const double d0_var =
      rep.delta0_hat * (1.0 - rep.delta0_hat) / double(rep.c0_samples);
  CHECK(std::abs(diff_sum - rep.delta0_hat) <= 3.0 * std::sqrt(diff_var + d0_var));
}

TEST_CASE("half-axis coverage follows the bounded-region configuration") {
  // Worked nets built on the triangle arrangement x = 1, y = 1, x + y = 3,
  // whose positive intercepts all sit at distance 1. Flipping row signs walks
  // the bounded region through each configuration class.
  SUBCASE("all-positive: tails from the intercept out") {
    auto p = make_net(2, {{1, 0}, {0, 1}, {-1, -1}}, {-1, -1, 3});
    CHECK(configuration_index(p) == 0);
    auto ints = p_plus_intercepts(p.layers[0].W, p.layers[0].b);
    for (Index j = 0; j < 3; ++j) {
      CHECK(ints.values(j) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(!half_axis_point_attained(p, j, 0.5));
      CHECK(half_axis_point_attained(p, j, 1.5));
      CHECK(half_axis_point_attained(p, j, 100.0));
    }
  }
  SUBCASE("single-negative: that axis collapses to the origin") {
    auto p = make_net(2, {{1, 0}, {0, 1}, {1, 1}}, {-1, -1, -3});
    CHECK(configuration_index(p) == 3);
    for (double lam : {0.25, 1.0, 4.0, 50.0}) {
      CHECK(!half_axis_point_attained(p, 2, lam));
      CHECK(half_axis_point_attained(p, 0, lam));
      CHECK(half_axis_point_attained(p, 1, lam));
    }
  }
  SUBCASE("single-positive: that axis is the segment up to the intercept") {
    auto p = make_net(2, {{-1, 0}, {0, -1}, {-1, -1}}, {1, 1, 3});
    CHECK(configuration_index(p) == 6);
    CHECK(half_axis_point_attained(p, 2, 0.5));
    CHECK(!half_axis_point_attained(p, 2, 1.5));
    CHECK(!half_axis_point_attained(p, 2, 10.0));
    for (double lam : {0.25, 1.0, 4.0, 50.0}) {
      CHECK(half_axis_point_attained(p, 0, lam));
      CHECK(half_axis_point_attained(p, 1, lam));
    }
  }
  SUBCASE("all-negative: every axis is fully covered") {
    auto p = make_net(2, {{-1, 0}, {0, -1}, {1, 1}}, {1, 1, -3});
    CHECK(configuration_index(p) == 7);
    for (Index j = 0; j < 3; ++j)
      for (double lam : {0.25, 1.0, 4.0, 50.0}) CHECK(half_axis_point_attained(p, j, lam));
  }
  SUBCASE("random draws at the critical width follow their class") {
    int kept = 0;
    for (int s = 0; s < 200; ++s) {
      auto params = sample_params(arch3(2, 3), Distribution::uniform_symmetric(1.0),
                                  50000 + static_cast<std::uint64_t>(s));
      ConfigurationIndex cfg = 0;
      InterceptTuple ints;
      try {
        cfg = configuration_index(params);
        ints = p_plus_intercepts(params.layers[0].W, params.layers[0].b);
      } catch (const NotGenericError&) {
        continue;
      }
      double pmin = 1e300, pmax = 0.0;
      for (Index j = 0; j < 3; ++j) {
        pmin = std::min(pmin, std::abs(ints.values(j)));
        pmax = std::max(pmax, std::abs(ints.values(j)));
      }
      if (pmin < 1e-3 || pmax > 1e3) continue;  // keep probe margins honest
      ++kept;
      INFO("draw ", s, " configuration ", cfg);
      if (cfg == 0) {
        for (Index j = 0; j < 3; ++j) {
          const double pj = ints.values(j);
          CHECK(!half_axis_point_attained(params, j, 0.1 * pj));
          CHECK(!half_axis_point_attained(params, j, 0.9 * pj));
          CHECK(half_axis_point_attained(params, j, 1.1 * pj));
          CHECK(half_axis_point_attained(params, j, 10.0 * pj));
        }
      } else if (cfg >= 1 && cfg <= 3) {
        const Index blocked = cfg - 1;
        for (Index j = 0; j < 3; ++j)
          for (double lam : {0.1, 1.0, 10.0, 100.0})
            CHECK(half_axis_point_attained(params, j, lam) == (j != blocked));
      } else if (cfg >= 4 && cfg <= 6) {
        const Index seg = cfg - 4;
        const double pj = ints.values(seg);
        CHECK(half_axis_point_attained(params, seg, 0.5 * pj));
        CHECK(!half_axis_point_attained(params, seg, 1.5 * pj));
        for (Index j = 0; j < 3; ++j) {
          if (j == seg) continue;
          for (double lam : {0.1, 1.0, 10.0, 100.0})
            CHECK(half_axis_point_attained(params, j, lam));
        }
      } else {
        for (Index j = 0; j < 3; ++j)
          for (double lam : {0.1, 1.0, 10.0, 100.0})
            CHECK(half_axis_point_attained(params, j, lam));
      }
    }
    CHECK(kept == 200);
  }
  SUBCASE("narrow first layers cover every half-axis") {
    for (Index n1 : {2, 3}) {
      for (int s = 0; s < 40; ++s) {
        auto params = sample_params(arch3(3, n1), Distribution::normal(1.0),
                                    60000 + static_cast<std::uint64_t>(s));
        if (!is_generic(first_layer_arrangement(params))) continue;
        for (Index j = 0; j < n1; ++j)
          for (double lam : {0.1, 1.0, 10.0, 100.0})
            CHECK(half_axis_point_attained(params, j, lam));
      }
    }
  }
  SUBCASE("probe preconditions") {
    auto p = make_net(2, {{1, 0}, {0, 1}, {-1, -1}}, {-1, -1, 3});
    CHECK_THROWS_AS(half_axis_point_attained(p, 3, 1.0), UsageError);
    CHECK_THROWS_AS(half_axis_point_attained(p, -1, 1.0), UsageError);
    CHECK_THROWS_AS(half_axis_point_attained(p, 0, 0.0), UsageError);
    CHECK_THROWS_AS(half_axis_point_attained(p, 0, -2.0), UsageError);
  }
}

TEST_CASE("sweep cells are exact, banded, and ordered") {
  const long long n = 20000;
  auto cells = conjecture_sweep(2, 3, 6, Distribution::uniform_symmetric(1.0), n, 911);
  REQUIRE(cells.size() == 4);
  for (size_t k = 0; k < cells.size(); ++k) {
    const auto& c = cells[k];
    CHECK(c.n0 == 2);
    CHECK(c.n1 == 3 + static_cast<int>(k));
    CHECK(c.mode == "exact");
    CHECK(c.samples == n);
    CHECK(c.hits >= c.all_negative_hits);

    // Estimates never drop below the conjectured limit 1/4^{n0+1}.
    CHECK(c.p_hat >= sweep_reference(2) - 3.0 * binom_se(sweep_reference(2), double(n)));

    // The all-negative slice tracks its exact probability 1/2^{n1+1}.
    const double pneg = std::ldexp(1.0, -(c.n1 + 1));
    CHECK(std::abs(double(c.all_negative_hits) / double(n) - pneg) <=
          3.0 * binom_se(pneg, double(n)));

    if (c.n1 == 3) {
      REQUIRE(c.theory.has_value());
      CHECK(*c.theory == 0.078125);
      CHECK(std::abs(c.p_hat - 0.078125) <= 3.0 * binom_se(0.078125, double(n)));
    } else {
      CHECK(!c.theory.has_value());
    }
  }
  // Monotone non-increasing within the sampling noise.
  for (size_t k = 0; k + 1 < cells.size(); ++k) {
    const double se = std::sqrt(cells[k].p_hat * (1 - cells[k].p_hat) / double(n) +
                                cells[k + 1].p_hat * (1 - cells[k + 1].p_hat) / double(n));
    CHECK(cells[k + 1].p_hat <= cells[k].p_hat + 3.0 * se);
  }
}

TEST_CASE("facet rows reproduce the combinatorial counts") {
  auto fr = facet_report(2, {4, 6, 10, 50, 200});
  REQUIRE(fr.rows.size() == 5);
  const long long want_regions[] = {11, 22, 56, 1276, 20101};
  const long long want_bounded[] = {3, 10, 36, 1176, 19701};
  const long long want_total[] = {16, 36, 100, 2500, 40000};
  for (size_t k = 0; k < 5; ++k) {
    const auto& r = fr.rows[k];
    CHECK(r.regions == want_regions[k]);
    CHECK(r.bounded == want_bounded[k]);
    CHECK(r.bounded == binomial(r.m - 1, 2));
    CHECK(r.total_facets == want_total[k]);
    CHECK(r.avg_facets ==
          doctest::Approx(2.0 * double(r.total_facets) / double(r.regions)).epsilon(1e-12));
    if (r.m <= 10) {
      REQUIRE(r.empirical_total_facets.has_value());
      CHECK(*r.empirical_total_facets == r.total_facets);
      REQUIRE(r.axis_intersection_bound.has_value());
      CHECK(*r.axis_intersection_bound <= 2.0 * 2 + 1.0);
      CHECK(*r.axis_intersection_bound ==
            doctest::Approx(*r.max_negative_facets_mean + 1.0).epsilon(1e-12));
    } else {
      CHECK(!r.empirical_total_facets.has_value());
    }
  }
  CHECK(fr.rows[0].avg_facets == doctest::Approx(32.0 / 11.0).epsilon(1e-12));
  for (size_t k = 0; k + 1 < 5; ++k) {
    CHECK(fr.rows[k].avg_facets < fr.rows[k + 1].avg_facets);
    CHECK(fr.rows[k].bounded_ratio < fr.rows[k + 1].bounded_ratio);
  }
  // The average facet count approaches 2 * n0 from below.
  CHECK(fr.rows[4].avg_facets < 4.0);
  CHECK(std::abs(fr.rows[4].avg_facets - 4.0) < 0.05);

  auto f3 = facet_report(3, {4, 8});
  REQUIRE(f3.rows.size() == 2);
  CHECK(f3.rows[0].regions == 15);
  CHECK(f3.rows[0].bounded == 1);
  CHECK(f3.rows[0].total_facets == 28);
  CHECK(f3.rows[1].regions == 93);
  CHECK(f3.rows[1].bounded == 35);
  CHECK(f3.rows[1].total_facets == 232);
  for (const auto& r : f3.rows) {
    REQUIRE(r.empirical_total_facets.has_value());
    CHECK(*r.empirical_total_facets == r.total_facets);
    CHECK(*r.axis_intersection_bound <= 2.0 * 3 + 1.0);
  }
}

TEST_CASE("cells beyond the enumeration cap fall back to the detector") {
  auto cells = conjecture_sweep(2, kArrangementCap + 1, kArrangementCap + 1,
                                Distribution::uniform_symmetric(1.0), 300, 6001);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].mode == "detector");
  CHECK(cells[0].samples == 300);
  CHECK(cells[0].hits == 20);
  CHECK(!cells[0].theory.has_value());
  CHECK(cells[0].marginal_discards == 0);
}

TEST_CASE("reports are identical across worker counts") {
  const auto dist = Distribution::normal(1.0);
  auto a = estimate_prob_stable(2, 3, dist, 10000, 42, 1);
  auto b = estimate_prob_stable(2, 3, dist, 10000, 42, 3);
  CHECK(a.hits == b.hits);
  CHECK(a.all_negative_hits == b.all_negative_hits);
  CHECK(a.marginal_discards == b.marginal_discards);
  CHECK(a.degenerate_discards == b.degenerate_discards);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.ci_low == b.ci_low);
  CHECK(a.ci_high == b.ci_high);

  auto da = estimate_deltas(2, Distribution::uniform_symmetric(1.0), 20000, 43, 1);
  auto db = estimate_deltas(2, Distribution::uniform_symmetric(1.0), 20000, 43, 4);
  CHECK(da.delta_sum == db.delta_sum);
  REQUIRE(da.entries.size() == db.entries.size());
  for (size_t i = 0; i < da.entries.size(); ++i) {
    CHECK(da.entries[i].conditional_samples == db.entries[i].conditional_samples);
    CHECK(da.entries[i].conditional_hits == db.entries[i].conditional_hits);
  }

  auto ca = check_c0_relation(2, Distribution::uniform_symmetric(1.0), 20000, 44, 1);
  auto cb = check_c0_relation(2, Distribution::uniform_symmetric(1.0), 20000, 44, 3);
  CHECK(ca.lhs == cb.lhs);
  CHECK(ca.rhs == cb.rhs);
  CHECK(ca.sigma == cb.sigma);
  CHECK(ca.c0_samples == cb.c0_samples);
  REQUIRE(ca.axis_relations.size() == cb.axis_relations.size());
  for (size_t i = 0; i < ca.axis_relations.size(); ++i) {
    CHECK(ca.axis_relations[i].lhs == cb.axis_relations[i].lhs);
    CHECK(ca.axis_relations[i].rhs == cb.axis_relations[i].rhs);
  }

  auto sa = conjecture_sweep(2, 3, 4, Distribution::normal(1.0), 10000, 45, 1);
  auto sb = conjecture_sweep(2, 3, 4, Distribution::normal(1.0), 10000, 45, 2);
  REQUIRE(sa.size() == sb.size());
  for (size_t i = 0; i < sa.size(); ++i) {
    CHECK(sa[i].hits == sb[i].hits);
    CHECK(sa[i].p_hat == sb[i].p_hat);
  }
}
