#pragma once

#include "deadneuron/arrangement.hpp"
#include "deadneuron/core.hpp"
#include "deadneuron/network.hpp"
#include "deadneuron/rng.hpp"
#include "deadneuron/simplex.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace deadneuron {

// A neuron is addressed by (layer, 1-based index); the analysis here covers
// the second hidden layer only.
struct NeuronRef {
  Index layer = 2;
  Index index = 1;
};

struct RegionCertificate {
  Codeword codeword;
  LpResult<double> lp;  // maximum of the neuron's pre-activation over the closed region
  double value = 0.0;   // that maximum, +infinity when the LP is unbounded
};

struct StabilityVerdict {
  bool stable = false;
  bool marginal = false;  // |margin| within tolerance: indeterminate at float precision
  double margin = 0.0;    // sup of the pre-activation over the whole input space
  long long regions_checked = 0;
  long long unbounded_regions = 0;
  std::vector<RegionCertificate> certificates;
};

enum class StabilityOutcome { Stable, NotStable, Marginal };

namespace detail {

inline std::pair<Vecd, double> second_layer_row(const NetworkParams& params, NeuronRef neuron) {
  if (neuron.layer != 2) throw UsageError("stability: only second-layer neurons are in scope");
  if (params.layers.size() < 2) throw UsageError("stability: network has no second layer");
  const AffineMap& l2 = params.layers[1];
  if (neuron.index < 1 || neuron.index > l2.W.rows())
    throw UsageError("stability: neuron index out of range");
  return {l2.W.row(neuron.index - 1).transpose(), l2.b(neuron.index - 1)};
}

// Objective of the region LP: on the region with codeword mask, the neuron's
// pre-activation equals sum over positive-side rows of w_j (W1_j . x + b1_j)
// plus the bias, which is linear with the returned (gradient, constant).
inline std::pair<Vecd, double> region_objective(const AffineMap& l1, const Vecd& w, double b,
                                                std::uint32_t mask) {
  Vecd grad = Vecd::Zero(l1.W.cols());
  double constant = b;
  for (Index j = 0; j < l1.W.rows(); ++j) {
    if ((mask >> j) & 1u) {
      grad += w(j) * l1.W.row(j).transpose();
      constant += w(j) * l1.b(j);
    }
  }
  return {std::move(grad), constant};
}

inline double prepost_value(const NetworkParams& params, const Vecd& w, double b, const Vecd& x) {
  return w.dot(layer_map(params, 1, x)) + b;
}

}  // namespace detail

// Exact decision: the neuron is stably unactivated iff its pre-activation has
// a strictly negative supremum, computed as the max over all first-layer
// regions of an LP over the region closure. Unbounded growth along a ray in
// any region settles the question immediately.
inline StabilityVerdict is_stably_unactivated_exact(const NetworkParams& params, NeuronRef neuron,
                                                    double eps = kTolerance) {
  auto [w, b] = detail::second_layer_row(params, neuron);
  auto arr = first_layer_arrangement(params);
  if (!is_generic(arr)) throw NotGenericError("stability: first-layer arrangement is not generic");
  const AffineMap& l1 = params.layers[0];

  detail::RegionLp<double> lp(detail::NormalizedRows<double>(arr), eps);
  auto regions = detail::feasible_codewords_incremental(lp, kFeasibilityMargin);

  StabilityVerdict verdict;
  verdict.margin = -std::numeric_limits<double>::infinity();
  for (const auto& reg : regions) {
    auto [grad, constant] = detail::region_objective(l1, w, b, reg.mask);
    RegionCertificate cert;
    cert.codeword = Codeword::from_mask(reg.mask, arr.size());
    cert.lp = lp.maximize_over_closure(reg.mask, grad);
    if (cert.lp.status == LpStatus::Unbounded) {
      cert.value = std::numeric_limits<double>::infinity();
      ++verdict.unbounded_regions;
    } else {
      cert.value = cert.lp.optimum + constant;
    }
    verdict.margin = std::max(verdict.margin, cert.value);
    verdict.certificates.push_back(std::move(cert));
  }
  verdict.regions_checked = static_cast<long long>(regions.size());
  verdict.marginal = std::isfinite(verdict.margin) && std::abs(verdict.margin) <= eps;
  verdict.stable = verdict.margin < -eps;
  return verdict;
}

// Estimator-grade variant: same verdict as the exact test, reached faster.
// Cheap value probes can certify NotStable without touching LPs (any point
// with positive pre-activation bounds the supremum from below), and the
// region loop exits on the first positive maximum.
inline StabilityOutcome decide_stability_fast(const NetworkParams& params, NeuronRef neuron,
                                              double eps = kTolerance) {
  auto [w, b] = detail::second_layer_row(params, neuron);
  const AffineMap& l1 = params.layers[0];
  const Index n0 = l1.W.cols();

  Vecd probe = Vecd::Zero(n0);
  if (detail::prepost_value(params, w, b, probe) > eps) return StabilityOutcome::NotStable;
  for (double radius : {1.0, 100.0}) {
    for (Index i = 0; i < n0; ++i) {
      for (double sign : {1.0, -1.0}) {
        probe.setZero();
        probe(i) = sign * radius;
        if (detail::prepost_value(params, w, b, probe) > eps) return StabilityOutcome::NotStable;
      }
    }
  }

  auto arr = first_layer_arrangement(params);
  if (!is_generic(arr)) throw NotGenericError("stability: first-layer arrangement is not generic");
  detail::RegionLp<double> lp(detail::NormalizedRows<double>(arr), eps);
  auto regions = detail::feasible_codewords_incremental(lp, kFeasibilityMargin);

  double margin = -std::numeric_limits<double>::infinity();
  for (const auto& reg : regions) {
    auto [grad, constant] = detail::region_objective(l1, w, b, reg.mask);
    auto res = lp.maximize_over_closure(reg.mask, grad);
    if (res.status == LpStatus::Unbounded) return StabilityOutcome::NotStable;
    const double value = res.optimum + constant;
    margin = std::max(margin, value);
    if (margin > eps) return StabilityOutcome::NotStable;
  }
  if (margin < -eps) return StabilityOutcome::Stable;
  return StabilityOutcome::Marginal;
}

// Sufficient condition: strictly negative weights and bias.
inline bool all_negative_test(const NetworkParams& params, NeuronRef neuron) {
  auto [w, b] = detail::second_layer_row(params, neuron);
  if (b >= 0) return false;
  for (Index j = 0; j < w.size(); ++j)
    if (w(j) >= 0) return false;
  return true;
}

struct DetectorConfig {
  long long domain_samples = 10000;
  double domain_radius = 100.0;  // wide enough to catch rays that turn positive far out
  Index perturbation_count = 0;  // 0 resolves to 4 * n0
  double perturbation_radius = 1e-3;

  void validate() const {
    if (domain_samples < 1 || domain_radius <= 0 || perturbation_count < 0 ||
        perturbation_radius <= 0)
      throw UsageError("detector: config values must be positive");
  }
};

namespace detail {

inline Vecd ball_point(Rng& rng, Index dim, double radius) {
  Vecd v(dim);
  double norm2 = 0;
  for (Index i = 0; i < dim; ++i) {
    v(i) = rng.normal(1.0);
    norm2 += v(i) * v(i);
  }
  const double norm = std::sqrt(norm2);
  if (norm == 0) return Vecd::Zero(dim);
  const double r = radius * std::pow(rng.uniform01_open(), 1.0 / static_cast<double>(dim));
  return v * (r / norm);
}

inline NetworkParams perturb_params(const NetworkParams& params, Rng& rng, double radius) {
  long long dim = 0;
  for (const auto& layer : params.layers) dim += layer.W.size() + layer.b.size();
  Vecd delta = ball_point(rng, static_cast<Index>(dim), radius);
  NetworkParams out = params;
  Index at = 0;
  for (auto& layer : out.layers) {
    for (Index i = 0; i < layer.W.rows(); ++i)
      for (Index j = 0; j < layer.W.cols(); ++j) layer.W(i, j) += delta(at++);
    for (Index i = 0; i < layer.b.size(); ++i) layer.b(i) += delta(at++);
  }
  return out;
}

}  // namespace detail

// Monte Carlo detector: declares the neuron stably unactivated iff its
// pre-activation stays nonpositive at every sampled domain point under every
// sampled parameter perturbation. Subject to false verdicts in both
// directions; kept for fidelity comparison against the exact test. Domain
// points are generated chunk by chunk from forked substreams so the scan can
// stop at the first positive value without changing the answer.
inline bool detector_paper_style(const NetworkParams& params, NeuronRef neuron,
                                 const DetectorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (neuron.layer != 2) throw UsageError("detector: only second-layer neurons are in scope");
  const Index n0 = params.layers[0].W.cols();
  const Index perturbations = cfg.perturbation_count > 0 ? cfg.perturbation_count : 4 * n0;

  Rng root(seed);
  Rng domain_root = root.fork(1);
  Rng perturb_stream = root.fork(2);

  std::vector<NetworkParams> perturbed;
  perturbed.reserve(static_cast<size_t>(perturbations));
  std::vector<Vecd> ws;
  std::vector<double> bs;
  for (Index k = 0; k < perturbations; ++k) {
    perturbed.push_back(detail::perturb_params(params, perturb_stream, cfg.perturbation_radius));
    const AffineMap& l2 = perturbed.back().layers[1];
    if (neuron.index < 1 || neuron.index > l2.W.rows())
      throw UsageError("detector: neuron index out of range");
    ws.push_back(l2.W.row(neuron.index - 1).transpose());
    bs.push_back(l2.b(neuron.index - 1));
  }

  const long long chunk = 512;
  Matd X(n0, chunk);
  for (long long start = 0, c = 0; start < cfg.domain_samples; start += chunk, ++c) {
    const long long width = std::min(chunk, cfg.domain_samples - start);
    Rng chunk_stream = domain_root.fork(static_cast<std::uint64_t>(c));
    for (long long s = 0; s < width; ++s)
      X.col(s) = detail::ball_point(chunk_stream, n0, cfg.domain_radius);
    for (Index k = 0; k < perturbations; ++k) {
      const AffineMap& l1 = perturbed[static_cast<size_t>(k)].layers[0];
      Matd Y = (l1.W * X.leftCols(width)).colwise() + l1.b;
      Y = Y.cwiseMax(0.0);
      Vecd values = Y.transpose() * ws[static_cast<size_t>(k)];
      if ((values.array() + bs[static_cast<size_t>(k)]).maxCoeff() > 0.0) return false;
    }
  }
  return true;
}

}  // namespace deadneuron
