#pragma once

#include "deadneuron/arrangement.hpp"
#include "deadneuron/core.hpp"
#include "deadneuron/intercepts.hpp"
#include "deadneuron/rng.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace deadneuron {

struct AffineMap {
  Matd W;
  Vecd b;
};

struct Architecture {
  std::vector<Index> sizes;  // (n_0, n_1, ..., n_L)

  Index depth() const { return static_cast<Index>(sizes.size()) - 1; }

  void validate() const {
    if (sizes.size() < 3) throw UsageError("architecture: need at least two hidden-side layers");
    for (Index s : sizes)
      if (s < 1) throw UsageError("architecture: layer sizes must be positive");
  }
};

struct NetworkParams {
  Architecture arch;
  std::vector<AffineMap> layers;  // layers[l-1] maps R^{n_{l-1}} -> R^{n_l}
};

// Symmetric scalar laws for parameter initialization. HeUniform with
// fan_in = 0 resolves to each layer's input width at sampling time.
class Distribution {
 public:
  enum class Kind { UniformSymmetric, Normal, HeUniform };

  static Distribution uniform_symmetric(double halfwidth) {
    if (!(halfwidth > 0)) throw UsageError("distribution: halfwidth must be positive");
    return Distribution(Kind::UniformSymmetric, halfwidth, 0);
  }
  static Distribution normal(double stddev) {
    if (!(stddev > 0)) throw UsageError("distribution: stddev must be positive");
    return Distribution(Kind::Normal, stddev, 0);
  }
  static Distribution he_uniform(Index fan_in = 0) {
    if (fan_in < 0) throw UsageError("distribution: fan_in must be nonnegative");
    return Distribution(Kind::HeUniform, 0.0, fan_in);
  }

  Kind kind() const { return kind_; }

  double halfwidth_for(Index layer_fan_in) const {
    const Index f = fan_in_ > 0 ? fan_in_ : layer_fan_in;
    return std::sqrt(6.0 / static_cast<double>(f));
  }

  double draw(Rng& rng, Index layer_fan_in) const {
    switch (kind_) {
      case Kind::UniformSymmetric:
        return rng.uniform_symmetric(scale_);
      case Kind::Normal:
        return rng.normal(scale_);
      case Kind::HeUniform:
        return rng.uniform_symmetric(halfwidth_for(layer_fan_in));
    }
    throw UsageError("distribution: unknown kind");
  }

  std::string name() const {
    switch (kind_) {
      case Kind::UniformSymmetric:
        return "uniform";
      case Kind::Normal:
        return "normal";
      case Kind::HeUniform:
        return "he-uniform";
    }
    return "?";
  }

 private:
  Distribution(Kind k, double scale, Index fan_in) : kind_(k), scale_(scale), fan_in_(fan_in) {}

  Kind kind_;
  double scale_;
  Index fan_in_;
};

// Every weight and bias i.i.d.; each layer draws from its own forked
// substream so a layer's values do not depend on other layers' sizes.
inline NetworkParams sample_params(const Architecture& arch, const Distribution& dist,
                                   std::uint64_t seed) {
  arch.validate();
  NetworkParams params;
  params.arch = arch;
  Rng root(seed);
  for (Index l = 1; l <= arch.depth(); ++l) {
    Rng stream = root.fork(static_cast<std::uint64_t>(l));
    const Index rows = arch.sizes[static_cast<size_t>(l)];
    const Index cols = arch.sizes[static_cast<size_t>(l - 1)];
    AffineMap map;
    map.W.resize(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) map.W(i, j) = dist.draw(stream, cols);
    map.b.resize(rows);
    for (Index i = 0; i < rows; ++i) map.b(i) = dist.draw(stream, cols);
    params.layers.push_back(std::move(map));
  }
  return params;
}

// Layer l (1-based): ReLU after the affine map on hidden layers, affine only
// at the output layer.
inline Vecd layer_map(const NetworkParams& params, Index l, const Vecd& x) {
  if (l < 1 || l > params.arch.depth()) throw UsageError("layer_map: layer index out of range");
  const AffineMap& map = params.layers[static_cast<size_t>(l - 1)];
  if (x.size() != map.W.cols()) throw DimensionMismatch("layer_map: input width mismatch");
  Vecd y = map.W * x + map.b;
  if (l < params.arch.depth())
    for (Index i = 0; i < y.size(); ++i) y(i) = y(i) > 0.0 ? y(i) : 0.0;
  return y;
}

// First-layer pre-activation zero sets, cooriented toward positive
// pre-activation, in row order.
inline CoorientedArrangement<double> first_layer_arrangement(const NetworkParams& params,
                                                             double eps = kTolerance) {
  const AffineMap& map = params.layers.front();
  CoorientedArrangement<double> arr;
  arr.dim = map.W.cols();
  for (Index j = 0; j < map.W.rows(); ++j) {
    Hyperplane<double> h;
    h.normal = map.W.row(j).transpose();
    if (h.normal.lpNorm<Eigen::Infinity>() <= eps)
      throw DegenerateRowError("first_layer_arrangement: zero weight row");
    h.offset = map.b(j);
    arr.hyperplanes.push_back(std::move(h));
  }
  return arr;
}

using ConfigurationIndex = int;

namespace detail {

// Index layout over codewords of width n1 = n0+1: 0 is all-positive, then the
// n0+1 single-negative codes by position, then the n0+1 single-positive codes
// by position, then the rest in lexicographic order ('-' < '+').
inline ConfigurationIndex configuration_of_code(const Codeword& code) {
  const Index n1 = code.size();
  const int negatives = code.count_negative();
  if (negatives == 0) return 0;
  if (negatives == 1) {
    for (Index j = 0; j < n1; ++j)
      if (code.signs[static_cast<size_t>(j)] < 0) return static_cast<int>(j) + 1;
  }
  if (negatives == static_cast<int>(n1) - 1) {
    for (Index j = 0; j < n1; ++j)
      if (code.signs[static_cast<size_t>(j)] > 0) return static_cast<int>(j) + 1 + static_cast<int>(n1);
  }
  // Remaining codes fill the unused indices in lexicographic order. For
  // n1 >= 3 the three blocks above are disjoint, so this starts at 2*n0+3;
  // for n1 = 2 the single-negative and single-positive blocks coincide and
  // the residual picks up right after index 2.
  int idx = 1 + static_cast<int>(n1) + (n1 == 2 ? 0 : static_cast<int>(n1));
  const std::uint32_t total = 1u << n1;
  for (std::uint32_t lex = 0; lex < total; ++lex) {
    std::uint32_t mask = 0;
    for (Index j = 0; j < n1; ++j)
      if ((lex >> (n1 - 1 - j)) & 1u) mask |= (1u << j);
    Codeword c = Codeword::from_mask(mask, n1);
    const int neg = c.count_negative();
    if (neg == 0 || neg == 1 || neg == static_cast<int>(n1) - 1) continue;
    if (c == code) return idx;
    ++idx;
  }
  throw UsageError("configuration_of_code: unreachable");
}

}  // namespace detail

// Configuration of the first layer when n1 = n0+1: the index of code(B) for
// the unique bounded region of the first-layer arrangement. The bounded code
// is read off as the signs of the image-hyperplane intercepts, which avoids
// region enumeration.
inline ConfigurationIndex configuration_index(const NetworkParams& params) {
  const AffineMap& map = params.layers.front();
  const Index n0 = map.W.cols();
  if (map.W.rows() != n0 + 1)
    throw WrongWidthError("configuration_index: first layer must have n0+1 rows");
  InterceptTuple p = p_plus_intercepts(map.W, map.b);
  Codeword code;
  code.signs.resize(static_cast<size_t>(n0) + 1);
  for (Index j = 0; j <= n0; ++j)
    code.signs[static_cast<size_t>(j)] = p.values(j) > 0 ? 1 : -1;
  return detail::configuration_of_code(code);
}

}  // namespace deadneuron
