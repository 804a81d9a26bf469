#pragma once

#include "deadneuron/core.hpp"
#include "deadneuron/linalg.hpp"
#include "deadneuron/simplex.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace deadneuron {

// H = {x : normal·x + offset = 0}, cooriented: the positive side is where
// normal·x + offset > 0.
template <class S = double>
struct Hyperplane {
  Vec<S> normal;
  S offset = S(0);
};

template <class S = double>
struct CoorientedArrangement {
  Index dim = 0;
  std::vector<Hyperplane<S>> hyperplanes;

  Index size() const { return static_cast<Index>(hyperplanes.size()); }
};

inline constexpr int kArrangementCap = 20;  // combinatorial guard: 2^m candidates

// Sign vector in {+,-}^m. Mask bit j set means hyperplane j carries '+'.
// Lexicographic order treats '-' < '+'.
struct Codeword {
  std::vector<std::int8_t> signs;  // +1 / -1

  Codeword() = default;
  explicit Codeword(std::vector<std::int8_t> s) : signs(std::move(s)) {}

  static Codeword from_mask(std::uint32_t mask, Index m) {
    Codeword c;
    c.signs.resize(static_cast<size_t>(m));
    for (Index j = 0; j < m; ++j) c.signs[static_cast<size_t>(j)] = (mask >> j) & 1u ? 1 : -1;
    return c;
  }

  std::uint32_t mask() const {
    std::uint32_t m = 0;
    for (size_t j = 0; j < signs.size(); ++j)
      if (signs[j] > 0) m |= (1u << j);
    return m;
  }

  Index size() const { return static_cast<Index>(signs.size()); }

  Codeword negated() const {
    Codeword c = *this;
    for (auto& s : c.signs) s = static_cast<std::int8_t>(-s);
    return c;
  }

  int count_negative() const {
    int k = 0;
    for (auto s : signs)
      if (s < 0) ++k;
    return k;
  }
  int count_positive() const { return static_cast<int>(signs.size()) - count_negative(); }

  std::string str() const {
    std::string out;
    out.reserve(signs.size());
    for (auto s : signs) out.push_back(s > 0 ? '+' : '-');
    return out;
  }

  friend bool operator==(const Codeword& a, const Codeword& b) { return a.signs == b.signs; }
  friend bool operator!=(const Codeword& a, const Codeword& b) { return !(a == b); }
  friend bool operator<(const Codeword& a, const Codeword& b) {  // lexicographic, '-' < '+'
    return a.signs < b.signs;
  }
};

template <class S = double>
struct RegionInfo {
  Codeword codeword;
  bool bounded = false;
  Vec<S> witness;  // strictly interior point
};

struct RegionCounts {
  long long total = 0;
  long long bounded = 0;
};

namespace detail {

// Rows scaled to unit max-norm so the interior margin delta means the same
// thing for every hyperplane. Max-norm (not Euclidean) keeps the scaling
// exact for rational scalars.
template <class S>
struct NormalizedRows {
  Mat<S> N;   // m x n
  Vec<S> d;   // m

  NormalizedRows() = default;
  explicit NormalizedRows(const CoorientedArrangement<S>& arr) {
    const Index m = arr.size(), n = arr.dim;
    N.resize(m, n);
    d.resize(m);
    for (Index j = 0; j < m; ++j) {
      const Hyperplane<S>& h = arr.hyperplanes[static_cast<size_t>(j)];
      if (h.normal.size() != n) throw DimensionMismatch("arrangement: hyperplane dimension mismatch");
      S nrm = S(0);
      for (Index k = 0; k < n; ++k) {
        S a = abs_val(h.normal(k));
        if (nrm < a) nrm = a;
      }
      if (nrm == S(0)) throw NotGenericError("arrangement: zero normal");
      for (Index k = 0; k < n; ++k) N(j, k) = h.normal(k) / nrm;
      d(j) = h.offset / nrm;
    }
  }
};

// Shared LP assembly for region queries. Scratch buffers are reused across
// calls; one instance per worker thread.
template <class S>
class RegionLp {
 public:
  RegionLp(NormalizedRows<S> rows, S eps) : rows_(std::move(rows)), eps_(eps) {}

  const NormalizedRows<S>& rows() const { return rows_; }
  Index dim() const { return rows_.N.cols(); }
  Index size() const { return rows_.N.rows(); }

  // Maximize the minimum normalized slack over the open region candidate
  // given by the low `count` signs of `mask` (capped at 1, so the LP is
  // always bounded). The candidate is a region iff the optimum exceeds the
  // feasibility margin.
  LpResult<S> margin(std::uint32_t mask, Index count) {
    const Index n = dim();
    A_.resize(count + 1, n + 1);
    b_.resize(count + 1);
    for (Index j = 0; j < count; ++j) {
      const S s = (mask >> j) & 1u ? S(1) : S(-1);
      A_.row(j).head(n) = -s * rows_.N.row(j);
      A_(j, n) = S(1);
      b_(j) = s * rows_.d(j);
    }
    A_.row(count).setZero();
    A_(count, n) = S(1);
    b_(count) = S(1);
    c_ = Vec<S>::Zero(n + 1);
    c_(n) = S(1);
    return engine_.maximize_canonical(A_, b_, c_, eps_);
  }

  // Maximize obj over the closure of the region (no margin variable).
  LpResult<S> maximize_over_closure(std::uint32_t mask, const Vec<S>& obj) {
    const Index n = dim(), m = size();
    A_.resize(m, n);
    b_.resize(m);
    for (Index j = 0; j < m; ++j) {
      const S s = (mask >> j) & 1u ? S(1) : S(-1);
      A_.row(j) = -s * rows_.N.row(j);
      b_(j) = s * rows_.d(j);
    }
    return engine_.maximize_canonical(A_, b_, obj, eps_);
  }

  bool region_bounded(std::uint32_t mask) {
    const Index n = dim();
    Vec<S> obj = Vec<S>::Zero(n);
    for (Index i = 0; i < n; ++i) {
      for (S dir : {S(1), S(-1)}) {
        obj(i) = dir;
        if (maximize_over_closure(mask, obj).status != LpStatus::Bounded) return false;
      }
      obj(i) = S(0);
    }
    return true;
  }

  // Interior margin of closure(region) ∩ hyperplane i, within that slice.
  // Positive optimum above the margin means the region has a facet on H_i.
  LpResult<S> facet_margin(std::uint32_t mask, Index i) {
    const Index n = dim(), m = size();
    A_.resize(m + 2, n + 1);
    b_.resize(m + 2);
    Index r = 0;
    for (Index j = 0; j < m; ++j) {
      if (j == i) continue;
      const S s = (mask >> j) & 1u ? S(1) : S(-1);
      A_.row(r).head(n) = -s * rows_.N.row(j);
      A_(r, n) = S(1);
      b_(r) = s * rows_.d(j);
      ++r;
    }
    A_.row(r).head(n) = rows_.N.row(i);
    A_(r, n) = S(0);
    b_(r) = -rows_.d(i);
    ++r;
    A_.row(r).head(n) = -rows_.N.row(i);
    A_(r, n) = S(0);
    b_(r) = rows_.d(i);
    ++r;
    A_.row(r).setZero();
    A_(r, n) = S(1);
    b_(r) = S(1);
    c_ = Vec<S>::Zero(n + 1);
    c_(n) = S(1);
    return engine_.maximize_canonical(A_, b_, c_, eps_);
  }

 private:
  NormalizedRows<S> rows_;
  S eps_;
  SimplexEngine<S> engine_;
  Mat<S> A_;
  Vec<S> b_;
  Vec<S> c_;
};

// Feasible codewords by hyperplane insertion: each existing region either
// keeps its witness on one side of the new hyperplane (certified without an
// LP) or is LP-tested; the other side is always LP-tested. Produces exactly
// the brute-force codeword set (same margin semantics) in lexicographic
// order, with O(regions · m) LPs instead of O(2^m).
template <class S>
struct IncrementalRegion {
  std::uint32_t mask = 0;
  Vec<S> witness;
  S min_slack = S(0);
};

template <class S>
std::vector<IncrementalRegion<S>> feasible_codewords_incremental(RegionLp<S>& lp, S margin) {
  const Index m = lp.size(), n = lp.dim();
  const S recenter_below = S(1e-4);
  std::vector<IncrementalRegion<S>> cur, next;
  {
    IncrementalRegion<S> root;
    root.witness = Vec<S>::Zero(n);
    root.min_slack = S(1);  // no constraints yet
    cur.push_back(std::move(root));
  }
  for (Index k = 0; k < m; ++k) {
    next.clear();
    const Index count = k + 1;
    for (IncrementalRegion<S>& reg : cur) {
      const S slack = lp.rows().N.row(k).dot(reg.witness) + lp.rows().d(k);
      // '-' child first keeps the output lexicographic.
      for (int side = 0; side < 2; ++side) {
        const bool plus = side == 1;
        const std::uint32_t child_mask = plus ? (reg.mask | (1u << k)) : reg.mask;
        const S signed_slack = plus ? slack : S(-slack);
        if (signed_slack > margin) {
          IncrementalRegion<S> child;
          child.mask = child_mask;
          child.witness = reg.witness;
          child.min_slack = signed_slack < reg.min_slack ? signed_slack : reg.min_slack;
          if (child.min_slack < recenter_below) {
            LpResult<S> res = lp.margin(child_mask, count);
            if (res.status == LpStatus::Bounded && res.optimum > child.min_slack) {
              child.witness = res.argmax.head(n);
              child.min_slack = res.optimum;
            }
          }
          next.push_back(std::move(child));
        } else {
          LpResult<S> res = lp.margin(child_mask, count);
          if (res.status == LpStatus::Bounded && res.optimum > margin) {
            IncrementalRegion<S> child;
            child.mask = child_mask;
            child.witness = res.argmax.head(n);
            child.min_slack = res.optimum;
            next.push_back(std::move(child));
          }
        }
      }
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace detail

// Generic: every q-subset (q <= n) of hyperplanes meets in an affine subspace
// of dimension n-q, and every (n+1)-subset has empty intersection. With rows
// independent it suffices to check full-rank for subsets of size min(m, n)
// and inconsistency (nonzero augmented determinant) for subsets of size n+1.
template <class S = double>
bool is_generic(const CoorientedArrangement<S>& arr, S tol = ScalarTraits<S>::tolerance(),
                int cap = kArrangementCap) {
  const Index m = arr.size(), n = arr.dim;
  if (m < 1) throw UsageError("is_generic: empty arrangement");
  if (m > cap) throw SizeLimitError("is_generic: arrangement above the combinatorial cap");

  for (const auto& h : arr.hyperplanes) {
    if (h.normal.size() != n) throw DimensionMismatch("is_generic: hyperplane dimension mismatch");
    bool nonzero = false;
    for (Index k = 0; k < n; ++k)
      if (abs_val(h.normal(k)) > tol) nonzero = true;
    if (!nonzero) return false;
  }

  detail::NormalizedRows<S> rows(arr);

  if (m <= n) {
    // Single subset: Gram determinant > 0 iff the m rows are independent.
    Mat<S> G = rows.N * rows.N.transpose();
    return abs_val(determinant<S>(G)) > tol;
  }

  // Every n-subset of normals must be independent.
  {
    std::vector<Index> idx(static_cast<size_t>(n));
    Mat<S> sub(n, n);
    std::function<bool(Index, Index)> rec = [&](Index start, Index depth) -> bool {
      if (depth == n) {
        for (Index r = 0; r < n; ++r) sub.row(r) = rows.N.row(idx[static_cast<size_t>(r)]);
        return abs_val(determinant<S>(sub)) > tol;
      }
      for (Index i = start; i <= m - (n - depth); ++i) {
        idx[static_cast<size_t>(depth)] = i;
        if (!rec(i + 1, depth + 1)) return false;
      }
      return true;
    };
    if (!rec(0, 0)) return false;
  }

  // Every (n+1)-subset must be inconsistent: augmented determinant nonzero.
  // Rows re-normalized with the offset included so the test is scale-free.
  {
    Mat<S> aug_rows(m, n + 1);
    for (Index j = 0; j < m; ++j) {
      S nrm = abs_val(rows.d(j));
      for (Index k = 0; k < n; ++k) {
        S a = abs_val(rows.N(j, k));
        if (nrm < a) nrm = a;
      }
      aug_rows.row(j).head(n) = rows.N.row(j) / nrm;
      aug_rows(j, n) = rows.d(j) / nrm;
    }
    std::vector<Index> idx(static_cast<size_t>(n + 1));
    Mat<S> sub(n + 1, n + 1);
    std::function<bool(Index, Index)> rec = [&](Index start, Index depth) -> bool {
      if (depth == n + 1) {
        for (Index r = 0; r < n + 1; ++r) sub.row(r) = aug_rows.row(idx[static_cast<size_t>(r)]);
        return abs_val(determinant<S>(sub)) > tol;
      }
      for (Index i = start; i <= m - (n + 1 - depth); ++i) {
        idx[static_cast<size_t>(depth)] = i;
        if (!rec(i + 1, depth + 1)) return false;
      }
      return true;
    };
    if (!rec(0, 0)) return false;
  }
  return true;
}

// (sum_{k<=n} C(m,k), C(m-1,n)); the m <= n case degenerates to (2^m, 0).
inline RegionCounts region_counts(long long m, long long n) {
  if (m < 1 || n < 1) throw UsageError("region_counts: m and n must be positive");
  RegionCounts rc;
  for (long long k = 0; k <= n; ++k) rc.total = checked_add(rc.total, binomial(m, k));
  rc.bounded = binomial(m - 1, n);
  return rc;
}

// Brute force over all 2^m candidates in lexicographic order ('-' < '+').
template <class S = double>
std::vector<RegionInfo<S>> enumerate_regions(const CoorientedArrangement<S>& arr,
                                             S margin = S(kFeasibilityMargin),
                                             S tol = ScalarTraits<S>::tolerance(),
                                             int cap = kArrangementCap) {
  if (!is_generic(arr, tol, cap)) throw NotGenericError("enumerate_regions: arrangement is not generic");
  const Index m = arr.size(), n = arr.dim;
  detail::RegionLp<S> lp(detail::NormalizedRows<S>(arr), tol);
  std::vector<RegionInfo<S>> out;
  const std::uint32_t total = 1u << m;
  for (std::uint32_t lex = 0; lex < total; ++lex) {
    std::uint32_t mask = 0;  // lex counts with hyperplane 0 most significant
    for (Index j = 0; j < m; ++j)
      if ((lex >> (m - 1 - j)) & 1u) mask |= (1u << j);
    LpResult<S> res = lp.margin(mask, m);
    if (res.status != LpStatus::Bounded || !(res.optimum > margin)) continue;
    RegionInfo<S> info;
    info.codeword = Codeword::from_mask(mask, m);
    info.witness = res.argmax.head(n);
    info.bounded = lp.region_bounded(mask);
    out.push_back(std::move(info));
  }
  return out;
}

template <class S = double>
std::optional<RegionInfo<S>> bounded_region(const CoorientedArrangement<S>& arr,
                                            S margin = S(kFeasibilityMargin),
                                            S tol = ScalarTraits<S>::tolerance(),
                                            int cap = kArrangementCap) {
  for (auto& r : enumerate_regions(arr, margin, tol, cap))
    if (r.bounded) return r;
  return std::nullopt;
}

template <class S = double>
std::vector<Codeword> missing_codewords(const CoorientedArrangement<S>& arr,
                                        S margin = S(kFeasibilityMargin),
                                        S tol = ScalarTraits<S>::tolerance(),
                                        int cap = kArrangementCap) {
  if (!is_generic(arr, tol, cap)) throw NotGenericError("missing_codewords: arrangement is not generic");
  const Index m = arr.size();
  detail::RegionLp<S> lp(detail::NormalizedRows<S>(arr), tol);
  std::vector<Codeword> out;
  const std::uint32_t total = 1u << m;
  for (std::uint32_t lex = 0; lex < total; ++lex) {
    std::uint32_t mask = 0;
    for (Index j = 0; j < m; ++j)
      if ((lex >> (m - 1 - j)) & 1u) mask |= (1u << j);
    LpResult<S> res = lp.margin(mask, m);
    if (res.status == LpStatus::Bounded && res.optimum > margin) continue;
    out.push_back(Codeword::from_mask(mask, m));
  }
  return out;
}

// Intersections with H_i, written in an orthonormal affine chart of H_i.
// Chart basis: Gram-Schmidt over the standard basis with the unit normal
// removed, accepting vectors in index order — deterministic, so induced
// codeword order is reproducible.
inline CoorientedArrangement<double> induced_arrangement(const CoorientedArrangement<double>& arr,
                                                         Index i, double tol = kTolerance,
                                                         int cap = kArrangementCap) {
  const Index m = arr.size(), n = arr.dim;
  if (n < 2) throw UsageError("induced_arrangement: dimension must be at least 2");
  if (i < 0 || i >= m) throw UsageError("induced_arrangement: hyperplane index out of range");
  if (!is_generic(arr, tol, cap)) throw NotGenericError("induced_arrangement: arrangement is not generic");

  const Hyperplane<double>& hi = arr.hyperplanes[static_cast<size_t>(i)];
  const Vecd u = hi.normal / hi.normal.norm();
  const Vecd x0 = -(hi.offset / hi.normal.norm()) * u;

  Matd Q(n, n - 1);
  Index have = 0;
  for (Index k = 0; k < n && have < n - 1; ++k) {
    Vecd v = Vecd::Zero(n);
    v(k) = 1.0;
    v -= v.dot(u) * u;
    for (Index j = 0; j < have; ++j) v -= v.dot(Q.col(j)) * Q.col(j);
    const double nrm = v.norm();
    if (nrm > 1e-9) Q.col(have++) = v / nrm;
  }
  if (have != n - 1) throw NumericalInstability("induced_arrangement: chart construction failed");

  CoorientedArrangement<double> out;
  out.dim = n - 1;
  for (Index j = 0; j < m; ++j) {
    if (j == i) continue;
    const Hyperplane<double>& hj = arr.hyperplanes[static_cast<size_t>(j)];
    Hyperplane<double> g;
    g.normal = Q.transpose() * hj.normal;
    g.offset = hj.normal.dot(x0) + hj.offset;
    out.hyperplanes.push_back(std::move(g));
  }
  return out;
}

struct FacetStats {
  long long total_facets = 0;
  Rational avg_facets;
};

// total = m * sum_{k<=n-1} C(m-1,k); average over regions counts each facet
// from both sides, hence 2*total / r(m,n).
inline FacetStats facet_statistics(long long m, long long n) {
  if (n < 1 || m <= n) throw UsageError("facet_statistics: requires m > n >= 1");
  FacetStats fs;
  long long s = 0;
  for (long long k = 0; k <= n - 1; ++k) s = checked_add(s, binomial(m - 1, k));
  fs.total_facets = checked_mul(m, s);
  fs.avg_facets = Rational(checked_mul(2, fs.total_facets), region_counts(m, n).total);
  return fs;
}

// Empirical facet count of one region, for cross-checking the formulas.
template <class S = double>
int region_facet_count(const CoorientedArrangement<S>& arr, const Codeword& code,
                       S margin = S(kFeasibilityMargin), S tol = ScalarTraits<S>::tolerance()) {
  detail::RegionLp<S> lp(detail::NormalizedRows<S>(arr), tol);
  const std::uint32_t mask = code.mask();
  int facets = 0;
  for (Index i = 0; i < arr.size(); ++i) {
    LpResult<S> res = lp.facet_margin(mask, i);
    if (res.status == LpStatus::Bounded && res.optimum > margin) ++facets;
  }
  return facets;
}

}  // namespace deadneuron
