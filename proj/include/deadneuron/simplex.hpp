#pragma once

#include "deadneuron/core.hpp"
#include "deadneuron/linalg.hpp"

#include <algorithm>
#include <vector>

namespace deadneuron {

enum class LpStatus { Infeasible, Bounded, Unbounded };

template <class S>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  S optimum = S(0);  // Bounded: objective value at argmax
  Vec<S> argmax;     // Bounded: a maximizer. Unbounded: a feasible point.
  Vec<S> ray;        // Unbounded: feasible direction with strictly increasing objective.
};

enum class Sense { Ge, Le };  // normal·x + offset >= 0   |   normal·x + offset <= 0

template <class S>
struct Constraint {
  Vec<S> normal;
  S offset = S(0);
  Sense sense = Sense::Ge;
};

// Dense two-phase tableau simplex over free variables (split into plus/minus
// parts), Bland's smallest-index rule throughout, so no cycling on degenerate
// bases. Robustness over speed: sizes here are tens of rows, not thousands.
// Exact scalar types run the same code with eps == 0.
template <class S>
class SimplexEngine {
 public:
  // maximize c·x subject to A x <= b, x free.
  LpResult<S> maximize_canonical(const Mat<S>& A, const Vec<S>& b, const Vec<S>& c, S eps) {
    const Index m = A.rows(), n = A.cols();
    if (b.size() != m || c.size() != n) throw DimensionMismatch("maximize_canonical: shape mismatch");

    if (m == 0) {  // full space: bounded iff the objective is identically zero
      LpResult<S> res;
      res.argmax = Vec<S>::Zero(n);
      bool zero_obj = true;
      for (Index k = 0; k < n; ++k)
        if (abs_val(c(k)) > eps) zero_obj = false;
      if (zero_obj) {
        res.status = LpStatus::Bounded;
        res.optimum = S(0);
      } else {
        res.status = LpStatus::Unbounded;
        res.ray = c;
        normalize_inf(res.ray);
      }
      return res;
    }

    const Index nv = 2 * n;  // split variable columns: x_k = y_{2k} - y_{2k+1}
    Index na = 0;
    for (Index i = 0; i < m; ++i)
      if (b(i) < S(0)) ++na;
    const Index ncols = nv + m + na;

    tab_.setZero(m + 1, ncols + 1);
    basis_.assign(static_cast<size_t>(m), -1);
    active_.assign(static_cast<size_t>(m), 1);

    S binf = S(0);
    for (Index i = 0; i < m; ++i) {
      S v = abs_val(b(i));
      if (binf < v) binf = v;
    }

    Index art = 0;
    for (Index i = 0; i < m; ++i) {
      const bool flip = b(i) < S(0);
      const S sgn = flip ? S(-1) : S(1);
      for (Index k = 0; k < n; ++k) {
        tab_(i, 2 * k) = sgn * A(i, k);
        tab_(i, 2 * k + 1) = -sgn * A(i, k);
      }
      tab_(i, nv + i) = sgn;  // slack
      tab_(i, ncols) = sgn * b(i);
      if (flip) {
        tab_(i, nv + m + art) = S(1);
        basis_[static_cast<size_t>(i)] = static_cast<int>(nv + m + art);
        ++art;
      } else {
        basis_[static_cast<size_t>(i)] = static_cast<int>(nv + i);
      }
    }

    const Index obj_row = m;
    pivots_left_ = 10000 + 100 * static_cast<long>(m + ncols);
    skip_.assign(static_cast<size_t>(ncols), 0);

    if (na > 0) {
      // Phase 1: maximize -(sum of artificials); priced objective row is the
      // sum of the flipped rows (artificial entries cancel to zero).
      tab_.row(obj_row).setZero();
      for (Index i = 0; i < m; ++i)
        if (basis_[static_cast<size_t>(i)] >= static_cast<int>(nv + m)) tab_.row(obj_row) += tab_.row(i);
      for (Index ac = nv + m; ac < ncols; ++ac) tab_(obj_row, ac) -= S(1);
      const S feas_tol = eps * (S(1) + binf);
      run_pivots(m, ncols, ncols, eps, /*phase1=*/true, feas_tol);
      const S art_sum = tab_(obj_row, ncols);
      if (art_sum > feas_tol) {
        LpResult<S> res;
        res.status = LpStatus::Infeasible;
        return res;
      }
      // Drive leftover basic artificials out (their values are zero), or mark
      // the row redundant. Leaving one basic would let later pivots push it
      // positive, silently relaxing the constraint.
      for (Index i = 0; i < m; ++i) {
        if (basis_[static_cast<size_t>(i)] < static_cast<int>(nv + m)) continue;
        Index j = -1;
        for (Index jj = 0; jj < nv + m; ++jj)
          if (abs_val(tab_(i, jj)) > eps) { j = jj; break; }
        if (j >= 0) pivot(i, j, m);
        else active_[static_cast<size_t>(i)] = 0;
      }
    }

    // Phase 2: price the real objective over the current basis.
    tab_.row(obj_row).setZero();
    for (Index k = 0; k < n; ++k) {
      tab_(obj_row, 2 * k) = c(k);
      tab_(obj_row, 2 * k + 1) = -c(k);
    }
    for (Index i = 0; i < m; ++i) {
      if (!active_[static_cast<size_t>(i)]) continue;
      const int bcol = basis_[static_cast<size_t>(i)];
      S cb = S(0);
      if (bcol < static_cast<int>(nv)) cb = (bcol % 2 == 0) ? c(bcol / 2) : S(-c(bcol / 2));
      if (cb != S(0)) tab_.row(obj_row) -= cb * tab_.row(i);
    }
    for (;;) {
      const Index unbounded_col = run_pivots(m, ncols, nv + m, eps, /*phase1=*/false);
      if (unbounded_col < 0) break;
      // Candidate ray from the tableau. Verify it against the original data
      // before trusting it: in a degenerate tableau, rounding can leave a
      // column with positive reduced cost and no pivotable row even though
      // the problem is bounded. Such a column is noise; drop it and resume.
      Vec<S> cols = Vec<S>::Zero(ncols);
      cols(unbounded_col) = S(1);
      for (Index i = 0; i < m; ++i)
        if (active_[static_cast<size_t>(i)]) cols(basis_[static_cast<size_t>(i)]) = -tab_(i, unbounded_col);
      Vec<S> ray(n);
      for (Index k = 0; k < n; ++k) ray(k) = cols(2 * k) - cols(2 * k + 1);
      normalize_inf(ray);
      bool genuine = c.dot(ray) > S(0);
      for (Index i = 0; genuine && i < m; ++i) {
        const S drift = A.row(i).dot(ray);
        if constexpr (ScalarTraits<S>::is_exact) {
          if (drift > S(0)) genuine = false;
        } else {
          S row_scale = S(0);
          for (Index k = 0; k < n; ++k) {
            const S a = abs_val(A(i, k));
            if (row_scale < a) row_scale = a;
          }
          if (drift > S(1e-7) * (S(1) + row_scale)) genuine = false;
        }
      }
      if (genuine) {
        LpResult<S> res;
        res.status = LpStatus::Unbounded;
        res.argmax = extract_x(m, n, nv, ncols);
        res.ray = ray;
        return res;
      }
      skip_[static_cast<size_t>(unbounded_col)] = 1;
    }

    LpResult<S> res;
    res.status = LpStatus::Bounded;
    res.argmax = extract_x(m, n, nv, ncols);
    res.optimum = c.dot(res.argmax);
    if constexpr (!ScalarTraits<S>::is_exact) {
      const S slack_tol = S(1e-6) * (S(1) + binf);
      for (Index i = 0; i < m; ++i) {
        S lhs = A.row(i).dot(res.argmax);
        if (lhs - b(i) > slack_tol) throw NumericalInstability("simplex: optimum violates a constraint");
      }
    }
    return res;
  }

 private:
  // Bland pivot loop. Returns -1 on optimality, or the entering column index
  // when no row limits the step (phase 2: an unboundedness candidate, to be
  // verified by the caller). Phase 1 stops once the artificial sum is within
  // stop_tol of zero: the basis is feasible, and any remaining entering
  // candidates are rounding noise (an exact phase-1 objective is bounded by
  // zero, so a stalled ratio test there also just ends the phase and leaves
  // the verdict to the artificial-sum check).
  Index run_pivots(Index m, Index ncols, Index allowed_cols, S eps, bool phase1, S stop_tol = S(0)) {
    const Index obj_row = m;
    for (;;) {
      if (phase1 && !(tab_(obj_row, ncols) > stop_tol)) return -1;
      Index enter = -1;
      for (Index j = 0; j < allowed_cols; ++j)
        if (tab_(obj_row, j) > eps && !skip_[static_cast<size_t>(j)]) { enter = j; break; }
      if (enter < 0) return -1;

      Index leave = -1;
      S best_ratio = S(0);
      for (Index i = 0; i < m; ++i) {
        if (!active_[static_cast<size_t>(i)]) continue;
        const S coef = tab_(i, enter);
        if (!(coef > eps)) continue;
        S rhs = tab_(i, ncols);
        if (rhs < S(0)) rhs = S(0);  // degenerate row, rounding only
        const S ratio = rhs / coef;
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)]))
          { leave = i; best_ratio = ratio; }
      }
      if (leave < 0) {
        if (phase1) return -1;
        return enter;
      }
      pivot(leave, enter, m);
    }
  }

  void pivot(Index row, Index col, Index m) {
    if (--pivots_left_ < 0) throw NumericalInstability("simplex: pivot budget exhausted (cycling)");
    std::fill(skip_.begin(), skip_.end(), static_cast<signed char>(0));
    tab_.row(row) /= tab_(row, col);
    for (Index r = 0; r <= m; ++r) {
      if (r == row) continue;
      if (r < m && !active_[static_cast<size_t>(r)]) continue;
      const S f = tab_(r, col);
      if (f != S(0)) tab_.row(r) -= f * tab_.row(row);
    }
    basis_[static_cast<size_t>(row)] = static_cast<int>(col);
  }

  Vec<S> extract_x(Index m, Index n, Index nv, Index ncols) const {
    Vec<S> split = Vec<S>::Zero(nv);
    for (Index i = 0; i < m; ++i) {
      if (!active_[static_cast<size_t>(i)]) continue;
      const int bcol = basis_[static_cast<size_t>(i)];
      if (bcol < static_cast<int>(nv)) split(bcol) = tab_(i, ncols);
    }
    Vec<S> x(n);
    for (Index k = 0; k < n; ++k) x(k) = split(2 * k) - split(2 * k + 1);
    return x;
  }

  static void normalize_inf(Vec<S>& v) {
    S nrm = S(0);
    for (Index k = 0; k < v.size(); ++k) {
      S a = abs_val(v(k));
      if (nrm < a) nrm = a;
    }
    if (nrm > S(0)) v /= nrm;
  }

  Mat<S> tab_;
  std::vector<int> basis_;
  std::vector<signed char> active_;
  std::vector<signed char> skip_;
  long pivots_left_ = 0;
};

// maximize objective·x over the intersection of half-spaces
// { x : normal·x + offset >= 0 (or <= 0) }. An empty constraint list is the
// whole space. Trichotomy result; see LpResult.
template <class S>
LpResult<S> maximize_linear(const Vec<S>& objective, const std::vector<Constraint<S>>& constraints,
                            S eps = ScalarTraits<S>::tolerance()) {
  const Index n = objective.size();
  const Index m = static_cast<Index>(constraints.size());
  Mat<S> A(m, n);
  Vec<S> b(m);
  for (Index i = 0; i < m; ++i) {
    const Constraint<S>& cn = constraints[static_cast<size_t>(i)];
    if (cn.normal.size() != n) throw DimensionMismatch("maximize_linear: constraint dimension mismatch");
    if (cn.sense == Sense::Ge) {
      A.row(i) = -cn.normal.transpose();
      b(i) = cn.offset;
    } else {
      A.row(i) = cn.normal.transpose();
      b(i) = -cn.offset;
    }
  }
  SimplexEngine<S> engine;
  return engine.maximize_canonical(A, b, objective, eps);
}

}  // namespace deadneuron
