#pragma once

#include "deadneuron/core.hpp"

namespace deadneuron {

template <class S> S abs_val(const S& x) { return x < S(0) ? S(-x) : x; }

// Gaussian elimination with partial pivoting, templated so exact scalars run
// the identical algorithm with a zero threshold. A is consumed by value.
template <class S>
Vec<S> solve_linear(Mat<S> A, Vec<S> b, S tol = ScalarTraits<S>::tolerance()) {
  const Index n = A.rows();
  if (A.cols() != n) throw DimensionMismatch("solve_linear: matrix not square");
  if (b.size() != n) throw DimensionMismatch("solve_linear: rhs size mismatch");

  if (n == 0) return Vec<S>(0);
  S scale = S(0);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      S v = abs_val(A(i, j));
      if (scale < v) scale = v;
    }
  if (scale == S(0)) throw SingularError("solve_linear: zero matrix");
  const S thresh = tol * scale;

  for (Index c = 0; c < n; ++c) {
    Index piv = c;
    for (Index r = c + 1; r < n; ++r)
      if (abs_val(A(piv, c)) < abs_val(A(r, c))) piv = r;
    if (abs_val(A(piv, c)) <= thresh) throw SingularError("solve_linear: rank-deficient within tolerance");
    if (piv != c) { A.row(piv).swap(A.row(c)); std::swap(b(piv), b(c)); }
    for (Index r = c + 1; r < n; ++r) {
      S f = A(r, c) / A(c, c);
      if (f == S(0)) continue;
      A.row(r).tail(n - c) -= f * A.row(c).tail(n - c);
      b(r) -= f * b(c);
    }
  }

  Vec<S> x(n);
  for (Index r = n - 1; r >= 0; --r) {
    S acc = b(r);
    for (Index c = r + 1; c < n; ++c) acc -= A(r, c) * x(c);
    x(r) = acc / A(r, r);
  }
  return x;
}

// Determinant by elimination; no threshold, exact sign bookkeeping.
template <class S>
S determinant(Mat<S> A) {
  const Index n = A.rows();
  if (A.cols() != n) throw DimensionMismatch("determinant: matrix not square");
  if (n == 0) return S(1);
  S det = S(1);
  for (Index c = 0; c < n; ++c) {
    Index piv = c;
    for (Index r = c + 1; r < n; ++r)
      if (abs_val(A(piv, c)) < abs_val(A(r, c))) piv = r;
    if (A(piv, c) == S(0)) return S(0);
    if (piv != c) { A.row(piv).swap(A.row(c)); det = -det; }
    det *= A(c, c);
    for (Index r = c + 1; r < n; ++r) {
      S f = A(r, c) / A(c, c);
      if (f == S(0)) continue;
      A.row(r).tail(n - c) -= f * A.row(c).tail(n - c);
    }
  }
  return det;
}

}  // namespace deadneuron
