#pragma once

#include "deadneuron/arrangement.hpp"
#include "deadneuron/core.hpp"
#include "deadneuron/linalg.hpp"

#include <optional>

namespace deadneuron {

// Coordinate-axis intersection values (q_1, ..., q_n) of a hyperplane with
// q_j = -offset / normal_j. Only defined when every component and the offset
// are bounded away from zero.
struct InterceptTuple {
  Vecd values;
};

enum class PartitionTag { P, S };

// Membership of a hyperplane in the partition {P, S_1, ..., S_n} of the
// hyperplanes positively proportional to a reference tuple p: lambdas are the
// per-axis ratios q_j / p_j, S(axis) means that ratio strictly dominates.
struct PartitionClass {
  PartitionTag tag = PartitionTag::P;
  Index axis = -1;  // 0-based dominating axis, valid when tag == S
  Vecd lambdas;
};

inline std::optional<InterceptTuple> intercept_tuple(const Hyperplane<double>& h,
                                                     double eps = kTolerance) {
  if (std::abs(h.offset) <= eps) return std::nullopt;
  InterceptTuple q;
  q.values.resize(h.normal.size());
  for (Index j = 0; j < h.normal.size(); ++j) {
    if (std::abs(h.normal(j)) <= eps) return std::nullopt;
    q.values(j) = -h.offset / h.normal(j);
    if (std::abs(q.values(j)) <= eps) return std::nullopt;
  }
  return q;
}

// Returns nullopt when h is not positively proportional to p (undefined
// intercepts or a sign mismatch) — a counted outcome, not an error. Otherwise
// tag = P when two ratios agree within relative eps, else S(argmax).
inline std::optional<PartitionClass> classify(const InterceptTuple& p, const Hyperplane<double>& h,
                                              double eps = kTolerance) {
  if (p.values.size() != h.normal.size()) throw DimensionMismatch("classify: tuple dimension mismatch");
  auto q = intercept_tuple(h, eps);
  if (!q) return std::nullopt;
  const Index n = p.values.size();
  PartitionClass out;
  out.lambdas.resize(n);
  for (Index j = 0; j < n; ++j) {
    if (q->values(j) * p.values(j) <= 0.0) return std::nullopt;
    out.lambdas(j) = q->values(j) / p.values(j);
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double big = std::max(out.lambdas(i), out.lambdas(j));
      if (std::abs(out.lambdas(i) - out.lambdas(j)) <= eps * big) {
        out.tag = PartitionTag::P;
        return out;
      }
    }
  }
  out.tag = PartitionTag::S;
  Index arg = 0;
  for (Index j = 1; j < n; ++j)
    if (out.lambdas(j) > out.lambdas(arg)) arg = j;
  out.axis = arg;
  return out;
}

// H lies in the sub-family H^1_p iff every ratio is at most 1.
inline std::optional<bool> in_h1(const InterceptTuple& p, const Hyperplane<double>& h,
                                 double eps = kTolerance) {
  auto cls = classify(p, h, eps);
  if (!cls) return std::nullopt;
  for (Index j = 0; j < cls->lambdas.size(); ++j)
    if (cls->lambdas(j) > 1.0 + eps) return false;
  return true;
}

// Intercept tuple of the image hyperplane P_+ for a first layer with n+1 rows
// in dimension n: vertex v_i solves the subsystem omitting row i, and
// p_i = W.row(i) . v_i + b_i.
inline InterceptTuple p_plus_intercepts(const Matd& W, const Vecd& b, double eps = kTolerance) {
  const Index n = W.cols();
  if (W.rows() != n + 1 || b.size() != n + 1)
    throw DimensionMismatch("p_plus_intercepts: need n+1 rows in dimension n");
  InterceptTuple p;
  p.values.resize(n + 1);
  Matd sub(n, n);
  Vecd rhs(n);
  for (Index i = 0; i < n + 1; ++i) {
    Index r = 0;
    for (Index j = 0; j < n + 1; ++j) {
      if (j == i) continue;
      sub.row(r) = W.row(j);
      rhs(r) = -b(j);
      ++r;
    }
    Vecd v;
    try {
      v = solve_linear<double>(sub, rhs);
    } catch (const SingularError&) {
      throw NotGenericError("p_plus_intercepts: singular subsystem");
    }
    p.values(i) = W.row(i).dot(v) + b(i);
    if (std::abs(p.values(i)) <= eps)
      throw NotGenericError("p_plus_intercepts: vertex lies on the remaining hyperplane");
  }
  return p;
}

}  // namespace deadneuron
