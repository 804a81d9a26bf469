#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace deadneuron {

template <class S> using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S> using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

using Vecd = Vec<double>;
using Matd = Mat<double>;
using Index = Eigen::Index;

// Default thresholds. Everything that compares against them takes them as a
// parameter, so callers can tighten or relax per run (--tolerance on the CLI).
inline constexpr double kTolerance = 1e-9;          // rank / pivot / margin-of-zero tests
inline constexpr double kFeasibilityMargin = 1e-7;  // strict-interior margin for region LPs

// Exact scalars (e.g. boost rationals) get a literal-zero threshold; floating
// point gets kTolerance. Kernels are templated on S and ask this trait.
template <class S> struct ScalarTraits {
  static constexpr bool is_exact = !std::is_floating_point_v<S>;
  static S tolerance() {
    if constexpr (is_exact) return S(0);
    else return S(kTolerance);
  }
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotGenericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SizeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalInstability : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegenerateRowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct WrongWidthError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct OutOfTheoremRangeError : std::domain_error {
  using std::domain_error::domain_error;
};

inline long long checked_add(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer overflow in addition");
  return r;
}
inline long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in multiplication");
  return r;
}

// Exact small rational, for closed-form probabilities and facet averages.
struct Rational {
  long long num = 0;
  long long den = 1;  // > 0, gcd(num, den) == 1

  Rational() = default;
  Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
};

// C(m, k) with overflow detection; 0 for k < 0 or k > m.
inline long long binomial(long long m, long long k) {
  if (k < 0 || k > m) return 0;
  if (k > m - k) k = m - k;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) {
    r = checked_mul(r, m - k + i);
    r /= i;  // product of i consecutive integers is divisible by i!
  }
  return r;
}

}  // namespace deadneuron
