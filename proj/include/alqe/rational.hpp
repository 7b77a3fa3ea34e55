// Exact rational scalar used for every coefficient, metric value and formula
// value in the workbench.
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include <Eigen/Core>

namespace alqe {

/// Canonical reduced fraction p/q with q >= 1, arbitrary precision.
class Rational {
 public:
  Rational() : value_(0) {}
  Rational(int v) : value_(v) {}          // NOLINT(google-explicit-constructor)
  Rational(long v) : value_(v) {}         // NOLINT(google-explicit-constructor)
  Rational(long long v) : value_(mpz_class(std::to_string(v))) {}  // NOLINT
  Rational(unsigned long v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(long long num, long long den);
  explicit Rational(mpq_class v) : value_(std::move(v)) { value_.canonicalize(); }

  /// Parses "n", "-n", "p/q" or "-p/q" (whitespace not allowed). Throws
  /// std::invalid_argument on malformed text or a zero denominator.
  static Rational parse(std::string_view text);

  const mpq_class& get() const { return value_; }
  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }

  bool is_zero() const { return sgn(value_) == 0; }
  bool is_integer() const { return value_.get_den() == 1; }
  int sign() const { return sgn(value_); }

  /// Requires is_integer() and a value representable as long.
  long to_long() const;
  double to_double() const { return value_.get_d(); }

  /// "n" for integers, otherwise "p/q".
  std::string str() const;

  Rational abs() const { return Rational(mpq_class(::abs(value_))); }
  Rational inverse() const;

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class value_;
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational abs(const Rational& a) { return a.abs(); }

struct RationalHash {
  std::size_t operator()(const Rational& r) const { return std::hash<std::string>{}(r.str()); }
};

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RationalMatrix = Matrix<Rational>;
using RationalVector = Vector<Rational>;

/// Lexicographic order on dense vectors; used to key clouds and tables.
struct VectorLess {
  template <typename Derived>
  bool operator()(const Eigen::MatrixBase<Derived>& a, const Eigen::MatrixBase<Derived>& b) const {
    const Eigen::Index n = std::min(a.size(), b.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a(i) < b(i)) return true;
      if (b(i) < a(i)) return false;
    }
    return a.size() < b.size();
  }
};

}  // namespace alqe

namespace Eigen {
template <>
struct NumTraits<alqe::Rational> : GenericNumTraits<alqe::Rational> {
  using Real = alqe::Rational;
  using NonInteger = alqe::Rational;
  using Nested = alqe::Rational;
  using Literal = alqe::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 32,
  };
  static inline int digits10() { return 0; }
  static inline alqe::Rational epsilon() { return alqe::Rational(0); }
  static inline alqe::Rational dummy_precision() { return alqe::Rational(0); }
};
}  // namespace Eigen
