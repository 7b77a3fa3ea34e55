// Quantifier elimination for the affine theory of vector spaces over a prime
// field F_q, by interpolation over the lines of F_q^n.
//
// Every quantifier-free formula in x1..xn is r + sum r_l |a_l . x| where |v|
// is 0 at v = 0 and 1 otherwise. A sup over y of such a formula is invariant
// under scaling x, so it is determined by its values at 0 and at one point per
// line; those values are matched by s0 + sum s_l (1 - |b_l . x|) by solving an
// exact linear system whose matrix is invertible.
#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "alqe/rational.hpp"
#include "alqe/syntax.hpp"

namespace alqe {

using FqVector = std::vector<int>;

class PrimeField {
 public:
  explicit PrimeField(int q);

  int q() const { return q_; }
  int reduce(long long v) const;
  int add(int a, int b) const { return (a + b) % q_; }
  int neg(int a) const { return a == 0 ? 0 : q_ - a; }
  int mul(int a, int b) const { return static_cast<int>(static_cast<long long>(a) * b % q_); }
  int inverse(int a) const;
  int dot(const FqVector& a, const FqVector& b) const;
  /// Image of a rational whose denominator is a unit mod q.
  int from_rational(const Rational& r) const;

 private:
  int q_;
};

/// Scales so the first nonzero coordinate is 1; the zero vector is returned
/// unchanged.
FqVector canonical_line(const PrimeField& f, FqVector v);

/// One vector per line of F_q^n, first nonzero coordinate 1, lexicographic.
std::vector<FqVector> line_representatives(int q, int n);

struct InterpolationSystem {
  int q;
  int n;
  std::vector<FqVector> representatives;
  /// Rows are the points 0, b_1..b_m; columns the functions 1 and
  /// 1 - |b_k . x|.
  RationalMatrix a;
  RationalMatrix a_inverse;
  /// The m x m block 1 - |b_l . b_k|.
  RationalMatrix u;
};

/// Built once per (q, n) and cached; refuses m > 5000. A singular matrix is a
/// hard Error.
std::shared_ptr<const InterpolationSystem> interpolation_system(int q, int n);

/// r + sum r_l |a_l . x| with canonical, pairwise distinct, nonzero atoms and
/// nonzero coefficients.
struct QFNormalForm {
  int q = 2;
  int n = 0;
  Rational constant;
  std::map<FqVector, Rational> terms;

  Rational evaluate(const FqVector& point) const;
  QFNormalForm& add_atom(FqVector a, const Rational& coefficient);
  QFNormalForm& operator+=(const QFNormalForm& other);
  QFNormalForm& operator*=(const Rational& r);

  friend bool operator==(const QFNormalForm&, const QFNormalForm&) = default;
};

/// Term and formula language: 0, +, - (unary and binary), integer multiples
/// c*t and |t| = d(t,0). Throws FragmentError on quantifiers or lattice
/// connectives and SymbolError on foreign symbols or variables outside `vars`.
QFNormalForm qf_normalize(const Formula& f, int q, const std::vector<std::string>& vars);

/// sup over the last of n + 1 variables.
QFNormalForm eliminate_one(const QFNormalForm& psi);

/// Innermost-first elimination; inf y. g is -sup y. -g. `vars` must contain
/// every free variable of `f`.
QFNormalForm eliminate_to_normal_form(const Formula& f, int q, const std::vector<std::string>& vars);
Formula eliminate_all(const Formula& f, int q, const std::vector<std::string>& vars);

Formula to_formula(const QFNormalForm& nf, const std::vector<std::string>& vars);
/// "2 - |x|", "1/2 + |x + 2*y|".
std::string to_string(const QFNormalForm& nf, const std::vector<std::string>& vars);

/// Independent oracle: direct recursive evaluation in F_q with quantifiers
/// enumerated and the discrete metric. Accepts lattice connectives too.
Rational brute_force(const Formula& f, int q, const std::vector<std::string>& vars, const FqVector& point);

/// All points of F_q^n in lexicographic order.
std::vector<FqVector> all_points(int q, int n);

}  // namespace alqe
