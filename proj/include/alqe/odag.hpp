// Affine theory of ordered divisible abelian groups in the language
// {+, -, /\, \/, 0}: the rational model with its forced discrete metric,
// lattice-group normal forms, axiom checking, interval distances and the
// quantifier-free normal-form rewriter in one variable.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "alqe/riesz.hpp"
#include "alqe/syntax.hpp"

namespace alqe {

/// + (binary), - (unary), /\, \/ and 0, all 1-Lipschitz. Rational constants
/// appear in terms as literals and c*t as a divisible-group abbreviation.
Signature odag_signature();

using OdagAssignment = std::map<std::string, Rational>;

/// Rational linear combination of variables plus a constant.
struct LinearExpr {
  std::map<std::string, Rational> coefficients;  // no zero entries
  Rational constant;

  static LinearExpr variable(const std::string& name);
  static LinearExpr literal(const Rational& c);

  Rational coefficient(const std::string& var) const;
  Rational evaluate(const OdagAssignment& a) const;
  LinearExpr& operator+=(const LinearExpr& o);
  LinearExpr& operator*=(const Rational& r);
  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
  friend LinearExpr operator-(LinearExpr a) { return a *= Rational(-1); }
  friend bool operator==(const LinearExpr&, const LinearExpr&) = default;
  friend auto operator<=>(const LinearExpr& a, const LinearExpr& b) {
    return std::tie(a.coefficients, a.constant) <=> std::tie(b.coefficients, b.constant);
  }

  Term to_term() const;
};

/// Join over i of the meet over j of pieces[i][j]. Meets and joins are kept
/// sorted and free of duplicates.
struct MeetJoinNormalForm {
  std::vector<std::vector<LinearExpr>> joinands;

  Rational evaluate(const OdagAssignment& a) const;
  Term to_term() const;
};

/// Built from the distributive lattice laws, -(x /\ y) = -x \/ -y and
/// z + (x /\ y) = (z + x) /\ (z + y).
MeetJoinNormalForm term_normal_form(const Term& t);

/// Direct evaluation in the ordered group of rationals.
Rational evaluate_odag_term(const Term& t, const OdagAssignment& a);

struct BreakpointOptions {
  /// Interior sample points per cell between consecutive candidates.
  int refinement = 1;
};

/// Exact value in the rationals with the discrete metric: d(s,t) is 0 when
/// s = t and 1 otherwise. Each quantifier must have a quantifier-free body;
/// its extremum is taken over the zeros and pairwise crossings of the linear
/// pieces of every atom, the points between them, and one point beyond each
/// end. Atom values are constant on the open cells, so this is exact.
Rational eval_discreteQ(const Formula& f, const OdagAssignment& a, const BreakpointOptions& options = {});

struct AxiomInstance {
  std::string label;
  std::vector<std::string> vars;
  Formula lhs;
  Formula rhs;
};

std::vector<std::string> axiom_ids();
/// The identities making up axiom `id` ("A1".."A13"); A9 and A11 for
/// n = 1, 2, 3 and A12 for tuples of length 1, 2, 3.
std::vector<AxiomInstance> axiom_instances(std::string_view id);

struct AxiomCheckOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  int box = 10;
  int max_denominator = 10;
};

struct AxiomCounterexample {
  std::string instance;
  std::vector<std::pair<std::string, Rational>> witness;
  Rational lhs;
  Rational rhs;
};

struct AxiomReport {
  std::string axiom;
  bool passed = true;
  std::size_t assignments = 0;
  std::optional<AxiomCounterexample> counterexample;
};

/// Probes every assignment from {1, -1, 0} (in that order, first variable
/// slowest) and then `trials` seeded random rationals p/q with q <= the
/// denominator bound and |p/q| <= box. Stops at the first violation.
AxiomReport check_axiom(std::string_view id, const AxiomCheckOptions& options = {});

enum class IntervalKind {
  Closed,    // [a, b]
  LowerRay,  // [a, oo)
  UpperRay,  // (-oo, b]
};

/// |(a - x) \/ (x - b) \/ 0|, |(a - x) \/ 0| or |(x - b) \/ 0|. Throws
/// DomainError for a closed interval with a > b.
Formula interval_distance(IntervalKind kind, const Rational& a, const Rational& b, const std::string& var = "x");
/// inf t. d(x, (t \/ a) /\ b) and its one-sided versions.
Formula interval_distance_inf(IntervalKind kind, const Rational& a, const Rational& b, const std::string& var = "x");
bool interval_contains(IntervalKind kind, const Rational& a, const Rational& b, const Rational& x);

/// Output of the one-variable rewriter: a combination of constants and atoms
/// |x + a|, |(x + a) /\ b|, |(x + a) /\ (-x + b)|, |(x + a) /\ (-x + b) /\ c|,
/// or a diagnostic when the input is outside the handled cases.
struct LemmaRewrite {
  std::optional<SignedCombination> combination;
  std::string diagnostic;

  bool reduced() const { return combination.has_value(); }
};

/// Throws FragmentError when `f` has quantifiers or more than one free
/// variable. Every returned combination has been checked equal to `f` on a
/// breakpoint grid.
LemmaRewrite qf_lemma_rewrite(const Formula& f);

/// Renders d(t, 0) as |t| and coefficients in front: "2*|x + 1| - 1".
std::string to_string(const SignedCombination& c);

}  // namespace alqe
