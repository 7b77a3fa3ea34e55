// Riesz-space rewriting: inclusion-exclusion for lattice connectives,
// elimination of a negated meet, and single-atom encoders for disjunctions in
// rings and for equations in Boolean algebras.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "alqe/semantics.hpp"

namespace alqe {

struct SignedTerm {
  Rational coefficient;
  Formula formula;
};

/// sum_i coefficient_i * formula_i
struct SignedCombination {
  std::vector<SignedTerm> terms;

  Formula to_formula() const;
  Rational evaluate(const FiniteStructure& m, const Assignment& a = {}) const;
};

inline constexpr std::size_t kDefaultExpansionCap = 6;

/// f_1 \/ ... \/ f_n as sum over nonempty J of (-1)^(|J|+1) times the meet of
/// f_J. Subsets are listed by size, then lexicographically. Throws
/// DomainError for an empty list or n above `cap`.
SignedCombination inclusion_exclusion_join(const std::vector<Formula>& fs, std::size_t cap = kDefaultExpansionCap);
/// The dual: meets expanded through joins.
SignedCombination inclusion_exclusion_meet(const std::vector<Formula>& fs, std::size_t cap = kDefaultExpansionCap);

/// (eta \/ theta) - theta, which agrees with eta /\ ~theta on {0,1} values.
Formula neg_meet_rewrite(const Formula& eta, const Formula& theta);

/// lhs = rhs, read as the condition d(lhs, rhs) = 0.
struct AtomicEquation {
  Term lhs;
  Term rhs;

  Formula as_formula() const { return Formula::dist(lhs, rhs); }
  std::string str() const { return to_string(lhs) + " = " + to_string(rhs); }
};

/// (p = 0) or (q = 0) encoded as p*q = 0.
AtomicEquation ring_or_atoms(const Term& p, const Term& q);

enum class BooleanEncoding {
  Eq,    // a = b  as  (a \/ b) /\ (a' \/ b') = 0
  Conj,  // a = 0 and b = 0  as  a \/ b = 0
};
AtomicEquation boolean_atoms(BooleanEncoding kind, const Term& a, const Term& b);

struct ProbabilityCheck {
  bool holds;
  /// First pair (x, y) in universe order where the identity fails.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// Checks mu(x /\ y) + mu(x \/ y) = mu(x) + mu(y) with mu(x) = d(x, 0) for all
/// pairs. With `literal` the right side is mu(x) + mu(x) instead. Throws
/// DomainError when the structure fails validation or lacks /\, \/ or 0.
ProbabilityCheck probability_identity_check(const FiniteStructure& b, bool literal = false);

}  // namespace alqe
