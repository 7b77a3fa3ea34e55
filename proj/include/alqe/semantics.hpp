// Finite metric structures, validation against the Lipschitz signature, and
// an exact exhaustive evaluator for formulas.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alqe/rational.hpp"
#include "alqe/syntax.hpp"

namespace alqe {

/// Row-major index of a tuple over a universe of `size` elements.
std::size_t tuple_index(std::span<const std::size_t> tuple, std::size_t size);
std::vector<std::size_t> tuple_at(std::size_t index, int arity, std::size_t size);
/// size^arity, throwing DomainError past `cap`.
std::size_t tuple_count(std::size_t size, int arity, std::size_t cap = static_cast<std::size_t>(-1));

/// A structure with finite universe. Relation tables hold values in [0,1]
/// (checked by validate, not on construction), function tables hold element
/// indices; both are flat and indexed by tuple_index.
class FiniteStructure {
 public:
  FiniteStructure(Signature sig, std::vector<std::string> universe, RationalMatrix metric);

  FiniteStructure& set_relation(const std::string& name, std::vector<Rational> table);
  FiniteStructure& set_function(const std::string& name, std::vector<std::size_t> table);

  const Signature& signature() const { return sig_; }
  std::size_t size() const { return universe_.size(); }
  const std::vector<std::string>& universe() const { return universe_; }
  const RationalMatrix& metric() const { return metric_; }
  const Rational& distance(std::size_t a, std::size_t b) const { return metric_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)); }

  const std::vector<Rational>* relation_table(std::string_view name) const;
  const std::vector<std::size_t>* function_table(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view id) const;

  friend bool operator==(const FiniteStructure& a, const FiniteStructure& b);

 private:
  Signature sig_;
  std::vector<std::string> universe_;
  RationalMatrix metric_;
  std::map<std::string, std::vector<Rational>, std::less<>> relations_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> functions_;
};

struct Violation {
  enum class Kind {
    MissingTable,
    MetricRange,
    MetricDiagonal,
    MetricSymmetry,
    MetricSeparation,
    Triangle,
    RelationRange,
    RelationLipschitz,
    FunctionRange,
    FunctionLipschitz,
  };
  Kind kind;
  std::string symbol;
  /// Offending tuple(s) as element indices; Lipschitz and metric witnesses
  /// carry both tuples of the pair.
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks metric axioms (range first), relation ranges and Lipschitz bounds.
///
/// Lipschitz conditions are checked on pairs of tuples differing in a single
/// coordinate. For the sum metric on tuples this is equivalent to the full
/// pairwise condition: walk from one tuple to the other one coordinate at a
/// time and add up the triangle inequalities.
ValidationReport validate(const FiniteStructure& m);

using Assignment = std::map<std::string, std::size_t>;

std::size_t evaluate_term(const FiniteStructure& m, const Term& t, const Assignment& a = {});
/// Exact value; sup/inf range over the whole universe, meet/join are min/max
/// and ~θ is 1 - θ. Throws EvaluationError on unbound variables or symbols
/// without a table.
Rational evaluate(const FiniteStructure& m, const Formula& f, const Assignment& a = {});

/// Closed conditions only; throws FragmentError when either side has free
/// variables.
bool check_condition(const FiniteStructure& m, const Condition& c);
bool check_condition(const FiniteStructure& m, std::string_view text);

/// Syntactic Lipschitz constant of `f` in `var`, composed from the
/// signature's constants (quantifiers and lattice connectives do not increase
/// it).
Rational lipschitz_bound(const Formula& f, const std::string& var, const Signature& sig);

/// Classical structure: discrete {0,1} metric, boolean relation tables.
FiniteStructure classical_to_structure(Signature sig, std::vector<std::string> universe,
                                       const std::map<std::string, std::vector<bool>>& relations,
                                       const std::map<std::string, std::vector<std::size_t>>& functions);

/// {+, -, 0} with scalar multiples written as `c*t`; all constants 1.
Signature vector_space_signature();
/// {+, -, *, 0, 1}; all constants 1.
Signature ring_signature();
/// {/\, \/, compl, 0, 1}; all constants 1.
Signature boolean_algebra_signature();

bool is_prime(long n);

/// F_q as a one-dimensional vector space over itself, discrete metric.
FiniteStructure prime_field_vector_space(int q);
/// F_q in the ring language, discrete metric.
FiniteStructure prime_field_ring(int q);
/// The power set algebra 2^k with d(x,y) = mu(x xor y), mu given by
/// strictly positive atom weights summing to 1. Elements are bit strings,
/// most significant atom first.
FiniteStructure boolean_algebra(int k, const std::vector<Rational>& atom_weights);

}  // namespace alqe
