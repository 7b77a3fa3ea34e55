// Finite fragments of formulas in context, the type vectors tuples realize in
// finite structures, and the convex geometry of the resulting clouds.
//
// Everything is relative to a realized cloud: extreme points here are the
// vertices of the hull of the vectors seen, not extreme types of a theory.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "alqe/semantics.hpp"

namespace alqe {

/// Ordered by inclusion: atomic formulas are quantifier-free, quantifier-free
/// formulas are infimal (with no quantified block).
enum class FormulaTag { Atomic, QuantifierFree, Infimal, General };

std::string_view tag_name(FormulaTag tag);
/// Accepts atomic, qf, quantifier-free, infimal, general.
std::optional<FormulaTag> parse_tag(std::string_view text);
/// Smallest tag the formula's shape allows. Constants count as quantifier-free.
FormulaTag detect_tag(const Formula& f);

struct FragmentFormula {
  Formula formula;
  FormulaTag tag;
};

class Fragment {
 public:
  /// Throws DomainError when there are no formulas or a declared tag is below
  /// the detected one, SymbolError when a formula has a free variable outside
  /// `vars`.
  Fragment(std::vector<std::string> vars, std::vector<FragmentFormula> formulas);
  /// Tags detected from shape.
  Fragment(std::vector<std::string> vars, const std::vector<Formula>& formulas);

  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<FragmentFormula>& formulas() const { return formulas_; }
  std::size_t arity() const { return vars_.size(); }
  std::size_t size() const { return formulas_.size(); }

 private:
  std::vector<std::string> vars_;
  std::vector<FragmentFormula> formulas_;
};

/// One formula per line, optionally ending in "@tag"; blank lines and lines
/// starting with '#' are skipped. A line "vars: x1 x2" fixes the context;
/// otherwise the free variables in order of first appearance are used, padded
/// with fresh names up to `arity` when it is given.
Fragment parse_fragment(std::string_view text, const Signature& sig, std::optional<std::size_t> arity = std::nullopt);
Fragment load_fragment_file(const std::string& path, const Signature& sig,
                            std::optional<std::size_t> arity = std::nullopt);

struct Realization {
  std::string structure;
  std::vector<std::size_t> tuple;

  friend bool operator==(const Realization&, const Realization&) = default;
};

struct TypeVector {
  std::vector<Rational> values;
  std::vector<Realization> realizations;
};

/// Distinct value vectors in lexicographic order; realizations of equal
/// vectors are merged.
struct TypeCloud {
  std::vector<TypeVector> vectors;

  static TypeCloud from(std::vector<TypeVector> vectors);
  std::size_t size() const { return vectors.size(); }
  std::optional<std::size_t> find(const std::vector<Rational>& values) const;
};

inline constexpr std::size_t kDefaultTupleCap = 4096;

/// One vector per n-tuple of `m`. Throws DomainError when |M|^n exceeds `cap`
/// and when `m` fails validation.
TypeCloud realized_types(const FiniteStructure& m, const Fragment& fragment, const std::string& label = "M",
                         std::size_t cap = kDefaultTupleCap);

/// Nonnegative weights summing to 1 with sum_i w_i * points[i] = v, found by
/// exact simplex and re-checked by substitution; nullopt when v lies outside
/// the hull.
std::optional<std::vector<Rational>> convex_weights(const std::vector<Rational>& v,
                                                    const std::vector<std::vector<Rational>>& points);

/// Weights aligned with cloud.vectors expressing v through the members other
/// than v itself (their own weight is 0).
std::optional<std::vector<Rational>> is_convex_combination(const std::vector<Rational>& v, const TypeCloud& cloud);

/// The members that are not convex combinations of the others.
TypeCloud extreme_points(const TypeCloud& cloud);

struct SeparationResult {
  bool separated = true;
  /// Indices into the cloud of two vectors agreeing on every tagged coordinate.
  std::optional<std::pair<std::size_t, std::size_t>> offending;
  std::vector<std::size_t> coordinates;
};

/// Do the coordinates whose tag is at most `tag` already tell all cloud
/// vectors apart? Throws DomainError when no coordinate qualifies.
SeparationResult separation_check(const Fragment& fragment, const TypeCloud& cloud, FormulaTag tag);

struct MixtureCheck {
  bool equal;
  std::vector<Rational> mixed;     // vector of the paired tuple in the mixture
  std::vector<Rational> expected;  // lambda * first + (1 - lambda) * second
};

/// Throws FragmentError for a non-affine fragment member and DomainError for
/// tuples of the wrong length or out of range.
MixtureCheck mixture_check(const FiniteStructure& m1, const FiniteStructure& m2, const Rational& lambda,
                           const Fragment& fragment, const std::vector<std::size_t>& tuple1,
                           const std::vector<std::size_t>& tuple2);

}  // namespace alqe
