// Signatures, terms and formulas of affine continuous logic with the lattice
// extension (meet, join, negation) used by the Riesz and oracle layers.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alqe/errors.hpp"
#include "alqe/rational.hpp"

namespace alqe {

/// Reserved symbol names. Infix term syntax maps onto these function symbols
/// when the signature declares them.
namespace symbols {
inline constexpr std::string_view kMetric = "d";
inline constexpr std::string_view kPlus = "+";
inline constexpr std::string_view kMinus = "-";
inline constexpr std::string_view kTimes = "*";
inline constexpr std::string_view kMeet = "/\\";
inline constexpr std::string_view kJoin = "\\/";
inline constexpr std::string_view kZero = "0";
}  // namespace symbols

struct Symbol {
  std::string name;
  int arity = 0;
  Rational lipschitz;

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Function and relation symbols with arities and Lipschitz constants. The
/// metric `d` is implicit: binary, 1-Lipschitz, never listed.
class Signature {
 public:
  Signature& add_function(std::string name, int arity, Rational lipschitz = Rational(1));
  Signature& add_relation(std::string name, int arity, Rational lipschitz = Rational(1));

  const Symbol* function(std::string_view name) const;
  /// Includes the implicit metric symbol.
  const Symbol* relation(std::string_view name) const;
  bool has_constant(std::string_view name) const;

  const std::vector<Symbol>& functions() const { return functions_; }
  const std::vector<Symbol>& relations() const { return relations_; }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  void check_fresh(const std::string& name) const;

  std::vector<Symbol> functions_;
  std::vector<Symbol> relations_;
};

/// Immutable term: variable, function application (constants have no
/// arguments), rational literal parameter, or rational multiple `r*t`.
class Term {
 public:
  enum class Kind { Variable, Apply, Literal, Scaled };

  static Term variable(std::string name);
  static Term apply(std::string symbol, std::vector<Term> args = {});
  static Term literal(Rational value);
  static Term scaled(Rational factor, Term operand);

  Kind kind() const { return node_->kind; }
  /// Variable name or function symbol.
  const std::string& name() const { return node_->name; }
  const std::vector<Term>& args() const { return node_->args; }
  /// Literal value or scale factor.
  const Rational& value() const { return node_->value; }
  const Term& operand() const { return node_->args.front(); }

  bool is_variable() const { return kind() == Kind::Variable; }

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<Term> args;
    Rational value;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

Term operator+(const Term& a, const Term& b);
Term operator-(const Term& a);
Term operator*(const Rational& r, const Term& t);
Term term_meet(const Term& a, const Term& b);
Term term_join(const Term& a, const Term& b);

class Formula {
 public:
  enum class Kind { Constant, Atom, Sum, Scale, Sup, Inf, Meet, Join, Neg };

  static Formula constant(Rational value);
  static Formula atom(std::string relation, std::vector<Term> args);
  static Formula dist(Term a, Term b);
  static Formula sum(Formula a, Formula b);
  static Formula scale(Rational factor, Formula f);
  static Formula sup(std::string var, Formula body);
  static Formula inf(std::string var, Formula body);
  static Formula meet(Formula a, Formula b);
  static Formula join(Formula a, Formula b);
  static Formula neg(Formula f);

  Kind kind() const { return node_->kind; }
  /// Constant value or scale factor.
  const Rational& value() const { return node_->value; }
  /// Relation symbol of an atom, bound variable of a quantifier.
  const std::string& name() const { return node_->name; }
  const std::vector<Term>& terms() const { return node_->terms; }
  const Formula& left() const { return node_->children.front(); }
  const Formula& right() const { return node_->children.back(); }
  /// Body of Scale, Sup, Inf, Neg.
  const Formula& body() const { return node_->children.front(); }

  bool is_quantifier() const { return kind() == Kind::Sup || kind() == Kind::Inf; }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Kind kind;
    Rational value;
    std::string name;
    std::vector<Term> terms;
    std::vector<Formula> children;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

Formula operator+(const Formula& a, const Formula& b);
Formula operator-(const Formula& a, const Formula& b);
Formula operator*(const Rational& r, const Formula& f);

/// No Meet/Join/Neg anywhere.
bool is_affine(const Formula& f);
bool is_quantifier_free(const Formula& f);
int quantifier_depth(const Formula& f);

std::vector<std::string> free_vars(const Term& t);
/// Variables with a free occurrence, in first-occurrence order.
std::vector<std::string> free_vars(const Formula& f);

Term substitute(const Term& t, const std::string& var, const Term& replacement);
/// Capture-avoiding: bound variables that would capture a free variable of
/// `replacement` are renamed by appending primes.
Formula substitute(const Formula& f, const std::string& var, const Term& replacement);

/// Structural equality up to renaming of bound variables.
bool alpha_equal(const Formula& a, const Formula& b);

/// Replaces every Neg(θ) by 1 + (-1)*θ.
Formula eliminate_negation(const Formula& f);

std::string to_string(const Term& t);
std::string to_string(const Formula& f);

Term parse_term(std::string_view text, const Signature& sig);
Formula parse_formula(std::string_view text, const Signature& sig);

/// `lhs <= rhs` or `lhs >= rhs`; the second form is returned swapped.
struct Condition {
  Formula lhs;
  Formula rhs;
};
Condition parse_condition(std::string_view text, const Signature& sig);

}  // namespace alqe
