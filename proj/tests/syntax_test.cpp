#include <random>

#include "gtest/gtest.h"

#include "alqe/syntax.hpp"
#include "generators.hpp"

namespace alqe {
namespace {

Signature test_signature() {
  Signature sig;
  sig.add_function("0", 0, Rational(1))
      .add_function("+", 2, Rational(1))
      .add_function("-", 1, Rational(1))
      .add_relation("R", 1, Rational(1))
      .add_relation("S", 2, Rational(2));
  return sig;
}

Term var(const char* n) { return Term::variable(n); }
Term zero() { return Term::apply("0"); }

TEST(Parse, ScaledDistancePlusConstant) {
  const auto f = parse_formula("1/2*d(x,0) + 1", test_signature());
  EXPECT_EQ(f, Formula::sum(Formula::scale(Rational(1, 2), Formula::dist(var("x"), zero())),
                            Formula::constant(Rational(1))));
}

TEST(Parse, Supremum) {
  EXPECT_EQ(parse_formula("sup y. d(x,y)", test_signature()), Formula::sup("y", Formula::dist(var("x"), var("y"))));
}

TEST(Parse, UnbalancedReportsOffset) {
  try {
    parse_formula("d(x", test_signature());
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 3u);
  }
}

TEST(Parse, UnknownSymbolAndArity) {
  EXPECT_THROW(parse_formula("Q(x)", test_signature()), SymbolError);
  EXPECT_THROW(parse_formula("S(x)", test_signature()), SymbolError);
  EXPECT_THROW(parse_formula("R(x,y)", test_signature()), SymbolError);
  EXPECT_THROW(parse_formula("d(x*y,0)", test_signature()), SymbolError);
}

TEST(Parse, AbsoluteValueNeedsZero) {
  EXPECT_EQ(parse_formula("|x|", test_signature()), Formula::dist(var("x"), zero()));
  Signature bare;
  EXPECT_THROW(parse_formula("|x|", bare), SymbolError);
}

TEST(Parse, QuantifierBodyExtends) {
  const auto f = parse_formula("sup y. d(x,y) + 1", test_signature());
  ASSERT_EQ(f.kind(), Formula::Kind::Sup);
  EXPECT_EQ(f.body().kind(), Formula::Kind::Sum);
  const auto g = parse_formula("(sup y. d(x,y)) + 1", test_signature());
  EXPECT_EQ(g.kind(), Formula::Kind::Sum);
}

TEST(Parse, BinaryMinusFoldsIntoScale) {
  const auto f = parse_formula("1 - 2*R(x)", test_signature());
  EXPECT_EQ(f, Formula::sum(Formula::constant(Rational(1)),
                            Formula::scale(Rational(-2), Formula::atom("R", {var("x")}))));
}

TEST(Parse, TermMinusDesugarsThroughUnaryNegation) {
  const auto t = parse_term("x - y", test_signature());
  EXPECT_EQ(t, var("x") + (-var("y")));
}

TEST(Parse, Condition) {
  const auto c = parse_condition("1 >= d(x,y)", test_signature());
  EXPECT_EQ(c.lhs, Formula::dist(var("x"), var("y")));
  EXPECT_EQ(c.rhs, Formula::constant(Rational(1)));
}

TEST(Print, WorkedExamples) {
  EXPECT_EQ(to_string(Formula::constant(Rational(1))), "1");
  EXPECT_EQ(to_string(Formula::scale(Rational(-2, 3), Formula::atom("R", {var("x")}))), "-2/3*R(x)");
  EXPECT_EQ(to_string(Formula::sup("y", Formula::dist(var("x"), var("y")))), "sup y. d(x,y)");
}

TEST(FreeVars, Examples) {
  using V = std::vector<std::string>;
  EXPECT_EQ(free_vars(Formula::dist(var("x"), var("y"))), (V{"x", "y"}));
  EXPECT_EQ(free_vars(Formula::sup("y", Formula::dist(var("x"), var("y")))), (V{"x"}));
  EXPECT_EQ(free_vars(Formula::constant(Rational(1))), V{});
}

TEST(Substitute, Examples) {
  const Term yz = var("y") + var("z");
  EXPECT_EQ(substitute(Formula::dist(var("x"), zero()), "x", yz), Formula::dist(yz, zero()));
  EXPECT_EQ(substitute(Formula::sup("y", Formula::dist(var("x"), var("y"))), "x", var("y")),
            Formula::sup("y'", Formula::dist(var("y"), var("y'"))));
  EXPECT_EQ(substitute(Formula::constant(Rational(1)), "x", yz), Formula::constant(Rational(1)));
}

TEST(Substitute, BoundOccurrenceUntouched) {
  const auto f = Formula::sup("x", Formula::dist(var("x"), zero()));
  EXPECT_EQ(substitute(f, "x", var("y")), f);
}

TEST(AlphaEqual, RenamedBinders) {
  const auto a = parse_formula("sup y. inf z. d(x,y) + d(y,z)", test_signature());
  const auto b = parse_formula("sup u. inf v. d(x,u) + d(u,v)", test_signature());
  const auto c = parse_formula("sup u. inf v. d(x,v) + d(u,v)", test_signature());
  EXPECT_TRUE(alpha_equal(a, b));
  EXPECT_FALSE(alpha_equal(a, c));
  EXPECT_FALSE(alpha_equal(a, parse_formula("sup y. inf z. d(w,y) + d(y,z)", test_signature())));
}

TEST(Fragment, AffinePredicate) {
  const auto sig = test_signature();
  EXPECT_TRUE(is_affine(parse_formula("sup x. 2*R(x) + d(x,0)", sig)));
  EXPECT_FALSE(is_affine(parse_formula("R(x) /\\ R(y)", sig)));
  EXPECT_FALSE(is_affine(parse_formula("sup x. ~R(x)", sig)));
  EXPECT_EQ(quantifier_depth(parse_formula("sup x. (inf y. d(x,y)) + (sup z. R(z))", sig)), 2);
  EXPECT_EQ(quantifier_depth(parse_formula("sup x. inf y. d(x,y) + (sup z. R(z))", sig)), 3);
  EXPECT_THROW(parse_formula("1/0", sig), ParseError);
}

TEST(Negation, EliminatedAsOneMinus) {
  const auto f = eliminate_negation(parse_formula("~R(x)", test_signature()));
  EXPECT_EQ(f, parse_formula("1 - R(x)", test_signature()));
}

// Random ASTs over the lattice-extended grammar.
TEST(Property, RoundTripAndAffineClosure) {
  const auto sig = test_signature();
  std::mt19937_64 rng(7);
  testgen::FormulaGen gen(sig, {"x", "y", "z"});
  for (int i = 0; i < 300; ++i) {
    const Formula f = gen.formula(rng, 4, /*lattice=*/true);
    const std::string text = to_string(f);
    const Formula back = parse_formula(text, sig);
    ASSERT_EQ(back, f) << text << " reprinted as " << to_string(back);
    const bool has_lattice = text.find('~') != std::string::npos || text.find("/\\") != std::string::npos ||
                             text.find("\\/") != std::string::npos;
    EXPECT_EQ(is_affine(f), !has_lattice) << text;
    if (is_affine(f)) {
      EXPECT_TRUE(is_affine(Formula::sup("w", f + Rational(3) * f)));
    } else {
      EXPECT_FALSE(is_affine(Formula::inf("w", f)));
    }
  }
}

TEST(Property, SubstitutionRemovesVariable) {
  const auto sig = test_signature();
  std::mt19937_64 rng(11);
  testgen::FormulaGen gen(sig, {"x", "y", "z"});
  const std::vector<Term> replacements = {var("y"), var("y") + var("z"), zero(), -var("z")};
  for (int i = 0; i < 300; ++i) {
    const Formula f = gen.formula(rng, 4, true);
    const Term& t = replacements[static_cast<std::size_t>(i) % replacements.size()];
    const auto fv = free_vars(substitute(f, "x", t));
    EXPECT_EQ(std::count(fv.begin(), fv.end(), "x"), 0) << to_string(f);
  }
}

}  // namespace
}  // namespace alqe
