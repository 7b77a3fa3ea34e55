#include <gtest/gtest.h>

#include <cstdio>
#include <random>

#include "alqe/errors.hpp"
#include "alqe/semantics.hpp"
#include "alqe/structure_io.hpp"
#include "generators.hpp"

using namespace alqe;

namespace {

Formula F(std::string_view text, const Signature& sig) { return parse_formula(text, sig); }

// Universe {a, b}, d(a,b) = 1, constants a and b, R(a) = 0, R(b) = 1.
FiniteStructure two_points(const Rational& lambda_r) {
  Signature sig;
  sig.add_function("a", 0);
  sig.add_function("b", 0);
  sig.add_relation("R", 1, lambda_r);
  RationalMatrix d(2, 2);
  d << Rational(0), Rational(1), Rational(1), Rational(0);
  FiniteStructure m(sig, {"a", "b"}, d);
  m.set_function("a", {0}).set_function("b", {1});
  m.set_relation("R", {Rational(0), Rational(1)});
  return m;
}

bool has_kind(const ValidationReport& r, Violation::Kind k) {
  for (const auto& v : r.violations) {
    if (v.kind == k) return true;
  }
  return false;
}

}  // namespace

TEST(Validate, TwoPointStructureIsValid) { EXPECT_TRUE(validate(two_points(Rational(1))).ok()); }

TEST(Validate, HalfLipschitzRelationGivesWitness) {
  const auto report = validate(two_points(Rational(1, 2)));
  ASSERT_EQ(report.violations.size(), 1u);
  const auto& v = report.violations.front();
  EXPECT_EQ(v.kind, Violation::Kind::RelationLipschitz);
  EXPECT_EQ(v.symbol, "R");
  EXPECT_EQ(v.first, std::vector<std::size_t>{0});
  EXPECT_EQ(v.second, std::vector<std::size_t>{1});
}

TEST(Validate, RangeIsCheckedBeforeTriangle) {
  RationalMatrix d(3, 3);
  d << Rational(0), Rational(1), Rational(3), Rational(1), Rational(0), Rational(1), Rational(3), Rational(1), Rational(0);
  const auto report = validate(FiniteStructure(Signature{}, {"a", "b", "c"}, d));
  ASSERT_FALSE(report.ok());
  EXPECT_TRUE(has_kind(report, Violation::Kind::MetricRange));
  EXPECT_FALSE(has_kind(report, Violation::Kind::Triangle));
}

TEST(Validate, RejectsPseudometricAndAsymmetry) {
  RationalMatrix d(2, 2);
  d << Rational(0), Rational(0), Rational(0), Rational(0);
  EXPECT_TRUE(has_kind(validate(FiniteStructure(Signature{}, {"a", "b"}, d)), Violation::Kind::MetricSeparation));
  d << Rational(0), Rational(1), Rational(1, 2), Rational(0);
  EXPECT_TRUE(has_kind(validate(FiniteStructure(Signature{}, {"a", "b"}, d)), Violation::Kind::MetricSymmetry));
}

TEST(Validate, TriangleViolation) {
  RationalMatrix d(3, 3);
  d << Rational(0), Rational(1, 4), Rational(1), Rational(1, 4), Rational(0), Rational(1, 4), Rational(1), Rational(1, 4),
      Rational(0);
  EXPECT_TRUE(has_kind(validate(FiniteStructure(Signature{}, {"a", "b", "c"}, d)), Violation::Kind::Triangle));
}

TEST(Evaluate, WorkedExamples) {
  const auto m = two_points(Rational(1));
  const auto& sig = m.signature();
  EXPECT_EQ(evaluate(m, F("sup x. d(x,a)", sig)), Rational(1));
  EXPECT_EQ(evaluate(m, F("1/2*d(a,b) + 1", sig)), Rational(3, 2));
  EXPECT_EQ(evaluate(m, F("inf x. R(x)", sig)), Rational(0));
  EXPECT_EQ(evaluate(m, F("R(x) - R(y)", sig), {{"x", 1}, {"y", 0}}), Rational(1));
}

TEST(Evaluate, Errors) {
  const auto m = two_points(Rational(1));
  EXPECT_THROW(evaluate(m, F("R(x)", m.signature())), EvaluationError);
  Signature other = m.signature();
  other.add_relation("S", 1);
  EXPECT_THROW(evaluate(m, F("S(a)", other)), Error);
}

TEST(Evaluate, LatticeConnectives) {
  const auto m = two_points(Rational(1));
  const auto& sig = m.signature();
  EXPECT_EQ(evaluate(m, F("R(a) /\\ R(b)", sig)), Rational(0));
  EXPECT_EQ(evaluate(m, F("R(a) \\/ R(b)", sig)), Rational(1));
  EXPECT_EQ(evaluate(m, F("~(1/4)", sig)), Rational(3, 4));
}

TEST(ClassicalStructures, PrimeFields) {
  const auto f2 = prime_field_ring(2);
  EXPECT_EQ(f2.size(), 2u);
  EXPECT_EQ(f2.distance(0, 1), Rational(1));
  EXPECT_TRUE(validate(f2).ok());
  EXPECT_EQ(*f2.function_table("+"), (std::vector<std::size_t>{0, 1, 1, 0}));
  EXPECT_EQ(*f2.function_table("*"), (std::vector<std::size_t>{0, 0, 0, 1}));
  const auto f3 = prime_field_ring(3);
  EXPECT_EQ(f3.size(), 3u);
  EXPECT_TRUE(validate(f3).ok());
  EXPECT_EQ(evaluate(f3, F("inf x. d(x*x, 1+1)", f3.signature())), Rational(1));
  EXPECT_EQ(evaluate(prime_field_ring(7), F("inf x. d(x*x, 1+1)", f3.signature())), Rational(0));
  EXPECT_THROW(prime_field_ring(4), DomainError);
}

TEST(ClassicalStructures, NonClosedFunctionTableRejected) {
  Signature sig;
  sig.add_function("s", 1);
  EXPECT_THROW(classical_to_structure(sig, {"a", "b"}, {}, {{"s", {0, 2}}}), DomainError);
}

TEST(ClassicalStructures, BooleanAlgebraTwoSquared) {
  const auto b = boolean_algebra(2, {Rational(1, 2), Rational(1, 2)});
  EXPECT_EQ(b.size(), 4u);
  EXPECT_TRUE(validate(b).ok());
  const auto x = *b.index_of("10");
  const auto y = *b.index_of("01");
  EXPECT_EQ(b.distance(x, y), Rational(1));
  EXPECT_EQ(b.distance(x, *b.index_of("00")), Rational(1, 2));
  EXPECT_THROW(boolean_algebra(2, {Rational(1, 2), Rational(1, 3)}), DomainError);
}

TEST(CheckCondition, Examples) {
  const auto m = prime_field_ring(2);
  EXPECT_TRUE(check_condition(m, "0 <= 1"));
  EXPECT_FALSE(check_condition(m, "1 <= 0"));
  EXPECT_THROW(check_condition(m, "d(x,0) <= 1"), FragmentError);

  // Modular law of the measure as two opposite conditions on 2^2.
  const auto b = boolean_algebra(2, {Rational(1, 2), Rational(1, 2)});
  const std::string lhs = "sup x. sup y. (d(x/\\y,0) + d(x\\/y,0) - d(x,0) - d(y,0))";
  const std::string rhs = "inf x. inf y. (d(x/\\y,0) + d(x\\/y,0) - d(x,0) - d(y,0))";
  EXPECT_TRUE(check_condition(b, lhs + " <= 0"));
  EXPECT_TRUE(check_condition(b, rhs + " >= 0"));
}

TEST(Properties, ScalarLawAndDuality) {
  std::mt19937_64 rng(7);
  const Signature sig = testgen::random_structure_signature();
  const testgen::FormulaGen gen(sig, {"x", "y"});
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = testgen::random_structure(rng, sig, testgen::uniform_int(rng, 1, 4));
    const Assignment a{{"x", 0}, {"y", m.size() - 1}};
    const Formula f = gen.formula(rng, 2, true);
    const Formula g = gen.formula(rng, 2, true);
    const Rational r = testgen::small_rational(rng, 3, 5);
    const Rational fv = evaluate(m, f, a);
    const Rational gv = evaluate(m, g, a);
    EXPECT_EQ(evaluate(m, Formula::scale(r, f), a), r * fv);
    EXPECT_EQ(evaluate(m, Formula::meet(f, g), a), min(fv, gv));
    EXPECT_EQ(evaluate(m, Formula::join(f, g), a), max(fv, gv));
    EXPECT_EQ(evaluate(m, Formula::neg(Formula::neg(f)), a), fv);
  }
}

TEST(Properties, LipschitzPropagation) {
  std::mt19937_64 rng(11);
  const Signature sig = testgen::random_structure_signature();
  const testgen::FormulaGen gen(sig, {"x"});
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = testgen::random_structure(rng, sig, testgen::uniform_int(rng, 2, 5));
    ASSERT_TRUE(validate(m).ok());
    Formula f = gen.formula(rng, 2, true);
    while (!is_quantifier_free(f)) f = gen.formula(rng, 2, true);
    const Rational bound = lipschitz_bound(f, "x", sig);
    for (std::size_t a = 0; a < m.size(); ++a) {
      for (std::size_t b = 0; b < m.size(); ++b) {
        const Rational gap = abs(evaluate(m, f, {{"x", a}}) - evaluate(m, f, {{"x", b}}));
        EXPECT_LE(gap, bound * m.distance(a, b)) << to_string(f);
      }
    }
  }
}

TEST(Properties, DiscreteAgreement) {
  // Graph on three vertices with edges 0-1 and 1-2.
  Signature sig;
  sig.add_relation("E", 2);
  std::vector<bool> edges{false, true, false, true, false, true, false, true, false};
  const auto m = classical_to_structure(sig, {"u", "v", "w"}, {{"E", edges}}, {});
  ASSERT_TRUE(validate(m).ok());
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      const Rational v = evaluate(m, F("E(x,y)", sig), {{"x", a}, {"y", b}});
      EXPECT_TRUE(v == Rational(0) || v == Rational(1));
      EXPECT_EQ(v, Rational(edges[a * 3 + b] ? 1 : 0));
    }
  }
  // Every vertex has a neighbour; every vertex has a non-neighbour (itself).
  EXPECT_EQ(evaluate(m, F("inf x. sup y. E(x,y)", sig)), Rational(1));
  EXPECT_EQ(evaluate(m, F("sup x. inf y. E(x,y)", sig)), Rational(0));
  EXPECT_EQ(evaluate(m, F("inf x. inf y. d(x,y)", sig)), Rational(0));
}

TEST(StructureIo, RoundTripIsBitIdentical) {
  std::mt19937_64 rng(3);
  const Signature sig = testgen::random_structure_signature();
  std::vector<FiniteStructure> corpus{prime_field_ring(3), boolean_algebra(2, {Rational(1, 3), Rational(2, 3)}),
                                      two_points(Rational(1))};
  for (int i = 0; i < 10; ++i) corpus.push_back(testgen::random_structure(rng, sig, testgen::uniform_int(rng, 1, 4)));
  const std::string path = ::testing::TempDir() + "alqe_roundtrip.json";
  for (const auto& m : corpus) {
    save_structure_file(path, m);
    const auto back = load_structure_file(path);
    EXPECT_TRUE(back == m);
    EXPECT_TRUE(validate(back).ok());
    EXPECT_EQ(dump_structure(back), dump_structure(m));
  }
  std::remove(path.c_str());
}

TEST(StructureIo, SchemaErrors) {
  auto j = structure_to_json(two_points(Rational(1)));
  j["metric"][1] = 1;
  EXPECT_THROW(structure_from_json(j), DomainError);
  j = structure_to_json(two_points(Rational(1)));
  j["functions"]["a"] = "zz";
  EXPECT_THROW(structure_from_json(j), DomainError);
  EXPECT_THROW(load_structure_file("/nonexistent/file.json"), DomainError);
}
