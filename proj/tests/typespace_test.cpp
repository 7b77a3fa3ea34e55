#include <gtest/gtest.h>

#include <random>

#include "alqe/errors.hpp"
#include "alqe/typespace.hpp"
#include "alqe/ultramean.hpp"
#include "generators.hpp"

using namespace alqe;

namespace {

using Values = std::vector<Rational>;

const Signature& vs() {
  static const Signature s = vector_space_signature();
  return s;
}

FiniteStructure half_metric_f2() {
  FiniteStructure base = prime_field_vector_space(2);
  RationalMatrix d = base.metric();
  d(0, 1) = d(1, 0) = Rational(1, 2);
  FiniteStructure m(base.signature(), base.universe(), d);
  for (const auto& f : base.signature().functions()) m.set_function(f.name, *base.function_table(f.name));
  return m;
}

std::vector<Values> values_of(const TypeCloud& c) {
  std::vector<Values> out;
  for (const auto& v : c.vectors) out.push_back(v.values);
  return out;
}

Values ints(std::initializer_list<int> xs) {
  Values out;
  for (int x : xs) out.emplace_back(x);
  return out;
}

TypeCloud cloud_of(const std::vector<Values>& vs) {
  std::vector<TypeVector> out;
  for (const auto& v : vs) out.push_back({v, {}});
  return TypeCloud::from(out);
}

Fragment f2_squared_fragment() {
  return parse_fragment("vars: x1 x2\n|x1|\n|x2|\n|x1 + x2|\nsup y. |x1 - y| @general\n", vs());
}

}  // namespace

TEST(Fragment, TagsAndParsing) {
  EXPECT_EQ(detect_tag(parse_formula("|x|", vs())), FormulaTag::Atomic);
  EXPECT_EQ(detect_tag(parse_formula("|x| + 1", vs())), FormulaTag::QuantifierFree);
  EXPECT_EQ(detect_tag(parse_formula("inf y. inf z. d(x + y, z)", vs())), FormulaTag::Infimal);
  EXPECT_EQ(detect_tag(parse_formula("sup y. d(x, y)", vs())), FormulaTag::General);

  const auto frag = parse_fragment("# comment\n|x|\n\nsup y. d(x,y) @general\n|x| @infimal\n", vs(), 2);
  EXPECT_EQ(frag.vars(), (std::vector<std::string>{"x", "x1"}));
  ASSERT_EQ(frag.size(), 3u);
  EXPECT_EQ(frag.formulas()[0].tag, FormulaTag::Atomic);
  EXPECT_EQ(frag.formulas()[2].tag, FormulaTag::Infimal);

  EXPECT_THROW(parse_fragment("sup y. d(x,y) @qf\n", vs()), DomainError);
  EXPECT_THROW(parse_fragment("|x| @nonsense\n", vs()), ParseError);
  EXPECT_THROW(parse_fragment("# nothing\n", vs()), DomainError);
  EXPECT_THROW(parse_fragment("vars: x\n|y|\n", vs()), SymbolError);
  EXPECT_THROW(parse_fragment("d(x,y)\n", vs(), 1), DomainError);
}

TEST(RealizedTypes, Examples) {
  const Fragment norm({"x"}, {parse_formula("|x|", vs())});
  EXPECT_EQ(values_of(realized_types(prime_field_vector_space(2), norm)),
            (std::vector<Values>{ints({0}), ints({1})}));

  const auto mix = mixture(prime_field_vector_space(2), half_metric_f2(), Rational(1, 2));
  EXPECT_EQ(values_of(realized_types(mix, norm)),
            (std::vector<Values>{{Rational(0)}, {Rational(1, 4)}, {Rational(1, 2)}, {Rational(3, 4)}}));

  const auto cloud = realized_types(prime_field_vector_space(2), f2_squared_fragment());
  EXPECT_EQ(values_of(cloud), (std::vector<Values>{ints({0, 0, 0, 1}), ints({0, 1, 1, 1}), ints({1, 0, 1, 1}),
                                                   ints({1, 1, 0, 1})}));
  EXPECT_EQ(cloud.vectors[1].realizations.front().tuple, (std::vector<std::size_t>{0, 1}));
}

TEST(RealizedTypes, MergesRealizationsAndCaps) {
  const Fragment constant({"x", "y"}, {Formula::constant(Rational(1))});
  const auto cloud = realized_types(prime_field_vector_space(3), constant);
  ASSERT_EQ(cloud.size(), 1u);
  EXPECT_EQ(cloud.vectors.front().realizations.size(), 9u);
  EXPECT_THROW(realized_types(prime_field_vector_space(3), constant, "M", 8), DomainError);
}

TEST(ConvexCombination, Examples) {
  const auto unit = cloud_of({ints({0}), ints({1})});
  EXPECT_EQ(is_convex_combination({Rational(1, 2)}, unit), (Values{Rational(1, 2), Rational(1, 2)}));
  EXPECT_FALSE(is_convex_combination(ints({0}), cloud_of({ints({1})})));
  EXPECT_FALSE(is_convex_combination(ints({0}), unit));
  EXPECT_EQ(is_convex_combination({Rational(1, 2), Rational(1, 2), Rational(0)}, cloud_of({ints({0, 0, 0}), ints({1, 1, 0})})),
            (Values{Rational(1, 2), Rational(1, 2)}));
}

TEST(ExtremePoints, Examples) {
  EXPECT_EQ(values_of(extreme_points(cloud_of({ints({0}), {Rational(1, 2)}, ints({1})}))),
            (std::vector<Values>{ints({0}), ints({1})}));
  const auto pair = cloud_of({ints({3, 1}), ints({-1, 2})});
  EXPECT_EQ(values_of(extreme_points(pair)), values_of(pair));
  const auto f2 = realized_types(prime_field_vector_space(2), f2_squared_fragment());
  EXPECT_EQ(extreme_points(f2).size(), 4u);
  EXPECT_THROW(extreme_points(TypeCloud{}), DomainError);
}

TEST(ExtremePoints, KreinMilmanAndComplement) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = testgen::uniform_int(rng, 1, 3);
    std::vector<Values> points;
    for (int i = testgen::uniform_int(rng, 1, 8); i > 0; --i) {
      Values v;
      for (int k = 0; k < dim; ++k) v.push_back(Rational(testgen::uniform_int(rng, 0, 4), testgen::uniform_int(rng, 1, 2)));
      points.push_back(v);
    }
    const auto cloud = cloud_of(points);
    const auto ext = extreme_points(cloud);
    for (const auto& v : cloud.vectors) {
      EXPECT_EQ(ext.find(v.values).has_value(), !is_convex_combination(v.values, cloud).has_value());
      EXPECT_TRUE(convex_weights(v.values, values_of(ext)).has_value());
    }
  }
}

TEST(ExtremePoints, ClassicalCubeVertices) {
  std::mt19937_64 rng(32);
  Signature sig;
  sig.add_relation("P", 1).add_relation("Q", 1).add_relation("R", 2);
  const Fragment frag({"x", "y"}, {parse_formula("P(x)", sig), parse_formula("Q(y)", sig), parse_formula("R(x,y)", sig)});
  for (int trial = 0; trial < 10; ++trial) {
    std::map<std::string, std::vector<bool>> tables;
    for (const char* r : {"P", "Q"}) {
      std::vector<bool> t(4);
      for (auto&& b : t) b = testgen::coin(rng, 50);
      tables[r] = t;
    }
    std::vector<bool> r(16);
    for (auto&& b : r) b = testgen::coin(rng, 50);
    tables["R"] = r;
    const auto m = classical_to_structure(sig, {"a", "b", "c", "d"}, tables, {});
    const auto cloud = realized_types(m, frag);
    for (const auto& v : cloud.vectors) {
      for (const auto& x : v.values) EXPECT_TRUE(x == Rational(0) || x == Rational(1));
    }
    EXPECT_EQ(extreme_points(cloud).size(), cloud.size());
  }
}

TEST(Separation, Examples) {
  const auto frag = f2_squared_fragment();
  const auto cloud = realized_types(prime_field_vector_space(2), frag);
  const auto qf = separation_check(frag, cloud, FormulaTag::QuantifierFree);
  EXPECT_TRUE(qf.separated);
  EXPECT_EQ(qf.coordinates, (std::vector<std::size_t>{0, 1, 2}));

  const auto constant = parse_fragment("1\n|x| @general\n", vs());
  const auto c2 = realized_types(prime_field_vector_space(2), constant);
  const auto r = separation_check(constant, c2, FormulaTag::QuantifierFree);
  EXPECT_FALSE(r.separated);
  EXPECT_EQ(r.offending, (std::pair<std::size_t, std::size_t>{0, 1}));
  EXPECT_THROW(separation_check(constant, c2, FormulaTag::Atomic), DomainError);

  const Fragment single({"x"}, {parse_formula("|x|", vs())});
  EXPECT_TRUE(separation_check(single, cloud_of({ints({0})}), FormulaTag::Atomic).separated);
}

TEST(Mixture, Examples) {
  const auto f2 = prime_field_vector_space(2);
  const auto half = half_metric_f2();
  const Fragment norm({"x"}, {parse_formula("|x|", vs())});
  const auto one = mixture_check(f2, half, Rational(1), norm, {1}, {1});
  EXPECT_TRUE(one.equal);
  EXPECT_EQ(one.mixed, ints({1}));
  const auto mid = mixture_check(f2, half, Rational(1, 2), norm, {1}, {1});
  EXPECT_TRUE(mid.equal);
  EXPECT_EQ(mid.mixed, (Values{Rational(3, 4)}));
  const Fragment constant({"x"}, {Formula::constant(Rational(1))});
  EXPECT_EQ(mixture_check(f2, half, Rational(1, 3), constant, {0}, {1}).mixed, ints({1}));

  const Fragment lattice({"x"}, {parse_formula("|x| /\\ 1", vs())});
  EXPECT_THROW(mixture_check(f2, half, Rational(1, 2), lattice, {0}, {0}), FragmentError);
  EXPECT_THROW(mixture_check(f2, half, Rational(1, 2), norm, {0, 1}, {0}), DomainError);
}

TEST(Mixture, LinearOnRandomCases) {
  std::mt19937_64 rng(33);
  const Signature sig = testgen::random_structure_signature();
  const testgen::FormulaGen gen(sig, {"x", "y"});
  for (int trial = 0; trial < 100; ++trial) {
    const auto m1 = testgen::random_structure(rng, sig, static_cast<std::size_t>(testgen::uniform_int(rng, 1, 3)));
    const auto m2 = testgen::random_structure(rng, sig, static_cast<std::size_t>(testgen::uniform_int(rng, 1, 3)));
    std::vector<Formula> fs;
    while (fs.size() < 3) {
      Formula f = gen.formula(rng, 2, false);
      if (is_affine(f)) fs.push_back(std::move(f));
    }
    const Fragment frag({"x", "y"}, fs);
    const Rational lambda(testgen::uniform_int(rng, 0, 6), 6);
    auto pick = [&](const FiniteStructure& m) {
      return std::vector<std::size_t>{static_cast<std::size_t>(testgen::uniform_int(rng, 0, static_cast<int>(m.size()) - 1)),
                                      static_cast<std::size_t>(testgen::uniform_int(rng, 0, static_cast<int>(m.size()) - 1))};
    };
    const auto t1 = pick(m1);
    const auto t2 = pick(m2);
    const auto check = mixture_check(m1, m2, lambda, frag, t1, t2);
    EXPECT_TRUE(check.equal) << "trial " << trial;
  }
}
