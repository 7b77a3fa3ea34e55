#include <gtest/gtest.h>

#include <random>

#include "alqe/errors.hpp"
#include "alqe/linalg.hpp"
#include "alqe/qe_finvec.hpp"
#include "alqe/semantics.hpp"
#include "generators.hpp"

using namespace alqe;

namespace {

Formula F(std::string_view text) { return parse_formula(text, vector_space_signature()); }

RationalMatrix from_ints(std::initializer_list<std::initializer_list<int>> rows) {
  RationalMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (int v : row) m(i, j++) = Rational(v);
    ++i;
  }
  return m;
}

void expect_matches_oracle(const Formula& f, int q, const std::vector<std::string>& vars) {
  const auto nf = eliminate_to_normal_form(f, q, vars);
  const Formula qf = to_formula(nf, vars);
  ASSERT_TRUE(is_quantifier_free(qf));
  for (const auto& p : all_points(q, static_cast<int>(vars.size()))) {
    const Rational expected = brute_force(f, q, vars, p);
    EXPECT_EQ(nf.evaluate(p), expected) << to_string(f);
    EXPECT_EQ(brute_force(qf, q, vars, p), expected) << to_string(f);
  }
}

}  // namespace

TEST(LineRepresentatives, Examples) {
  EXPECT_EQ(line_representatives(2, 2), (std::vector<FqVector>{{0, 1}, {1, 0}, {1, 1}}));
  EXPECT_EQ(line_representatives(3, 1), (std::vector<FqVector>{{1}}));
  EXPECT_EQ(line_representatives(3, 2).size(), 4u);
  EXPECT_EQ(line_representatives(5, 3).size(), 31u);
  EXPECT_THROW(line_representatives(4, 2), DomainError);
}

TEST(InterpolationSystem, SmallInstances) {
  const auto s21 = interpolation_system(2, 1);
  EXPECT_EQ(s21->a, from_ints({{1, 1}, {1, 0}}));
  const auto s22 = interpolation_system(2, 2);
  EXPECT_EQ(s22->u, from_ints({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}));
  EXPECT_EQ(exact_determinant(s22->u), Rational(-1));
  EXPECT_EQ(exact_rank(interpolation_system(3, 2)->u), 4);
  EXPECT_EQ(interpolation_system(2, 2).get(), s22.get());
  EXPECT_THROW(interpolation_system(2, 13), DomainError);
}

TEST(InterpolationSystem, KantorRank) {
  for (int q : {2, 3, 5}) {
    for (int n : {2, 3}) {
      const auto sys = interpolation_system(q, n);
      EXPECT_EQ(exact_rank(sys->u), static_cast<long>(sys->representatives.size())) << q << "," << n;
      EXPECT_EQ(sys->a * sys->a_inverse, RationalMatrix::Identity(sys->a.rows(), sys->a.cols()));
    }
  }
}

TEST(QfNormalize, Examples) {
  const auto a = qf_normalize(F("d(x+y, y)"), 2, {"x", "y"});
  EXPECT_EQ(a.constant, Rational(0));
  EXPECT_EQ(a.terms, (std::map<FqVector, Rational>{{{1, 0}, Rational(1)}}));
  const auto b = qf_normalize(F("|x| + |2*x|"), 3, {"x"});
  EXPECT_EQ(b.terms, (std::map<FqVector, Rational>{{{1}, Rational(2)}}));
  const auto c = qf_normalize(F("|x - x|"), 2, {"x"});
  EXPECT_TRUE(c.terms.empty());
  EXPECT_EQ(c.constant, Rational(0));
  EXPECT_THROW(qf_normalize(F("sup y. |y|"), 2, {}), FragmentError);
  EXPECT_THROW(qf_normalize(F("|x| /\\ |y|"), 2, {"x", "y"}), FragmentError);
  EXPECT_THROW(qf_normalize(F("|x|"), 2, {"y"}), SymbolError);
}

TEST(QfNormalize, AgreesWithOracle) {
  std::mt19937_64 rng(1);
  const std::vector<std::string> vars{"x1", "x2"};
  const Signature sig = vector_space_signature();
  for (int q : {2, 3, 5}) {
    const testgen::FormulaGen gen(sig, vars);
    for (int i = 0; i < 30; ++i) {
      Formula f = gen.formula(rng, 3, false);
      while (!is_quantifier_free(f)) f = gen.formula(rng, 3, false);
      const auto nf = qf_normalize(f, q, vars);
      for (const auto& p : all_points(q, 2)) EXPECT_EQ(nf.evaluate(p), brute_force(f, q, vars, p)) << to_string(f);
    }
  }
}

TEST(EliminateOne, Examples) {
  const auto one = eliminate_one(qf_normalize(F("|x - y|"), 2, {"x", "y"}));
  EXPECT_TRUE(one.terms.empty());
  EXPECT_EQ(one.constant, Rational(1));

  const auto two = eliminate_one(qf_normalize(F("|x - y| + |y|"), 2, {"x", "y"}));
  EXPECT_EQ(to_string(two, {"x"}), "2 - |x|");

  const auto psi = qf_normalize(F("|x| + 1/2*|x + x|"), 3, {"x", "y"});
  auto expected = qf_normalize(F("|x| + 1/2*|x + x|"), 3, {"x"});
  EXPECT_EQ(eliminate_one(psi), expected);
}

TEST(EliminateAll, Examples) {
  EXPECT_EQ(to_string(eliminate_to_normal_form(F("inf y. |x - y|"), 2, {"x"}), {"x"}), "0");
  EXPECT_EQ(to_string(eliminate_to_normal_form(F("sup y. |y|"), 2, {}), {}), "1");
  EXPECT_EQ(to_string(eliminate_to_normal_form(F("sup y. (d(x,y)+d(y,0))"), 2, {"x"}), {"x"}), "2 - |x|");
  expect_matches_oracle(F("sup y. inf z. (|x - y| + |y - z|)"), 2, {"x"});
  expect_matches_oracle(F("sup x. |x - y| + |x|"), 3, {"x", "y"});
  EXPECT_THROW(eliminate_all(F("sup y. (|y| \\/ |x|)"), 2, {"x"}), FragmentError);
}

TEST(BruteForce, Examples) {
  EXPECT_EQ(brute_force(F("|x|"), 2, {"x"}, {0}), Rational(0));
  EXPECT_EQ(brute_force(F("|x|"), 2, {"x"}, {1}), Rational(1));
  EXPECT_EQ(brute_force(F("sup y. (|x - y| + |y|)"), 2, {"x"}, {1}), Rational(1));
}

TEST(BruteForce, IdentityOnPlane) {
  // The interpolation identity for (2,2) at every point of F_2^2.
  const std::vector<std::string> vars{"x1", "x2"};
  const Formula lhs = F("sup y. (|x1 - y| + 2*|x2 - y| + |x1 + x2 - y|)");
  const auto rhs = eliminate_to_normal_form(lhs, 2, vars);
  for (const auto& p : all_points(2, 2)) EXPECT_EQ(brute_force(lhs, 2, vars, p), rhs.evaluate(p));
}

TEST(Properties, SoundnessOnRandomFormulas) {
  std::mt19937_64 rng(42);
  for (auto [q, n] : {std::pair{2, 1}, {2, 2}, {3, 1}, {3, 2}, {5, 2}}) {
    std::vector<std::string> vars;
    for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
    const testgen::QeFormulaGen gen(q, vars);
    for (int i = 0; i < 25; ++i) expect_matches_oracle(gen.formula(rng), q, vars);
  }
}

TEST(Properties, ScaleInvariance) {
  std::mt19937_64 rng(8);
  const std::vector<std::string> vars{"x1", "x2"};
  for (int q : {3, 5}) {
    const PrimeField field(q);
    const testgen::QeFormulaGen gen(q, vars);
    for (int i = 0; i < 20; ++i) {
      const Formula f = gen.formula(rng);
      for (const auto& p : all_points(q, 2)) {
        for (int c = 1; c < q; ++c) {
          const FqVector scaled{field.mul(c, p[0]), field.mul(c, p[1])};
          EXPECT_EQ(brute_force(f, q, vars, p), brute_force(f, q, vars, scaled)) << to_string(f);
        }
      }
    }
  }
}

TEST(Properties, IdempotentOnQuantifierFree) {
  std::mt19937_64 rng(13);
  const std::vector<std::string> vars{"x1", "x2"};
  const testgen::QeFormulaGen gen(3, vars);
  for (int i = 0; i < 30; ++i) {
    const auto nf = eliminate_to_normal_form(gen.formula(rng), 3, vars);
    EXPECT_EQ(eliminate_to_normal_form(to_formula(nf, vars), 3, vars), nf);
  }
}
