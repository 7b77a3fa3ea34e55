#include "alqe/riesz.hpp"

#include <algorithm>
#include <array>

#include "alqe/errors.hpp"

namespace alqe {

namespace {

SignedCombination expand(const std::vector<Formula>& fs, std::size_t cap, bool join) {
  if (fs.empty()) throw DomainError("inclusion-exclusion needs at least one formula");
  if (fs.size() > cap) {
    throw DomainError("inclusion-exclusion over " + std::to_string(fs.size()) + " formulas exceeds the cap of " +
                      std::to_string(cap));
  }
  const std::size_t n = fs.size();
  std::vector<std::vector<std::size_t>> subsets;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) s.push_back(i);
    }
    subsets.push_back(std::move(s));
  }
  std::stable_sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  SignedCombination out;
  for (const auto& s : subsets) {
    Formula f = fs[s.front()];
    for (std::size_t k = 1; k < s.size(); ++k) f = join ? Formula::meet(f, fs[s[k]]) : Formula::join(f, fs[s[k]]);
    out.terms.push_back({Rational(s.size() % 2 == 1 ? 1 : -1), std::move(f)});
  }
  return out;
}

std::size_t table_at(const FiniteStructure& b, std::string_view name, std::size_t x, std::size_t y) {
  const std::array<std::size_t, 2> args{x, y};
  return (*b.function_table(name))[tuple_index(args, b.size())];
}

}  // namespace

Formula SignedCombination::to_formula() const {
  if (terms.empty()) return Formula::constant(Rational(0));
  auto scaled = [](const SignedTerm& t) {
    return t.coefficient == Rational(1) ? t.formula : Formula::scale(t.coefficient, t.formula);
  };
  Formula out = scaled(terms.front());
  for (std::size_t i = 1; i < terms.size(); ++i) out = Formula::sum(out, scaled(terms[i]));
  return out;
}

Rational SignedCombination::evaluate(const FiniteStructure& m, const Assignment& a) const {
  Rational v(0);
  for (const auto& t : terms) v += t.coefficient * alqe::evaluate(m, t.formula, a);
  return v;
}

SignedCombination inclusion_exclusion_join(const std::vector<Formula>& fs, std::size_t cap) {
  return expand(fs, cap, true);
}

SignedCombination inclusion_exclusion_meet(const std::vector<Formula>& fs, std::size_t cap) {
  return expand(fs, cap, false);
}

Formula neg_meet_rewrite(const Formula& eta, const Formula& theta) {
  return Formula::sum(Formula::join(eta, theta), Formula::scale(Rational(-1), theta));
}

AtomicEquation ring_or_atoms(const Term& p, const Term& q) {
  return {Term::apply(std::string(symbols::kTimes), {p, q}), Term::apply(std::string(symbols::kZero))};
}

AtomicEquation boolean_atoms(BooleanEncoding kind, const Term& a, const Term& b) {
  const Term zero = Term::apply(std::string(symbols::kZero));
  if (kind == BooleanEncoding::Conj) return {term_join(a, b), zero};
  const Term ca = Term::apply("compl", {a});
  const Term cb = Term::apply("compl", {b});
  return {term_meet(term_join(a, b), term_join(ca, cb)), zero};
}

ProbabilityCheck probability_identity_check(const FiniteStructure& b, bool literal) {
  if (!validate(b).ok()) throw DomainError("structure fails validation");
  if (b.function_table(symbols::kMeet) == nullptr || b.function_table(symbols::kJoin) == nullptr ||
      b.function_table(symbols::kZero) == nullptr) {
    throw DomainError("probability identity needs tables for /\\, \\/ and 0");
  }
  const std::size_t zero = b.function_table(symbols::kZero)->front();
  auto mu = [&](std::size_t x) { return b.distance(x, zero); };
  for (std::size_t x = 0; x < b.size(); ++x) {
    for (std::size_t y = 0; y < b.size(); ++y) {
      const Rational lhs = mu(table_at(b, symbols::kMeet, x, y)) + mu(table_at(b, symbols::kJoin, x, y));
      const Rational rhs = mu(x) + (literal ? mu(x) : mu(y));
      if (lhs != rhs) return {false, std::pair{x, y}};
    }
  }
  return {true, std::nullopt};
}

}  // namespace alqe
