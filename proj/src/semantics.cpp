#include "alqe/semantics.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace alqe {

std::size_t tuple_index(std::span<const std::size_t> tuple, std::size_t size) {
  std::size_t index = 0;
  for (std::size_t v : tuple) index = index * size + v;
  return index;
}

std::vector<std::size_t> tuple_at(std::size_t index, int arity, std::size_t size) {
  std::vector<std::size_t> out(static_cast<std::size_t>(arity));
  for (int i = arity - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = index % size;
    index /= size;
  }
  return out;
}

std::size_t tuple_count(std::size_t size, int arity, std::size_t cap) {
  std::size_t n = 1;
  for (int i = 0; i < arity; ++i) {
    if (size != 0 && n > cap / size) {
      throw DomainError("tuple space " + std::to_string(size) + "^" + std::to_string(arity) + " exceeds cap " +
                        std::to_string(cap));
    }
    n *= size;
  }
  if (n > cap) throw DomainError("tuple space exceeds cap " + std::to_string(cap));
  return n;
}

// ---------------------------------------------------------------------------
// FiniteStructure

FiniteStructure::FiniteStructure(Signature sig, std::vector<std::string> universe, RationalMatrix metric)
    : sig_(std::move(sig)), universe_(std::move(universe)), metric_(std::move(metric)) {
  if (universe_.empty()) throw DomainError("structure universe must be nonempty");
  const auto n = static_cast<Eigen::Index>(universe_.size());
  if (metric_.rows() != n || metric_.cols() != n) {
    throw DomainError("metric table must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  std::vector<std::string> sorted = universe_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("duplicate element id in universe");
  }
}

FiniteStructure& FiniteStructure::set_relation(const std::string& name, std::vector<Rational> table) {
  const Symbol* s = sig_.relation(name);
  if (s == nullptr || name == symbols::kMetric) throw SymbolError("no relation '" + name + "' in signature");
  if (table.size() != tuple_count(size(), s->arity)) {
    throw DomainError("relation table '" + name + "' has wrong size");
  }
  relations_[name] = std::move(table);
  return *this;
}

FiniteStructure& FiniteStructure::set_function(const std::string& name, std::vector<std::size_t> table) {
  const Symbol* s = sig_.function(name);
  if (s == nullptr) throw SymbolError("no function '" + name + "' in signature");
  if (table.size() != tuple_count(size(), s->arity)) {
    throw DomainError("function table '" + name + "' has wrong size");
  }
  for (std::size_t v : table) {
    if (v >= size()) throw DomainError("function table '" + name + "' is not closed over the universe");
  }
  functions_[name] = std::move(table);
  return *this;
}

const std::vector<Rational>* FiniteStructure::relation_table(std::string_view name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

const std::vector<std::size_t>* FiniteStructure::function_table(std::string_view name) const {
  auto it = functions_.find(name);
  return it == functions_.end() ? nullptr : &it->second;
}

std::optional<std::size_t> FiniteStructure::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    if (universe_[i] == id) return i;
  }
  return std::nullopt;
}

bool operator==(const FiniteStructure& a, const FiniteStructure& b) {
  return a.sig_ == b.sig_ && a.universe_ == b.universe_ && a.metric_ == b.metric_ && a.relations_ == b.relations_ &&
         a.functions_ == b.functions_;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

std::string tuple_text(const FiniteStructure& m, const std::vector<std::size_t>& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) out += ",";
    out += m.universe()[t[i]];
  }
  return out + ")";
}

void check_metric(const FiniteStructure& m, ValidationReport& report) {
  const std::size_t n = m.size();
  const Rational zero(0), one(1);
  bool range_ok = true;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const Rational& d = m.distance(a, b);
      if (d < zero || d > one) {
        range_ok = false;
        report.violations.push_back({Violation::Kind::MetricRange, "d", {a}, {b},
                                     "d" + tuple_text(m, {a, b}) + " = " + d.str() + " outside [0,1]"});
      }
    }
  }
  if (!range_ok) return;
  for (std::size_t a = 0; a < n; ++a) {
    if (!m.distance(a, a).is_zero()) {
      report.violations.push_back({Violation::Kind::MetricDiagonal, "d", {a}, {a},
                                   "d" + tuple_text(m, {a, a}) + " = " + m.distance(a, a).str() + " != 0"});
    }
    for (std::size_t b = a + 1; b < n; ++b) {
      if (m.distance(a, b) != m.distance(b, a)) {
        report.violations.push_back({Violation::Kind::MetricSymmetry, "d", {a}, {b},
                                     "d not symmetric on " + tuple_text(m, {a, b})});
      }
      if (m.distance(a, b).is_zero()) {
        report.violations.push_back({Violation::Kind::MetricSeparation, "d", {a}, {b},
                                     "distinct elements at distance 0: " + tuple_text(m, {a, b})});
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        if (m.distance(a, c) > m.distance(a, b) + m.distance(b, c)) {
          report.violations.push_back({Violation::Kind::Triangle, "d", {a, c}, {b},
                                       "triangle inequality fails for " + tuple_text(m, {a, b, c})});
        }
      }
    }
  }
}

void check_relation(const FiniteStructure& m, const Symbol& s, ValidationReport& report) {
  const auto* table = m.relation_table(s.name);
  if (table == nullptr) {
    report.violations.push_back({Violation::Kind::MissingTable, s.name, {}, {}, "no table for relation " + s.name});
    return;
  }
  const std::size_t n = m.size();
  bool range_ok = true;
  for (std::size_t i = 0; i < table->size(); ++i) {
    const Rational& v = (*table)[i];
    if (v < Rational(0) || v > Rational(1)) {
      range_ok = false;
      const auto t = tuple_at(i, s.arity, n);
      report.violations.push_back({Violation::Kind::RelationRange, s.name, t, {},
                                   s.name + tuple_text(m, t) + " = " + v.str() + " outside [0,1]"});
    }
  }
  if (!range_ok) return;
  for (std::size_t i = 0; i < table->size(); ++i) {
    const auto a = tuple_at(i, s.arity, n);
    for (int pos = 0; pos < s.arity; ++pos) {
      auto b = a;
      for (std::size_t alt = a[static_cast<std::size_t>(pos)] + 1; alt < n; ++alt) {
        b[static_cast<std::size_t>(pos)] = alt;
        const Rational lhs = abs((*table)[i] - (*table)[tuple_index(b, n)]);
        const Rational rhs = s.lipschitz * m.distance(a[static_cast<std::size_t>(pos)], alt);
        if (lhs > rhs) {
          report.violations.push_back({Violation::Kind::RelationLipschitz, s.name, a, b,
                                       "|" + s.name + tuple_text(m, a) + " - " + s.name + tuple_text(m, b) +
                                           "| = " + lhs.str() + " > " + rhs.str()});
        }
      }
    }
  }
}

void check_function(const FiniteStructure& m, const Symbol& s, ValidationReport& report) {
  const auto* table = m.function_table(s.name);
  if (table == nullptr) {
    report.violations.push_back({Violation::Kind::MissingTable, s.name, {}, {}, "no table for function " + s.name});
    return;
  }
  const std::size_t n = m.size();
  for (std::size_t v : *table) {
    if (v >= n) {
      report.violations.push_back({Violation::Kind::FunctionRange, s.name, {}, {}, "value outside universe"});
      return;
    }
  }
  for (std::size_t i = 0; i < table->size(); ++i) {
    const auto a = tuple_at(i, s.arity, n);
    for (int pos = 0; pos < s.arity; ++pos) {
      auto b = a;
      for (std::size_t alt = a[static_cast<std::size_t>(pos)] + 1; alt < n; ++alt) {
        b[static_cast<std::size_t>(pos)] = alt;
        const Rational& lhs = m.distance((*table)[i], (*table)[tuple_index(b, n)]);
        const Rational rhs = s.lipschitz * m.distance(a[static_cast<std::size_t>(pos)], alt);
        if (lhs > rhs) {
          report.violations.push_back({Violation::Kind::FunctionLipschitz, s.name, a, b,
                                       "d(" + s.name + tuple_text(m, a) + "," + s.name + tuple_text(m, b) +
                                           ") = " + lhs.str() + " > " + rhs.str()});
        }
      }
    }
  }
}

}  // namespace

ValidationReport validate(const FiniteStructure& m) {
  ValidationReport report;
  check_metric(m, report);
  if (!report.ok() && report.violations.front().kind == Violation::Kind::MetricRange) return report;
  for (const auto& r : m.signature().relations()) check_relation(m, r, report);
  for (const auto& f : m.signature().functions()) check_function(m, f, report);
  return report;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

class Evaluator {
 public:
  Evaluator(const FiniteStructure& m, const Assignment& a) : m_(m) {
    for (const auto& [name, value] : a) {
      if (value >= m.size()) throw EvaluationError("assignment of '" + name + "' is outside the universe");
      env_.emplace_back(name, value);
    }
  }

  std::size_t term(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Variable:
        for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
          if (it->first == t.name()) return it->second;
        }
        throw EvaluationError("unbound variable '" + t.name() + "'");
      case Term::Kind::Literal:
        throw EvaluationError("rational literal " + t.value().str() + " has no interpretation in a finite structure");
      case Term::Kind::Scaled:
        return multiple(t.value(), term(t.operand()));
      case Term::Kind::Apply: {
        const auto* table = m_.function_table(t.name());
        if (table == nullptr) throw EvaluationError("no interpretation for function '" + t.name() + "'");
        std::vector<std::size_t> args;
        args.reserve(t.args().size());
        for (const auto& a : t.args()) args.push_back(term(a));
        return (*table)[tuple_index(args, m_.size())];
      }
    }
    return 0;
  }

  Rational formula(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::Constant:
        return f.value();
      case K::Atom: {
        if (f.name() == symbols::kMetric) return m_.distance(term(f.terms()[0]), term(f.terms()[1]));
        const auto* table = m_.relation_table(f.name());
        if (table == nullptr) throw EvaluationError("no interpretation for relation '" + f.name() + "'");
        std::vector<std::size_t> args;
        for (const auto& t : f.terms()) args.push_back(term(t));
        return (*table)[tuple_index(args, m_.size())];
      }
      case K::Sum:
        return formula(f.left()) + formula(f.right());
      case K::Scale:
        return f.value() * formula(f.body());
      case K::Meet:
        return min(formula(f.left()), formula(f.right()));
      case K::Join:
        return max(formula(f.left()), formula(f.right()));
      case K::Neg:
        return Rational(1) - formula(f.body());
      case K::Sup:
      case K::Inf: {
        const bool is_sup = f.kind() == K::Sup;
        std::optional<Rational> best;
        env_.emplace_back(f.name(), 0);
        for (std::size_t e = 0; e < m_.size(); ++e) {
          env_.back().second = e;
          Rational v = formula(f.body());
          if (!best || (is_sup ? v > *best : v < *best)) best = std::move(v);
        }
        env_.pop_back();
        return *best;
      }
    }
    return Rational(0);
  }

 private:
  // n*t as t + ... + t, negated through unary minus when n < 0.
  std::size_t multiple(const Rational& n, std::size_t value) {
    if (!n.is_integer()) {
      throw EvaluationError("non-integer multiple " + n.str() + " has no interpretation in a finite structure");
    }
    const long k = n.to_long();
    if (k == 0) return constant(symbols::kZero);
    const auto* plus = table(symbols::kPlus);
    std::size_t acc = value;
    for (long i = 1; i < std::abs(k); ++i) acc = (*plus)[acc * m_.size() + value];
    if (k < 0) acc = (*table(symbols::kMinus))[acc];
    return acc;
  }

  const std::vector<std::size_t>* table(std::string_view name) {
    const auto* t = m_.function_table(name);
    if (t == nullptr) throw EvaluationError("integer multiples need function '" + std::string(name) + "'");
    return t;
  }

  std::size_t constant(std::string_view name) { return table(name)->front(); }

  const FiniteStructure& m_;
  std::vector<std::pair<std::string, std::size_t>> env_;
};

}  // namespace

std::size_t evaluate_term(const FiniteStructure& m, const Term& t, const Assignment& a) {
  return Evaluator(m, a).term(t);
}

Rational evaluate(const FiniteStructure& m, const Formula& f, const Assignment& a) {
  return Evaluator(m, a).formula(f);
}

bool check_condition(const FiniteStructure& m, const Condition& c) {
  if (!free_vars(c.lhs).empty() || !free_vars(c.rhs).empty()) {
    throw FragmentError("conditions must be closed");
  }
  return evaluate(m, c.lhs) <= evaluate(m, c.rhs);
}

bool check_condition(const FiniteStructure& m, std::string_view text) {
  return check_condition(m, parse_condition(text, m.signature()));
}

// ---------------------------------------------------------------------------
// Lipschitz bounds

namespace {

Rational symbol_constant(const Signature& sig, std::string_view name) {
  const Symbol* s = sig.function(name);
  if (s == nullptr) throw SymbolError("no function '" + std::string(name) + "' in signature");
  return s->lipschitz;
}

Rational term_lipschitz(const Term& t, const std::string& var, const Signature& sig) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      return t.name() == var ? Rational(1) : Rational(0);
    case Term::Kind::Literal:
      return Rational(0);
    case Term::Kind::Scaled: {
      const long k = t.value().to_long();
      if (k == 0) return Rational(0);
      const Rational inner = term_lipschitz(t.operand(), var, sig);
      Rational acc = inner;
      for (long i = 1; i < std::abs(k); ++i) acc = symbol_constant(sig, symbols::kPlus) * (acc + inner);
      if (k < 0) acc *= symbol_constant(sig, symbols::kMinus);
      return acc;
    }
    case Term::Kind::Apply: {
      Rational sum(0);
      for (const auto& a : t.args()) sum += term_lipschitz(a, var, sig);
      return symbol_constant(sig, t.name()) * sum;
    }
  }
  return Rational(0);
}

}  // namespace

Rational lipschitz_bound(const Formula& f, const std::string& var, const Signature& sig) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Constant:
      return Rational(0);
    case K::Atom: {
      const Symbol* r = sig.relation(f.name());
      if (r == nullptr) throw SymbolError("no relation '" + f.name() + "' in signature");
      Rational sum(0);
      for (const auto& t : f.terms()) sum += term_lipschitz(t, var, sig);
      return r->lipschitz * sum;
    }
    case K::Sum:
      return lipschitz_bound(f.left(), var, sig) + lipschitz_bound(f.right(), var, sig);
    case K::Scale:
      return abs(f.value()) * lipschitz_bound(f.body(), var, sig);
    case K::Meet:
    case K::Join:
      return max(lipschitz_bound(f.left(), var, sig), lipschitz_bound(f.right(), var, sig));
    case K::Neg:
      return lipschitz_bound(f.body(), var, sig);
    case K::Sup:
    case K::Inf:
      return f.name() == var ? Rational(0) : lipschitz_bound(f.body(), var, sig);
  }
  return Rational(0);
}

// ---------------------------------------------------------------------------
// Builders

FiniteStructure classical_to_structure(Signature sig, std::vector<std::string> universe,
                                       const std::map<std::string, std::vector<bool>>& relations,
                                       const std::map<std::string, std::vector<std::size_t>>& functions) {
  const auto n = static_cast<Eigen::Index>(universe.size());
  RationalMatrix metric = RationalMatrix::Constant(n, n, Rational(1));
  for (Eigen::Index i = 0; i < n; ++i) metric(i, i) = Rational(0);
  FiniteStructure m(std::move(sig), std::move(universe), std::move(metric));
  for (const auto& [name, table] : relations) {
    std::vector<Rational> values;
    values.reserve(table.size());
    for (bool b : table) values.emplace_back(b ? 1 : 0);
    m.set_relation(name, std::move(values));
  }
  for (const auto& [name, table] : functions) m.set_function(name, table);
  return m;
}

Signature vector_space_signature() {
  Signature sig;
  sig.add_function("0", 0, Rational(1)).add_function("+", 2, Rational(1)).add_function("-", 1, Rational(1));
  return sig;
}

Signature ring_signature() {
  Signature sig;
  sig.add_function("0", 0, Rational(1))
      .add_function("1", 0, Rational(1))
      .add_function("+", 2, Rational(1))
      .add_function("-", 1, Rational(1))
      .add_function("*", 2, Rational(1));
  return sig;
}

Signature boolean_algebra_signature() {
  Signature sig;
  sig.add_function("0", 0, Rational(1))
      .add_function("1", 0, Rational(1))
      .add_function(std::string(symbols::kMeet), 2, Rational(1))
      .add_function(std::string(symbols::kJoin), 2, Rational(1))
      .add_function("compl", 1, Rational(1));
  return sig;
}

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

namespace {

void require_prime(int q) {
  if (!is_prime(q)) throw DomainError(std::to_string(q) + " is not prime");
}

std::vector<std::string> residues(int q) {
  std::vector<std::string> out;
  for (int i = 0; i < q; ++i) out.push_back(std::to_string(i));
  return out;
}

std::map<std::string, std::vector<std::size_t>> field_tables(int q, bool with_ring) {
  const auto n = static_cast<std::size_t>(q);
  std::vector<std::size_t> plus(n * n), times(n * n), minus(n);
  for (std::size_t a = 0; a < n; ++a) {
    minus[a] = (n - a) % n;
    for (std::size_t b = 0; b < n; ++b) {
      plus[a * n + b] = (a + b) % n;
      times[a * n + b] = (a * b) % n;
    }
  }
  std::map<std::string, std::vector<std::size_t>> out{{"0", {0}}, {"+", plus}, {"-", minus}};
  if (with_ring) {
    out["1"] = {1};
    out["*"] = times;
  }
  return out;
}

}  // namespace

FiniteStructure prime_field_vector_space(int q) {
  require_prime(q);
  return classical_to_structure(vector_space_signature(), residues(q), {}, field_tables(q, false));
}

FiniteStructure prime_field_ring(int q) {
  require_prime(q);
  return classical_to_structure(ring_signature(), residues(q), {}, field_tables(q, true));
}

FiniteStructure boolean_algebra(int k, const std::vector<Rational>& atom_weights) {
  if (k < 1 || k > 10) throw DomainError("boolean algebra exponent must be in [1,10]");
  if (static_cast<int>(atom_weights.size()) != k) throw DomainError("need one weight per atom");
  Rational total(0);
  for (const auto& w : atom_weights) {
    if (w <= Rational(0)) throw DomainError("atom weights must be strictly positive");
    total += w;
  }
  if (total != Rational(1)) throw DomainError("atom weights must sum to 1");

  const std::size_t n = std::size_t{1} << k;
  std::vector<std::string> universe;
  for (std::size_t x = 0; x < n; ++x) {
    std::string id;
    for (int bit = k - 1; bit >= 0; --bit) id += ((x >> bit) & 1U) ? '1' : '0';
    universe.push_back(id);
  }
  // Atom i is bit (k-1-i) so that the first weight belongs to the leading digit.
  auto measure = [&](std::size_t x) {
    Rational mu(0);
    for (int i = 0; i < k; ++i) {
      if ((x >> (k - 1 - i)) & 1U) mu += atom_weights[static_cast<std::size_t>(i)];
    }
    return mu;
  };
  RationalMatrix metric(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) metric(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = measure(a ^ b);
  }
  FiniteStructure m(boolean_algebra_signature(), std::move(universe), std::move(metric));
  std::vector<std::size_t> meet(n * n), join(n * n), compl_table(n);
  for (std::size_t a = 0; a < n; ++a) {
    compl_table[a] = (n - 1) ^ a;
    for (std::size_t b = 0; b < n; ++b) {
      meet[a * n + b] = a & b;
      join[a * n + b] = a | b;
    }
  }
  m.set_function("0", {0}).set_function("1", {n - 1});
  m.set_function(std::string(symbols::kMeet), meet).set_function(std::string(symbols::kJoin), join);
  m.set_function("compl", compl_table);
  return m;
}

}  // namespace alqe
