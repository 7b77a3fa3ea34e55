#include "alqe/odag.hpp"

#include <algorithm>
#include <random>
#include <tuple>

#include "alqe/errors.hpp"

namespace alqe {

namespace {

using Meet = std::vector<LinearExpr>;
using NF = MeetJoinNormalForm;

void canonicalize(NF& nf) {
  for (auto& m : nf.joinands) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  }
  std::sort(nf.joinands.begin(), nf.joinands.end());
  nf.joinands.erase(std::unique(nf.joinands.begin(), nf.joinands.end()), nf.joinands.end());
}

NF leaf(LinearExpr e) { return NF{{{std::move(e)}}}; }

NF nf_add(const NF& a, const NF& b) {
  NF out;
  for (const auto& ma : a.joinands) {
    for (const auto& mb : b.joinands) {
      Meet m;
      for (const auto& x : ma) {
        for (const auto& y : mb) m.push_back(x + y);
      }
      out.joinands.push_back(std::move(m));
    }
  }
  canonicalize(out);
  return out;
}

NF nf_join(const NF& a, const NF& b) {
  NF out = a;
  out.joinands.insert(out.joinands.end(), b.joinands.begin(), b.joinands.end());
  canonicalize(out);
  return out;
}

NF nf_meet(const NF& a, const NF& b) {
  NF out;
  for (const auto& ma : a.joinands) {
    for (const auto& mb : b.joinands) {
      Meet m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      out.joinands.push_back(std::move(m));
    }
  }
  canonicalize(out);
  return out;
}

// -(\/_i /\_j a_ij) = /\_i \/_j -a_ij, distributed back into a join of meets.
NF nf_neg(const NF& a) {
  std::optional<NF> out;
  for (const auto& m : a.joinands) {
    NF factor;
    for (const auto& e : m) factor.joinands.push_back({-e});
    out = out ? nf_meet(*out, factor) : factor;
  }
  canonicalize(*out);
  return *out;
}

NF nf_scale(const NF& a, const Rational& r) {
  if (r.is_zero()) return leaf(LinearExpr::literal(Rational(0)));
  NF out = r.sign() < 0 ? nf_neg(a) : a;
  const Rational mag = abs(r);
  for (auto& m : out.joinands) {
    for (auto& e : m) e *= mag;
  }
  canonicalize(out);
  return out;
}

Term difference(const Formula& atom) {
  if (atom.name() != symbols::kMetric) throw SymbolError("relation '" + atom.name() + "' is not in the ODAG language");
  return atom.terms()[0] + -atom.terms()[1];
}

void collect_atom_terms(const Formula& f, std::vector<Term>& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Constant:
      return;
    case K::Atom:
      out.push_back(difference(f));
      return;
    case K::Sum:
    case K::Meet:
    case K::Join:
      collect_atom_terms(f.left(), out);
      collect_atom_terms(f.right(), out);
      return;
    case K::Scale:
    case K::Neg:
    case K::Sup:
    case K::Inf:
      collect_atom_terms(f.body(), out);
      return;
  }
}

// Zeros and pairwise crossings in `var` of the linear pieces of each term,
// with the other variables fixed by `a`, plus cell interiors and two outer
// points.
std::vector<Rational> breakpoint_grid(const std::vector<Term>& terms, const std::string& var, OdagAssignment a,
                                      int refinement) {
  a[var] = Rational(0);
  std::vector<Rational> candidates;
  for (const auto& t : terms) {
    std::vector<std::pair<Rational, Rational>> lines;  // (slope, intercept)
    for (const auto& m : term_normal_form(t).joinands) {
      for (const auto& e : m) lines.emplace_back(e.coefficient(var), e.evaluate(a));
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto& [s1, c1] = lines[i];
      if (!s1.is_zero()) candidates.push_back(-c1 / s1);
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        const auto& [s2, c2] = lines[j];
        if (s1 != s2) candidates.push_back((c2 - c1) / (s1 - s2));
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (candidates.empty()) candidates.push_back(Rational(0));
  std::vector<Rational> grid{candidates.front() - Rational(1)};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    grid.push_back(candidates[i]);
    if (i + 1 == candidates.size()) break;
    const Rational step = (candidates[i + 1] - candidates[i]) / Rational(refinement + 1);
    for (int k = 1; k <= refinement; ++k) grid.push_back(candidates[i] + step * Rational(k));
  }
  grid.push_back(candidates.back() + Rational(1));
  return grid;
}

class DiscreteEvaluator {
 public:
  explicit DiscreteEvaluator(const BreakpointOptions& options) : options_(options) {}

  Rational eval(const Formula& f, const OdagAssignment& a) const {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::Constant:
        return f.value();
      case K::Atom: {
        if (f.name() != symbols::kMetric) throw SymbolError("relation '" + f.name() + "' is not in the ODAG language");
        return Rational(evaluate_odag_term(f.terms()[0], a) == evaluate_odag_term(f.terms()[1], a) ? 0 : 1);
      }
      case K::Sum:
        return eval(f.left(), a) + eval(f.right(), a);
      case K::Scale:
        return f.value() * eval(f.body(), a);
      case K::Meet:
        return min(eval(f.left(), a), eval(f.right(), a));
      case K::Join:
        return max(eval(f.left(), a), eval(f.right(), a));
      case K::Neg:
        return Rational(1) - eval(f.body(), a);
      case K::Sup:
      case K::Inf: {
        if (!is_quantifier_free(f.body())) {
          throw FragmentError("quantifier depth above 1 is not supported over the rationals: " + to_string(f));
        }
        std::vector<Term> terms;
        collect_atom_terms(f.body(), terms);
        OdagAssignment inner = a;
        std::optional<Rational> best;
        for (const auto& p : breakpoint_grid(terms, f.name(), a, options_.refinement)) {
          inner[f.name()] = p;
          Rational v = eval(f.body(), inner);
          if (!best || (f.kind() == K::Sup ? *best < v : v < *best)) best = std::move(v);
        }
        return *best;
      }
    }
    return Rational(0);
  }

 private:
  const BreakpointOptions& options_;
};

struct AxiomText {
  const char* label;
  const char* lhs;
  const char* rhs;
};

std::vector<AxiomText> axiom_texts(std::string_view id) {
  if (id == "A1") {
    return {{"associativity", "d(x + (y + z), (x + y) + z)", "0"},
            {"commutativity", "d(x + y, y + x)", "0"},
            {"identity", "d(x + 0, x)", "0"},
            {"inverse", "d(x + -x, 0)", "0"},
            {"torsion-free n=2", "|x + x|", "|x|"},
            {"torsion-free n=3", "|x + x + x|", "|x|"},
            {"non-trivial", "sup x. |x|", "1"}};
  }
  if (id == "A2") {
    return {{"meet commutativity", "d(x /\\ y, y /\\ x)", "0"},
            {"join commutativity", "d(x \\/ y, y \\/ x)", "0"},
            {"meet associativity", "d(x /\\ (y /\\ z), (x /\\ y) /\\ z)", "0"},
            {"join associativity", "d(x \\/ (y \\/ z), (x \\/ y) \\/ z)", "0"},
            {"meet absorption", "d(x /\\ (x \\/ y), x)", "0"},
            {"join absorption", "d(x \\/ (x /\\ y), x)", "0"},
            {"meet distributivity", "d(x /\\ (y \\/ z), (x /\\ y) \\/ (x /\\ z))", "0"},
            {"join distributivity", "d(x \\/ (y /\\ z), (x \\/ y) /\\ (x \\/ z))", "0"}};
  }
  if (id == "A3") return {{"", "d(-(x /\\ y), -x \\/ -y)", "0"}};
  if (id == "A4") return {{"", "d(z + (x /\\ y), (z + x) /\\ (z + y))", "0"}};
  if (id == "A5") return {{"", "d(x /\\ y, x) /\\ d(x /\\ y, y)", "0"}};
  if (id == "A6") return {{"", "|x - y|", "d(x,y)"}};
  if (id == "A7") return {{"", "sup x. |x \\/ 0|", "1"}};
  if (id == "A8") return {{"", "|x /\\ y| + |x \\/ y|", "|x| + |y|"}};
  if (id == "A9") {
    return {{"n=1", "|1*x /\\ y|", "|x /\\ y|"}, {"n=2", "|2*x /\\ y|", "|x /\\ y|"}, {"n=3", "|3*x /\\ y|", "|x /\\ y|"}};
  }
  if (id == "A10") {
    return {{"first", "|(x \\/ y) \\/ 0|", "|(x \\/ 0) \\/ (y \\/ 0)|"},
            {"second", "|(x \\/ y) \\/ 0|", "|(x \\/ 0) + (y \\/ 0)|"}};
  }
  if (id == "A11") {
    return {{"n=1", "inf x. |1*x - y|", "0"}, {"n=2", "inf x. |2*x - y|", "0"}, {"n=3", "inf x. |3*x - y|", "0"}};
  }
  if (id == "A12") {
    return {{"n=1", "inf x. |x /\\ y1|", "|0 /\\ y1|"},
            {"n=2", "inf x. (|x /\\ y1| + |x /\\ y2|)", "|0 /\\ y1| + |0 /\\ y2|"},
            {"n=3", "inf x. (|x /\\ y1| + |x /\\ y2| + |x /\\ y3|)", "|0 /\\ y1| + |0 /\\ y2| + |0 /\\ y3|"}};
  }
  if (id == "A13") {
    return {{"", "inf t. (|t /\\ x| - |t /\\ y|)",
             "|0 /\\ x| - |0 /\\ y| + |y \\/ 0| - |(y \\/ 0) /\\ ((x \\/ 0) + (-x \\/ 0))|"}};
  }
  throw DomainError("unknown axiom '" + std::string(id) + "' (expected A1..A13)");
}

Rational random_rational(std::mt19937_64& rng, int box, int max_den) {
  const int den = std::uniform_int_distribution<int>(1, max_den)(rng);
  const int num = std::uniform_int_distribution<int>(-box * den, box * den)(rng);
  return Rational(num, den);
}

// ---- one-variable rewriter ----

struct Unreduced {
  std::string reason;
};

struct Part {
  Rational coefficient;
  std::optional<Meet> atom;  // nullopt is the constant 1
};

using Parts = std::vector<Part>;

Meet atom_meet(const Formula& atom) {
  const Term t = difference(atom);
  NF nf = term_normal_form(t);
  if (nf.joinands.size() == 1) return nf.joinands.front();
  // |t| = |-t|, and -t may be a single meet where t is not.
  nf = nf_neg(nf);
  if (nf.joinands.size() == 1) return nf.joinands.front();
  throw Unreduced{"atom " + to_string(atom) + " is a join of several meets either way round"};
}

bool closed_under_negation(const Meet& m) {
  return std::all_of(m.begin(), m.end(),
                     [&](const LinearExpr& e) { return std::find(m.begin(), m.end(), -e) != m.end(); });
}

Parts reduce(const Formula& f);

// max(|u|, |v|) for {0,1}-valued atoms is [u != 0 or v != 0], which is
// |u /\ -u /\ v /\ -v|.
Meet join_atoms(const Formula& f) {
  Meet out;
  for (const Formula* side : {&f.left(), &f.right()}) {
    const Parts p = reduce(*side);
    if (p.size() != 1 || p.front().coefficient != Rational(1) || !p.front().atom) {
      throw Unreduced{"lattice connective over a non-atomic formula in " + to_string(f)};
    }
    const Meet& m = *p.front().atom;
    if (m.size() == 1) {
      out.push_back(m.front());
      out.push_back(-m.front());
    } else if (closed_under_negation(m)) {
      out.insert(out.end(), m.begin(), m.end());
    } else {
      throw Unreduced{"lattice connective over a multi-piece atom in " + to_string(f)};
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Parts reduce(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Constant:
      return {{f.value(), std::nullopt}};
    case K::Atom:
      return {{Rational(1), atom_meet(f)}};
    case K::Sum: {
      Parts out = reduce(f.left());
      for (auto& p : reduce(f.right())) out.push_back(std::move(p));
      return out;
    }
    case K::Scale: {
      Parts out = reduce(f.body());
      for (auto& p : out) p.coefficient *= f.value();
      return out;
    }
    case K::Neg: {
      Parts out{{Rational(1), std::nullopt}};
      for (auto& p : reduce(f.body())) out.push_back({-p.coefficient, std::move(p.atom)});
      return out;
    }
    case K::Join:
      return {{Rational(1), join_atoms(f)}};
    case K::Meet: {
      // min = a + b - max on {0,1} values.
      Parts out = reduce(f.left());
      for (auto& p : reduce(f.right())) out.push_back(std::move(p));
      out.push_back({Rational(-1), join_atoms(f)});
      return out;
    }
    case K::Sup:
    case K::Inf:
      break;
  }
  throw FragmentError("qf_lemma_rewrite needs a quantifier-free formula");
}

Formula abs_of(const Term& t) { return Formula::dist(t, Term::apply(std::string(symbols::kZero))); }

void push_shapes(const Meet& m, const std::string& var, const Rational& coefficient,
                 std::vector<std::pair<Rational, Formula>>& out) {
  std::optional<Rational> a;  // x + a
  std::optional<Rational> b;  // -x + b
  std::optional<Rational> c;
  auto lower = [](std::optional<Rational>& slot, const Rational& v) { slot = slot ? min(*slot, v) : v; };
  for (const auto& e : m) {
    const Rational n = e.coefficient(var);
    const Rational rest = e.constant;
    if (n.is_zero()) {
      lower(c, rest);
    } else if (n.sign() > 0) {
      lower(a, rest / n);  // nx + r = n(x + r/n), and the factor n drops out of the atom
    } else {
      lower(b, rest / abs(n));
    }
  }
  const Term x = Term::variable(var);
  auto plus_x = [&](const Rational& r) { return x + Term::literal(r); };
  auto minus_x = [&](const Rational& r) { return -x + Term::literal(r); };
  auto one = Formula::constant(Rational(1));
  if (a && b && c) {
    out.emplace_back(coefficient, abs_of(term_meet(term_meet(plus_x(*a), minus_x(*b)), Term::literal(*c))));
  } else if (a && b) {
    out.emplace_back(coefficient, abs_of(term_meet(plus_x(*a), minus_x(*b))));
  } else if (a && c) {
    out.emplace_back(coefficient, abs_of(term_meet(plus_x(*a), Term::literal(*c))));
  } else if (a) {
    out.emplace_back(coefficient, abs_of(plus_x(*a)));
  } else if (b && c) {
    // |(-x + b) /\ c|: identically 1 for c < 0, [x > b] for c = 0, [x != b]
    // for c > 0.
    if (c->sign() < 0) {
      out.emplace_back(coefficient, one);
    } else {
      out.emplace_back(coefficient, abs_of(plus_x(-*b)));
      if (c->is_zero()) out.emplace_back(-coefficient, abs_of(term_meet(plus_x(-*b), Term::literal(Rational(0)))));
    }
  } else if (b) {
    out.emplace_back(coefficient, abs_of(plus_x(-*b)));
  } else if (!c->is_zero()) {
    out.emplace_back(coefficient, one);
  }
}

}  // namespace

Signature odag_signature() {
  Signature sig;
  sig.add_function(std::string(symbols::kZero), 0)
      .add_function(std::string(symbols::kPlus), 2)
      .add_function(std::string(symbols::kMinus), 1)
      .add_function(std::string(symbols::kMeet), 2)
      .add_function(std::string(symbols::kJoin), 2);
  return sig;
}

LinearExpr LinearExpr::variable(const std::string& name) {
  LinearExpr e;
  e.coefficients[name] = Rational(1);
  return e;
}

LinearExpr LinearExpr::literal(const Rational& c) {
  LinearExpr e;
  e.constant = c;
  return e;
}

Rational LinearExpr::coefficient(const std::string& var) const {
  const auto it = coefficients.find(var);
  return it == coefficients.end() ? Rational(0) : it->second;
}

Rational LinearExpr::evaluate(const OdagAssignment& a) const {
  Rational v = constant;
  for (const auto& [name, c] : coefficients) {
    const auto it = a.find(name);
    if (it == a.end()) throw EvaluationError("unbound variable '" + name + "'");
    v += c * it->second;
  }
  return v;
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& o) {
  constant += o.constant;
  for (const auto& [name, c] : o.coefficients) {
    Rational& slot = coefficients[name];
    slot += c;
    if (slot.is_zero()) coefficients.erase(name);
  }
  return *this;
}

LinearExpr& LinearExpr::operator*=(const Rational& r) {
  constant *= r;
  if (r.is_zero()) coefficients.clear();
  for (auto& [name, c] : coefficients) c *= r;
  return *this;
}

Term LinearExpr::to_term() const {
  std::optional<Term> out;
  for (const auto& [name, c] : coefficients) {
    Term t = Term::variable(name);
    if (c == Rational(-1)) {
      t = -t;
    } else if (c != Rational(1)) {
      t = Term::scaled(c, t);
    }
    out = out ? *out + t : t;
  }
  if (!out) return Term::literal(constant);
  return constant.is_zero() ? *out : *out + Term::literal(constant);
}

Rational MeetJoinNormalForm::evaluate(const OdagAssignment& a) const {
  std::optional<Rational> best;
  for (const auto& m : joinands) {
    std::optional<Rational> low;
    for (const auto& e : m) {
      Rational v = e.evaluate(a);
      if (!low || v < *low) low = std::move(v);
    }
    if (!best || *best < *low) best = std::move(low);
  }
  return *best;
}

Term MeetJoinNormalForm::to_term() const {
  std::optional<Term> out;
  for (const auto& m : joinands) {
    std::optional<Term> meet;
    for (const auto& e : m) meet = meet ? term_meet(*meet, e.to_term()) : e.to_term();
    out = out ? term_join(*out, *meet) : *meet;
  }
  return *out;
}

MeetJoinNormalForm term_normal_form(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      return leaf(LinearExpr::variable(t.name()));
    case Term::Kind::Literal:
      return leaf(LinearExpr::literal(t.value()));
    case Term::Kind::Scaled:
      return nf_scale(term_normal_form(t.operand()), t.value());
    case Term::Kind::Apply:
      break;
  }
  const auto& args = t.args();
  if (t.name() == symbols::kZero && args.empty()) return leaf(LinearExpr::literal(Rational(0)));
  if (t.name() == symbols::kPlus && args.size() == 2) return nf_add(term_normal_form(args[0]), term_normal_form(args[1]));
  if (t.name() == symbols::kMinus && args.size() == 1) return nf_neg(term_normal_form(args[0]));
  if (t.name() == symbols::kMinus && args.size() == 2) {
    return nf_add(term_normal_form(args[0]), nf_neg(term_normal_form(args[1])));
  }
  if (t.name() == symbols::kMeet && args.size() == 2) return nf_meet(term_normal_form(args[0]), term_normal_form(args[1]));
  if (t.name() == symbols::kJoin && args.size() == 2) return nf_join(term_normal_form(args[0]), term_normal_form(args[1]));
  throw SymbolError("'" + t.name() + "' is not in the ODAG language");
}

Rational evaluate_odag_term(const Term& t, const OdagAssignment& a) {
  switch (t.kind()) {
    case Term::Kind::Variable: {
      const auto it = a.find(t.name());
      if (it == a.end()) throw EvaluationError("unbound variable '" + t.name() + "'");
      return it->second;
    }
    case Term::Kind::Literal:
      return t.value();
    case Term::Kind::Scaled:
      return t.value() * evaluate_odag_term(t.operand(), a);
    case Term::Kind::Apply:
      break;
  }
  const auto& args = t.args();
  if (t.name() == symbols::kZero && args.empty()) return Rational(0);
  if (t.name() == symbols::kPlus && args.size() == 2) return evaluate_odag_term(args[0], a) + evaluate_odag_term(args[1], a);
  if (t.name() == symbols::kMinus && args.size() == 1) return -evaluate_odag_term(args[0], a);
  if (t.name() == symbols::kMinus && args.size() == 2) return evaluate_odag_term(args[0], a) - evaluate_odag_term(args[1], a);
  if (t.name() == symbols::kMeet && args.size() == 2) return min(evaluate_odag_term(args[0], a), evaluate_odag_term(args[1], a));
  if (t.name() == symbols::kJoin && args.size() == 2) return max(evaluate_odag_term(args[0], a), evaluate_odag_term(args[1], a));
  throw SymbolError("'" + t.name() + "' is not in the ODAG language");
}

Rational eval_discreteQ(const Formula& f, const OdagAssignment& a, const BreakpointOptions& options) {
  if (options.refinement < 1) throw DomainError("breakpoint refinement must be at least 1");
  return DiscreteEvaluator(options).eval(f, a);
}

std::vector<std::string> axiom_ids() {
  return {"A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "A11", "A12", "A13"};
}

std::vector<AxiomInstance> axiom_instances(std::string_view id) {
  const Signature sig = odag_signature();
  std::vector<AxiomInstance> out;
  for (const auto& text : axiom_texts(id)) {
    Formula lhs = parse_formula(text.lhs, sig);
    Formula rhs = parse_formula(text.rhs, sig);
    std::vector<std::string> vars = free_vars(lhs);
    for (const auto& v : free_vars(rhs)) {
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    std::string label = std::string(id);
    if (*text.label != '\0') label += " (" + std::string(text.label) + ")";
    out.push_back({std::move(label), std::move(vars), std::move(lhs), std::move(rhs)});
  }
  return out;
}

AxiomReport check_axiom(std::string_view id, const AxiomCheckOptions& options) {
  const auto instances = axiom_instances(id);
  std::vector<std::string> vars;
  for (const auto& inst : instances) {
    for (const auto& v : inst.vars) {
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
  }
  AxiomReport report;
  report.axiom = std::string(id);

  auto check = [&](const OdagAssignment& a) {
    ++report.assignments;
    for (const auto& inst : instances) {
      Rational lhs = eval_discreteQ(inst.lhs, a);
      Rational rhs = eval_discreteQ(inst.rhs, a);
      if (lhs == rhs) continue;
      AxiomCounterexample cx{inst.label, {}, std::move(lhs), std::move(rhs)};
      for (const auto& v : inst.vars) cx.witness.emplace_back(v, a.at(v));
      report.passed = false;
      report.counterexample = std::move(cx);
      return false;
    }
    return true;
  };

  static const Rational probes[] = {Rational(1), Rational(-1), Rational(0)};
  std::size_t grid = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) grid *= 3;
  for (std::size_t index = 0; index < grid; ++index) {
    OdagAssignment a;
    std::size_t rest = index;
    for (std::size_t i = vars.size(); i-- > 0;) {
      a[vars[i]] = probes[rest % 3];
      rest /= 3;
    }
    if (!check(a)) return report;
  }
  std::mt19937_64 rng(options.seed);
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    OdagAssignment a;
    for (const auto& v : vars) a[v] = random_rational(rng, options.box, options.max_denominator);
    if (!check(a)) return report;
  }
  return report;
}

Formula interval_distance(IntervalKind kind, const Rational& a, const Rational& b, const std::string& var) {
  if (kind == IntervalKind::Closed && b < a) throw DomainError("empty interval [" + a.str() + ", " + b.str() + "]");
  const Term x = Term::variable(var);
  const Term zero = Term::apply(std::string(symbols::kZero));
  const Term below = Term::literal(a) + -x;  // a - x
  const Term above = x + -Term::literal(b);  // x - b
  switch (kind) {
    case IntervalKind::Closed:
      return abs_of(term_join(term_join(below, above), zero));
    case IntervalKind::LowerRay:
      return abs_of(term_join(below, zero));
    case IntervalKind::UpperRay:
      return abs_of(term_join(above, zero));
  }
  throw DomainError("unknown interval kind");
}

Formula interval_distance_inf(IntervalKind kind, const Rational& a, const Rational& b, const std::string& var) {
  if (kind == IntervalKind::Closed && b < a) throw DomainError("empty interval [" + a.str() + ", " + b.str() + "]");
  const std::string tv = var == "t" ? "s" : "t";
  const Term x = Term::variable(var);
  const Term t = Term::variable(tv);
  Term target = t;
  if (kind != IntervalKind::UpperRay) target = term_join(target, Term::literal(a));
  if (kind != IntervalKind::LowerRay) target = term_meet(target, Term::literal(b));
  return Formula::inf(tv, Formula::dist(x, target));
}

bool interval_contains(IntervalKind kind, const Rational& a, const Rational& b, const Rational& x) {
  switch (kind) {
    case IntervalKind::Closed:
      return a <= x && x <= b;
    case IntervalKind::LowerRay:
      return a <= x;
    case IntervalKind::UpperRay:
      return x <= b;
  }
  return false;
}

LemmaRewrite qf_lemma_rewrite(const Formula& f) {
  if (!is_quantifier_free(f)) throw FragmentError("qf_lemma_rewrite needs a quantifier-free formula");
  const auto vars = free_vars(f);
  if (vars.size() > 1) throw FragmentError("qf_lemma_rewrite handles one free variable, got " + std::to_string(vars.size()));
  const std::string var = vars.empty() ? "x" : vars.front();

  Parts parts;
  try {
    parts = reduce(f);
  } catch (const Unreduced& u) {
    return {std::nullopt, "unreduced: " + u.reason};
  }

  Rational constant(0);
  std::vector<std::pair<Rational, Formula>> shapes;
  for (const auto& p : parts) {
    if (!p.atom) {
      constant += p.coefficient;
    } else {
      push_shapes(*p.atom, var, p.coefficient, shapes);
    }
  }
  SignedCombination out;
  for (auto& [r, g] : shapes) {
    if (g.kind() == Formula::Kind::Constant) {
      constant += r * g.value();
      continue;
    }
    const std::string key = to_string(g);
    auto it = std::find_if(out.terms.begin(), out.terms.end(), [&](const SignedTerm& s) { return to_string(s.formula) == key; });
    if (it == out.terms.end()) {
      out.terms.push_back({r, g});
    } else {
      it->coefficient += r;
    }
  }
  std::erase_if(out.terms, [](const SignedTerm& s) { return s.coefficient.is_zero(); });
  if (!constant.is_zero()) out.terms.insert(out.terms.begin(), {constant, Formula::constant(Rational(1))});

  std::vector<Term> terms;
  collect_atom_terms(f, terms);
  const Formula rewritten = out.to_formula();
  collect_atom_terms(rewritten, terms);
  for (const auto& p : breakpoint_grid(terms, var, {}, 1)) {
    const OdagAssignment a{{var, p}};
    if (eval_discreteQ(f, a) != eval_discreteQ(rewritten, a)) {
      return {std::nullopt, "verification failed at " + var + " = " + p.str()};
    }
  }
  return {std::move(out), {}};
}

std::string to_string(const SignedCombination& c) {
  if (c.terms.empty()) return "0";
  std::string out;
  for (const auto& t : c.terms) {
    const Rational mag = abs(t.coefficient);
    if (out.empty()) {
      if (t.coefficient.sign() < 0) out = "-";
    } else {
      out += t.coefficient.sign() < 0 ? " - " : " + ";
    }
    const Formula& g = t.formula;
    if (g.kind() == Formula::Kind::Constant) {
      out += (mag * g.value()).str();
      continue;
    }
    if (mag != Rational(1)) out += mag.str() + "*";
    const bool abs_atom = g.kind() == Formula::Kind::Atom && g.name() == symbols::kMetric &&
                          g.terms()[1].kind() == Term::Kind::Apply && g.terms()[1].name() == symbols::kZero;
    out += abs_atom ? "|" + to_string(g.terms()[0]) + "|" : "(" + to_string(g) + ")";
  }
  return out;
}

}  // namespace alqe
