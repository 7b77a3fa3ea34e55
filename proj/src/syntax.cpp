#include "alqe/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>
#include <utility>

namespace alqe {

// ---------------------------------------------------------------------------
// Signature

void Signature::check_fresh(const std::string& name) const {
  if (name.empty()) throw SymbolError("empty symbol name");
  if (name == symbols::kMetric) throw SymbolError("symbol name 'd' is reserved for the metric");
  if (function(name) != nullptr || relation(name) != nullptr) {
    throw SymbolError("duplicate symbol '" + name + "'");
  }
}

Signature& Signature::add_function(std::string name, int arity, Rational lipschitz) {
  check_fresh(name);
  if (arity < 0) throw SymbolError("negative arity for '" + name + "'");
  if (lipschitz < Rational(0)) throw SymbolError("negative Lipschitz constant for '" + name + "'");
  functions_.push_back({std::move(name), arity, std::move(lipschitz)});
  return *this;
}

Signature& Signature::add_relation(std::string name, int arity, Rational lipschitz) {
  check_fresh(name);
  if (arity < 1) throw SymbolError("relation '" + name + "' needs arity >= 1");
  if (lipschitz < Rational(0)) throw SymbolError("negative Lipschitz constant for '" + name + "'");
  relations_.push_back({std::move(name), arity, std::move(lipschitz)});
  return *this;
}

const Symbol* Signature::function(std::string_view name) const {
  for (const auto& s : functions_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const Symbol* Signature::relation(std::string_view name) const {
  static const Symbol metric{std::string(symbols::kMetric), 2, Rational(1)};
  if (name == symbols::kMetric) return &metric;
  for (const auto& s : relations_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

bool Signature::has_constant(std::string_view name) const {
  const Symbol* s = function(name);
  return s != nullptr && s->arity == 0;
}

// ---------------------------------------------------------------------------
// Term

Term Term::variable(std::string name) {
  return Term(std::make_shared<const Node>(Node{Kind::Variable, std::move(name), {}, Rational(0)}));
}

Term Term::apply(std::string symbol, std::vector<Term> args) {
  return Term(std::make_shared<const Node>(Node{Kind::Apply, std::move(symbol), std::move(args), Rational(0)}));
}

Term Term::literal(Rational value) {
  return Term(std::make_shared<const Node>(Node{Kind::Literal, {}, {}, std::move(value)}));
}

Term Term::scaled(Rational factor, Term operand) {
  return Term(std::make_shared<const Node>(Node{Kind::Scaled, {}, {std::move(operand)}, std::move(factor)}));
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Variable:
      return a.name() == b.name();
    case Term::Kind::Literal:
      return a.value() == b.value();
    case Term::Kind::Scaled:
      return a.value() == b.value() && a.operand() == b.operand();
    case Term::Kind::Apply:
      return a.name() == b.name() && a.args() == b.args();
  }
  return false;
}

Term operator+(const Term& a, const Term& b) { return Term::apply(std::string(symbols::kPlus), {a, b}); }
Term operator-(const Term& a) { return Term::apply(std::string(symbols::kMinus), {a}); }
Term operator*(const Rational& r, const Term& t) { return Term::scaled(r, t); }
Term term_meet(const Term& a, const Term& b) { return Term::apply(std::string(symbols::kMeet), {a, b}); }
Term term_join(const Term& a, const Term& b) { return Term::apply(std::string(symbols::kJoin), {a, b}); }

// ---------------------------------------------------------------------------
// Formula

namespace {
template <typename Node, typename Kind>
std::shared_ptr<const Node> make_node(Kind kind, Rational value, std::string name, std::vector<Term> terms,
                                      std::vector<Formula> children) {
  return std::make_shared<const Node>(
      Node{kind, std::move(value), std::move(name), std::move(terms), std::move(children)});
}
}  // namespace

Formula Formula::constant(Rational value) {
  return Formula(make_node<Node>(Kind::Constant, std::move(value), {}, {}, {}));
}
Formula Formula::atom(std::string relation, std::vector<Term> args) {
  return Formula(make_node<Node>(Kind::Atom, Rational(0), std::move(relation), std::move(args), {}));
}
Formula Formula::dist(Term a, Term b) { return atom(std::string(symbols::kMetric), {std::move(a), std::move(b)}); }
Formula Formula::sum(Formula a, Formula b) {
  return Formula(make_node<Node>(Kind::Sum, Rational(0), {}, {}, {std::move(a), std::move(b)}));
}
Formula Formula::scale(Rational factor, Formula f) {
  return Formula(make_node<Node>(Kind::Scale, std::move(factor), {}, {}, {std::move(f)}));
}
Formula Formula::sup(std::string var, Formula body) {
  return Formula(make_node<Node>(Kind::Sup, Rational(0), std::move(var), {}, {std::move(body)}));
}
Formula Formula::inf(std::string var, Formula body) {
  return Formula(make_node<Node>(Kind::Inf, Rational(0), std::move(var), {}, {std::move(body)}));
}
Formula Formula::meet(Formula a, Formula b) {
  return Formula(make_node<Node>(Kind::Meet, Rational(0), {}, {}, {std::move(a), std::move(b)}));
}
Formula Formula::join(Formula a, Formula b) {
  return Formula(make_node<Node>(Kind::Join, Rational(0), {}, {}, {std::move(a), std::move(b)}));
}
Formula Formula::neg(Formula f) { return Formula(make_node<Node>(Kind::Neg, Rational(0), {}, {}, {std::move(f)})); }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  return a.node_->value == b.node_->value && a.node_->name == b.node_->name && a.node_->terms == b.node_->terms &&
         a.node_->children == b.node_->children;
}

Formula operator+(const Formula& a, const Formula& b) { return Formula::sum(a, b); }
Formula operator-(const Formula& a, const Formula& b) { return Formula::sum(a, Formula::scale(Rational(-1), b)); }
Formula operator*(const Rational& r, const Formula& f) { return Formula::scale(r, f); }

bool is_affine(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Constant:
    case Formula::Kind::Atom:
      return true;
    case Formula::Kind::Sum:
      return is_affine(f.left()) && is_affine(f.right());
    case Formula::Kind::Scale:
    case Formula::Kind::Sup:
    case Formula::Kind::Inf:
      return is_affine(f.body());
    case Formula::Kind::Meet:
    case Formula::Kind::Join:
    case Formula::Kind::Neg:
      return false;
  }
  return false;
}

int quantifier_depth(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Constant:
    case Formula::Kind::Atom:
      return 0;
    case Formula::Kind::Sum:
    case Formula::Kind::Meet:
    case Formula::Kind::Join:
      return std::max(quantifier_depth(f.left()), quantifier_depth(f.right()));
    case Formula::Kind::Scale:
    case Formula::Kind::Neg:
      return quantifier_depth(f.body());
    case Formula::Kind::Sup:
    case Formula::Kind::Inf:
      return 1 + quantifier_depth(f.body());
  }
  return 0;
}

bool is_quantifier_free(const Formula& f) { return quantifier_depth(f) == 0; }

namespace {

void push_unique(std::vector<std::string>& out, const std::string& v) {
  if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

void collect_term_vars(const Term& t, std::vector<std::string>& out) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      push_unique(out, t.name());
      break;
    case Term::Kind::Literal:
      break;
    case Term::Kind::Scaled:
      collect_term_vars(t.operand(), out);
      break;
    case Term::Kind::Apply:
      for (const auto& a : t.args()) collect_term_vars(a, out);
      break;
  }
}

void collect_formula_vars(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
  switch (f.kind()) {
    case Formula::Kind::Constant:
      break;
    case Formula::Kind::Atom: {
      std::vector<std::string> vs;
      for (const auto& t : f.terms()) collect_term_vars(t, vs);
      for (const auto& v : vs) {
        if (std::find(bound.begin(), bound.end(), v) == bound.end()) push_unique(out, v);
      }
      break;
    }
    case Formula::Kind::Sum:
    case Formula::Kind::Meet:
    case Formula::Kind::Join:
      collect_formula_vars(f.left(), bound, out);
      collect_formula_vars(f.right(), bound, out);
      break;
    case Formula::Kind::Scale:
    case Formula::Kind::Neg:
      collect_formula_vars(f.body(), bound, out);
      break;
    case Formula::Kind::Sup:
    case Formula::Kind::Inf:
      bound.push_back(f.name());
      collect_formula_vars(f.body(), bound, out);
      bound.pop_back();
      break;
  }
}

bool contains(const std::vector<std::string>& vs, const std::string& v) {
  return std::find(vs.begin(), vs.end(), v) != vs.end();
}

}  // namespace

std::vector<std::string> free_vars(const Term& t) {
  std::vector<std::string> out;
  collect_term_vars(t, out);
  return out;
}

std::vector<std::string> free_vars(const Formula& f) {
  std::vector<std::string> bound, out;
  collect_formula_vars(f, bound, out);
  return out;
}

Term substitute(const Term& t, const std::string& var, const Term& replacement) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      return t.name() == var ? replacement : t;
    case Term::Kind::Literal:
      return t;
    case Term::Kind::Scaled:
      return Term::scaled(t.value(), substitute(t.operand(), var, replacement));
    case Term::Kind::Apply: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const auto& a : t.args()) args.push_back(substitute(a, var, replacement));
      return Term::apply(t.name(), std::move(args));
    }
  }
  return t;
}

Formula substitute(const Formula& f, const std::string& var, const Term& replacement) {
  switch (f.kind()) {
    case Formula::Kind::Constant:
      return f;
    case Formula::Kind::Atom: {
      std::vector<Term> args;
      for (const auto& t : f.terms()) args.push_back(substitute(t, var, replacement));
      return Formula::atom(f.name(), std::move(args));
    }
    case Formula::Kind::Sum:
      return Formula::sum(substitute(f.left(), var, replacement), substitute(f.right(), var, replacement));
    case Formula::Kind::Meet:
      return Formula::meet(substitute(f.left(), var, replacement), substitute(f.right(), var, replacement));
    case Formula::Kind::Join:
      return Formula::join(substitute(f.left(), var, replacement), substitute(f.right(), var, replacement));
    case Formula::Kind::Scale:
      return Formula::scale(f.value(), substitute(f.body(), var, replacement));
    case Formula::Kind::Neg:
      return Formula::neg(substitute(f.body(), var, replacement));
    case Formula::Kind::Sup:
    case Formula::Kind::Inf: {
      const std::string& bound = f.name();
      if (bound == var) return f;
      const auto body_free = free_vars(f.body());
      if (!contains(body_free, var)) return f;
      const auto repl_free = free_vars(replacement);
      std::string name = bound;
      Formula body = f.body();
      if (contains(repl_free, bound)) {
        do {
          name += "'";
        } while (contains(repl_free, name) || contains(body_free, name) || name == var);
        body = substitute(body, bound, Term::variable(name));
      }
      body = substitute(body, var, replacement);
      return f.kind() == Formula::Kind::Sup ? Formula::sup(name, body) : Formula::inf(name, body);
    }
  }
  return f;
}

namespace {

using Scope = std::vector<std::pair<std::string, std::string>>;

// Bound variables are compared by binder depth, free ones by name.
bool alpha_term(const Term& a, const Term& b, const Scope& scope) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Variable: {
      for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
        const bool ha = it->first == a.name();
        const bool hb = it->second == b.name();
        if (ha || hb) return ha && hb;
      }
      return a.name() == b.name();
    }
    case Term::Kind::Literal:
      return a.value() == b.value();
    case Term::Kind::Scaled:
      return a.value() == b.value() && alpha_term(a.operand(), b.operand(), scope);
    case Term::Kind::Apply:
      if (a.name() != b.name() || a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i) {
        if (!alpha_term(a.args()[i], b.args()[i], scope)) return false;
      }
      return true;
  }
  return false;
}

bool alpha_formula(const Formula& a, const Formula& b, Scope& scope) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::Constant:
      return a.value() == b.value();
    case Formula::Kind::Atom:
      if (a.name() != b.name() || a.terms().size() != b.terms().size()) return false;
      for (std::size_t i = 0; i < a.terms().size(); ++i) {
        if (!alpha_term(a.terms()[i], b.terms()[i], scope)) return false;
      }
      return true;
    case Formula::Kind::Sum:
    case Formula::Kind::Meet:
    case Formula::Kind::Join:
      return alpha_formula(a.left(), b.left(), scope) && alpha_formula(a.right(), b.right(), scope);
    case Formula::Kind::Scale:
      return a.value() == b.value() && alpha_formula(a.body(), b.body(), scope);
    case Formula::Kind::Neg:
      return alpha_formula(a.body(), b.body(), scope);
    case Formula::Kind::Sup:
    case Formula::Kind::Inf: {
      scope.emplace_back(a.name(), b.name());
      const bool eq = alpha_formula(a.body(), b.body(), scope);
      scope.pop_back();
      return eq;
    }
  }
  return false;
}

}  // namespace

bool alpha_equal(const Formula& a, const Formula& b) {
  Scope scope;
  return alpha_formula(a, b, scope);
}

Formula eliminate_negation(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Constant:
    case Formula::Kind::Atom:
      return f;
    case Formula::Kind::Sum:
      return Formula::sum(eliminate_negation(f.left()), eliminate_negation(f.right()));
    case Formula::Kind::Meet:
      return Formula::meet(eliminate_negation(f.left()), eliminate_negation(f.right()));
    case Formula::Kind::Join:
      return Formula::join(eliminate_negation(f.left()), eliminate_negation(f.right()));
    case Formula::Kind::Scale:
      return Formula::scale(f.value(), eliminate_negation(f.body()));
    case Formula::Kind::Sup:
      return Formula::sup(f.name(), eliminate_negation(f.body()));
    case Formula::Kind::Inf:
      return Formula::inf(f.name(), eliminate_negation(f.body()));
    case Formula::Kind::Neg:
      return Formula::sum(Formula::constant(Rational(1)),
                          Formula::scale(Rational(-1), eliminate_negation(f.body())));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool is_infix(const Term& t) {
  if (t.kind() != Term::Kind::Apply || t.args().size() != 2) return false;
  const auto& n = t.name();
  return n == symbols::kPlus || n == symbols::kMinus || n == symbols::kTimes || n == symbols::kMeet ||
         n == symbols::kJoin;
}

bool is_unary_minus(const Term& t) {
  return t.kind() == Term::Kind::Apply && t.args().size() == 1 && t.name() == symbols::kMinus;
}

std::string term_operand(const Term& t);

std::string print_term(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      return t.name();
    case Term::Kind::Literal:
      return t.value().str();
    case Term::Kind::Scaled: {
      const Term& op = t.operand();
      return t.value().str() + "*" + (is_infix(op) ? "(" + print_term(op) + ")" : print_term(op));
    }
    case Term::Kind::Apply: {
      if (t.args().empty()) return t.name();
      if (is_infix(t)) return term_operand(t.args()[0]) + " " + t.name() + " " + term_operand(t.args()[1]);
      if (is_unary_minus(t)) {
        const Term& op = t.args()[0];
        const bool plain = op.kind() == Term::Kind::Variable ||
                           (op.kind() == Term::Kind::Apply && !is_infix(op) && !is_unary_minus(op));
        return "-" + (plain ? print_term(op) : "(" + print_term(op) + ")");
      }
      std::string out = t.name() + "(";
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i > 0) out += ",";
        out += print_term(t.args()[i]);
      }
      return out + ")";
    }
  }
  return {};
}

std::string term_operand(const Term& t) {
  return is_infix(t) ? "(" + print_term(t) + ")" : print_term(t);
}

enum class Slot { Top, SumLeft, SumRight, LatOperand, UnaryOperand };

std::string print_formula(const Formula& f, Slot slot);

std::string paren(const std::string& s) { return "(" + s + ")"; }

std::string print_formula(const Formula& f, Slot slot) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Constant:
      return f.value().str();
    case K::Atom: {
      std::string out = f.name() + "(";
      for (std::size_t i = 0; i < f.terms().size(); ++i) {
        if (i > 0) out += ",";
        out += print_term(f.terms()[i]);
      }
      return out + ")";
    }
    case K::Sum: {
      std::string out = print_formula(f.left(), Slot::SumLeft);
      const Formula& r = f.right();
      if (r.kind() == K::Scale && r.value() < Rational(0)) {
        const Rational mag = -r.value();
        out += " - ";
        if (mag != Rational(1)) out += mag.str() + "*";
        out += print_formula(r.body(), Slot::LatOperand);
      } else {
        out += " + " + print_formula(r, Slot::SumRight);
      }
      return (slot == Slot::Top || slot == Slot::SumLeft) ? out : paren(out);
    }
    case K::Scale: {
      std::string out = f.value().str() + "*" + print_formula(f.body(), Slot::LatOperand);
      return (slot == Slot::LatOperand || slot == Slot::UnaryOperand) ? paren(out) : out;
    }
    case K::Sup:
    case K::Inf: {
      std::string out = std::string(f.kind() == K::Sup ? "sup " : "inf ") + f.name() + ". " +
                        print_formula(f.body(), Slot::Top);
      return slot == Slot::Top ? out : paren(out);
    }
    case K::Meet:
    case K::Join: {
      std::string out = print_formula(f.left(), Slot::LatOperand) + (f.kind() == K::Meet ? " /\\ " : " \\/ ") +
                        print_formula(f.right(), Slot::UnaryOperand);
      return slot == Slot::UnaryOperand ? paren(out) : out;
    }
    case K::Neg:
      return "~" + print_formula(f.body(), Slot::UnaryOperand);
  }
  return {};
}

}  // namespace

std::string to_string(const Term& t) { return print_term(t); }
std::string to_string(const Formula& f) { return print_formula(f, Slot::Top); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { Ident, Number, Slash, Meet, Join, Tilde, Plus, Minus, Star, LParen, RParen, Comma, Dot, Bar, Le, Ge, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (ident_start(c)) {
      while (i < s.size() && ident_char(s[i])) ++i;
      out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start});
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < s.size() && s[i + 1] == b; };
    if (two('/', '\\')) {
      out.push_back({Tok::Meet, "/\\", start});
      i += 2;
      continue;
    }
    if (two('\\', '/')) {
      out.push_back({Tok::Join, "\\/", start});
      i += 2;
      continue;
    }
    if (two('<', '=')) {
      out.push_back({Tok::Le, "<=", start});
      i += 2;
      continue;
    }
    if (two('>', '=')) {
      out.push_back({Tok::Ge, ">=", start});
      i += 2;
      continue;
    }
    Tok kind;
    switch (c) {
      case '/': kind = Tok::Slash; break;
      case '~': kind = Tok::Tilde; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case ',': kind = Tok::Comma; break;
      case '.': kind = Tok::Dot; break;
      case '|': kind = Tok::Bar; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    out.push_back({kind, std::string(1, c), start});
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Slash: return "'/'";
    case Tok::Meet: return "'/\\'";
    case Tok::Join: return "'\\/'";
    case Tok::Tilde: return "'~'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Bar: return "'|'";
    case Tok::Le: return "'<='";
    case Tok::Ge: return "'>='";
    case Tok::End: return "end of input";
  }
  return "token";
}

class Parser {
 public:
  Parser(std::string_view text, const Signature& sig) : tokens_(tokenize(text)), sig_(sig) {}

  Formula formula_only() {
    Formula f = sum();
    expect(Tok::End);
    return f;
  }

  Term term_only() {
    Term t = term();
    expect(Tok::End);
    return t;
  }

  Condition condition() {
    Formula lhs = sum();
    const Tok op = peek().kind;
    if (op != Tok::Le && op != Tok::Ge) fail("expected '<=' or '>='");
    advance();
    Formula rhs = sum();
    expect(Tok::End);
    if (op == Tok::Ge) std::swap(lhs, rhs);
    return {lhs, rhs};
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  void advance() { ++pos_; }
  bool accept(Tok t) {
    if (peek().kind != t) return false;
    advance();
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg + (t.kind == Tok::End ? std::string(", found end of input") : ", found '" + t.text + "'"),
                     t.offset);
  }
  void expect(Tok t) {
    if (!accept(t)) fail(std::string("expected ") + describe(t));
  }

  // rational := ['-'] digits ['/' digits], read without consuming.
  std::optional<std::pair<Rational, std::size_t>> rational_at(std::size_t at) const {
    std::size_t p = at;
    bool negative = false;
    auto tok = [&](std::size_t i) -> const Token& { return tokens_[std::min(i, tokens_.size() - 1)]; };
    if (tok(p).kind == Tok::Minus) {
      negative = true;
      ++p;
    }
    if (tok(p).kind != Tok::Number) return std::nullopt;
    std::string text = tok(p).text;
    ++p;
    if (tok(p).kind == Tok::Slash && tok(p + 1).kind == Tok::Number) {
      text += "/" + tok(p + 1).text;
      p += 2;
    }
    if (text.size() >= 2 && text.ends_with("/0") && text.find_first_not_of('0', text.find('/') + 1) == std::string::npos) {
      throw ParseError("zero denominator", tok(at).offset);
    }
    Rational r = Rational::parse(text);
    return std::make_pair(negative ? -r : r, p);
  }

  // ---- formulas

  struct Prod {
    std::optional<Rational> factor;
    Formula inner;
  };

  Formula sum() {
    Formula acc = fold(prod(), false);
    for (;;) {
      if (accept(Tok::Plus)) {
        acc = Formula::sum(acc, fold(prod(), false));
      } else if (accept(Tok::Minus)) {
        acc = Formula::sum(acc, fold(prod(), true));
      } else {
        return acc;
      }
    }
  }

  static Formula fold(Prod p, bool negate) {
    if (negate) return Formula::scale(-p.factor.value_or(Rational(1)), p.inner);
    return p.factor ? Formula::scale(*p.factor, p.inner) : p.inner;
  }

  Prod prod() {
    if (auto r = rational_at(pos_); r && tokens_[r->second].kind == Tok::Star) {
      pos_ = r->second + 1;
      return {r->first, lattice()};
    }
    if (peek().kind == Tok::Minus && peek(1).kind != Tok::Number) {
      advance();
      Prod inner = prod();
      return {-inner.factor.value_or(Rational(1)), inner.inner};
    }
    return {std::nullopt, lattice()};
  }

  Formula lattice() {
    Formula acc = unary();
    for (;;) {
      if (accept(Tok::Meet)) {
        acc = Formula::meet(acc, unary());
      } else if (accept(Tok::Join)) {
        acc = Formula::join(acc, unary());
      } else {
        return acc;
      }
    }
  }

  Formula unary() {
    if (accept(Tok::Tilde)) return Formula::neg(unary());
    return primary();
  }

  Formula primary() {
    if (auto r = rational_at(pos_)) {
      pos_ = r->second;
      return Formula::constant(r->first);
    }
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      advance();
      Formula f = sum();
      expect(Tok::RParen);
      return f;
    }
    if (t.kind == Tok::Bar) {
      advance();
      Term inner = term();
      expect(Tok::Bar);
      if (!sig_.has_constant(symbols::kZero)) {
        throw SymbolError("'|t|' needs a constant symbol 0 in the signature");
      }
      return Formula::dist(inner, Term::apply(std::string(symbols::kZero)));
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "sup" || t.text == "inf") {
        const bool is_sup = t.text == "sup";
        advance();
        if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail("expected bound variable");
        std::string var = peek().text;
        advance();
        expect(Tok::Dot);
        Formula body = sum();
        return is_sup ? Formula::sup(var, body) : Formula::inf(var, body);
      }
      if (peek(1).kind != Tok::LParen) fail("expected formula");
      const std::size_t at = t.offset;
      std::string name = t.text;
      const Symbol* rel = sig_.relation(name);
      if (rel == nullptr) throw SymbolError("unknown relation symbol '" + name + "' at offset " + std::to_string(at));
      advance();
      advance();
      std::vector<Term> args;
      args.push_back(term());
      while (accept(Tok::Comma)) args.push_back(term());
      expect(Tok::RParen);
      if (static_cast<int>(args.size()) != rel->arity) {
        throw SymbolError("relation '" + name + "' expects " + std::to_string(rel->arity) + " arguments, got " +
                          std::to_string(args.size()));
      }
      return Formula::atom(name, std::move(args));
    }
    fail("expected formula");
  }

  static bool is_keyword(const std::string& s) { return s == "sup" || s == "inf"; }

  // ---- terms

  const Symbol& require_function(std::string_view name, int arity) const {
    const Symbol* s = sig_.function(name);
    if (s == nullptr || s->arity != arity) {
      throw SymbolError("signature has no " + std::to_string(arity) + "-ary function '" + std::string(name) +
                        "' (offset " + std::to_string(peek().offset) + ")");
    }
    return *s;
  }

  Term term() {
    Term acc = term_sum();
    for (;;) {
      if (peek().kind == Tok::Meet || peek().kind == Tok::Join) {
        const auto name = peek().kind == Tok::Meet ? symbols::kMeet : symbols::kJoin;
        require_function(name, 2);
        advance();
        acc = Term::apply(std::string(name), {acc, term_sum()});
      } else {
        return acc;
      }
    }
  }

  Term term_sum() {
    Term acc = term_prod();
    for (;;) {
      if (peek().kind == Tok::Plus) {
        require_function(symbols::kPlus, 2);
        advance();
        acc = Term::apply(std::string(symbols::kPlus), {acc, term_prod()});
      } else if (peek().kind == Tok::Minus) {
        const Symbol* minus = sig_.function(symbols::kMinus);
        if (minus != nullptr && minus->arity == 2) {
          advance();
          acc = Term::apply(std::string(symbols::kMinus), {acc, term_prod()});
        } else {
          require_function(symbols::kMinus, 1);
          require_function(symbols::kPlus, 2);
          advance();
          acc = Term::apply(std::string(symbols::kPlus),
                            {acc, Term::apply(std::string(symbols::kMinus), {term_prod()})});
        }
      } else {
        return acc;
      }
    }
  }

  Term term_prod() {
    Term acc = term_unary();
    while (peek().kind == Tok::Star) {
      require_function(symbols::kTimes, 2);
      advance();
      acc = Term::apply(std::string(symbols::kTimes), {acc, term_unary()});
    }
    return acc;
  }

  Term term_unary() {
    if (auto r = rational_at(pos_)) {
      if (tokens_[r->second].kind == Tok::Star) {
        pos_ = r->second + 1;
        return Term::scaled(r->first, term_unary());
      }
      if (peek().kind == Tok::Minus) {
        const bool named_constant = r->second == pos_ + 2 && sig_.has_constant(peek(1).text);
        if (!named_constant) {
          pos_ = r->second;
          return Term::literal(r->first);
        }
      }
    }
    if (peek().kind == Tok::Minus) {
      require_function(symbols::kMinus, 1);
      advance();
      return Term::apply(std::string(symbols::kMinus), {term_unary()});
    }
    return term_primary();
  }

  Term term_primary() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      advance();
      Term inner = term();
      expect(Tok::RParen);
      return inner;
    }
    if (t.kind == Tok::Number) {
      auto r = rational_at(pos_);
      const bool plain_digits = r->second == pos_ + 1;
      if (plain_digits && sig_.has_constant(t.text)) {
        advance();
        return Term::apply(t.text);
      }
      pos_ = r->second;
      return Term::literal(r->first);
    }
    if (t.kind == Tok::Ident) {
      if (is_keyword(t.text)) fail("expected term");
      std::string name = t.text;
      const std::size_t at = t.offset;
      advance();
      const Symbol* fn = sig_.function(name);
      if (peek().kind == Tok::LParen) {
        if (fn == nullptr) throw SymbolError("unknown function symbol '" + name + "' at offset " + std::to_string(at));
        advance();
        std::vector<Term> args;
        if (fn->arity > 0) {
          args.push_back(term());
          while (accept(Tok::Comma)) args.push_back(term());
        }
        expect(Tok::RParen);
        if (static_cast<int>(args.size()) != fn->arity) {
          throw SymbolError("function '" + name + "' expects " + std::to_string(fn->arity) + " arguments, got " +
                            std::to_string(args.size()));
        }
        return Term::apply(name, std::move(args));
      }
      if (fn != nullptr) {
        if (fn->arity != 0) {
          throw SymbolError("function '" + name + "' expects " + std::to_string(fn->arity) + " arguments");
        }
        return Term::apply(name);
      }
      return Term::variable(name);
    }
    fail("expected term");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Signature& sig_;
};

}  // namespace

Term parse_term(std::string_view text, const Signature& sig) { return Parser(text, sig).term_only(); }
Formula parse_formula(std::string_view text, const Signature& sig) { return Parser(text, sig).formula_only(); }
Condition parse_condition(std::string_view text, const Signature& sig) { return Parser(text, sig).condition(); }

}  // namespace alqe
