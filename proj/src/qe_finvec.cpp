#include "alqe/qe_finvec.hpp"

#include <algorithm>
#include <mutex>

#include "alqe/errors.hpp"
#include "alqe/linalg.hpp"
#include "alqe/semantics.hpp"

namespace alqe {

namespace {

constexpr std::size_t kMaxLines = 5000;

std::size_t var_index(const std::vector<std::string>& vars, const std::string& name) {
  for (std::size_t i = vars.size(); i-- > 0;) {
    if (vars[i] == name) return i;
  }
  throw SymbolError("variable '" + name + "' is not in the context");
}

FqVector linearize(const Term& t, const PrimeField& f, const std::vector<std::string>& vars) {
  switch (t.kind()) {
    case Term::Kind::Variable: {
      FqVector v(vars.size(), 0);
      v[var_index(vars, t.name())] = 1;
      return v;
    }
    case Term::Kind::Literal:
      throw SymbolError("literal " + t.value().str() + " is not a vector space term");
    case Term::Kind::Scaled: {
      const int c = f.from_rational(t.value());
      FqVector v = linearize(t.operand(), f, vars);
      for (int& x : v) x = f.mul(c, x);
      return v;
    }
    case Term::Kind::Apply:
      break;
  }
  const auto& args = t.args();
  if (t.name() == symbols::kZero && args.empty()) return FqVector(vars.size(), 0);
  if (t.name() == symbols::kPlus && args.size() == 2) {
    FqVector a = linearize(args[0], f, vars);
    const FqVector b = linearize(args[1], f, vars);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = f.add(a[i], b[i]);
    return a;
  }
  if (t.name() == symbols::kMinus && (args.size() == 1 || args.size() == 2)) {
    FqVector a = linearize(args[0], f, vars);
    if (args.size() == 1) {
      for (int& x : a) x = f.neg(x);
      return a;
    }
    const FqVector b = linearize(args[1], f, vars);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = f.add(a[i], f.neg(b[i]));
    return a;
  }
  throw SymbolError("'" + t.name() + "' is not in the vector space language");
}

FqVector difference(const Formula& atom, const PrimeField& f, const std::vector<std::string>& vars) {
  if (atom.name() != symbols::kMetric || atom.terms().size() != 2) {
    throw SymbolError("relation '" + atom.name() + "' is not in the vector space language");
  }
  FqVector a = linearize(atom.terms()[0], f, vars);
  const FqVector b = linearize(atom.terms()[1], f, vars);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = f.add(a[i], f.neg(b[i]));
  return a;
}

QFNormalForm constant_form(int q, int n, const Rational& c) {
  QFNormalForm nf;
  nf.q = q;
  nf.n = n;
  nf.constant = c;
  return nf;
}

// Re-embeds a form over `vars` minus position `pos` into `vars`.
QFNormalForm insert_zero_coordinate(const QFNormalForm& nf, std::size_t pos) {
  QFNormalForm out = constant_form(nf.q, nf.n + 1, nf.constant);
  for (const auto& [a, r] : nf.terms) {
    FqVector b = a;
    b.insert(b.begin() + static_cast<std::ptrdiff_t>(pos), 0);
    out.terms.emplace(std::move(b), r);
  }
  return out;
}

QFNormalForm normal_form(const Formula& f, const PrimeField& field, const std::vector<std::string>& vars) {
  const int q = field.q();
  const int n = static_cast<int>(vars.size());
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Constant:
      return constant_form(q, n, f.value());
    case K::Atom: {
      QFNormalForm nf = constant_form(q, n, Rational(0));
      nf.add_atom(difference(f, field, vars), Rational(1));
      return nf;
    }
    case K::Sum: {
      QFNormalForm nf = normal_form(f.left(), field, vars);
      nf += normal_form(f.right(), field, vars);
      return nf;
    }
    case K::Scale: {
      QFNormalForm nf = normal_form(f.body(), field, vars);
      nf *= f.value();
      return nf;
    }
    case K::Sup:
    case K::Inf: {
      std::vector<std::string> inner = vars;
      const auto shadowed = std::find(inner.begin(), inner.end(), f.name());
      const bool was_free = shadowed != inner.end();
      const auto pos = static_cast<std::size_t>(shadowed - inner.begin());
      if (was_free) inner.erase(shadowed);
      inner.push_back(f.name());
      QFNormalForm body = normal_form(f.body(), field, inner);
      if (f.kind() == K::Inf) body *= Rational(-1);
      QFNormalForm out = eliminate_one(body);
      if (f.kind() == K::Inf) out *= Rational(-1);
      return was_free ? insert_zero_coordinate(out, pos) : out;
    }
    case K::Meet:
    case K::Join:
    case K::Neg:
      throw FragmentError("lattice connectives are outside the affine fragment: " + to_string(f));
  }
  throw FragmentError("unknown formula node");
}

Term dot_term(const FqVector& a, const std::vector<std::string>& vars) {
  std::optional<Term> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    Term x = Term::variable(vars[i]);
    if (a[i] != 1) x = Term::scaled(Rational(a[i]), x);
    out = out ? *out + x : x;
  }
  return out ? *out : Term::apply(std::string(symbols::kZero));
}

class Oracle {
 public:
  Oracle(const PrimeField& f, std::vector<std::string> vars, const FqVector& point) : f_(f) {
    for (std::size_t i = 0; i < vars.size(); ++i) env_.emplace_back(vars[i], point[i]);
  }

  int term(const Term& t) const {
    switch (t.kind()) {
      case Term::Kind::Variable:
        for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
          if (it->first == t.name()) return it->second;
        }
        throw EvaluationError("unbound variable '" + t.name() + "'");
      case Term::Kind::Literal:
        throw EvaluationError("literal in a vector space term");
      case Term::Kind::Scaled:
        return f_.mul(f_.from_rational(t.value()), term(t.operand()));
      case Term::Kind::Apply:
        break;
    }
    const auto& args = t.args();
    if (t.name() == symbols::kZero) return 0;
    if (t.name() == symbols::kPlus) return f_.add(term(args[0]), term(args[1]));
    if (t.name() == symbols::kMinus) {
      return args.size() == 1 ? f_.neg(term(args[0])) : f_.add(term(args[0]), f_.neg(term(args[1])));
    }
    throw EvaluationError("'" + t.name() + "' is not in the vector space language");
  }

  Rational formula(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::Constant:
        return f.value();
      case K::Atom:
        if (f.name() != symbols::kMetric) throw EvaluationError("relation '" + f.name() + "' has no interpretation");
        return Rational(term(f.terms()[0]) == term(f.terms()[1]) ? 0 : 1);
      case K::Sum:
        return formula(f.left()) + formula(f.right());
      case K::Scale:
        return f.value() * formula(f.body());
      case K::Sup:
      case K::Inf: {
        std::optional<Rational> best;
        env_.emplace_back(f.name(), 0);
        for (int y = 0; y < f_.q(); ++y) {
          env_.back().second = y;
          Rational v = formula(f.body());
          if (!best || (f.kind() == K::Sup ? *best < v : v < *best)) best = std::move(v);
        }
        env_.pop_back();
        return *best;
      }
      case K::Meet:
        return min(formula(f.left()), formula(f.right()));
      case K::Join:
        return max(formula(f.left()), formula(f.right()));
      case K::Neg:
        return Rational(1) - formula(f.body());
    }
    return Rational(0);
  }

 private:
  const PrimeField& f_;
  std::vector<std::pair<std::string, int>> env_;
};

}  // namespace

PrimeField::PrimeField(int q) : q_(q) {
  if (!is_prime(q)) throw DomainError(std::to_string(q) + " is not prime");
}

int PrimeField::reduce(long long v) const {
  const long long r = v % q_;
  return static_cast<int>(r < 0 ? r + q_ : r);
}

int PrimeField::inverse(int a) const {
  if (a % q_ == 0) throw DomainError("0 has no inverse mod " + std::to_string(q_));
  int result = 1;
  int base = reduce(a);
  for (int e = q_ - 2; e > 0; e >>= 1) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
  }
  return result;
}

int PrimeField::dot(const FqVector& a, const FqVector& b) const {
  long long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long long>(a[i]) * b[i];
  return reduce(s);
}

int PrimeField::from_rational(const Rational& r) const {
  const auto q = static_cast<unsigned long>(q_);
  const auto num = static_cast<int>(mpz_fdiv_ui(r.get().get_num_mpz_t(), q));
  const auto den = static_cast<int>(mpz_fdiv_ui(r.get().get_den_mpz_t(), q));
  if (den == 0) throw DomainError("scalar " + r.str() + " is not defined mod " + std::to_string(q_));
  return mul(num, inverse(den));
}

FqVector canonical_line(const PrimeField& f, FqVector v) {
  for (int x : v) {
    if (x == 0) continue;
    const int s = f.inverse(x);
    for (int& y : v) y = f.mul(s, y);
    break;
  }
  return v;
}

std::vector<FqVector> all_points(int q, int n) {
  std::vector<FqVector> out;
  FqVector v(static_cast<std::size_t>(n), 0);
  while (true) {
    out.push_back(v);
    int i = n - 1;
    while (i >= 0 && v[static_cast<std::size_t>(i)] == q - 1) v[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return out;
    ++v[static_cast<std::size_t>(i)];
  }
}

std::vector<FqVector> line_representatives(int q, int n) {
  const PrimeField f(q);
  if (n < 1) throw DomainError("dimension must be at least 1");
  std::vector<FqVector> out;
  for (auto& v : all_points(q, n)) {
    const auto first = std::find_if(v.begin(), v.end(), [](int x) { return x != 0; });
    if (first != v.end() && *first == 1) out.push_back(std::move(v));
  }
  return out;
}

std::shared_ptr<const InterpolationSystem> interpolation_system(int q, int n) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const InterpolationSystem>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({q, n}); it != cache.end()) return it->second;
  }
  const PrimeField f(q);
  if (n < 1) throw DomainError("dimension must be at least 1");
  // m = (q^n - 1)/(q - 1) = 1 + q + ... + q^(n-1)
  std::size_t m = 0;
  for (int i = 0, power = 1; i < n; ++i) {
    m += static_cast<std::size_t>(power);
    if (m > kMaxLines) throw DomainError("F_" + std::to_string(q) + "^" + std::to_string(n) + " has more than 5000 lines");
    power *= q;
  }
  auto sys = std::make_shared<InterpolationSystem>();
  sys->q = q;
  sys->n = n;
  sys->representatives = line_representatives(q, n);
  const auto& b = sys->representatives;
  const auto dim = static_cast<Eigen::Index>(m);
  sys->u = RationalMatrix(dim, dim);
  for (Eigen::Index l = 0; l < dim; ++l) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      sys->u(l, k) = Rational(f.dot(b[static_cast<std::size_t>(l)], b[static_cast<std::size_t>(k)]) == 0 ? 1 : 0);
    }
  }
  sys->a = RationalMatrix::Constant(dim + 1, dim + 1, Rational(1));
  sys->a.bottomRightCorner(dim, dim) = sys->u;
  auto inverse = exact_inverse(sys->a);
  if (!inverse) throw Error("interpolation matrix is singular for q=" + std::to_string(q) + ", n=" + std::to_string(n));
  sys->a_inverse = std::move(*inverse);

  std::lock_guard lock(mutex);
  return cache.emplace(std::pair{q, n}, std::move(sys)).first->second;
}

Rational QFNormalForm::evaluate(const FqVector& point) const {
  const PrimeField f(q);
  Rational v = constant;
  for (const auto& [a, r] : terms) {
    if (f.dot(a, point) != 0) v += r;
  }
  return v;
}

QFNormalForm& QFNormalForm::add_atom(FqVector a, const Rational& coefficient) {
  if (static_cast<int>(a.size()) != n) throw DomainError("atom dimension does not match the form");
  if (coefficient.is_zero() || std::all_of(a.begin(), a.end(), [](int x) { return x == 0; })) return *this;
  a = canonical_line(PrimeField(q), std::move(a));
  auto [it, inserted] = terms.emplace(std::move(a), coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second.is_zero()) terms.erase(it);
  }
  return *this;
}

QFNormalForm& QFNormalForm::operator+=(const QFNormalForm& other) {
  if (other.q != q || other.n != n) throw DomainError("normal forms over different spaces");
  constant += other.constant;
  for (const auto& [a, r] : other.terms) add_atom(a, r);
  return *this;
}

QFNormalForm& QFNormalForm::operator*=(const Rational& r) {
  if (r.is_zero()) {
    constant = Rational(0);
    terms.clear();
    return *this;
  }
  constant *= r;
  for (auto& [a, c] : terms) c *= r;
  return *this;
}

QFNormalForm qf_normalize(const Formula& f, int q, const std::vector<std::string>& vars) {
  if (!is_quantifier_free(f)) throw FragmentError("qf_normalize needs a quantifier-free formula");
  return normal_form(f, PrimeField(q), vars);
}

QFNormalForm eliminate_one(const QFNormalForm& psi) {
  if (psi.n < 1) throw DomainError("eliminate_one needs at least one variable");
  const PrimeField f(psi.q);
  const int n = psi.n - 1;

  // Step 1: atoms without y leave the sup unchanged.
  QFNormalForm out = constant_form(psi.q, n, psi.constant);
  // Step 2: |a.x + c y| = |c^-1 a.x + y|, then y -> -y gives |a'.x - y|.
  std::vector<std::pair<FqVector, Rational>> active;
  for (const auto& [a, r] : psi.terms) {
    FqVector head(a.begin(), a.end() - 1);
    const int c = a.back();
    if (c == 0) {
      out.add_atom(std::move(head), r);
      continue;
    }
    const int s = f.inverse(c);
    for (int& x : head) x = f.mul(s, x);
    active.emplace_back(std::move(head), r);
  }
  if (active.empty()) return out;

  // Step 3: sup over y of the active part at a point.
  auto sup_at = [&](const FqVector& x) {
    std::optional<Rational> best;
    for (int y = 0; y < psi.q; ++y) {
      Rational v(0);
      for (const auto& [a, r] : active) {
        if (f.dot(a, x) != y) v += r;
      }
      if (!best || *best < v) best = std::move(v);
    }
    return *best;
  };
  if (n == 0) {
    out.constant += sup_at({});
    return out;
  }

  // Steps 4 and 5: interpolate over 0 and the line representatives.
  const auto sys = interpolation_system(psi.q, n);
  const auto m = static_cast<Eigen::Index>(sys->representatives.size());
  RationalVector v(m + 1);
  v(0) = sup_at(FqVector(static_cast<std::size_t>(n), 0));
  for (Eigen::Index l = 0; l < m; ++l) v(l + 1) = sup_at(sys->representatives[static_cast<std::size_t>(l)]);
  const RationalVector s = sys->a_inverse * v;
  out.constant += s(0);
  for (Eigen::Index l = 0; l < m; ++l) {
    out.constant += s(l + 1);
    out.add_atom(sys->representatives[static_cast<std::size_t>(l)], -s(l + 1));
  }
  return out;
}

QFNormalForm eliminate_to_normal_form(const Formula& f, int q, const std::vector<std::string>& vars) {
  if (!is_affine(f)) throw FragmentError("quantifier elimination needs an affine formula");
  return normal_form(f, PrimeField(q), vars);
}

Formula eliminate_all(const Formula& f, int q, const std::vector<std::string>& vars) {
  return to_formula(eliminate_to_normal_form(f, q, vars), vars);
}

Formula to_formula(const QFNormalForm& nf, const std::vector<std::string>& vars) {
  std::optional<Formula> out;
  if (!nf.constant.is_zero() || nf.terms.empty()) out = Formula::constant(nf.constant);
  for (const auto& [a, r] : nf.terms) {
    Formula atom = Formula::dist(dot_term(a, vars), Term::apply(std::string(symbols::kZero)));
    if (r != Rational(1)) atom = Formula::scale(r, atom);
    out = out ? Formula::sum(*out, atom) : atom;
  }
  return *out;
}

std::string to_string(const QFNormalForm& nf, const std::vector<std::string>& vars) {
  std::string out;
  if (!nf.constant.is_zero() || nf.terms.empty()) out = nf.constant.str();
  for (const auto& [a, r] : nf.terms) {
    const Rational mag = abs(r);
    if (out.empty()) {
      out = r.sign() < 0 ? "-" : "";
    } else {
      out += r.sign() < 0 ? " - " : " + ";
    }
    if (mag != Rational(1)) out += mag.str() + "*";
    out += "|" + to_string(dot_term(a, vars)) + "|";
  }
  return out;
}

Rational brute_force(const Formula& f, int q, const std::vector<std::string>& vars, const FqVector& point) {
  const PrimeField field(q);
  if (point.size() != vars.size()) throw DomainError("point dimension does not match the variables");
  return Oracle(field, vars, point).formula(f);
}

}  // namespace alqe
