#include "alqe/typespace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "alqe/errors.hpp"
#include "alqe/linalg.hpp"
#include "alqe/ultramean.hpp"

namespace alqe {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<Rational> evaluate_fragment(const FiniteStructure& m, const Fragment& fragment,
                                        const std::vector<std::size_t>& tuple) {
  Assignment a;
  for (std::size_t i = 0; i < fragment.arity(); ++i) a[fragment.vars()[i]] = tuple[i];
  std::vector<Rational> out;
  out.reserve(fragment.size());
  for (const auto& f : fragment.formulas()) out.push_back(evaluate(m, f.formula, a));
  return out;
}

}  // namespace

std::string_view tag_name(FormulaTag tag) {
  switch (tag) {
    case FormulaTag::Atomic:
      return "atomic";
    case FormulaTag::QuantifierFree:
      return "qf";
    case FormulaTag::Infimal:
      return "infimal";
    case FormulaTag::General:
      return "general";
  }
  return "general";
}

std::optional<FormulaTag> parse_tag(std::string_view text) {
  if (text == "atomic") return FormulaTag::Atomic;
  if (text == "qf" || text == "quantifier-free") return FormulaTag::QuantifierFree;
  if (text == "infimal") return FormulaTag::Infimal;
  if (text == "general") return FormulaTag::General;
  return std::nullopt;
}

FormulaTag detect_tag(const Formula& f) {
  if (f.kind() == Formula::Kind::Atom) return FormulaTag::Atomic;
  if (is_quantifier_free(f)) return FormulaTag::QuantifierFree;
  const Formula* body = &f;
  while (body->kind() == Formula::Kind::Inf) body = &body->body();
  return is_quantifier_free(*body) ? FormulaTag::Infimal : FormulaTag::General;
}

Fragment::Fragment(std::vector<std::string> vars, std::vector<FragmentFormula> formulas)
    : vars_(std::move(vars)), formulas_(std::move(formulas)) {
  if (formulas_.empty()) throw DomainError("a fragment needs at least one formula");
  for (const auto& f : formulas_) {
    const FormulaTag shape = detect_tag(f.formula);
    if (f.tag < shape) {
      throw DomainError("formula " + to_string(f.formula) + " is tagged " + std::string(tag_name(f.tag)) +
                        " but has shape " + std::string(tag_name(shape)));
    }
    for (const auto& v : free_vars(f.formula)) {
      if (std::find(vars_.begin(), vars_.end(), v) == vars_.end()) {
        throw SymbolError("free variable '" + v + "' of " + to_string(f.formula) + " is not in the fragment context");
      }
    }
  }
}

Fragment::Fragment(std::vector<std::string> vars, const std::vector<Formula>& formulas)
    : Fragment(std::move(vars), [&] {
        std::vector<FragmentFormula> out;
        for (const auto& f : formulas) out.push_back({f, detect_tag(f)});
        return out;
      }()) {}

Fragment parse_fragment(std::string_view text, const Signature& sig, std::optional<std::size_t> arity) {
  std::optional<std::vector<std::string>> declared;
  std::vector<FragmentFormula> formulas;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (line.starts_with("vars:")) {
      std::istringstream names{std::string(line.substr(5))};
      declared.emplace();
      for (std::string v; names >> v;) declared->push_back(v);
      continue;
    }
    std::optional<FormulaTag> tag;
    const auto at = line.rfind('@');
    if (at != std::string_view::npos) {
      tag = parse_tag(trim(line.substr(at + 1)));
      if (!tag) throw ParseError("line " + std::to_string(line_no) + ": unknown tag '" + std::string(line.substr(at + 1)) + "'", 0);
      line = trim(line.substr(0, at));
    }
    Formula f = parse_formula(line, sig);
    const FormulaTag shape = detect_tag(f);
    formulas.push_back({std::move(f), tag.value_or(shape)});
  }
  std::vector<std::string> vars;
  if (declared) {
    vars = *declared;
  } else {
    for (const auto& f : formulas) {
      for (const auto& v : free_vars(f.formula)) {
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
      }
    }
  }
  if (arity) {
    if (vars.size() > *arity) {
      throw DomainError("fragment uses " + std::to_string(vars.size()) + " variables but the arity is " +
                        std::to_string(*arity));
    }
    if (declared && vars.size() != *arity) {
      throw DomainError("vars line lists " + std::to_string(vars.size()) + " variables but the arity is " +
                        std::to_string(*arity));
    }
    for (std::size_t i = 1; vars.size() < *arity; ++i) {
      const std::string fresh = "x" + std::to_string(i);
      if (std::find(vars.begin(), vars.end(), fresh) == vars.end()) vars.push_back(fresh);
    }
  }
  return Fragment(std::move(vars), std::move(formulas));
}

Fragment load_fragment_file(const std::string& path, const Signature& sig, std::optional<std::size_t> arity) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read fragment file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_fragment(text.str(), sig, arity);
}

TypeCloud TypeCloud::from(std::vector<TypeVector> vectors) {
  std::stable_sort(vectors.begin(), vectors.end(),
                   [](const TypeVector& a, const TypeVector& b) { return a.values < b.values; });
  TypeCloud out;
  for (auto& v : vectors) {
    if (!out.vectors.empty() && out.vectors.back().values == v.values) {
      auto& r = out.vectors.back().realizations;
      r.insert(r.end(), v.realizations.begin(), v.realizations.end());
    } else {
      out.vectors.push_back(std::move(v));
    }
  }
  return out;
}

std::optional<std::size_t> TypeCloud::find(const std::vector<Rational>& values) const {
  const auto it = std::lower_bound(vectors.begin(), vectors.end(), values,
                                   [](const TypeVector& a, const std::vector<Rational>& v) { return a.values < v; });
  if (it == vectors.end() || it->values != values) return std::nullopt;
  return static_cast<std::size_t>(it - vectors.begin());
}

TypeCloud realized_types(const FiniteStructure& m, const Fragment& fragment, const std::string& label,
                         std::size_t cap) {
  if (!validate(m).ok()) throw DomainError("structure '" + label + "' fails validation");
  const int n = static_cast<int>(fragment.arity());
  const std::size_t count = tuple_count(m.size(), n, cap);
  std::vector<TypeVector> vectors;
  vectors.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto tuple = tuple_at(i, n, m.size());
    vectors.push_back({evaluate_fragment(m, fragment, tuple), {{label, std::move(tuple)}}});
  }
  return TypeCloud::from(std::move(vectors));
}

std::optional<std::vector<Rational>> convex_weights(const std::vector<Rational>& v,
                                                    const std::vector<std::vector<Rational>>& points) {
  if (points.empty()) return std::nullopt;
  const auto dim = static_cast<Eigen::Index>(v.size());
  const auto count = static_cast<Eigen::Index>(points.size());
  RationalMatrix a(dim + 1, count);
  RationalVector b(dim + 1);
  for (Eigen::Index j = 0; j < count; ++j) {
    const auto& p = points[static_cast<std::size_t>(j)];
    if (p.size() != v.size()) throw DomainError("type vectors of different lengths");
    for (Eigen::Index i = 0; i < dim; ++i) a(i, j) = p[static_cast<std::size_t>(i)];
    a(dim, j) = Rational(1);
  }
  for (Eigen::Index i = 0; i < dim; ++i) b(i) = v[static_cast<std::size_t>(i)];
  b(dim) = Rational(1);
  const auto solution = nonnegative_solution(a, b);
  if (!solution) return std::nullopt;
  std::vector<Rational> weights(solution->data(), solution->data() + solution->size());
  // Substitute back: the certificate must stand on its own.
  Rational total(0);
  std::vector<Rational> combo(v.size(), Rational(0));
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (weights[j].sign() < 0) throw Error("simplex returned a negative weight");
    total += weights[j];
    for (std::size_t i = 0; i < v.size(); ++i) combo[i] += weights[j] * points[j][i];
  }
  if (total != Rational(1) || combo != v) throw Error("simplex certificate failed substitution");
  return weights;
}

std::optional<std::vector<Rational>> is_convex_combination(const std::vector<Rational>& v, const TypeCloud& cloud) {
  std::vector<std::vector<Rational>> others;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.vectors[i].values == v) continue;
    others.push_back(cloud.vectors[i].values);
    index.push_back(i);
  }
  const auto w = convex_weights(v, others);
  if (!w) return std::nullopt;
  std::vector<Rational> out(cloud.size(), Rational(0));
  for (std::size_t k = 0; k < index.size(); ++k) out[index[k]] = (*w)[k];
  return out;
}

TypeCloud extreme_points(const TypeCloud& cloud) {
  if (cloud.vectors.empty()) throw DomainError("extreme points of an empty cloud");
  TypeCloud out;
  for (const auto& v : cloud.vectors) {
    if (!is_convex_combination(v.values, cloud)) out.vectors.push_back(v);
  }
  return out;
}

SeparationResult separation_check(const Fragment& fragment, const TypeCloud& cloud, FormulaTag tag) {
  SeparationResult result;
  for (std::size_t i = 0; i < fragment.size(); ++i) {
    if (fragment.formulas()[i].tag <= tag) result.coordinates.push_back(i);
  }
  if (result.coordinates.empty()) {
    throw DomainError("no fragment formula is tagged " + std::string(tag_name(tag)) + " or below");
  }
  for (std::size_t a = 0; a < cloud.size(); ++a) {
    for (std::size_t b = a + 1; b < cloud.size(); ++b) {
      const bool same = std::all_of(result.coordinates.begin(), result.coordinates.end(), [&](std::size_t i) {
        return cloud.vectors[a].values[i] == cloud.vectors[b].values[i];
      });
      if (same) {
        result.separated = false;
        result.offending = std::pair{a, b};
        return result;
      }
    }
  }
  return result;
}

MixtureCheck mixture_check(const FiniteStructure& m1, const FiniteStructure& m2, const Rational& lambda,
                           const Fragment& fragment, const std::vector<std::size_t>& tuple1,
                           const std::vector<std::size_t>& tuple2) {
  for (const auto& f : fragment.formulas()) {
    if (!is_affine(f.formula)) throw FragmentError("mixture law needs affine formulas: " + to_string(f.formula));
  }
  if (tuple1.size() != fragment.arity() || tuple2.size() != fragment.arity()) {
    throw DomainError("tuples must have length " + std::to_string(fragment.arity()));
  }
  for (std::size_t i = 0; i < fragment.arity(); ++i) {
    if (tuple1[i] >= m1.size() || tuple2[i] >= m2.size()) throw DomainError("tuple element out of range");
  }
  const Ultramean mix = construct_mixture(m1, m2, lambda);
  std::vector<std::size_t> paired;
  for (std::size_t i = 0; i < fragment.arity(); ++i) {
    const std::size_t coords[] = {tuple1[i], tuple2[i]};
    paired.push_back(mix.element_of(coords));
  }
  MixtureCheck out{true, evaluate_fragment(mix.structure, fragment, paired), {}};
  const auto v1 = evaluate_fragment(m1, fragment, tuple1);
  const auto v2 = evaluate_fragment(m2, fragment, tuple2);
  for (std::size_t i = 0; i < v1.size(); ++i) out.expected.push_back(lambda * v1[i] + (Rational(1) - lambda) * v2[i]);
  out.equal = out.mixed == out.expected;
  return out;
}

}  // namespace alqe
