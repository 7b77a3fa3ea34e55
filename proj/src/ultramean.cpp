#include "alqe/ultramean.hpp"

#include <map>
#include <numeric>

namespace alqe {

namespace {

void check_family(const WeightedFamily& family) {
  if (family.empty()) throw DomainError("ultramean of an empty family");
  Rational total(0);
  for (const auto& member : family) {
    if (member.weight < Rational(0)) throw DomainError("negative weight " + member.weight.str());
    total += member.weight;
    if (!(member.structure.signature() == family.front().structure.signature())) {
      throw DomainError("family members have different signatures");
    }
  }
  if (total != Rational(1)) throw DomainError("weights sum to " + total.str() + ", not 1");
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  // Keeps the smaller index as root so roots are lexicographic minima.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::size_t Ultramean::element_of(std::span<const std::size_t> coordinates) const {
  if (coordinates.size() != radix.size()) throw DomainError("coordinate count does not match the family");
  std::size_t index = 0;
  for (std::size_t i = 0; i < radix.size(); ++i) {
    if (coordinates[i] >= radix[i]) throw DomainError("coordinate outside component universe");
    index = index * radix[i] + coordinates[i];
  }
  return class_of[index];
}

Ultramean construct_ultramean(const WeightedFamily& family, const UltrameanOptions& options) {
  check_family(family);
  const std::size_t k = family.size();
  std::vector<std::size_t> radix;
  std::size_t product = 1;
  for (const auto& member : family) {
    const std::size_t n = member.structure.size();
    if (product > options.max_universe / n) {
      throw DomainError("product universe exceeds cap " + std::to_string(options.max_universe) +
                        " (set ALQE_MAX_UNIVERSE to raise it)");
    }
    product *= n;
    radix.push_back(n);
  }

  auto coords_of = [&](std::size_t index) {
    std::vector<std::size_t> c(k);
    for (std::size_t i = k; i-- > 0;) {
      c[i] = index % radix[i];
      index /= radix[i];
    }
    return c;
  };
  auto index_of = [&](const std::vector<std::size_t>& c) {
    std::size_t index = 0;
    for (std::size_t i = 0; i < k; ++i) index = index * radix[i] + c[i];
    return index;
  };
  auto averaged_distance = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    Rational d(0);
    for (std::size_t i = 0; i < k; ++i) {
      if (!family[i].weight.is_zero()) d += family[i].weight * family[i].structure.distance(a[i], b[i]);
    }
    return d;
  };

  // Tuples agreeing on every positive-weight slot are the only candidates for
  // distance zero (components are metrics), so bucket by that projection and
  // confirm each merge with the exact averaged distance.
  UnionFind uf(product);
  std::map<std::vector<std::size_t>, std::size_t> buckets;
  for (std::size_t p = 0; p < product; ++p) {
    const auto c = coords_of(p);
    std::vector<std::size_t> key;
    for (std::size_t i = 0; i < k; ++i) {
      if (!family[i].weight.is_zero()) key.push_back(c[i]);
    }
    auto [it, inserted] = buckets.emplace(std::move(key), p);
    if (inserted) continue;
    if (!averaged_distance(coords_of(it->second), c).is_zero()) {
      throw Error("component metric has distinct points at distance zero");
    }
    uf.unite(it->second, p);
  }

  std::vector<std::size_t> class_of(product);
  std::vector<std::size_t> representatives;
  std::vector<std::vector<std::size_t>> members;
  std::map<std::size_t, std::size_t> root_to_class;
  for (std::size_t p = 0; p < product; ++p) {
    const std::size_t root = uf.find(p);
    auto [it, inserted] = root_to_class.emplace(root, representatives.size());
    if (inserted) {
      representatives.push_back(p);
      members.emplace_back();
    }
    class_of[p] = it->second;
    members[it->second].push_back(p);
  }

  const std::size_t n = representatives.size();
  std::vector<std::vector<std::size_t>> rep_coords;
  std::vector<std::string> universe;
  for (std::size_t r : representatives) {
    rep_coords.push_back(coords_of(r));
    std::string id = "(";
    for (std::size_t i = 0; i < k; ++i) {
      if (i > 0) id += ",";
      id += family[i].structure.universe()[rep_coords.back()[i]];
    }
    universe.push_back(id + ")");
  }
  const auto dim = static_cast<Eigen::Index>(n);
  RationalMatrix metric(dim, dim);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      metric(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = averaged_distance(rep_coords[a], rep_coords[b]);
    }
  }

  const Signature& sig = family.front().structure.signature();
  FiniteStructure mean(sig, universe, std::move(metric));

  // Interpretations on product tuples given as lists of product indices.
  auto apply_function = [&](const std::string& name, const std::vector<std::size_t>& args) {
    std::vector<std::size_t> out(k);
    std::vector<std::size_t> slot(args.size());
    for (std::size_t i = 0; i < k; ++i) {
      const auto& m = family[i].structure;
      for (std::size_t j = 0; j < args.size(); ++j) slot[j] = coords_of(args[j])[i];
      out[i] = (*m.function_table(name))[tuple_index(slot, m.size())];
    }
    return class_of[index_of(out)];
  };
  auto apply_relation = [&](const std::string& name, const std::vector<std::size_t>& args) {
    Rational v(0);
    std::vector<std::size_t> slot(args.size());
    for (std::size_t i = 0; i < k; ++i) {
      if (family[i].weight.is_zero()) continue;
      const auto& m = family[i].structure;
      for (std::size_t j = 0; j < args.size(); ++j) slot[j] = coords_of(args[j])[i];
      v += family[i].weight * (*m.relation_table(name))[tuple_index(slot, m.size())];
    }
    return v;
  };

  // For each tuple of classes, also evaluate with one argument swapped for
  // every other member of its class; any disagreement means the symbol is not
  // well defined on the quotient.
  auto for_each_variant = [&](int arity, std::size_t tuple, const auto& visit) {
    const auto classes = tuple_at(tuple, arity, n);
    std::vector<std::size_t> args;
    for (std::size_t c : classes) args.push_back(representatives[c]);
    visit(args, true);
    for (int pos = 0; pos < arity; ++pos) {
      for (std::size_t member : members[classes[static_cast<std::size_t>(pos)]]) {
        if (member == args[static_cast<std::size_t>(pos)]) continue;
        auto variant = args;
        variant[static_cast<std::size_t>(pos)] = member;
        visit(variant, false);
      }
    }
  };

  for (const auto& f : sig.functions()) {
    for (const auto& member : family) {
      if (member.structure.function_table(f.name) == nullptr) throw DomainError("member lacks table for " + f.name);
    }
    std::vector<std::size_t> table(tuple_count(n, f.arity));
    for (std::size_t t = 0; t < table.size(); ++t) {
      for_each_variant(f.arity, t, [&](const std::vector<std::size_t>& args, bool canonical) {
        const std::size_t value = apply_function(f.name, args);
        if (canonical) {
          table[t] = value;
        } else if (value != table[t]) {
          throw Error("function " + f.name + " is not well defined on the kernel quotient");
        }
      });
    }
    mean.set_function(f.name, std::move(table));
  }
  for (const auto& r : sig.relations()) {
    for (const auto& member : family) {
      if (member.structure.relation_table(r.name) == nullptr) throw DomainError("member lacks table for " + r.name);
    }
    std::vector<Rational> table(tuple_count(n, r.arity));
    for (std::size_t t = 0; t < table.size(); ++t) {
      for_each_variant(r.arity, t, [&](const std::vector<std::size_t>& args, bool canonical) {
        Rational value = apply_relation(r.name, args);
        if (canonical) {
          table[t] = std::move(value);
        } else if (value != table[t]) {
          throw Error("relation " + r.name + " is not well defined on the kernel quotient");
        }
      });
    }
    mean.set_relation(r.name, std::move(table));
  }

  return Ultramean{std::move(mean), std::move(radix), std::move(class_of)};
}

FiniteStructure ultramean(const WeightedFamily& family, const UltrameanOptions& options) {
  return construct_ultramean(family, options).structure;
}

Ultramean construct_mixture(const FiniteStructure& m1, const FiniteStructure& m2, const Rational& lambda,
                            const UltrameanOptions& options) {
  if (lambda < Rational(0) || lambda > Rational(1)) throw DomainError("mixture weight " + lambda.str() + " outside [0,1]");
  return construct_ultramean({{lambda, m1}, {Rational(1) - lambda, m2}}, options);
}

FiniteStructure mixture(const FiniteStructure& m1, const FiniteStructure& m2, const Rational& lambda,
                        const UltrameanOptions& options) {
  return construct_mixture(m1, m2, lambda, options).structure;
}

LosCheck verify_los(const WeightedFamily& family, const Formula& sentence, const UltrameanOptions& options) {
  if (!is_affine(sentence)) throw FragmentError("the ultramean law is only asserted for affine sentences");
  if (!free_vars(sentence).empty()) throw FragmentError("verify_los needs a closed sentence");
  const FiniteStructure mean = ultramean(family, options);
  Rational weighted(0);
  for (const auto& member : family) {
    if (!member.weight.is_zero()) weighted += member.weight * evaluate(member.structure, sentence);
  }
  Rational value = evaluate(mean, sentence);
  const bool equal = value == weighted;
  return {equal, std::move(value), std::move(weighted)};
}

}  // namespace alqe
