#include "alqe/structure_io.hpp"

#include <fstream>
#include <sstream>

namespace alqe {

using nlohmann::json;

namespace {

Rational rational_from_json(const json& j, const std::string& where) {
  if (!j.is_string()) throw DomainError(where + ": rationals must be strings \"p/q\" or \"n\"");
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw DomainError(where + ": " + e.what());
  }
}

json symbols_to_json(const std::vector<Symbol>& symbols) {
  json out = json::array();
  for (const auto& s : symbols) {
    out.push_back({{"name", s.name}, {"arity", s.arity}, {"lipschitz", s.lipschitz.str()}});
  }
  return out;
}

// Nested array of depth `arity`; arity 0 is the bare value.
template <typename Leaf>
json nest(std::size_t n, int arity, std::size_t offset, const Leaf& leaf) {
  if (arity == 0) return leaf(offset);
  json out = json::array();
  std::size_t stride = 1;
  for (int i = 1; i < arity; ++i) stride *= n;
  for (std::size_t i = 0; i < n; ++i) out.push_back(nest(n, arity - 1, offset + i * stride, leaf));
  return out;
}

template <typename Leaf>
void unnest(const json& j, std::size_t n, int arity, std::size_t offset, const std::string& where, const Leaf& leaf) {
  if (arity == 0) {
    leaf(offset, j);
    return;
  }
  if (!j.is_array() || j.size() != n) throw DomainError(where + ": table must be nested arrays of length " + std::to_string(n));
  std::size_t stride = 1;
  for (int i = 1; i < arity; ++i) stride *= n;
  for (std::size_t i = 0; i < n; ++i) unnest(j[i], n, arity - 1, offset + i * stride, where, leaf);
}

}  // namespace

json signature_to_json(const Signature& sig) {
  return {{"functions", symbols_to_json(sig.functions())}, {"relations", symbols_to_json(sig.relations())}};
}

Signature signature_from_json(const json& j) {
  Signature sig;
  auto read = [&](const char* key, bool relation) {
    if (!j.contains(key)) return;
    for (const auto& s : j.at(key)) {
      if (!s.contains("name") || !s.contains("arity")) throw DomainError(std::string("signature.") + key + ": entries need name and arity");
      const std::string name = s.at("name").get<std::string>();
      const int arity = s.at("arity").get<int>();
      Rational lip(1);
      if (s.contains("lipschitz")) {
        lip = s.at("lipschitz").is_number_integer() ? Rational(s.at("lipschitz").get<long>())
                                                    : rational_from_json(s.at("lipschitz"), "lipschitz of " + name);
      }
      if (relation) {
        sig.add_relation(name, arity, lip);
      } else {
        sig.add_function(name, arity, lip);
      }
    }
  };
  read("functions", false);
  read("relations", true);
  return sig;
}

json structure_to_json(const FiniteStructure& m) {
  const std::size_t n = m.size();
  json metric = json::array();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) metric.push_back(m.distance(a, b).str());
  }
  json functions = json::object();
  for (const auto& f : m.signature().functions()) {
    const auto* table = m.function_table(f.name);
    if (table == nullptr) continue;
    functions[f.name] = nest(n, f.arity, 0, [&](std::size_t i) { return json(m.universe()[(*table)[i]]); });
  }
  json relations = json::object();
  for (const auto& r : m.signature().relations()) {
    const auto* table = m.relation_table(r.name);
    if (table == nullptr) continue;
    relations[r.name] = nest(n, r.arity, 0, [&](std::size_t i) { return json((*table)[i].str()); });
  }
  return {{"signature", signature_to_json(m.signature())},
          {"universe", m.universe()},
          {"metric", metric},
          {"functions", functions},
          {"relations", relations}};
}

FiniteStructure structure_from_json(const json& j) {
  try {
    if (!j.is_object()) throw DomainError("structure file must be a JSON object");
    Signature sig = signature_from_json(j.value("signature", json::object()));
    const auto universe = j.at("universe").get<std::vector<std::string>>();
    const std::size_t n = universe.size();
    const auto dim = static_cast<Eigen::Index>(n);
    RationalMatrix metric(dim, dim);
    const json& mj = j.at("metric");
    if (mj.size() == n * n && (n == 0 || !mj.front().is_array())) {
      for (std::size_t i = 0; i < n * n; ++i) {
        metric(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)) = rational_from_json(mj[i], "metric");
      }
    } else {
      unnest(mj, n, 2, 0, "metric", [&](std::size_t i, const json& v) {
        metric(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)) = rational_from_json(v, "metric");
      });
    }
    FiniteStructure m(sig, universe, std::move(metric));
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[universe[i]] = i;
    const json functions = j.value("functions", json::object());
    for (const auto& f : sig.functions()) {
      if (!functions.contains(f.name)) continue;
      std::vector<std::size_t> table(tuple_count(n, f.arity));
      unnest(functions.at(f.name), n, f.arity, 0, "function " + f.name, [&](std::size_t i, const json& v) {
        auto it = index.find(v.get<std::string>());
        if (it == index.end()) throw DomainError("function " + f.name + ": value '" + v.dump() + "' not in universe");
        table[i] = it->second;
      });
      m.set_function(f.name, std::move(table));
    }
    const json relations = j.value("relations", json::object());
    for (const auto& r : sig.relations()) {
      if (!relations.contains(r.name)) continue;
      std::vector<Rational> table(tuple_count(n, r.arity));
      unnest(relations.at(r.name), n, r.arity, 0, "relation " + r.name,
             [&](std::size_t i, const json& v) { table[i] = rational_from_json(v, "relation " + r.name); });
      m.set_relation(r.name, std::move(table));
    }
    return m;
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed structure file: ") + e.what());
  }
}

std::string dump_structure(const FiniteStructure& m) { return structure_to_json(m).dump(2) + "\n"; }

FiniteStructure load_structure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open structure file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DomainError("'" + path + "' is not valid JSON: " + e.what());
  }
  return structure_from_json(j);
}

void save_structure_file(const std::string& path, const FiniteStructure& m) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write structure file '" + path + "'");
  out << dump_structure(m);
}

}  // namespace alqe
