#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "alqe/errors.hpp"
#include "alqe/odag.hpp"
#include "alqe/qe_finvec.hpp"
#include "alqe/riesz.hpp"
#include "alqe/structure_io.hpp"
#include "alqe/typespace.hpp"
#include "alqe/ultramean.hpp"

namespace alqe::cli {

namespace {

using nlohmann::json;

struct UsageError : Error {
  using Error::Error;
};

std::size_t max_universe() {
  const char* env = std::getenv("ALQE_MAX_UNIVERSE");
  if (env == nullptr || *env == '\0') return UltrameanOptions{}.max_universe;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) throw UsageError(std::string("ALQE_MAX_UNIVERSE must be a positive integer, got '") + env + "'");
  return static_cast<std::size_t>(v);
}

Signature language(const std::string& name) {
  if (name == "vs") return vector_space_signature();
  if (name == "ring") return ring_signature();
  if (name == "boolean") return boolean_algebra_signature();
  if (name == "odag") return odag_signature();
  if (name == "empty") return Signature{};
  throw UsageError("unknown language '" + name + "' (vs, ring, boolean, odag, empty)");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> nonblank_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(line.substr(first, line.find_last_not_of(" \t\r") - first + 1));
  }
  return out;
}

std::string tuple_str(const std::vector<std::string>& parts) {
  std::string s = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : "") + parts[i];
  return s + ")";
}

std::string values_str(const std::vector<Rational>& v) {
  std::vector<std::string> parts;
  for (const auto& r : v) parts.push_back(r.str());
  return tuple_str(parts);
}

json values_json(const std::vector<Rational>& v) {
  json j = json::array();
  for (const auto& r : v) j.push_back(r.str());
  return j;
}

Assignment parse_assignment(const FiniteStructure& m, const std::vector<std::string>& items) {
  Assignment a;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("assignment '" + item + "' is not var=element");
    const auto idx = m.index_of(item.substr(eq + 1));
    if (!idx) throw UsageError("no element '" + item.substr(eq + 1) + "' in the structure");
    a[item.substr(0, eq)] = *idx;
  }
  return a;
}

struct Options {
  std::string format = "text";

  std::string structure;
  std::string formula;
  std::vector<std::string> assign;
  std::string condition;

  std::vector<std::string> members;
  std::vector<std::string> weights;
  std::string out_path;
  std::string sentence;

  int q = 2;
  int n = 1;
  bool verify = false;

  std::string axiom = "all";
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  int box = 10;
  int max_den = 10;

  std::string fragment;
  bool extremes = false;
  std::string separate;

  std::string op = "join";
  std::string formulas;
  std::string lang = "boolean";
  std::size_t cap = kDefaultExpansionCap;
  int k = 2;
  bool literal = false;

  std::vector<long> primes;
  long max_prime = 31;
  long prime_bound = 1000;
};

class Runner {
 public:
  Runner(const Options& o, std::ostream& out) : o_(o), out_(out) {}

  bool json_output() const { return o_.format == "json"; }

  int eval() {
    const auto m = load_structure_file(o_.structure);
    const Formula f = parse_formula(o_.formula, m.signature());
    const Rational v = evaluate(m, f, parse_assignment(m, o_.assign));
    if (json_output()) {
      out_ << json{{"formula", to_string(f)}, {"value", v.str()}}.dump() << '\n';
    } else {
      out_ << v << '\n';
    }
    return kExitOk;
  }

  int validate_cmd() {
    const auto m = load_structure_file(o_.structure);
    const auto report = validate(m);
    if (json_output()) {
      json v = json::array();
      for (const auto& x : report.violations) v.push_back({{"symbol", x.symbol}, {"message", x.message}});
      out_ << json{{"valid", report.ok()}, {"violations", v}}.dump() << '\n';
    } else if (report.ok()) {
      out_ << "valid\n";
    } else {
      for (const auto& x : report.violations) out_ << "violation: " << x.message << '\n';
    }
    return report.ok() ? kExitOk : kExitViolation;
  }

  int check() {
    const auto m = load_structure_file(o_.structure);
    const Condition c = parse_condition(o_.condition, m.signature());
    const Rational lhs = evaluate(m, c.lhs);
    const Rational rhs = evaluate(m, c.rhs);
    const bool holds = lhs <= rhs;
    if (json_output()) {
      out_ << json{{"holds", holds}, {"lhs", lhs.str()}, {"rhs", rhs.str()}}.dump() << '\n';
    } else {
      out_ << (holds ? "holds" : "fails") << ": " << lhs << " <= " << rhs << '\n';
    }
    return holds ? kExitOk : kExitViolation;
  }

  int ultramean_cmd() {
    if (o_.members.empty() || o_.members.size() != o_.weights.size()) {
      throw UsageError("give one --weight per --member");
    }
    WeightedFamily family;
    for (std::size_t i = 0; i < o_.members.size(); ++i) {
      family.push_back({Rational::parse(o_.weights[i]), load_structure_file(o_.members[i])});
    }
    const UltrameanOptions options{max_universe()};
    const FiniteStructure mean = ultramean(family, options);
    if (!o_.out_path.empty()) save_structure_file(o_.out_path, mean);
    if (o_.sentence.empty()) {
      if (o_.out_path.empty()) out_ << dump_structure(mean);
      return kExitOk;
    }
    const auto los = verify_los(family, parse_formula(o_.sentence, mean.signature()), options);
    if (json_output()) {
      out_ << json{{"size", mean.size()}, {"equal", los.equal}, {"mean", los.mean_value.str()},
                   {"weighted", los.weighted_value.str()}}
                  .dump()
           << '\n';
    } else {
      out_ << "ultramean with " << mean.size() << " elements\n"
           << "value in mean: " << los.mean_value << "\nweighted average: " << los.weighted_value << '\n'
           << (los.equal ? "equal" : "NOT EQUAL") << '\n';
    }
    return los.equal ? kExitOk : kExitViolation;
  }

  int qe() {
    const Formula f = parse_formula(o_.formula, vector_space_signature());
    std::vector<std::string> vars = free_vars(f);
    if (o_.n < 0) throw UsageError("--n must be nonnegative");
    if (vars.size() > static_cast<std::size_t>(o_.n)) {
      throw UsageError("formula has " + std::to_string(vars.size()) + " free variables but --n is " +
                       std::to_string(o_.n));
    }
    for (int i = 1; vars.size() < static_cast<std::size_t>(o_.n); ++i) {
      const std::string fresh = "x" + std::to_string(i);
      if (std::find(vars.begin(), vars.end(), fresh) == vars.end()) vars.push_back(fresh);
    }
    const QFNormalForm nf = eliminate_to_normal_form(f, o_.q, vars);
    const std::string result = to_string(nf, vars);
    json report{{"context", vars}, {"result", result}};
    if (!json_output()) out_ << result << '\n';
    if (!o_.verify) {
      if (json_output()) out_ << report.dump() << '\n';
      return kExitOk;
    }
    struct Row {
      FqVector point;
      Rational brute;
      Rational eliminated;
    };
    std::vector<Row> rows;
    bool ok = true;
    for (const auto& p : all_points(o_.q, o_.n)) {
      rows.push_back({p, brute_force(f, o_.q, vars, p), nf.evaluate(p)});
      ok = ok && rows.back().brute == rows.back().eliminated;
    }
    report["verify"] = ok;
    if (json_output()) {
      if (!ok) {
        json table = json::array();
        for (const auto& r : rows) table.push_back({{"point", r.point}, {"brute", r.brute.str()}, {"qe", r.eliminated.str()}});
        report["table"] = table;
      }
      out_ << report.dump() << '\n';
    } else if (ok) {
      out_ << "verify PASS (" << rows.size() << " points)\n";
    } else {
      out_ << "verify FAIL\npoint\tbrute\tqe\n";
      for (const auto& r : rows) {
        std::vector<std::string> parts;
        for (int c : r.point) parts.push_back(std::to_string(c));
        out_ << tuple_str(parts) << '\t' << r.brute << '\t' << r.eliminated
             << (r.brute == r.eliminated ? "" : "\t<- differs") << '\n';
      }
    }
    return ok ? kExitOk : kExitViolation;
  }

  int odag_check() {
    std::vector<std::string> ids;
    if (o_.axiom == "all") {
      ids = axiom_ids();
    } else {
      ids.push_back(o_.axiom);
    }
    AxiomCheckOptions options;
    options.trials = o_.trials;
    options.seed = o_.seed;
    options.box = o_.box;
    options.max_denominator = o_.max_den;
    if (o_.box < 1 || o_.max_den < 1) throw UsageError("--box and --max-den must be positive");
    bool all_pass = true;
    json reports = json::array();
    for (const auto& id : ids) {
      const auto r = check_axiom(id, options);
      all_pass = all_pass && r.passed;
      json j{{"axiom", id}, {"passed", r.passed}, {"assignments", r.assignments}};
      if (r.counterexample) {
        const auto& cx = *r.counterexample;
        json w = json::object();
        std::vector<std::string> parts;
        for (const auto& [v, x] : cx.witness) {
          w[v] = x.str();
          parts.push_back(v + " = " + x.str());
        }
        j["counterexample"] = {{"instance", cx.instance}, {"witness", w}, {"lhs", cx.lhs.str()}, {"rhs", cx.rhs.str()}};
        if (!json_output()) {
          out_ << id << " FAIL" << (cx.instance == id ? "" : " " + cx.instance.substr(id.size() + 1)) << " at " << tuple_str(parts) << ": lhs " << cx.lhs << ", rhs " << cx.rhs
               << '\n';
        }
      } else if (!json_output()) {
        out_ << id << " pass (" << r.assignments << " assignments)\n";
      }
      reports.push_back(j);
    }
    if (json_output()) out_ << reports.dump() << '\n';
    return all_pass ? kExitOk : kExitViolation;
  }

  int odag_rewrite() {
    const auto r = qf_lemma_rewrite(parse_formula(o_.formula, odag_signature()));
    if (json_output()) {
      json j{{"reduced", r.reduced()}};
      if (r.reduced()) {
        j["result"] = to_string(*r.combination);
      } else {
        j["diagnostic"] = r.diagnostic;
      }
      out_ << j.dump() << '\n';
    } else {
      out_ << (r.reduced() ? to_string(*r.combination) : r.diagnostic) << '\n';
    }
    return r.reduced() ? kExitOk : kExitViolation;
  }

  int typespace() {
    const auto m = load_structure_file(o_.structure);
    if (o_.n < 0) throw UsageError("--n must be nonnegative");
    const Fragment frag = load_fragment_file(o_.fragment, m.signature(), static_cast<std::size_t>(o_.n));
    const TypeCloud cloud = realized_types(m, frag, o_.structure, max_universe());
    auto realized_by = [&](const TypeVector& v) {
      std::vector<std::string> parts;
      for (std::size_t i = 0; i < frag.arity(); ++i) {
        parts.push_back(frag.vars()[i] + "=" + m.universe()[v.realizations.front().tuple[i]]);
      }
      return tuple_str(parts);
    };
    json report{{"vars", frag.vars()}, {"formulas", json::array()}, {"cloud", json::array()}};
    for (const auto& f : frag.formulas()) {
      report["formulas"].push_back({{"formula", to_string(f.formula)}, {"tag", std::string(tag_name(f.tag))}});
    }
    if (!json_output()) {
      out_ << cloud.size() << " distinct type vectors over " << frag.size() << " formulas, context "
           << tuple_str(frag.vars()) << '\n';
    }
    for (const auto& v : cloud.vectors) {
      report["cloud"].push_back({{"values", values_json(v.values)}, {"realizations", v.realizations.size()}});
      if (!json_output()) {
        out_ << "  " << values_str(v.values) << "  realized by " << realized_by(v);
        if (v.realizations.size() > 1) out_ << " and " << v.realizations.size() - 1 << " more";
        out_ << '\n';
      }
    }
    int code = kExitOk;
    if (o_.extremes) {
      const TypeCloud ext = extreme_points(cloud);
      report["extreme_points"] = json::array();
      if (!json_output()) out_ << "extreme points of the realized cloud (" << ext.size() << "):\n";
      for (const auto& v : ext.vectors) {
        report["extreme_points"].push_back(values_json(v.values));
        if (!json_output()) out_ << "  " << values_str(v.values) << '\n';
      }
    }
    if (!o_.separate.empty()) {
      const auto tag = parse_tag(o_.separate);
      if (!tag || *tag == FormulaTag::General) throw UsageError("--separate takes atomic, qf or infimal");
      const auto s = separation_check(frag, cloud, *tag);
      json j{{"tag", o_.separate}, {"coordinates", s.coordinates}, {"separated", s.separated}};
      if (s.offending) {
        const auto [a, b] = *s.offending;
        j["offending"] = {values_json(cloud.vectors[a].values), values_json(cloud.vectors[b].values)};
      }
      report["separation"] = j;
      if (!json_output()) {
        if (s.separated) {
          out_ << o_.separate << " coordinates separate all " << cloud.size()
               << " vectors of this cloud (a finite check, not a density statement)\n";
        } else {
          const auto [a, b] = *s.offending;
          out_ << o_.separate << " coordinates do not separate " << values_str(cloud.vectors[a].values) << " from "
               << values_str(cloud.vectors[b].values) << '\n';
        }
      }
      if (!s.separated) code = kExitViolation;
    }
    if (json_output()) out_ << report.dump() << '\n';
    return code;
  }

  int riesz_expand() {
    const Signature sig = language(o_.lang);
    std::vector<Formula> fs;
    for (const auto& line : nonblank_lines(read_file(o_.formulas))) fs.push_back(parse_formula(line, sig));
    if (o_.op != "join" && o_.op != "meet") throw UsageError("--op takes join or meet");
    const auto c = o_.op == "join" ? inclusion_exclusion_join(fs, o_.cap) : inclusion_exclusion_meet(fs, o_.cap);
    const std::string text = to_string(c.to_formula());
    if (json_output()) {
      json terms = json::array();
      for (const auto& t : c.terms) terms.push_back({{"coefficient", t.coefficient.str()}, {"formula", to_string(t.formula)}});
      out_ << json{{"formula", text}, {"terms", terms}}.dump() << '\n';
    } else {
      out_ << text << '\n';
    }
    return kExitOk;
  }

  int riesz_prob_check() {
    if (o_.k < 1 || o_.k > 6) throw UsageError("--k must be between 1 and 6");
    std::vector<Rational> w;
    if (o_.weights.empty()) {
      w.assign(static_cast<std::size_t>(o_.k), Rational(1, o_.k));
    } else {
      for (const auto& s : o_.weights) w.push_back(Rational::parse(s));
    }
    const auto b = boolean_algebra(o_.k, w);
    const auto r = probability_identity_check(b, o_.literal);
    if (json_output()) {
      json j{{"holds", r.holds}};
      if (r.witness) j["witness"] = {b.universe()[r.witness->first], b.universe()[r.witness->second]};
      out_ << j.dump() << '\n';
    } else if (r.holds) {
      out_ << "identity holds for all " << b.size() * b.size() << " pairs\n";
    } else {
      out_ << "identity fails at (" << b.universe()[r.witness->first] << ", " << b.universe()[r.witness->second] << ")\n";
    }
    return r.holds ? kExitOk : kExitViolation;
  }

  int scan_primes() {
    const Signature sig = ring_signature();
    const Formula f = parse_formula(o_.sentence, sig);
    if (!free_vars(f).empty()) throw UsageError("scan-primes needs a closed sentence");
    std::vector<long> primes = o_.primes;
    if (primes.empty()) {
      for (long p = 2; p <= o_.max_prime; ++p) {
        if (is_prime(p)) primes.push_back(p);
      }
    }
    for (long p : primes) {
      if (!is_prime(p)) throw UsageError(std::to_string(p) + " is not prime");
      if (p > o_.prime_bound) throw UsageError(std::to_string(p) + " exceeds the prime bound " + std::to_string(o_.prime_bound));
    }
    std::vector<Rational> values;
    for (long p : primes) values.push_back(evaluate(prime_field_ring(static_cast<int>(p)), f));
    std::size_t start = values.size();
    while (start > 0 && (start == values.size() || values[start - 1] == values.back())) --start;
    json rows = json::array();
    if (!json_output()) out_ << "p\tvalue in F_p\n";
    for (std::size_t i = 0; i < primes.size(); ++i) {
      rows.push_back({{"p", primes[i]}, {"value", values[i].str()}});
      if (!json_output()) out_ << primes[i] << '\t' << values[i] << '\n';
    }
    const std::string note = "finite prime fields only; these are not values in models of ACF_p";
    if (json_output()) {
      json j{{"sentence", to_string(f)}, {"values", rows}, {"note", note}};
      if (!values.empty()) j["constant_from"] = {{"p", primes[start]}, {"value", values.back().str()}};
      out_ << j.dump() << '\n';
    } else if (!values.empty()) {
      out_ << "constant from p = " << primes[start] << " onward within the scan: " << values.back() << " (" << note
           << ")\n";
    }
    return kExitOk;
  }

 private:
  const Options& o_;
  std::ostream& out_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Exact workbench for affine continuous logic", "alqe"};
  app.require_subcommand(1);
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  auto* eval = app.add_subcommand("eval", "Evaluate a formula in a structure file");
  eval->add_option("--structure", o.structure)->required();
  eval->add_option("--formula", o.formula)->required();
  eval->add_option("--assign", o.assign, "var=element, repeatable");

  auto* validate_cmd = app.add_subcommand("validate", "Check metric, range and Lipschitz conditions");
  validate_cmd->add_option("--structure", o.structure)->required();

  auto* check = app.add_subcommand("check", "Check a closed condition phi <= psi");
  check->add_option("--structure", o.structure)->required();
  check->add_option("--condition", o.condition)->required();

  auto* um = app.add_subcommand("ultramean", "Weighted mean of structure files");
  um->add_option("--member", o.members, "structure file, repeatable")->required();
  um->add_option("--weight", o.weights, "weight per member, as p/q")->required();
  um->add_option("--out", o.out_path, "write the mean here");
  um->add_option("--sentence", o.sentence, "compare a closed affine sentence against the weighted average");

  auto* qe = app.add_subcommand("qe", "Eliminate quantifiers over a vector space over F_q");
  qe->add_option("--q", o.q)->required();
  qe->add_option("--n", o.n)->required();
  qe->add_option("--formula", o.formula)->required();
  qe->add_flag("--verify", o.verify, "compare with brute force at every point");

  auto* odag = app.add_subcommand("odag", "Ordered divisible abelian groups over the rationals");
  odag->require_subcommand(1);
  auto* odag_check = odag->add_subcommand("check", "Check axioms A1..A13");
  odag_check->add_option("--axiom", o.axiom, "A1..A13 or all");
  odag_check->add_option("--trials", o.trials);
  odag_check->add_option("--seed", o.seed);
  odag_check->add_option("--box", o.box, "sample numerators within box times denominator");
  odag_check->add_option("--max-den", o.max_den);
  auto* odag_rewrite = odag->add_subcommand("rewrite", "One-variable quantifier-free normal form");
  odag_rewrite->add_option("--formula", o.formula)->required();

  auto* ts = app.add_subcommand("typespace", "Realized type vectors of a fragment");
  ts->add_option("--structure", o.structure)->required();
  ts->add_option("--fragment", o.fragment)->required();
  ts->add_option("--n", o.n)->required();
  ts->add_flag("--extremes", o.extremes);
  ts->add_option("--separate", o.separate, "atomic, qf or infimal");

  auto* riesz = app.add_subcommand("riesz", "Lattice rewriting");
  riesz->require_subcommand(1);
  auto* expand = riesz->add_subcommand("expand", "Inclusion-exclusion over a list of formulas");
  expand->add_option("--op", o.op)->check(CLI::IsMember({"join", "meet"}));
  expand->add_option("--formulas", o.formulas, "one formula per line")->required();
  expand->add_option("--language", o.lang, "vs, ring, boolean, odag or empty");
  expand->add_option("--cap", o.cap);
  auto* prob = riesz->add_subcommand("prob-check", "mu(x /\\ y) + mu(x \\/ y) = mu(x) + mu(y) on 2^k");
  prob->add_option("--k", o.k);
  prob->add_option("--weights", o.weights, "atom weights, default uniform")->delimiter(',');
  prob->add_flag("--literal", o.literal, "use mu(x) + mu(x) on the right");

  auto* scan = app.add_subcommand("scan-primes", "Evaluate a ring sentence in prime fields (heuristic)");
  scan->add_option("--sentence", o.sentence)->required();
  scan->add_option("--primes", o.primes)->delimiter(',');
  scan->add_option("--max-prime", o.max_prime);
  scan->add_option("--bound", o.prime_bound, "largest prime accepted");

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  Runner r(o, out);
  try {
    if (eval->parsed()) return r.eval();
    if (validate_cmd->parsed()) return r.validate_cmd();
    if (check->parsed()) return r.check();
    if (um->parsed()) return r.ultramean_cmd();
    if (qe->parsed()) return r.qe();
    if (odag_check->parsed()) return r.odag_check();
    if (odag_rewrite->parsed()) return r.odag_rewrite();
    if (ts->parsed()) return r.typespace();
    if (expand->parsed()) return r.riesz_expand();
    if (prob->parsed()) return r.riesz_prob_check();
    if (scan->parsed()) return r.scan_primes();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace alqe::cli
