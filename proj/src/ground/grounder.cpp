#include "lsos/ground/grounder.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace lsos::ground {

using kb::Arg;
using kb::Guard;
using kb::Name;
using kb::Polynomial;
using kb::Term;

Arg substitute(const Arg& a, const Substitution& theta) {
  if (!a.is_variable()) return a;
  auto it = theta.find(a.variable);
  if (it == theta.end()) throw std::invalid_argument("variable '" + a.variable + "' is not bound by the substitution");
  return Arg::of(it->second);
}

Term substitute(const Term& t, const Substitution& theta) {
  Term out;
  out.relation = t.relation;
  out.args.reserve(t.args.size());
  for (const auto& a : t.args) out.args.push_back(substitute(a, theta));
  return out;
}

Polynomial substitute(const Polynomial& p, const Substitution& theta) {
  Polynomial out;
  for (const auto& [m, c] : p.terms()) {
    kb::Monomial g;
    for (const auto& [t, e] : m.factors()) g = g * kb::Monomial(substitute(t, theta), e);
    out.add(g, c);
  }
  return out;
}

bool eval_guard(const Guard& guard, const Substitution& theta) {
  switch (guard.op) {
    case Guard::Op::truth:
      return true;
    case Guard::Op::eq:
      return substitute(guard.lhs, theta).name == substitute(guard.rhs, theta).name;
    case Guard::Op::neg:
      return !eval_guard(guard.children.at(0), theta);
    case Guard::Op::conj:
      for (const auto& c : guard.children)
        if (!eval_guard(c, theta)) return false;
      return true;
    case Guard::Op::disj:
      for (const auto& c : guard.children)
        if (eval_guard(c, theta)) return true;
      return false;
  }
  return false;
}

int UniverseMode::generic_count(const kb::KnowledgeBase& kb) const {
  switch (kind) {
    case Kind::k_names:
      return k;
    case Kind::dc:
      return 0;
    case Kind::ou:
      return kb::kb_rank(kb);
  }
  return 0;
}

std::string UniverseMode::to_string() const {
  switch (kind) {
    case Kind::k_names:
      return "k=" + std::to_string(k);
    case Kind::dc:
      return "dc";
    case Kind::ou:
      return "ou";
  }
  return "?";
}

const GroundConstraint* GroundTheory::find(const std::string& id) const {
  for (const auto* list : {&inequalities, &equalities, &bounds})
    for (const auto& c : *list)
      if (c.id == id) return &c;
  return nullptr;
}

std::vector<const GroundConstraint*> GroundTheory::all() const {
  std::vector<const GroundConstraint*> out;
  out.reserve(size());
  for (const auto* list : {&inequalities, &equalities, &bounds})
    for (const auto& c : *list) out.push_back(&c);
  return out;
}

namespace {

// Odometer step, last digit fastest; false once every combination was seen.
bool advance(std::vector<std::size_t>& digit, std::size_t base) {
  for (std::size_t pos = digit.size(); pos-- > 0;) {
    if (++digit[pos] < base) return true;
    digit[pos] = 0;
  }
  return false;
}

int placeholder_ceiling(const kb::KnowledgeBase& kb) {
  int hi = 0;
  for (const auto& c : kb.constraints())
    for (int g : c.generic_placeholders()) hi = std::max(hi, g);
  return hi;
}

}  // namespace

GroundTheory ground(const kb::KnowledgeBase& kb, UniverseMode mode, const GroundOptions& opts) {
  GroundTheory out;
  out.pool = kb.constant_names();
  out.constant_count = static_cast<int>(out.pool.size());
  out.generic_count = std::max({mode.generic_count(kb), opts.min_generics, placeholder_ceiling(kb)});
  for (int i = 1; i <= out.generic_count; ++i) out.pool.push_back(Name::generic(i));

  int next_g = 0, next_h = 0, next_b = 0;
  std::unordered_set<std::string> seen;

  for (std::size_t ci = 0; ci < kb.constraints().size(); ++ci) {
    const auto& con = kb.constraints()[ci];
    const auto vars = con.occurring_variables();
    if (!vars.empty() && out.pool.empty()) {
      out.warnings.push_back({kb::Diagnostic::Severity::warning,
                              "empty name pool: constraint has no groundings (" + con.to_string() + ")", con.span, ci});
      continue;
    }

    std::vector<std::size_t> digit(vars.size(), 0);
    for (;;) {
      Substitution theta;
      for (std::size_t v = 0; v < vars.size(); ++v) theta.emplace(vars[v], out.pool[digit[v]]);

      if (eval_guard(con.guard, theta)) {
        Polynomial p = substitute(con.body, theta);
        const bool expectation = con.kind == kb::ConstraintKind::expectation;
        const bool equality = con.relation == kb::Relation::eq;
        char tag = expectation ? (equality ? 'E' : 'B') : (equality ? 'h' : 'g');
        if (seen.insert(std::string(1, tag) + p.to_string()).second) {
          if (!expectation) {
            GroundConstraint g;
            g.kind = equality ? GroundKind::equality : GroundKind::inequality;
            g.id = equality ? "h" + std::to_string(++next_h) : "g" + std::to_string(++next_g);
            g.poly = std::move(p);
            g.source = ci;
            (equality ? out.equalities : out.inequalities).push_back(std::move(g));
          } else if (!equality) {
            out.bounds.push_back({"b" + std::to_string(++next_b), GroundKind::bound, std::move(p), ci});
          } else {
            std::string id = "b" + std::to_string(++next_b);
            Polynomial neg = p * -1.0;
            out.bounds.push_back({id + "+", GroundKind::bound, std::move(p), ci});
            out.bounds.push_back({id + "-", GroundKind::bound, std::move(neg), ci});
          }
        }
      }

      if (!advance(digit, out.pool.size())) break;
    }
  }
  if (out.size() == 0)
    out.warnings.push_back({kb::Diagnostic::Severity::warning, "ground theory is empty", {}, {}});
  return out;
}

std::size_t count_atoms(const GroundTheory& g) {
  std::size_t n = 0;
  for (const auto* c : g.all()) {
    // The two halves of a split expectation equality are one grounding.
    if (!c->id.empty() && c->id.back() == '-') continue;
    n += c->poly.terms_used().size();
  }
  return n;
}

std::size_t count_atoms(const kb::KnowledgeBase& kb, UniverseMode mode) { return count_atoms(ground(kb, mode)); }

AtomBound atom_bound(const kb::KnowledgeBase& kb, UniverseMode mode) {
  AtomBound b;
  b.n = kb.constraints().size();
  for (const auto& c : kb.constraints()) b.m = std::max(b.m, c.body.terms_used().size());
  b.c = kb.constants().size();
  b.k = static_cast<std::size_t>(std::max(mode.generic_count(kb), placeholder_ceiling(kb)));
  b.value = double(b.n) * double(b.m) * std::pow(double(b.c + b.k), double(b.k));
  return b;
}

nlohmann::json polynomial_to_json(const Polynomial& p) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [m, c] : p.terms()) j[m.to_string()] = c;
  return j;
}

nlohmann::json ground_to_json(const GroundTheory& g) {
  nlohmann::json j;
  nlohmann::json pool = nlohmann::json::array();
  for (const auto& n : g.pool) pool.push_back({{"label", n.label}, {"kind", n.is_generic() ? "generic" : "constant"}});
  j["pool"] = pool;

  auto dump = [](const std::vector<GroundConstraint>& list, const char* rel) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : list)
      arr.push_back({{"id", c.id}, {"relation", rel}, {"source", c.source}, {"text", c.poly.to_string()},
                     {"poly", polynomial_to_json(c.poly)}});
    return arr;
  };
  j["inequalities"] = dump(g.inequalities, ">=");
  j["equalities"] = dump(g.equalities, "=");
  j["bounds"] = dump(g.bounds, ">=");

  std::vector<kb::Monomial> monos;
  std::set<kb::Monomial> unique;
  for (const auto* c : g.all())
    for (const auto& [m, coef] : c->poly.terms())
      if (unique.insert(m).second) monos.push_back(m);
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& [canon, members] : equivalence_classes(monos)) {
    nlohmann::json mem = nlohmann::json::array();
    for (const auto& m : members) mem.push_back(m.to_string());
    classes.push_back({{"canonical", canon.to_string()}, {"members", mem}});
  }
  j["classes"] = classes;
  j["atom_count"] = count_atoms(g);
  nlohmann::json warn = nlohmann::json::array();
  for (const auto& w : g.warnings) warn.push_back(w.message);
  j["warnings"] = warn;
  return j;
}

}  // namespace lsos::ground
