#include "lsos/kb/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lsos::kb {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename Seq>
std::strong_ordering lexicographic(const Seq& a, const Seq& b) {
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

// --- Name ------------------------------------------------------------------

Name Name::constant(std::string label) {
  Name n;
  n.kind = NameKind::constant;
  n.label = std::move(label);
  return n;
}

Name Name::generic(int index) {
  Name n;
  n.kind = NameKind::generic;
  n.index = index;
  n.label = "g" + std::to_string(index);
  return n;
}

std::strong_ordering Name::operator<=>(const Name& other) const {
  if (kind != other.kind) return kind == NameKind::constant ? std::strong_ordering::less : std::strong_ordering::greater;
  if (kind == NameKind::generic) return index <=> other.index;
  return label.compare(other.label) <=> 0;
}

bool Name::operator==(const Name& other) const {
  if (kind != other.kind) return false;
  return kind == NameKind::generic ? index == other.index : label == other.label;
}

std::optional<int> parse_generic_label(const std::string& label) {
  if (label.size() < 2 || label[0] != 'g') return std::nullopt;
  int value = 0;
  auto res = std::from_chars(label.data() + 1, label.data() + label.size(), value);
  if (res.ec != std::errc() || res.ptr != label.data() + label.size() || value <= 0) return std::nullopt;
  if (label[1] == '0') return std::nullopt;
  return value;
}

// --- Arg / Term --------------------------------------------------------------

Arg Arg::of(Name n) {
  Arg a;
  a.kind = ArgKind::name;
  a.name = std::move(n);
  return a;
}

Arg Arg::var(std::string label) {
  Arg a;
  a.kind = ArgKind::variable;
  a.variable = std::move(label);
  return a;
}

std::string Arg::to_string() const { return is_variable() ? variable : name.label; }

std::strong_ordering Arg::operator<=>(const Arg& other) const {
  if (kind != other.kind) return kind == ArgKind::name ? std::strong_ordering::less : std::strong_ordering::greater;
  if (kind == ArgKind::name) return name <=> other.name;
  return variable.compare(other.variable) <=> 0;
}

bool Arg::operator==(const Arg& other) const {
  if (kind != other.kind) return false;
  return kind == ArgKind::name ? name == other.name : variable == other.variable;
}

bool Term::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Arg& a) { return a.is_variable(); });
}

std::string Term::to_string() const {
  std::string out = relation + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i].to_string();
  }
  return out + ")";
}

std::strong_ordering Term::operator<=>(const Term& other) const {
  if (auto c = relation.compare(other.relation) <=> 0; c != 0) return c;
  return lexicographic(args, other.args);
}

// --- Monomial ----------------------------------------------------------------

Monomial::Monomial(const Term& t, int exponent) {
  if (exponent < 0) throw std::invalid_argument("negative exponent");
  if (exponent > 0) factors_.emplace_back(t, exponent);
}

bool Monomial::is_ground() const {
  return std::all_of(factors_.begin(), factors_.end(), [](const auto& f) { return f.first.is_ground(); });
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& f : factors_) d += f.second;
  return d;
}

std::vector<Term> Monomial::terms() const {
  std::vector<Term> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) out.push_back(f.first);
  return out;
}

std::string Monomial::to_string() const {
  if (factors_.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) out += "*";
    out += factors_[i].first.to_string();
    if (factors_[i].second != 1) out += "^" + std::to_string(factors_[i].second);
  }
  return out;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out;
  auto& f = out.factors_;
  f.reserve(a.factors_.size() + b.factors_.size());
  auto ia = a.factors_.begin();
  auto ib = b.factors_.begin();
  while (ia != a.factors_.end() || ib != b.factors_.end()) {
    if (ib == b.factors_.end() || (ia != a.factors_.end() && ia->first < ib->first)) {
      f.push_back(*ia++);
    } else if (ia == a.factors_.end() || ib->first < ia->first) {
      f.push_back(*ib++);
    } else {
      f.emplace_back(ia->first, ia->second + ib->second);
      ++ia;
      ++ib;
    }
  }
  return out;
}

std::strong_ordering Monomial::operator<=>(const Monomial& other) const {
  if (auto c = degree() <=> other.degree(); c != 0) return c;
  const std::size_t n = std::min(factors_.size(), other.factors_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = factors_[i].first <=> other.factors_[i].first; c != 0) return c;
    // Same term: the higher power sorts first, so T^2 < T*X < X^2.
    if (auto c = other.factors_[i].second <=> factors_[i].second; c != 0) return c;
  }
  return factors_.size() <=> other.factors_.size();
}

int monomial_degree(const Monomial& m) { return m.degree(); }
Monomial monomial_multiply(const Monomial& a, const Monomial& b) { return a * b; }

// --- Polynomial --------------------------------------------------------------

Polynomial Polynomial::constant(double c) {
  Polynomial p;
  p.add(Monomial::one(), c);
  return p;
}

Polynomial Polynomial::of(const Monomial& m, double c) {
  Polynomial p;
  p.add(m, c);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coefficient() const {
  double v = 0;
  for (const auto& [m, c] : terms_) v = std::max(v, std::abs(c));
  return v;
}

void Polynomial::add(const Monomial& m, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add(ma * mb, ca * cb);
  return out;
}

std::vector<Term> Polynomial::terms_used() const {
  std::set<Term> seen;
  for (const auto& [m, c] : terms_)
    for (const auto& f : m.factors()) seen.insert(f.first);
  return {seen.begin(), seen.end()};
}

bool Polynomial::is_ground() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& kv) { return kv.first.is_ground(); });
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    double mag = std::abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    if (m.is_constant()) {
      out += format_number(mag);
    } else if (mag == 1.0) {
      out += m.to_string();
    } else {
      out += format_number(mag) + "*" + m.to_string();
    }
  }
  return out;
}

Polynomial polynomial_combine(std::span<const std::pair<double, Monomial>> raw) {
  Polynomial p;
  for (const auto& [c, m] : raw) p.add(m, c);
  return p;
}

// --- Guard -------------------------------------------------------------------

Guard Guard::equal(Arg a, Arg b) {
  Guard g;
  g.op = Op::eq;
  g.lhs = std::move(a);
  g.rhs = std::move(b);
  return g;
}

Guard Guard::not_equal(Arg a, Arg b) { return negate(equal(std::move(a), std::move(b))); }

Guard Guard::all_of(std::vector<Guard> parts) {
  if (parts.size() == 1) return std::move(parts.front());
  Guard g;
  g.op = Op::conj;
  g.children = std::move(parts);
  return g;
}

Guard Guard::any_of(std::vector<Guard> parts) {
  if (parts.size() == 1) return std::move(parts.front());
  Guard g;
  g.op = Op::disj;
  g.children = std::move(parts);
  return g;
}

Guard Guard::negate(Guard inner) {
  Guard g;
  g.op = Op::neg;
  g.children.push_back(std::move(inner));
  return g;
}

void Guard::collect_args(std::vector<Arg>& out) const {
  if (op == Op::eq) {
    out.push_back(lhs);
    out.push_back(rhs);
  }
  for (const auto& c : children) c.collect_args(out);
}

std::string Guard::to_string() const {
  switch (op) {
    case Op::truth:
      return "true";
    case Op::eq:
      return lhs.to_string() + " = " + rhs.to_string();
    case Op::neg: {
      const Guard& c = children.front();
      if (c.op == Op::eq) return c.lhs.to_string() + " != " + c.rhs.to_string();
      return "!(" + c.to_string() + ")";
    }
    case Op::conj:
    case Op::disj: {
      std::string sep = op == Op::conj ? " & " : " | ";
      std::string out;
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) out += sep;
        const Guard& c = children[i];
        bool wrap = c.op == Op::conj || c.op == Op::disj;
        out += wrap ? "(" + c.to_string() + ")" : c.to_string();
      }
      return out;
    }
  }
  return {};
}

// --- Constraint --------------------------------------------------------------

std::vector<std::string> Constraint::occurring_variables() const {
  std::set<std::string> seen;
  std::vector<Arg> args;
  guard.collect_args(args);
  for (const auto& t : body.terms_used())
    for (const auto& a : t.args) args.push_back(a);
  for (const auto& a : args)
    if (a.is_variable()) seen.insert(a.variable);

  std::vector<std::string> out;
  for (const auto& v : variables)
    if (seen.erase(v)) out.push_back(v);
  out.insert(out.end(), seen.begin(), seen.end());
  return out;
}

int Constraint::quantifier_rank() const { return static_cast<int>(occurring_variables().size()); }

std::vector<int> Constraint::generic_placeholders() const {
  std::set<int> seen;
  std::vector<Arg> args;
  guard.collect_args(args);
  for (const auto& t : body.terms_used())
    for (const auto& a : t.args) args.push_back(a);
  for (const auto& a : args)
    if (!a.is_variable() && a.name.is_generic()) seen.insert(a.name.index);
  return {seen.begin(), seen.end()};
}

std::string Constraint::to_string() const {
  std::string out;
  if (!variables.empty()) {
    out += "forall ";
    for (std::size_t i = 0; i < variables.size(); ++i) {
      if (i) out += ",";
      out += variables[i];
    }
    out += " : ";
  }
  if (!guard.is_tautology()) out += guard.to_string() + " => ";

  if (kind == ConstraintKind::logical) {
    out += body.to_string();
  } else if (body.is_zero()) {
    out += "0";
  } else {
    bool first = true;
    for (auto it = body.terms().rbegin(); it != body.terms().rend(); ++it) {
      const auto& [m, c] = *it;
      double mag = std::abs(c);
      if (first) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      first = false;
      if (m.is_constant()) {
        out += format_number(mag);
      } else {
        if (mag != 1.0) out += format_number(mag) + "*";
        out += "e(" + m.to_string() + ")";
      }
    }
  }
  out += relation == Relation::geq ? " >= 0;" : " = 0;";
  return out;
}

bool Constraint::structurally_equal(const Constraint& other) const {
  return kind == other.kind && relation == other.relation && guard == other.guard && body == other.body &&
         variables == other.variables;
}

// --- Diagnostics -------------------------------------------------------------

std::string Diagnostic::to_string() const {
  std::ostringstream os;
  if (span) os << span->line << ":" << span->column << ": ";
  os << (is_error() ? "error: " : "warning: ") << message;
  if (!span && constraint_index) os << " (constraint " << *constraint_index << ")";
  return os.str();
}

bool has_errors(std::span<const Diagnostic> diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.is_error(); });
}

// --- KnowledgeBase -----------------------------------------------------------

namespace {

std::vector<Arg> fresh_args(int arity) {
  std::vector<Arg> args;
  for (int i = 1; i <= arity; ++i) args.push_back(Arg::var("x" + std::to_string(i)));
  return args;
}

std::vector<std::string> fresh_vars(int arity) {
  std::vector<std::string> vars;
  for (int i = 1; i <= arity; ++i) vars.push_back("x" + std::to_string(i));
  return vars;
}

// Term whose arguments are pairwise distinct variables.
bool is_fully_generic(const Term& t) {
  std::set<std::string> vars;
  for (const auto& a : t.args) {
    if (!a.is_variable()) return false;
    vars.insert(a.variable);
  }
  return vars.size() == t.args.size();
}

}  // namespace

void KnowledgeBase::add_relation(const RelationSymbol& rel) {
  relations_.push_back(rel);
  if (rel.arity < 1) return;  // reported by validation
  Term t{rel.label, fresh_args(rel.arity)};
  if (rel.boolean_flag) {
    Constraint c;
    c.kind = ConstraintKind::logical;
    c.relation = Relation::eq;
    c.variables = fresh_vars(rel.arity);
    c.body = Polynomial::of(Monomial(t, 2)) - Polynomial::of(Monomial(t));
    constraints_.push_back(std::move(c));
  }
  if (rel.bound) {
    Constraint c;
    c.kind = ConstraintKind::logical;
    c.relation = Relation::geq;
    c.variables = fresh_vars(rel.arity);
    c.body = Polynomial::constant(*rel.bound) - Polynomial::of(Monomial(t, 2));
    constraints_.push_back(std::move(c));
  }
}

void KnowledgeBase::add_constant(const std::string& label) { constants_.push_back(label); }

void KnowledgeBase::add_constraint(Constraint c) { constraints_.push_back(std::move(c)); }

const RelationSymbol* KnowledgeBase::find_relation(const std::string& label) const {
  for (const auto& r : relations_)
    if (r.label == label) return &r;
  return nullptr;
}

bool KnowledgeBase::has_constant(const std::string& label) const {
  return std::find(constants_.begin(), constants_.end(), label) != constants_.end();
}

std::vector<Name> KnowledgeBase::constant_names() const {
  std::set<Name> names;
  for (const auto& c : constants_) names.insert(Name::constant(c));
  return {names.begin(), names.end()};
}

KnowledgeBase KnowledgeBase::with(std::span<const Constraint> extra) const {
  KnowledgeBase out = *this;
  for (const auto& c : extra) out.constraints_.push_back(c);
  return out;
}

bool KnowledgeBase::is_explicitly_bounded(const std::string& relation) const {
  for (const auto& c : constraints_) {
    if (c.kind != ConstraintKind::logical || !c.guard.is_tautology()) continue;
    const auto& terms = c.body.terms();
    if (terms.size() != 2) continue;
    // Both shapes involve exactly one term t: {t, t^2} or {1, t^2}.
    auto used = c.body.terms_used();
    if (used.size() != 1 || used.front().relation != relation || !is_fully_generic(used.front())) continue;
    const Term& t = used.front();
    double sq = c.body.coefficient(Monomial(t, 2));
    double lin = c.body.coefficient(Monomial(t, 1));
    double cst = c.body.constant_term();
    if (c.relation == Relation::eq && sq != 0.0 && lin == -sq) return true;
    if (c.relation == Relation::geq && sq < 0.0 && cst >= 0.0) return true;
  }
  return false;
}

bool KnowledgeBase::structurally_equal(const KnowledgeBase& other) const {
  if (relations_.size() != other.relations_.size() || constants_ != other.constants_ ||
      constraints_.size() != other.constraints_.size())
    return false;
  for (std::size_t i = 0; i < relations_.size(); ++i)
    if (relations_[i].label != other.relations_[i].label || relations_[i].arity != other.relations_[i].arity)
      return false;
  for (std::size_t i = 0; i < constraints_.size(); ++i)
    if (!constraints_[i].structurally_equal(other.constraints_[i])) return false;
  return true;
}

int kb_rank(const KnowledgeBase& kb) {
  int r = 0;
  for (const auto& c : kb.constraints()) r = std::max(r, c.quantifier_rank());
  return r;
}

std::vector<Diagnostic> validate_kb(const KnowledgeBase& kb) {
  std::vector<Diagnostic> out;
  auto report = [&out](Diagnostic::Severity sev, std::string msg, std::optional<std::size_t> idx,
                       std::optional<SourceSpan> span) {
    out.push_back(Diagnostic{sev, std::move(msg), span, idx});
  };
  using Sev = Diagnostic::Severity;

  std::set<std::string> rel_labels;
  for (const auto& r : kb.relations()) {
    if (!rel_labels.insert(r.label).second) report(Sev::error, "relation '" + r.label + "' declared twice", {}, {});
    if (r.arity < 1) report(Sev::error, "relation '" + r.label + "' must have arity >= 1", {}, {});
    if (r.label == "e") report(Sev::error, "'e' is reserved for moment terms", {}, {});
    if (r.bound && !(*r.bound >= 0.0 && std::isfinite(*r.bound)))
      report(Sev::error, "bound of relation '" + r.label + "' must be a finite nonnegative number", {}, {});
  }
  std::set<std::string> const_labels;
  for (const auto& c : kb.constants()) {
    if (!const_labels.insert(c).second) report(Sev::error, "constant '" + c + "' declared twice", {}, {});
    if (parse_generic_label(c)) report(Sev::error, "constant '" + c + "' uses the reserved generic form g<N>", {}, {});
    if (rel_labels.count(c)) report(Sev::error, "'" + c + "' declared both as relation and constant", {}, {});
  }

  if (kb.constraints().empty()) report(Sev::error, "knowledge base must be non-empty", {}, {});

  for (std::size_t i = 0; i < kb.constraints().size(); ++i) {
    const auto& c = kb.constraints()[i];
    std::set<std::string> declared(c.variables.begin(), c.variables.end());
    std::set<std::string> reported;

    auto check_arg = [&](const Arg& a) {
      if (a.is_variable()) {
        if (!declared.count(a.variable) && reported.insert("v:" + a.variable).second)
          report(Sev::error, "variable '" + a.variable + "' is not quantified", i, c.span);
      } else if (!a.name.is_generic() && !kb.has_constant(a.name.label) &&
                 reported.insert("n:" + a.name.label).second) {
        report(Sev::error, "name '" + a.name.label + "' is not a declared constant", i, c.span);
      }
    };

    std::vector<Arg> guard_args;
    c.guard.collect_args(guard_args);
    for (const auto& a : guard_args) check_arg(a);

    for (const auto& t : c.body.terms_used()) {
      const RelationSymbol* rel = kb.find_relation(t.relation);
      if (!rel) {
        if (reported.insert("r:" + t.relation).second)
          report(Sev::error, "relation '" + t.relation + "' is not declared", i, c.span);
      } else if (static_cast<int>(t.args.size()) != rel->arity) {
        if (reported.insert("a:" + t.to_string()).second)
          report(Sev::error,
                 "relation '" + t.relation + "' has arity " + std::to_string(rel->arity) + " but is applied to " +
                     std::to_string(t.args.size()) + " argument(s) in " + t.to_string(),
                 i, c.span);
      }
      for (const auto& a : t.args) check_arg(a);
    }

    for (const auto& [m, coef] : c.body.terms())
      if (!std::isfinite(coef)) {
        report(Sev::error, "non-finite coefficient", i, c.span);
        break;
      }
  }

  for (const auto& r : kb.relations())
    if (!kb.is_explicitly_bounded(r.label))
      report(Sev::warning,
             "relation '" + r.label + "' is neither boolean nor bounded; refutation completeness is not guaranteed", {},
             {});
  return out;
}

}  // namespace lsos::kb
