#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lsos::kb {

// ---------------------------------------------------------------------------
// Names, arguments and terms
// ---------------------------------------------------------------------------

enum class NameKind { constant, generic };

/// A domain element. Constants are declared by the knowledge base; generic
/// names are the anonymous placeholders g1, g2, ... used for open-universe
/// grounding. Constants sort before generics; constants by label, generics
/// by index.
struct Name {
  NameKind kind = NameKind::constant;
  std::string label;
  int index = 0;  // 1-based for generics, 0 for constants

  static Name constant(std::string label);
  static Name generic(int index);

  bool is_generic() const { return kind == NameKind::generic; }

  std::strong_ordering operator<=>(const Name& other) const;
  bool operator==(const Name& other) const;
};

/// Returns the generic index if `label` has the reserved form g<digits>.
std::optional<int> parse_generic_label(const std::string& label);

enum class ArgKind { name, variable };

/// Argument slot of a term: either a name or a (quantified) variable.
struct Arg {
  ArgKind kind = ArgKind::name;
  Name name;
  std::string variable;

  static Arg of(Name n);
  static Arg var(std::string label);

  bool is_variable() const { return kind == ArgKind::variable; }
  std::string to_string() const;

  std::strong_ordering operator<=>(const Arg& other) const;
  bool operator==(const Arg& other) const;
};

struct Term {
  std::string relation;
  std::vector<Arg> args;

  bool is_ground() const;
  std::string to_string() const;

  std::strong_ordering operator<=>(const Term& other) const;
  bool operator==(const Term& other) const = default;
};

// ---------------------------------------------------------------------------
// Monomials and polynomials
// ---------------------------------------------------------------------------

/// Product of terms with positive integer exponents, kept sorted by term.
/// The empty product is the constant monomial 1.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(const Term& t, int exponent = 1);

  static Monomial one() { return {}; }

  const std::vector<std::pair<Term, int>>& factors() const { return factors_; }
  bool is_constant() const { return factors_.empty(); }
  bool is_ground() const;
  int degree() const;

  /// Distinct terms appearing in the product.
  std::vector<Term> terms() const;

  std::string to_string() const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);

  /// Graded lexicographic: degree first, then factor list.
  std::strong_ordering operator<=>(const Monomial& other) const;
  bool operator==(const Monomial& other) const = default;

 private:
  std::vector<std::pair<Term, int>> factors_;
};

int monomial_degree(const Monomial& m);
Monomial monomial_multiply(const Monomial& a, const Monomial& b);

/// Real polynomial with no zero coefficients, ordered by monomial.
class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial constant(double c);
  static Polynomial of(const Monomial& m, double c = 1.0);

  const std::map<Monomial, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  double coefficient(const Monomial& m) const;
  double constant_term() const { return coefficient(Monomial::one()); }
  double max_abs_coefficient() const;

  void add(const Monomial& m, double c);
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  /// Distinct terms across all monomials, sorted.
  std::vector<Term> terms_used() const;
  bool is_ground() const;

  std::string to_string() const;

  bool operator==(const Polynomial& other) const = default;

 private:
  std::map<Monomial, double> terms_;
};

/// Merges like monomials and drops zero coefficients.
Polynomial polynomial_combine(std::span<const std::pair<double, Monomial>> raw);

// ---------------------------------------------------------------------------
// Guards and constraints
// ---------------------------------------------------------------------------

/// Boolean combination of (in)equality atoms between variables and names.
struct Guard {
  enum class Op { truth, eq, conj, disj, neg };

  Op op = Op::truth;
  Arg lhs;
  Arg rhs;
  std::vector<Guard> children;

  static Guard tautology() { return {}; }
  static Guard equal(Arg a, Arg b);
  static Guard not_equal(Arg a, Arg b);
  static Guard all_of(std::vector<Guard> parts);
  static Guard any_of(std::vector<Guard> parts);
  static Guard negate(Guard g);

  bool is_tautology() const { return op == Op::truth; }
  void collect_args(std::vector<Arg>& out) const;
  std::string to_string() const;

  bool operator==(const Guard& other) const = default;
};

enum class ConstraintKind { logical, expectation };
enum class Relation { geq, eq };

struct SourceSpan {
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based
  std::size_t begin = 0;   // byte offsets, begin <= end
  std::size_t end = 0;
};

/// forall vars : guard => body (>= | =) 0
///
/// For expectation constraints every monomial mu of `body` denotes the moment
/// e(mu); the constant monomial denotes e(1) = 1.
struct Constraint {
  ConstraintKind kind = ConstraintKind::logical;
  Relation relation = Relation::geq;
  Guard guard;
  Polynomial body;
  std::vector<std::string> variables;  // declared quantifier list
  std::optional<SourceSpan> span;      // not part of structural equality

  /// Distinct variables occurring in guard and body, in first-seen order of
  /// the declared list followed by undeclared ones.
  std::vector<std::string> occurring_variables() const;
  int quantifier_rank() const;
  int degree() const { return body.degree(); }

  /// Generic placeholders mentioned directly (e.g. a query about g1).
  std::vector<int> generic_placeholders() const;

  std::string to_string() const;

  bool structurally_equal(const Constraint& other) const;
};

// ---------------------------------------------------------------------------
// Knowledge base
// ---------------------------------------------------------------------------

struct RelationSymbol {
  std::string label;
  int arity = 1;
  bool boolean_flag = false;
  std::optional<double> bound;
};

struct Diagnostic {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string message;
  std::optional<SourceSpan> span;
  std::optional<std::size_t> constraint_index;

  bool is_error() const { return severity == Severity::error; }
  std::string to_string() const;
};

class KnowledgeBase {
 public:
  /// Declares a relation. Sugar flags expand immediately into axioms:
  /// boolean -> forall P(x)^2 - P(x) = 0, bounded U -> forall U - P(x)^2 >= 0.
  void add_relation(const RelationSymbol& rel);
  void add_constant(const std::string& label);
  void add_constraint(Constraint c);

  const std::vector<RelationSymbol>& relations() const { return relations_; }
  const std::vector<std::string>& constants() const { return constants_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  const RelationSymbol* find_relation(const std::string& label) const;
  bool has_constant(const std::string& label) const;

  /// Sorted constant names.
  std::vector<Name> constant_names() const;

  /// Knowledge base with extra constraints appended (Delta union q).
  KnowledgeBase with(std::span<const Constraint> extra) const;

  /// Whether some constraint bounds every ground instance of `relation`
  /// (a Boolean axiom or U - P^2 >= 0 over distinct variables, no guard).
  bool is_explicitly_bounded(const std::string& relation) const;

  bool structurally_equal(const KnowledgeBase& other) const;

 private:
  std::vector<RelationSymbol> relations_;
  std::vector<std::string> constants_;
  std::vector<Constraint> constraints_;
};

int kb_rank(const KnowledgeBase& kb);

/// Structural checks: declared relations with matching arity, declared
/// names, quantified variables, finite coefficients. Also warns when a
/// relation carries no compactness axiom.
std::vector<Diagnostic> validate_kb(const KnowledgeBase& kb);

bool has_errors(std::span<const Diagnostic> diags);

}  // namespace lsos::kb
