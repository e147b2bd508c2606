#pragma once

#include <map>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "lsos/ground/canonical.hpp"
#include "lsos/kb/model.hpp"

namespace lsos::ground {

using Substitution = std::map<std::string, kb::Name>;

/// Throws std::invalid_argument on a variable not bound by theta.
bool eval_guard(const kb::Guard& guard, const Substitution& theta);

kb::Arg substitute(const kb::Arg& a, const Substitution& theta);
kb::Term substitute(const kb::Term& t, const Substitution& theta);
kb::Polynomial substitute(const kb::Polynomial& p, const Substitution& theta);

struct UniverseMode {
  enum class Kind { k_names, dc, ou };
  Kind kind = Kind::ou;
  int k = 0;  // used by k_names

  static UniverseMode names(int k) { return {Kind::k_names, k}; }
  static UniverseMode dc() { return {Kind::dc, 0}; }
  static UniverseMode ou() { return {Kind::ou, 0}; }

  /// Number of generic names for `kb` (before placeholder padding).
  int generic_count(const kb::KnowledgeBase& kb) const;
  std::string to_string() const;
};

enum class GroundKind { inequality, equality, bound };

/// One ground constraint. Inequalities and bounds read `poly >= 0`,
/// equalities `poly = 0`. For bounds every monomial denotes its moment.
/// An expectation equality is stored as the two bounds `<id>+` and `<id>-`.
struct GroundConstraint {
  std::string id;  // g<i>, h<j>, b<k>[+-]
  GroundKind kind = GroundKind::inequality;
  kb::Polynomial poly;
  std::size_t source = 0;  // index of the originating KB constraint
};

struct GroundTheory {
  std::vector<kb::Name> pool;  // constants then g1..gk
  int constant_count = 0;
  int generic_count = 0;
  std::vector<GroundConstraint> inequalities;
  std::vector<GroundConstraint> equalities;
  std::vector<GroundConstraint> bounds;
  std::vector<kb::Diagnostic> warnings;

  const GroundConstraint* find(const std::string& id) const;
  std::size_t size() const { return inequalities.size() + equalities.size() + bounds.size(); }
  /// All constraints in id order (inequalities, equalities, bounds).
  std::vector<const GroundConstraint*> all() const;
};

struct GroundOptions {
  /// Placeholders such as g3 mentioned by a query or objective; the pool is
  /// padded so it contains them.
  int min_generics = 0;
};

GroundTheory ground(const kb::KnowledgeBase& kb, UniverseMode mode, const GroundOptions& opts = {});

/// Distinct ground relation applications per ground constraint, summed.
std::size_t count_atoms(const GroundTheory& g);
std::size_t count_atoms(const kb::KnowledgeBase& kb, UniverseMode mode);

/// Size bound n * m * (c + k)^k, with n = #KB constraints,
/// m = max distinct relation applications in one KB constraint.
struct AtomBound {
  std::size_t n = 0, m = 0, c = 0, k = 0;
  double value = 0;
};
AtomBound atom_bound(const kb::KnowledgeBase& kb, UniverseMode mode);

nlohmann::json polynomial_to_json(const kb::Polynomial& p);
nlohmann::json ground_to_json(const GroundTheory& g);

}  // namespace lsos::ground
