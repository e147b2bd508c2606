#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lsos/kb/model.hpp"

namespace lsos::kb {

struct ParseResult {
  std::optional<KnowledgeBase> kb;     // empty iff some diagnostic is an error
  std::vector<Diagnostic> diagnostics;  // errors and warnings, in source order

  bool ok() const { return kb.has_value(); }
};

/// Thrown by the single-item parsers below.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

/// Parses a `.lsos` knowledge base. Scanning continues after an error from
/// the next `;`, so one pass reports every malformed statement.
ParseResult parse_kb(std::string_view text);

/// Inverse of parse_kb up to structural equality. Relation sugar is not
/// reconstructed: the expanded axioms are emitted as ordinary constraints.
std::string serialize_kb(const KnowledgeBase& kb);

/// Parses one constraint (trailing `;` optional) against the declarations of
/// `kb`, e.g. a query to append before refutation.
Constraint parse_constraint(std::string_view text, const KnowledgeBase& kb);

/// Parses a ground linear combination of moment terms such as
/// `e(War(Antony,g1)) - 0.5*e(P(g2)^2)`. Every monomial of the result
/// denotes its moment; the constant monomial stands for e(1) = 1.
Polynomial parse_objective(std::string_view text, const KnowledgeBase& kb);

/// Reads a serialized ground monomial such as `War(Antony,g1)*LT(g1)^2` or
/// `1`. Labels of the form g<N> become generic names, all others constants.
Monomial monomial_from_string(std::string_view text);

}  // namespace lsos::kb
