#pragma once

#include <map>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "lsos/ground/grounder.hpp"
#include "lsos/kb/model.hpp"

namespace lsos::sos {

/// Affine function constant + sum coeffs[i] * x_i over moment variables.
struct LinearForm {
  std::map<int, double> coeffs;
  double constant = 0;

  void add(int var, double c);
  double eval(const std::vector<double>& x) const;
  bool operator==(const LinearForm& other) const = default;
};

struct SymbolicBlock {
  enum class Kind { psd, zero };
  Kind kind = Kind::psd;
  std::string origin;               // "moment" or a ground constraint id
  std::vector<kb::Monomial> rows;   // R_1..R_s of the representative
  kb::Polynomial multiplier;        // the constraint body; 1 for moment matrices
  std::vector<LinearForm> entries;  // upper triangle, row by row

  int size() const { return static_cast<int>(rows.size()); }
  static std::size_t index(int i, int j, int n);  // i <= j
  const LinearForm& at(int i, int j) const;
};

/// form >= 0
struct ScalarRow {
  std::string origin;
  kb::Polynomial poly;
  LinearForm form;
};

enum class BasisMode { clique, dense };
enum class Sharing { classes, none };

struct CompileOptions {
  int degree = 2;
  BasisMode basis = BasisMode::clique;
  Sharing sharing = Sharing::classes;
  /// Ground moment polynomials (objectives, queries) whose terms must be
  /// covered by some moment block.
  std::vector<kb::Polynomial> extra;
};

class LiftedSdp {
 public:
  int degree = 2;
  BasisMode basis = BasisMode::clique;
  Sharing sharing = Sharing::classes;

  /// Variable i stands for the moment of monomials[i] (a canonical class
  /// representative when sharing classes). The constant monomial is not a
  /// variable: e(1) = 1 is substituted.
  std::vector<kb::Monomial> variables;
  std::vector<SymbolicBlock> blocks;
  std::vector<ScalarRow> scalars;
  std::vector<std::vector<kb::Term>> cliques;  // representative maximal cliques
  std::vector<kb::Diagnostic> warnings;

  /// Variable of a ground monomial; nullopt if absent or constant.
  std::optional<int> variable_of(const kb::Monomial& m) const;
  /// Key a monomial maps to (canonical form when sharing classes).
  kb::Monomial key_of(const kb::Monomial& m) const;
  /// Linear form of a moment polynomial. Throws std::out_of_range when a
  /// monomial has no variable.
  LinearForm linear_form(const kb::Polynomial& moments) const;

  int add_variable(const kb::Monomial& key);

 private:
  std::map<kb::Monomial, int> index_;
  mutable std::map<kb::Monomial, kb::Monomial> key_cache_;
};

/// All monomials over `terms` of degree <= half_degree, sorted.
std::vector<kb::Monomial> monomials_up_to(const std::vector<kb::Term>& terms, int half_degree);

/// Moment basis for degree d (d even, else std::invalid_argument).
std::vector<kb::Monomial> moment_basis(const std::vector<kb::Term>& terms, int d);

SymbolicBlock build_moment_matrix(const std::vector<kb::Monomial>& basis, LiftedSdp& sdp);

/// Localizer of p on the basis prefix of degree <= floor((d - deg p)/2).
/// Throws std::invalid_argument if deg p > d.
SymbolicBlock build_localizing_matrix(const kb::Polynomial& p, bool equality, const std::vector<kb::Monomial>& basis,
                                      int d, LiftedSdp& sdp);

LiftedSdp compile(const ground::GroundTheory& g, const CompileOptions& opts);

struct BlockCount {
  std::size_t variables = 0;
  std::size_t psd_blocks = 0;
  std::size_t zero_blocks = 0;
  std::size_t scalar_rows = 0;
  std::size_t total_entries = 0;
  std::size_t largest_block = 0;
};
BlockCount block_count(const LiftedSdp& sdp);

nlohmann::json linear_form_to_json(const LinearForm& f);
nlohmann::json sdp_to_json(const LiftedSdp& sdp);
/// Inverse of sdp_to_json (cliques and warnings are not restored).
LiftedSdp sdp_from_json(const nlohmann::json& j);

}  // namespace lsos::sos
