#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "lsos/cert/certificate.hpp"
#include "lsos/ground/grounder.hpp"
#include "lsos/kb/model.hpp"
#include "lsos/sdp/solver.hpp"
#include "lsos/sos/compiler.hpp"

namespace lsos::query {

enum class QueryKind { check, bound, refute };
enum class BoundDirection { min, max, both };

struct QuerySpec {
  QueryKind kind = QueryKind::check;
  kb::Polynomial objective;            // bound: moment polynomial
  BoundDirection direction = BoundDirection::both;
  std::vector<kb::Constraint> extra;   // refute: appended to the KB
  std::optional<int> degree;           // default: smallest even >= max degree
  ground::UniverseMode universe = ground::UniverseMode::ou();
  sos::BasisMode basis = sos::BasisMode::clique;
  sos::Sharing sharing = sos::Sharing::classes;
  sdp::SolverConfig solver;
  /// Residual tolerance used for bound solves when tighter than solver.eps;
  /// objective values need it because the residuals are relative.
  double bound_eps = 1e-9;
  double certificate_tol = 1e-4;
};

struct Timings {
  double ground = 0, compile = 0, solve = 0, certificate = 0;
};

struct QueryResult {
  sdp::Status status = sdp::Status::unknown;
  std::optional<double> lo, hi;  // bound queries; +-inf when unbounded
  std::optional<cert::Certificate> certificate;
  std::optional<cert::ResidualReport> verification;
  std::string certificate_error;  // extraction failure on an infeasible instance
  int degree = 0;
  std::string universe;
  int generic_count = 0;
  std::size_t ground_constraints = 0;
  std::size_t atoms = 0;
  sos::BlockCount size;
  Timings timings;
  int iterations = 0;
  std::vector<kb::Diagnostic> warnings;
  std::vector<std::string> notes;  // solver reasons
};

/// Smallest even d >= 2 covering every constraint and the objective.
int default_degree(const kb::KnowledgeBase& kb, const QuerySpec& spec);

/// KB with the query's extra constraints appended.
kb::KnowledgeBase effective_kb(const kb::KnowledgeBase& kb, const QuerySpec& spec);

/// Grounding used by run_query (placeholders of the objective included).
ground::GroundTheory ground_for(const kb::KnowledgeBase& kb, const QuerySpec& spec);

QueryResult run_query(const kb::KnowledgeBase& kb, const QuerySpec& spec);

struct UniverseRow {
  int k = 0;
  QueryResult result;
};
/// One result per k in k_list, each with universe = names(k).
std::vector<UniverseRow> compare_universes(const kb::KnowledgeBase& kb, const QuerySpec& spec,
                                           const std::vector<int>& k_list);

/// "ou", "dc" or "k=<n>"; throws std::invalid_argument otherwise.
ground::UniverseMode parse_universe(const std::string& text);

nlohmann::json result_to_json(const QueryResult& r, bool embed_certificate = true);

}  // namespace lsos::query
