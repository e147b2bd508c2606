#include "lsos/query/engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "lsos/ground/canonical.hpp"

namespace lsos::query {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int highest_placeholder(const kb::Polynomial& p) {
  int hi = 0;
  for (const auto& n : ground::generic_names(p)) hi = std::max(hi, n.index);
  return hi;
}

void attach_certificate(QueryResult& out, const sos::LiftedSdp& sdp, const ground::GroundTheory& g,
                        const sdp::SolveResult& r, const QuerySpec& spec, const std::string& query_text) {
  auto t = Clock::now();
  try {
    auto c = cert::extract_refutation(sdp, r.witness, std::max(1e-5, 10 * spec.solver.eps_infeasible));
    c.tolerance = spec.certificate_tol;
    c.universe = out.universe;
    c.query = query_text;
    c.generics = g.generic_count;
    out.verification = cert::verify_certificate(g, c, spec.certificate_tol);
    out.certificate = std::move(c);
  } catch (const cert::CertificateError& e) {
    out.certificate_error = e.what();
  }
  out.timings.certificate += since(t);
}

}  // namespace

int default_degree(const kb::KnowledgeBase& kb, const QuerySpec& spec) {
  int deg = spec.objective.degree();
  for (const auto& c : kb.constraints()) deg = std::max(deg, c.degree());
  for (const auto& c : spec.extra) deg = std::max(deg, c.degree());
  deg = std::max(deg, 2);
  return deg % 2 ? deg + 1 : deg;
}

kb::KnowledgeBase effective_kb(const kb::KnowledgeBase& kb, const QuerySpec& spec) {
  return spec.extra.empty() ? kb : kb.with(spec.extra);
}

ground::GroundTheory ground_for(const kb::KnowledgeBase& kb, const QuerySpec& spec) {
  ground::GroundOptions go;
  go.min_generics = highest_placeholder(spec.objective);
  return ground::ground(effective_kb(kb, spec), spec.universe, go);
}

QueryResult run_query(const kb::KnowledgeBase& base, const QuerySpec& spec) {
  QueryResult out;
  const kb::KnowledgeBase kb = effective_kb(base, spec);
  out.degree = spec.degree.value_or(default_degree(base, spec));
  if (out.degree < 2 || out.degree % 2)
    throw std::invalid_argument("degree must be even and >= 2, got " + std::to_string(out.degree));
  out.universe = spec.universe.to_string();

  auto t = Clock::now();
  ground::GroundTheory g = ground_for(base, spec);
  out.timings.ground = since(t);
  out.generic_count = g.generic_count;
  out.ground_constraints = g.size();
  out.atoms = ground::count_atoms(g);
  out.warnings = g.warnings;

  t = Clock::now();
  sos::CompileOptions co;
  co.degree = out.degree;
  co.basis = spec.basis;
  co.sharing = spec.sharing;
  if (spec.kind == QueryKind::bound) co.extra.push_back(spec.objective);
  sos::LiftedSdp sdp = sos::compile(g, co);
  out.timings.compile = since(t);
  out.size = sos::block_count(sdp);
  out.warnings.insert(out.warnings.end(), sdp.warnings.begin(), sdp.warnings.end());

  std::string query_text;
  for (const auto& c : spec.extra) query_text += (query_text.empty() ? "" : "\n") + c.to_string();

  auto on_infeasible = [&](const sdp::SolveResult& r) {
    out.status = sdp::Status::infeasible;
    attach_certificate(out, sdp, g, r, spec, query_text);
  };

  if (spec.kind != QueryKind::bound) {
    t = Clock::now();
    auto r = sdp::solve_feasibility(sdp, spec.solver);
    out.timings.solve = since(t);
    out.iterations = r.iterations;
    out.notes.push_back(r.reason);
    if (r.status == sdp::Status::infeasible) on_infeasible(r);
    else out.status = r.status;
    return out;
  }

  sdp::SolverConfig cfg = spec.solver;
  cfg.eps = std::min(cfg.eps, spec.bound_eps);
  const auto form = sdp.linear_form(spec.objective);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<sdp::Direction> dirs;
  if (spec.direction != BoundDirection::max) dirs.push_back(sdp::Direction::minimize);
  if (spec.direction != BoundDirection::min) dirs.push_back(sdp::Direction::maximize);

  out.status = sdp::Status::optimal;
  for (auto dir : dirs) {
    t = Clock::now();
    auto r = sdp::optimize(sdp, form, dir, cfg);
    out.timings.solve += since(t);
    out.iterations += r.iterations;
    out.notes.push_back(r.reason);
    const bool lower = dir == sdp::Direction::minimize;
    switch (r.status) {
      case sdp::Status::infeasible:
        on_infeasible(r);
        out.lo.reset();
        out.hi.reset();
        return out;
      case sdp::Status::unbounded:
        (lower ? out.lo : out.hi) = lower ? -inf : inf;
        break;
      case sdp::Status::optimal:
      case sdp::Status::feasible:
        (lower ? out.lo : out.hi) = r.value;
        break;
      case sdp::Status::unknown:
        out.status = sdp::Status::unknown;
        break;
    }
  }
  return out;
}

std::vector<UniverseRow> compare_universes(const kb::KnowledgeBase& kb, const QuerySpec& spec,
                                           const std::vector<int>& k_list) {
  std::vector<UniverseRow> rows;
  for (int k : k_list) {
    if (k < 0) throw std::invalid_argument("k must be nonnegative");
    QuerySpec s = spec;
    s.universe = ground::UniverseMode::names(k);
    rows.push_back({k, run_query(kb, s)});
  }
  return rows;
}

ground::UniverseMode parse_universe(const std::string& text) {
  if (text == "ou") return ground::UniverseMode::ou();
  if (text == "dc") return ground::UniverseMode::dc();
  if (text.rfind("k=", 0) == 0) {
    std::size_t used = 0;
    int k = std::stoi(text.substr(2), &used);
    if (used == text.size() - 2 && k >= 0) return ground::UniverseMode::names(k);
  }
  throw std::invalid_argument("unknown universe '" + text + "'");
}

nlohmann::json result_to_json(const QueryResult& r, bool embed_certificate) {
  auto num = [](const std::optional<double>& v) -> nlohmann::json {
    if (!v) return nullptr;
    if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
    return *v;
  };
  nlohmann::json j;
  j["status"] = sdp::to_string(r.status);
  j["degree"] = r.degree;
  j["universe"] = r.universe;
  j["generic_count"] = r.generic_count;
  if (r.lo || r.hi) j["bounds"] = {{"lo", num(r.lo)}, {"hi", num(r.hi)}};
  if (r.certificate && embed_certificate) j["certificate"] = cert::certificate_to_json(*r.certificate);
  if (r.verification) j["verification"] = cert::report_to_json(*r.verification, 5);
  if (!r.certificate_error.empty()) j["certificate_error"] = r.certificate_error;
  j["ground"] = {{"constraints", r.ground_constraints}, {"atoms", r.atoms}};
  j["sdp"] = {{"variables", r.size.variables},   {"psd_blocks", r.size.psd_blocks},
              {"zero_blocks", r.size.zero_blocks}, {"scalar_rows", r.size.scalar_rows},
              {"entries", r.size.total_entries},  {"largest_block", r.size.largest_block}};
  j["timings"] = {{"ground", r.timings.ground},
                  {"compile", r.timings.compile},
                  {"solve", r.timings.solve},
                  {"certificate", r.timings.certificate}};
  j["iterations"] = r.iterations;
  j["solver_notes"] = r.notes;
  auto w = nlohmann::json::array();
  for (const auto& d : r.warnings) w.push_back(d.to_string());
  j["warnings"] = w;
  return j;
}

}  // namespace lsos::query
