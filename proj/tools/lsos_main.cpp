// lsos: command-line front end. Result JSON goes to stdout, diagnostics to
// stderr. Exit codes: 0 ok / feasible / verified, 1 infeasible (refuted),
// 2 input error or failed verification, 3 unknown.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lsos/cert/certificate.hpp"
#include "lsos/ground/grounder.hpp"
#include "lsos/kb/parser.hpp"
#include "lsos/query/engine.hpp"
#include "lsos/sdp/solver.hpp"
#include "lsos/sos/compiler.hpp"

namespace {

using namespace lsos;
using nlohmann::json;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string kb_path;
  int degree = 0;
  bool ou = false, dc = false;
  int k = -1;
  double tol = 0;
  std::uint64_t seed = 0;
  int max_iters = 200000;
  std::string basis = "clique";
  bool unshared = false;
  bool verbose = false;
  std::string out;
  std::string expr;
  bool min = false, max = false;
  std::vector<std::string> queries;
  std::string cert_path;
  std::vector<int> ks;
  std::string sdp_path;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* degree_opt = nullptr;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text << "\n";
}

kb::KnowledgeBase load_kb(const std::string& path) {
  auto res = kb::parse_kb(read_file(path));
  for (const auto& d : res.diagnostics) std::cerr << path << ": " << d.to_string() << "\n";
  if (!res.ok()) throw InputError("could not load knowledge base");
  return *res.kb;
}

ground::UniverseMode universe_of(const Options& o) {
  if (o.dc) return ground::UniverseMode::dc();
  if (o.k >= 0) return ground::UniverseMode::names(o.k);
  return ground::UniverseMode::ou();
}

query::QuerySpec spec_of(const Options& o, const kb::KnowledgeBase& kb) {
  query::QuerySpec s;
  if (o.degree_opt && o.degree_opt->count()) s.degree = o.degree;
  s.universe = universe_of(o);
  if (o.basis == "dense") s.basis = sos::BasisMode::dense;
  else if (o.basis != "clique") throw InputError("unknown basis '" + o.basis + "'");
  if (o.unshared) s.sharing = sos::Sharing::none;
  if (o.tol_opt && o.tol_opt->count()) s.solver.eps = o.tol;
  s.solver.seed = o.seed;
  s.solver.max_iters = o.max_iters;
  if (o.verbose) s.solver.log = &std::cerr;
  for (const auto& q : o.queries) s.extra.push_back(kb::parse_constraint(q, kb));
  if (!o.expr.empty()) s.objective = kb::parse_objective(o.expr, kb);
  return s;
}

int exit_code(sdp::Status s) {
  switch (s) {
    case sdp::Status::feasible:
    case sdp::Status::optimal:
    case sdp::Status::unbounded: return 0;
    case sdp::Status::infeasible: return 1;
    case sdp::Status::unknown: return 3;
  }
  return 3;
}

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

int finish_query(const Options& o, const query::QueryResult& r) {
  json j = query::result_to_json(r, o.out.empty());
  if (r.certificate && !o.out.empty()) {
    write_file(o.out, cert::certificate_to_json(*r.certificate).dump(2));
    j["certificate_path"] = o.out;
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w.to_string() << "\n";
  emit(j);
  return exit_code(r.status);
}

int cmd_ground(const Options& o) {
  auto kb = load_kb(o.kb_path);
  query::QuerySpec s = spec_of(o, kb);
  auto g = query::ground_for(kb, s);
  for (const auto& w : g.warnings) std::cerr << "warning: " << w.to_string() << "\n";
  json j = ground::ground_to_json(g);
  j["universe"] = s.universe.to_string();
  auto ab = ground::atom_bound(kb, s.universe);
  j["atom_bound"] = {{"n", ab.n}, {"m", ab.m}, {"c", ab.c}, {"k", ab.k}, {"value", ab.value}};
  if (!o.out.empty()) write_file(o.out, j.dump(2));
  else emit(j);
  return 0;
}

int cmd_compile(const Options& o) {
  auto kb = load_kb(o.kb_path);
  query::QuerySpec s = spec_of(o, kb);
  auto g = query::ground_for(kb, s);
  sos::CompileOptions co;
  co.degree = s.degree.value_or(query::default_degree(kb, s));
  co.basis = s.basis;
  co.sharing = s.sharing;
  if (!s.objective.is_zero()) co.extra.push_back(s.objective);
  auto sdp = sos::compile(g, co);
  for (const auto& w : sdp.warnings) std::cerr << "warning: " << w.to_string() << "\n";
  json j = sos::sdp_to_json(sdp);
  if (!o.out.empty()) write_file(o.out, j.dump(2));
  else emit(j);
  return 0;
}

int cmd_solve(const Options& o) {
  json in;
  try {
    in = json::parse(read_file(o.sdp_path));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed program: ") + e.what());
  }
  auto sdp = sos::sdp_from_json(in);
  sdp::SolverConfig cfg;
  if (o.tol_opt && o.tol_opt->count()) cfg.eps = o.tol;
  cfg.seed = o.seed;
  cfg.max_iters = o.max_iters;
  if (o.verbose) cfg.log = &std::cerr;
  auto r = sdp::solve_feasibility(sdp, cfg);
  json j = {{"status", sdp::to_string(r.status)}, {"iterations", r.iterations}, {"reason", r.reason},
            {"seconds", r.seconds}};
  if (r.status == sdp::Status::feasible) j["moments"] = r.x;
  if (r.status == sdp::Status::infeasible) j["witness"] = {{"constant", r.witness.constant}, {"residual", r.witness.residual}};
  emit(j);
  return exit_code(r.status);
}

int cmd_check(const Options& o) {
  auto kb = load_kb(o.kb_path);
  auto s = spec_of(o, kb);
  s.kind = o.queries.empty() ? query::QueryKind::check : query::QueryKind::refute;
  return finish_query(o, query::run_query(kb, s));
}

int cmd_bound(const Options& o) {
  auto kb = load_kb(o.kb_path);
  auto s = spec_of(o, kb);
  s.kind = query::QueryKind::bound;
  s.direction = o.min == o.max ? query::BoundDirection::both
                               : (o.min ? query::BoundDirection::min : query::BoundDirection::max);
  return finish_query(o, query::run_query(kb, s));
}

int cmd_verify(const Options& o) {
  auto kb = load_kb(o.kb_path);
  cert::Certificate c;
  try {
    c = cert::certificate_from_json(json::parse(read_file(o.cert_path)));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed certificate: ") + e.what());
  }
  std::vector<kb::Constraint> extra;
  std::istringstream lines(c.query);
  for (std::string line; std::getline(lines, line);)
    if (!line.empty()) extra.push_back(kb::parse_constraint(line, kb));
  ground::UniverseMode mode = (o.dc || o.k >= 0 || o.ou) ? universe_of(o)
                                                         : query::parse_universe(c.universe.empty() ? "ou" : c.universe);
  ground::GroundOptions go;
  go.min_generics = c.generics;
  auto g = ground::ground(extra.empty() ? kb : kb.with(extra), mode, go);
  const double tol = o.tol_opt && o.tol_opt->count() ? o.tol : c.tolerance;
  json j;
  try {
    auto rep = cert::verify_certificate(g, c, tol);
    j = cert::report_to_json(rep);
  } catch (const cert::CertificateError& e) {
    j = {{"pass", false}, {"error", e.what()}};
  }
  emit(j);
  return j["pass"].get<bool>() ? 0 : 2;
}

int cmd_compare(const Options& o) {
  auto kb = load_kb(o.kb_path);
  auto s = spec_of(o, kb);
  s.kind = o.expr.empty() ? query::QueryKind::check : query::QueryKind::bound;
  if (s.kind == query::QueryKind::bound)
    s.direction = o.min == o.max ? query::BoundDirection::both
                                 : (o.min ? query::BoundDirection::min : query::BoundDirection::max);
  std::vector<int> ks = o.ks;
  if (ks.empty()) {
    int r = kb::kb_rank(kb);
    ks = {0, r, r + 1, r + 2};
  }
  auto rows = query::compare_universes(kb, s, ks);
  json arr = json::array();
  for (const auto& row : rows) {
    json j = query::result_to_json(row.result, false);
    j["k"] = row.k;
    arr.push_back(j);
  }
  emit({{"rank", kb::kb_rank(kb)}, {"rows", arr}});
  return 0;
}

void add_common(CLI::App* sub, Options& o, bool solving) {
  sub->add_option("kb", o.kb_path, "knowledge base (.lsos)")->required();
  auto* ou = sub->add_flag("--ou", o.ou, "open universe, k = rank of the KB (default)");
  auto* dc = sub->add_flag("--dc", o.dc, "domain closure, constants only");
  auto* k = sub->add_option("--k", o.k, "k generic names")->check(CLI::NonNegativeNumber);
  ou->excludes(dc)->excludes(k);
  dc->excludes(k);
  o.degree_opt = sub->add_option("--degree,-d", o.degree, "relaxation degree (even)");
  sub->add_option("--basis", o.basis, "clique or dense")->check(CLI::IsMember({"clique", "dense"}));
  sub->add_flag("--unshared", o.unshared, "one variable per ground monomial");
  sub->add_option("--out,-o", o.out, "output file");
  if (solving) {
    o.tol_opt = sub->add_option("--tol", o.tol, "solver tolerance")->envname("LSOS_TOL");
    sub->add_option("--seed", o.seed, "random seed")->envname("LSOS_SEED");
    sub->add_option("--max-iters", o.max_iters, "iteration limit")->envname("LSOS_MAX_ITERS");
    sub->add_flag("--verbose,-v", o.verbose, "solver log on stderr");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifted sum-of-squares reasoning over probabilistic knowledge bases"};
  app.require_subcommand(1);
  Options o;

  auto* ground_cmd = app.add_subcommand("ground", "ground the KB over the name pool");
  add_common(ground_cmd, o, false);
  ground_cmd->add_option("--expr", o.expr, "objective whose placeholders pad the pool");

  auto* compile_cmd = app.add_subcommand("compile", "dump the lifted semidefinite program");
  add_common(compile_cmd, o, false);
  compile_cmd->add_option("--expr", o.expr, "objective to cover with moment blocks");

  auto* solve_cmd = app.add_subcommand("solve", "feasibility of a dumped program");
  solve_cmd->add_option("sdp", o.sdp_path, "program JSON from `compile`")->required();
  o.tol_opt = solve_cmd->add_option("--tol", o.tol, "solver tolerance")->envname("LSOS_TOL");
  solve_cmd->add_option("--seed", o.seed)->envname("LSOS_SEED");
  solve_cmd->add_option("--max-iters", o.max_iters)->envname("LSOS_MAX_ITERS");
  solve_cmd->add_flag("--verbose,-v", o.verbose);

  auto* check_cmd = app.add_subcommand("check", "consistency of the KB at the given degree");
  add_common(check_cmd, o, true);

  auto* bound_cmd = app.add_subcommand("bound", "bounds on a linear combination of moments");
  add_common(bound_cmd, o, true);
  bound_cmd->add_option("--expr", o.expr, "objective, e.g. e(War(g1,Antony))")->required();
  bound_cmd->add_flag("--min", o.min, "lower bound only");
  bound_cmd->add_flag("--max", o.max, "upper bound only");

  auto* refute_cmd = app.add_subcommand("refute", "look for a refutation of the KB plus queries");
  add_common(refute_cmd, o, true);
  refute_cmd->add_option("--query,-q", o.queries, "constraint appended to the KB");

  auto* verify_cmd = app.add_subcommand("verify", "symbolic check of a certificate");
  verify_cmd->add_option("kb", o.kb_path, "knowledge base (.lsos)")->required();
  verify_cmd->add_option("--cert", o.cert_path, "certificate JSON")->required();
  o.tol_opt = nullptr;
  auto* vtol = verify_cmd->add_option("--tol", o.tol, "residual tolerance")->envname("LSOS_TOL");
  auto* vou = verify_cmd->add_flag("--ou", o.ou);
  auto* vdc = verify_cmd->add_flag("--dc", o.dc);
  auto* vk = verify_cmd->add_option("--k", o.k);
  vou->excludes(vdc)->excludes(vk);
  vdc->excludes(vk);

  auto* compare_cmd = app.add_subcommand("compare-universes", "run one query for several k");
  add_common(compare_cmd, o, true);
  compare_cmd->add_option("--ks", o.ks, "values of k")->delimiter(',');
  compare_cmd->add_option("--expr", o.expr, "objective (bound query); consistency otherwise");
  compare_cmd->add_flag("--min", o.min);
  compare_cmd->add_flag("--max", o.max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  // each subcommand registered its own --tol; keep the one that was parsed
  for (auto* sub : {check_cmd, bound_cmd, refute_cmd, compare_cmd})
    if (sub->parsed()) o.tol_opt = sub->get_option("--tol");
  if (verify_cmd->parsed()) o.tol_opt = vtol;
  if (solve_cmd->parsed()) o.tol_opt = solve_cmd->get_option("--tol");
  for (auto* sub : {ground_cmd, compile_cmd, check_cmd, bound_cmd, refute_cmd, compare_cmd})
    if (sub->parsed()) o.degree_opt = sub->get_option("--degree");

  try {
    if (ground_cmd->parsed()) return cmd_ground(o);
    if (compile_cmd->parsed()) return cmd_compile(o);
    if (solve_cmd->parsed()) return cmd_solve(o);
    if (check_cmd->parsed() || refute_cmd->parsed()) return cmd_check(o);
    if (bound_cmd->parsed()) return cmd_bound(o);
    if (verify_cmd->parsed()) return cmd_verify(o);
    if (compare_cmd->parsed()) return cmd_compare(o);
  } catch (const kb::ParseError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << "error: " << d.to_string() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
