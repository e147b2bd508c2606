// Acceptance suite: one line per criterion check, then a summary. Exit status
// is nonzero when any check fails that is not listed as a known failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lsos/cert/certificate.hpp"
#include "lsos/ground/canonical.hpp"
#include "lsos/query/engine.hpp"
#include "support.hpp"

using namespace lsos;
using namespace lsos::testing;

namespace {

struct Outcome {
  std::string id;
  bool pass = false;
  bool known = false;  // expected failure, analysed in the README
  std::string detail;
};

std::vector<Outcome> outcomes;

void report(const std::string& id, bool pass, const std::string& detail, bool known = false) {
  outcomes.push_back({id, pass, known && !pass, detail});
  std::cout << (pass ? "[PASS] " : known ? "[FAIL, known] " : "[FAIL] ") << id << ": " << detail << std::endl;
}

std::string fmt(double v, int prec = 8) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

query::QuerySpec bound_spec(const kb::KnowledgeBase& kb, const std::string& expr, int d, query::BoundDirection dir) {
  query::QuerySpec s;
  s.kind = query::QueryKind::bound;
  s.objective = kb::parse_objective(expr, kb);
  s.direction = dir;
  s.degree = d;
  return s;
}

query::QuerySpec refute_spec(const kb::KnowledgeBase& kb, const std::vector<std::string>& extra, int d) {
  query::QuerySpec s;
  s.kind = query::QueryKind::refute;
  for (const auto& e : extra) s.extra.push_back(kb::parse_constraint(e, kb));
  s.degree = d;
  return s;
}

// Independent re-check of a certificate: re-ground from scratch and verify
// after a JSON round trip.
bool reverify(const kb::KnowledgeBase& kb, const query::QuerySpec& spec, const cert::Certificate& c, double tol,
              double* residual) {
  auto g = query::ground_for(kb, spec);
  auto back = cert::certificate_from_json(nlohmann::json::parse(cert::certificate_to_json(c).dump()));
  auto rep = cert::verify_certificate(g, back, tol);
  if (residual) *residual = rep.max_residual;
  return rep.pass;
}

sos::LiftedSdp compile_for(const kb::KnowledgeBase& kb, const query::QuerySpec& spec) {
  auto g = query::ground_for(kb, spec);
  sos::CompileOptions co;
  co.degree = *spec.degree;
  co.sharing = spec.sharing;
  if (!spec.objective.is_zero()) co.extra.push_back(spec.objective);
  return sos::compile(g, co);
}

// --- 1 ----------------------------------------------------------------------

void criterion1() {
  auto kb = load_fixture("war.lsos");

  // Literal query as written.
  {
    auto t = std::chrono::steady_clock::now();
    auto spec = bound_spec(kb, "e(War(Antony,g1))", 4, query::BoundDirection::min);
    auto r = query::run_query(kb, spec);
    double lo = r.lo.value_or(NAN);
    // A deterministic model: Antony starts no wars and is in no love triangle.
    auto sdp = compile_for(kb, spec);
    World w{1.0, [](const kb::Term& t) {
              return t.args[0].name.label == "Antony" ? 0.0 : 1.0;
            }};
    auto x = moments_of(sdp, {w});
    bool model_ok = sdp::check_assignment(sdp, x, 1e-12).ok();
    double model_value = sdp.linear_form(spec.objective).eval(x);
    report("1 literal: bound --min e(War(Antony,g1)) = 0.75 +- 1e-4", std::abs(lo - 0.75) <= 1e-4,
           "lo = " + fmt(lo) + " (" + fmt(seconds_since(t), 3) + " s); a point-mass model with War(Antony,*) = 0 " +
               (model_ok ? "satisfies" : "does NOT satisfy") + " every constraint with objective " + fmt(model_value),
           true);
    auto rf = query::run_query(kb, refute_spec(kb, {"e(War(Antony,g1)) <= 0.74"}, 4));
    report("1 literal: refute with e(War(Antony,g1)) <= 0.74 is infeasible", rf.status == sdp::Status::infeasible,
           "status = " + sdp::to_string(rf.status), true);
  }

  // Same query with the argument order the knowledge base constrains.
  {
    auto t = std::chrono::steady_clock::now();
    auto r = query::run_query(kb, bound_spec(kb, "e(War(g1,Antony))", 4, query::BoundDirection::min));
    double tb = seconds_since(t);
    double lo = r.lo.value_or(NAN);
    report("1 oriented: bound --min e(War(g1,Antony)) = 0.75 +- 1e-4", std::abs(lo - 0.75) <= 1e-4,
           "lo = " + fmt(lo, 10) + " (" + fmt(tb, 3) + " s)");

    t = std::chrono::steady_clock::now();
    auto spec = refute_spec(kb, {"e(War(g1,Antony)) <= 0.74"}, 4);
    auto rf = query::run_query(kb, spec);
    double tr = seconds_since(t);
    double res = NAN;
    bool ok = rf.status == sdp::Status::infeasible && rf.certificate && reverify(kb, spec, *rf.certificate, 1e-4, &res);
    report("1 oriented: refute with e(War(g1,Antony)) <= 0.74 yields a verifying certificate (residual <= 1e-4)", ok,
           "status = " + sdp::to_string(rf.status) + ", residual = " + fmt(res, 3) + " (" + fmt(tr, 3) + " s)");
    report("1 oriented: runtime < 30 s", tb + tr < 30, fmt(tb + tr, 3) + " s");

    // Hand certificate: W^2(1-LT)^2 + W^2(LT-LT^2) + (1-LT)(W-W^2) + (W*LT - .75LT) + .75(LT - 1)
    // plus the query row .74 - W, scaled by 100.
    auto g = query::ground_for(kb, spec);
    const char* W = "War(g1,Antony)";
    const std::string LTs = "LoveTriangle(g1,Antony,Cleopatra)";
    const char* LT = LTs.c_str();
    const std::string WLT = LTs + "*" + W;
    const std::string W2 = std::string(W) + "^2";
    const std::string LT2 = LTs + "^2";
    cert::Certificate c;
    c.scale = 100;
    c.degree = 4;
    c.sigma0.push_back(poly({{W, 1}, {WLT.c_str(), -1}}));
    c.q[find_id(g, ground::GroundKind::equality, poly({{LT2.c_str(), 1}, {LT, -1}}))] = poly({{W2.c_str(), -1}});
    c.q[find_id(g, ground::GroundKind::equality, poly({{W2.c_str(), 1}, {W, -1}}))] = poly({{LT, 1}, {"1", -1}});
    c.r[find_id(g, ground::GroundKind::bound, poly({{WLT.c_str(), 1}, {LT, -0.75}}))] = 1;
    c.r[find_id(g, ground::GroundKind::bound, poly({{LT, 1}, {"1", -1}}))] = 0.75;
    c.r[find_id(g, ground::GroundKind::bound, poly({{W, -1}, {"1", 0.74}}))] = 1;
    auto rep = cert::verify_certificate(g, c, 1e-12);
    report("1 oriented: five-step hand certificate plus query row verifies exactly", rep.pass,
           "residual = " + fmt(rep.max_residual, 3) + ", max product degree " + std::to_string(rep.max_product_degree));
  }
}

// --- 2 ----------------------------------------------------------------------

std::vector<World> three_point() {
  std::vector<World> ws;
  for (auto [x, p] : {std::pair{-2.0, 0.125}, {0.0, 0.75}, {2.0, 0.125}})
    ws.push_back({p, [x](const kb::Term& t) { return t.relation == "X" ? x : (x * x >= 4 ? 1.0 : 0.0); }});
  return ws;
}

void criterion2() {
  auto t = std::chrono::steady_clock::now();
  auto kb = load_fixture("chebyshev.lsos");
  query::QuerySpec spec;
  spec.kind = query::QueryKind::check;
  spec.degree = 4;
  auto r = query::run_query(kb, spec);
  double res = NAN;
  bool ok = r.status == sdp::Status::infeasible && r.certificate && reverify(kb, spec, *r.certificate, 1e-4, &res);
  report("2 chebyshev (lambda=1, k=4, delta=0.01) at degree 4 is infeasible with a verifying certificate", ok,
         "status = " + sdp::to_string(r.status) + ", extracted certificate residual = " + fmt(res, 3));

  // ((1-T)X)^2 + T(X^2 - 4) - X^2(T^2 - T) - (X^2 - 1) + 4(T - 0.26), times 1/(k lambda delta) = 25
  auto g = query::ground_for(kb, spec);
  cert::Certificate c;
  c.scale = 25;
  c.degree = 4;
  c.sigma0.push_back(poly({{"X(o)", 1}, {"T(o)*X(o)", -1}}));
  c.sigma[find_id(g, ground::GroundKind::inequality, poly({{"T(o)*X(o)^2", 1}, {"T(o)", -4}}))].push_back(
      poly({{"1", 1}}));
  c.q[find_id(g, ground::GroundKind::equality, poly({{"T(o)^2", 1}, {"T(o)", -1}}))] = poly({{"X(o)^2", -1}});
  c.r[find_id(g, ground::GroundKind::bound, poly({{"X(o)^2", -1}, {"1", 1}}))] = 1;
  c.r[find_id(g, ground::GroundKind::bound, poly({{"T(o)", 1}, {"1", -0.26}}))] = 4;
  auto rep = cert::verify_certificate(g, c, 1e-12);
  report("2 chebyshev hand certificate verifies exactly (residual <= 1e-12)", rep.pass,
         "residual = " + fmt(rep.max_residual, 3) + ", max product degree " + std::to_string(rep.max_product_degree));

  auto nt = load_fixture("chebyshev_notail.lsos");
  auto bspec = bound_spec(nt, "e(T(o))", 4, query::BoundDirection::max);
  auto b = query::run_query(nt, bspec);
  double hi = b.hi.value_or(NAN);
  report("2 chebyshev without tail bound: bound --max e(T) = 0.25 +- 1e-4", std::abs(hi - 0.25) <= 1e-4,
         "hi = " + fmt(hi, 10));

  auto sdp = compile_for(nt, bspec);
  auto x = moments_of(sdp, three_point());
  auto vr = sdp::check_assignment(sdp, x, 1e-9);
  double val = sdp.linear_form(bspec.objective).eval(x);
  report("2 three-point witness X in {-2,0,2} (1/8,3/4,1/8) is feasible with e(T) = 0.25",
         vr.ok() && std::abs(val - 0.25) < 1e-12, "worst violation " + fmt(vr.worst, 3) + ", e(T) = " + fmt(val));
  double el = seconds_since(t);
  report("2 runtime < 10 s", el < 10, fmt(el, 3) + " s");
}

// --- 3 ----------------------------------------------------------------------

void criterion3() {
  auto t = std::chrono::steady_clock::now();
  auto kb = load_fixture("heart_rate.lsos");
  auto spec = bound_spec(kb, "e(HR(g1))", 2, query::BoundDirection::min);
  auto r = query::run_query(kb, spec);
  double el = seconds_since(t);
  double lo = r.lo.value_or(NAN);
  report("3 heart rate: bound --min e(HR(g1)) at degree 2 = 68 +- 1e-4", std::abs(lo - 68) <= 1e-4,
         "lo = " + fmt(lo, 10));

  auto sdp = compile_for(kb, spec);
  std::vector<World> ws = {
      {0.2, [](const kb::Term& t) { return t.relation == "HR" ? 100.0 : 1.0; }},
      {0.8, [](const kb::Term& t) { return t.relation == "HR" ? 60.0 : 0.0; }},
  };
  auto x = moments_of(sdp, ws);
  auto vr = sdp::check_assignment(sdp, x, 1e-9);
  double val = sdp.linear_form(spec.objective).eval(x);
  report("3 two-point witness (HR=100 w.p. 0.2, HR=60 w.p. 0.8) is feasible with e(HR) = 68",
         vr.ok() && std::abs(val - 68) < 1e-9, "worst violation " + fmt(vr.worst, 3) + ", e(HR) = " + fmt(val));
  report("3 runtime < 5 s", el < 5, fmt(el, 3) + " s");
}

// --- 4 ----------------------------------------------------------------------

void criterion4() {
  auto kb = load_fixture("qp.lsos");
  auto g = ground::ground(kb, ground::UniverseMode::names(2));

  // Oracle: every map of the quantified variables into {james, g1, g2}.
  const std::vector<std::string> pool = {"james", "g1", "g2"};
  std::set<std::string> expected;
  for (const auto& x : pool) {
    for (const auto& y : pool) expected.insert(poly({{("Q(" + x + "," + y + ")").c_str(), 1}, {"1", -3}}).to_string());
    expected.insert(poly({{("Q(" + x + ",james)").c_str(), 1}}).to_string());
  }
  expected.insert(poly({{"P(james)", 1}, {"1", -1}}).to_string());
  std::set<std::string> got;
  for (const auto* c : g.all()) got.insert(c->poly.to_string());
  bool kinds_ok = g.inequalities.empty() && g.equalities.empty();
  report("4 Q/P GND(Delta,2) equals the brute-force enumeration", got == expected && kinds_ok,
         std::to_string(got.size()) + " ground constraints, oracle " + std::to_string(expected.size()));

  // Class membership by brute force over the permutations of {g1, g2}.
  auto same_class = [](const kb::Monomial& a, const kb::Monomial& b) {
    std::vector<int> perm = {1, 2};
    do {
      ground::Renaming th = {{kb::Name::generic(1), kb::Name::generic(perm[0])},
                             {kb::Name::generic(2), kb::Name::generic(perm[1])}};
      if (ground::rename(a, th) == b) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
  };
  // jack and jill are unnamed individuals: generic names g1 and g2.
  auto jack_jill = kb::monomial_from_string("Q(g1,g2)");
  auto jill_jack = kb::monomial_from_string("Q(g2,g1)");
  auto james_jack = kb::monomial_from_string("Q(james,g1)");
  auto jack_james = kb::monomial_from_string("Q(g1,james)");
  bool ok = same_class(jack_jill, jill_jack) && ground::renaming_equivalent(jack_jill, jill_jack) &&
            ground::canonicalize(jill_jack).form == jack_jill && !same_class(james_jack, jack_jill) &&
            !ground::renaming_equivalent(james_jack, jack_jill) && !ground::renaming_equivalent(james_jack, jack_james) &&
            ground::canonicalize(kb::monomial_from_string("Q(james,g2)")).form == james_jack;
  auto classes = ground::equivalence_classes({jack_jill, jill_jack, james_jack, jack_james});
  report("4 Q(jack,jill) ~ Q(jill,jack); Q(james,jack) in a different class", ok && classes.size() == 3,
         std::to_string(classes.size()) + " classes over {Q(g1,g2), Q(g2,g1), Q(james,g1), Q(g1,james)}");
}

// --- 5 ----------------------------------------------------------------------

void criterion5() {
  const std::string base = read_text(data_path("war.lsos"));
  std::vector<double> xs, ys;
  bool bound_ok = true;
  std::string detail;
  for (int added : {2, 4, 8, 16}) {
    std::string text = base + "\nconstant";
    for (int i = 0; i < added; ++i) text += (i ? ", " : " ") + std::string("Extra") + std::to_string(i);
    text += ";\n";
    auto kb = parse_or_throw(text);
    auto mode = ground::UniverseMode::names(3);
    auto atoms = ground::count_atoms(kb, mode);
    auto ab = ground::atom_bound(kb, mode);
    bound_ok = bound_ok && static_cast<double>(atoms) <= ab.value;

    auto t = std::chrono::steady_clock::now();
    auto spec = bound_spec(kb, "e(War(g1,Antony))", 4, query::BoundDirection::min);
    spec.universe = mode;
    auto r = query::run_query(kb, spec);
    double el = seconds_since(t);
    xs.push_back(std::log(static_cast<double>(ab.c + ab.k)));
    ys.push_back(std::log(el));
    detail += "c=" + std::to_string(ab.c) + ": atoms " + std::to_string(atoms) + " <= " + fmt(ab.value) + ", " +
              fmt(el, 3) + " s, lo " + fmt(r.lo.value_or(NAN), 6) + "; ";
  }
  report("5 count_atoms <= n*m*(c+k)^k for c in {2,4,8,16} added constants", bound_ok, detail);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / xs.size(), my += ys[i] / ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
  double slope = sxy / sxx;
  report("5 compile+solve time log-log slope against (c+k) < 6", slope < 6, "slope = " + fmt(slope, 3));
}

// --- 6 ----------------------------------------------------------------------

std::string random_kb(std::mt19937_64& rng, double& p, double& q) {
  std::uniform_real_distribution<double> u(0.2, 0.8), s(0.01, 0.1);
  std::bernoulli_distribution coin(0.6);
  p = u(rng);
  q = u(rng);
  std::ostringstream o;
  o << "relation P/1 boolean;\nrelation Q/2 boolean;\nconstant a, b;\n";
  int n = 0;
  if (coin(rng)) o << "forall x : e(P(x)) - " << p - s(rng) << " >= 0;\n", ++n;
  if (coin(rng)) o << "forall x : -e(P(x)) + " << p + s(rng) << " >= 0;\n", ++n;
  if (coin(rng)) o << "forall x,y : x != y => e(Q(x,y)) - " << q - s(rng) << " >= 0;\n", ++n;
  if (coin(rng)) o << "forall x,y : e(P(x)*Q(x,y)) - " << q - s(rng) << "*e(P(x)) >= 0;\n", ++n;
  if (coin(rng)) o << "forall x : x != a => e(P(x)*P(a)) - " << p * p - s(rng) << " >= 0;\n", ++n;
  if (n == 0 || coin(rng)) o << "e(P(a)) - " << p - s(rng) << " >= 0;\n";
  return o.str();
}

void criterion6() {
  std::mt19937_64 rng(20240607);
  const double eps = 1e-7;
  int good = 0;
  std::string failures;
  for (int i = 0; i < 20; ++i) {
    double p, q;
    auto kb = parse_or_throw(random_kb(rng, p, q));
    auto g = ground::ground(kb, ground::UniverseMode::ou());
    sos::CompileOptions co;
    co.degree = 2 + 2 * (i % 2);
    co.sharing = sos::Sharing::none;
    auto sdp = sos::compile(g, co);
    sdp::SolverConfig cfg;
    cfg.eps = eps;
    cfg.seed = static_cast<std::uint64_t>(i);
    auto r = sdp::solve_feasibility(sdp, cfg);
    if (r.status != sdp::Status::feasible) {
      failures += " #" + std::to_string(i) + " status " + sdp::to_string(r.status);
      continue;
    }
    auto xs = cert::symmetrize(sdp, r.x);
    // class-constant
    std::map<kb::Monomial, double> seen;
    bool constant = true;
    for (std::size_t v = 0; v < sdp.variables.size(); ++v) {
      auto key = ground::canonicalize(sdp.variables[v]).form;
      auto [it, fresh] = seen.emplace(key, xs[v]);
      if (!fresh && std::abs(it->second - xs[v]) > 1e-12) constant = false;
    }
    auto vr = sdp::check_assignment(sdp, xs, 10 * eps);
    if (constant && vr.ok()) ++good;
    else failures += " #" + std::to_string(i) + (constant ? "" : " not class-constant") +
                     (vr.ok() ? "" : " worst " + fmt(vr.worst, 3));
  }
  report("6 symmetrize yields class-constant 10*eps-feasible points on 20 random unshared fixtures", good == 20,
         std::to_string(good) + "/20" + (failures.empty() ? "" : ";" + failures));
}

// --- 7 ----------------------------------------------------------------------

struct Fixture {
  const char* file;
  int degree;
};
const std::vector<Fixture> kFixtures = {{"war.lsos", 4},          {"chebyshev.lsos", 4}, {"chebyshev_notail.lsos", 4},
                                        {"heart_rate.lsos", 2},   {"qp.lsos", 2},        {"contradiction.lsos", 2}};

void criterion7() {
  const double eps = 1e-7;
  for (const auto& f : kFixtures) {
    auto kb = load_fixture(f.file);
    const int rank = kb::kb_rank(kb);
    std::vector<sdp::Status> st;
    std::vector<sos::LiftedSdp> sdps;
    sdp::MomentAssignment x0;
    for (int k = rank; k <= rank + 2; ++k) {
      auto g = ground::ground(kb, ground::UniverseMode::names(k));
      sos::CompileOptions co;
      co.degree = f.degree;
      sdps.push_back(sos::compile(g, co));
      sdp::SolverConfig cfg;
      cfg.eps = eps;
      auto r = sdp::solve_feasibility(sdps.back(), cfg);
      st.push_back(r.status);
      if (k == rank) x0 = r.x;
    }
    bool same = st[0] == st[1] && st[1] == st[2] && st[0] != sdp::Status::unknown;
    std::string detail = "k=" + std::to_string(rank) + ".." + std::to_string(rank + 2) + ": " + sdp::to_string(st[0]) +
                         ", " + sdp::to_string(st[1]) + ", " + sdp::to_string(st[2]);
    bool ext_ok = true;
    if (same && st[0] == sdp::Status::feasible) {
      for (int j = 1; j <= 2; ++j) {
        try {
          auto ext = cert::extend_to(sdps[0], x0, sdps[j]);
          auto vr = sdp::check_assignment(sdps[j], ext, 10 * eps);
          ext_ok = ext_ok && vr.ok();
          detail += "; extension to k=" + std::to_string(rank + j) + " worst " + fmt(vr.worst, 3);
        } catch (const std::out_of_range& e) {
          ext_ok = false;
          detail += std::string("; ") + e.what();
        }
      }
    }
    report(std::string("7 ") + f.file + ": status stable over k = rank, rank+1, rank+2; extensions feasible",
           same && ext_ok, detail);
  }
}

// --- 8 ----------------------------------------------------------------------

void criterion8() {
  struct Case {
    const char* file;
    std::vector<std::string> extra;
    int degree;
  };
  std::vector<Case> cases;
  for (const auto& f : kFixtures)
    for (int d : {2, 4}) cases.push_back({f.file, {}, d});
  cases.push_back({"war.lsos", {"e(War(g1,Antony)) <= 0.74"}, 4});
  cases.push_back({"war.lsos", {"e(War(g1,Antony)) <= 0.76"}, 4});
  cases.push_back({"heart_rate.lsos", {"e(HR(g1)) <= 67.5"}, 2});
  cases.push_back({"heart_rate.lsos", {"e(HR(g1)) <= 68.5"}, 2});
  cases.push_back({"chebyshev_notail.lsos", {"e(T(o)) >= 0.24"}, 4});
  cases.push_back({"qp.lsos", {"e(Q(g1,james)) <= -0.5"}, 2});

  int n_feas = 0, n_inf = 0, bad = 0;
  std::string detail;
  for (const auto& c : cases) {
    auto kb = load_fixture(c.file);
    auto spec = refute_spec(kb, c.extra, c.degree);
    auto r = query::run_query(kb, spec);
    std::string tag = std::string(c.file) + (c.extra.empty() ? "" : " + " + c.extra[0]) + " d=" +
                      std::to_string(c.degree);
    if (r.status == sdp::Status::infeasible) {
      ++n_inf;
      double res = NAN;
      if (!(r.certificate && reverify(kb, spec, *r.certificate, 1e-4, &res))) {
        ++bad;
        detail += " [" + tag + ": certificate " + (r.certificate ? "residual " + fmt(res, 3) : r.certificate_error) + "]";
      }
    } else if (r.status == sdp::Status::feasible) {
      ++n_feas;
      if (r.certificate) {
        ++bad;
        detail += " [" + tag + ": feasible yet carries a certificate]";
      }
    } else {
      ++bad;
      detail += " [" + tag + ": " + sdp::to_string(r.status) + "]";
    }
  }
  report("8 no instance is both feasible and refuted; every infeasible result ships a verifying certificate", bad == 0,
         std::to_string(n_feas) + " feasible, " + std::to_string(n_inf) + " infeasible" + detail);
}

// --- 9 ----------------------------------------------------------------------

void criterion9() {
  struct Case {
    const char* file;
    const char* expr;
    int d;
    query::BoundDirection dir = query::BoundDirection::both;
  };
  // Q is not bounded above, so its maximum is not attained and the solver
  // reports unknown; only the lower end is a solvable problem there.
  const std::vector<Case> cases = {{"war.lsos", "e(War(g1,Antony))", 4},
                                   {"chebyshev_notail.lsos", "e(T(o))", 4},
                                   {"heart_rate.lsos", "e(HR(g1))", 2},
                                   {"qp.lsos", "e(Q(g1,james))", 2, query::BoundDirection::min}};
  for (const auto& c : cases) {
    auto kb = load_fixture(c.file);
    auto lo_spec = bound_spec(kb, c.expr, c.d, c.dir);
    auto hi_spec = bound_spec(kb, c.expr, c.d + 2, c.dir);
    auto a = query::run_query(kb, lo_spec);
    auto b = query::run_query(kb, hi_spec);
    const double inf = INFINITY;
    double alo = a.lo.value_or(-inf), ahi = a.hi.value_or(inf);
    double blo = b.lo.value_or(-inf), bhi = b.hi.value_or(inf);
    auto tol = [](double v) { return 1e-6 * std::max(1.0, std::isfinite(v) ? std::abs(v) : 1.0); };
    bool solved = a.status == sdp::Status::optimal && b.status == sdp::Status::optimal;
    bool inside = blo >= alo - tol(alo) && bhi <= ahi + tol(ahi);
    report(std::string("9 ") + c.file + " " + c.expr + ": interval at d=" + std::to_string(c.d + 2) +
               " inside interval at d=" + std::to_string(c.d),
           solved && inside,
           "[" + fmt(alo, 10) + ", " + fmt(ahi, 10) + "] vs [" + fmt(blo, 10) + ", " + fmt(bhi, 10) + "]");
  }
}

}  // namespace

int main() {
  std::cout << "lsos acceptance suite" << std::endl;
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
  } catch (const std::exception& e) {
    report("suite", false, std::string("aborted: ") + e.what());
  }
  int pass = 0, known = 0, fail = 0;
  for (const auto& o : outcomes) (o.pass ? pass : o.known ? known : fail)++;
  std::cout << "summary: " << pass << " passed, " << known << " known failures, " << fail << " unexpected failures"
            << std::endl;
  return fail == 0 ? 0 : 1;
}
