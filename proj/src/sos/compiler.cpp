#include "lsos/sos/compiler.hpp"

#include <algorithm>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "lsos/ground/canonical.hpp"
#include "lsos/kb/parser.hpp"

namespace lsos::sos {

using kb::Monomial;
using kb::Polynomial;
using kb::Term;

void LinearForm::add(int var, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = coeffs.try_emplace(var, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) coeffs.erase(it);
  }
}

double LinearForm::eval(const std::vector<double>& x) const {
  double v = constant;
  for (const auto& [i, c] : coeffs) v += c * x.at(static_cast<std::size_t>(i));
  return v;
}

std::size_t SymbolicBlock::index(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  // rows 0..i-1 contribute n, n-1, ..., n-i+1 entries
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) - static_cast<std::size_t>(i) * (i - 1) / 2 +
         static_cast<std::size_t>(j - i);
}

const LinearForm& SymbolicBlock::at(int i, int j) const { return entries.at(index(i, j, size())); }

// --- LiftedSdp ---------------------------------------------------------------

Monomial LiftedSdp::key_of(const Monomial& m) const {
  if (sharing == Sharing::none || m.is_constant()) return m;
  auto it = key_cache_.find(m);
  if (it != key_cache_.end()) return it->second;
  Monomial key = ground::canonicalize(m).form;
  key_cache_.emplace(m, key);
  return key;
}

std::optional<int> LiftedSdp::variable_of(const Monomial& m) const {
  if (m.is_constant()) return std::nullopt;
  auto it = index_.find(key_of(m));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int LiftedSdp::add_variable(const Monomial& key) {
  auto [it, inserted] = index_.try_emplace(key, static_cast<int>(variables.size()));
  if (inserted) variables.push_back(key);
  return it->second;
}

LinearForm LiftedSdp::linear_form(const Polynomial& moments) const {
  LinearForm f;
  for (const auto& [m, c] : moments.terms()) {
    if (m.is_constant()) {
      f.constant += c;
      continue;
    }
    auto v = variable_of(m);
    if (!v) throw std::out_of_range("moment e(" + m.to_string() + ") is not a variable of the program");
    f.add(*v, c);
  }
  return f;
}

namespace {

LinearForm form_on_demand(const Polynomial& moments, LiftedSdp& sdp) {
  LinearForm f;
  for (const auto& [m, c] : moments.terms()) {
    if (m.is_constant()) f.constant += c;
    else f.add(sdp.add_variable(sdp.key_of(m)), c);
  }
  return f;
}

void enumerate_monomials(const std::vector<Term>& terms, std::size_t from, int budget, const Monomial& acc,
                         std::vector<Monomial>& out) {
  out.push_back(acc);
  if (budget == 0) return;
  for (std::size_t i = from; i < terms.size(); ++i)
    enumerate_monomials(terms, i, budget - 1, acc * Monomial(terms[i]), out);
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string block_key(const SymbolicBlock& b) {
  std::string key = b.kind == SymbolicBlock::Kind::psd ? "P" : "Z";
  key += std::to_string(b.size()) + ":";
  for (const auto& e : b.entries) {
    key += exact(e.constant);
    for (const auto& [i, c] : e.coeffs) key += "," + std::to_string(i) + ":" + exact(c);
    key += ";";
  }
  return key;
}

std::string form_key(const LinearForm& f) {
  std::string key = exact(f.constant);
  for (const auto& [i, c] : f.coeffs) key += "," + std::to_string(i) + ":" + exact(c);
  return key;
}

std::string terms_key(const std::vector<Term>& terms) {
  std::string key;
  for (const auto& t : terms) key += t.to_string() + ";";
  return key;
}

std::vector<Term> sorted_terms(const Polynomial& p) {
  auto t = p.terms_used();  // already sorted and unique
  return t;
}

}  // namespace

std::vector<Monomial> monomials_up_to(const std::vector<Term>& terms, int half_degree) {
  std::vector<Term> uniq = terms;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<Monomial> out;
  enumerate_monomials(uniq, 0, std::max(half_degree, 0), Monomial::one(), out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Monomial> moment_basis(const std::vector<Term>& terms, int d) {
  if (d < 0 || d % 2 != 0) throw std::invalid_argument("degree must be a nonnegative even integer, got " + std::to_string(d));
  return monomials_up_to(terms, d / 2);
}

SymbolicBlock build_moment_matrix(const std::vector<Monomial>& basis, LiftedSdp& sdp) {
  SymbolicBlock b;
  b.kind = SymbolicBlock::Kind::psd;
  b.origin = "moment";
  b.rows = basis;
  b.multiplier = Polynomial::constant(1.0);
  const int n = b.size();
  b.entries.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) b.entries.push_back(form_on_demand(Polynomial::of(basis[i] * basis[j]), sdp));
  return b;
}

SymbolicBlock build_localizing_matrix(const Polynomial& p, bool equality, const std::vector<Monomial>& basis, int d,
                                      LiftedSdp& sdp) {
  if (p.degree() > d)
    throw std::invalid_argument("constraint of degree " + std::to_string(p.degree()) + " exceeds relaxation degree " +
                                std::to_string(d));
  const int half = (d - p.degree()) / 2;
  SymbolicBlock b;
  b.kind = equality ? SymbolicBlock::Kind::zero : SymbolicBlock::Kind::psd;
  b.multiplier = p;
  for (const auto& m : basis)
    if (m.degree() <= half) b.rows.push_back(m);
  const int n = b.size();
  b.entries.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Monomial rr = b.rows[i] * b.rows[j];
      Polynomial entry;
      for (const auto& [m, c] : p.terms()) entry.add(m * rr, c);
      b.entries.push_back(form_on_demand(entry, sdp));
    }
  return b;
}

LiftedSdp compile(const ground::GroundTheory& g, const CompileOptions& opts) {
  const int d = opts.degree;
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("relaxation degree must be even and >= 2, got " + std::to_string(d));

  LiftedSdp sdp;
  sdp.degree = d;
  sdp.basis = opts.basis;
  sdp.sharing = opts.sharing;
  const bool share = opts.sharing == Sharing::classes;

  // Constraints usable at this degree.
  std::vector<const ground::GroundConstraint*> usable;
  for (const auto* c : g.all()) {
    if (c->poly.degree() > d) {
      sdp.warnings.push_back({kb::Diagnostic::Severity::warning,
                              "constraint " + c->id + " has degree " + std::to_string(c->poly.degree()) +
                                  " > " + std::to_string(d) + " and is not used: " + c->poly.to_string(),
                              {}, c->source});
      continue;
    }
    usable.push_back(c);
  }

  // Term sets whose joint moments must be available.
  std::set<std::vector<Term>> sets;
  for (const auto* c : usable) sets.insert(sorted_terms(c->poly));
  for (const auto& e : opts.extra) {
    if (e.degree() > d)
      throw std::invalid_argument("objective of degree " + std::to_string(e.degree()) + " exceeds relaxation degree " +
                                  std::to_string(d));
    sets.insert(sorted_terms(e));
  }
  if (opts.basis == BasisMode::dense) {
    std::set<Term> all;
    for (const auto& s : sets) all.insert(s.begin(), s.end());
    sets = {std::vector<Term>(all.begin(), all.end())};
  }

  // Maximal sets, largest first; index by term for containment queries.
  std::vector<std::vector<Term>> by_size(sets.begin(), sets.end());
  std::stable_sort(by_size.begin(), by_size.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  std::vector<std::vector<Term>> maximal;
  std::map<Term, std::vector<std::size_t>> containing;
  auto supersets = [&](const std::vector<Term>& s) {
    std::vector<std::size_t> out;
    if (s.empty()) return out;
    auto it = containing.find(s.front());
    if (it == containing.end()) return out;
    for (std::size_t idx : it->second)
      if (std::includes(maximal[idx].begin(), maximal[idx].end(), s.begin(), s.end())) out.push_back(idx);
    return out;
  };
  for (auto& s : by_size) {
    if (s.empty() || !supersets(s).empty()) continue;
    for (const auto& t : s) containing[t].push_back(maximal.size());
    maximal.push_back(std::move(s));
  }

  std::unordered_set<std::string> seen_blocks;
  auto push_block = [&](SymbolicBlock b) {
    if (b.entries.empty()) return;
    if (seen_blocks.insert(block_key(b)).second) sdp.blocks.push_back(std::move(b));
  };

  // Moment matrices, one per clique class.
  std::vector<std::vector<Monomial>> basis_of(maximal.size());
  std::unordered_set<std::string> seen_cliques;
  for (std::size_t i = 0; i < maximal.size(); ++i) {
    basis_of[i] = moment_basis(maximal[i], d);
    std::string key = share ? terms_key(ground::canonicalize(maximal[i]).form) : terms_key(maximal[i]);
    if (!seen_cliques.insert(key).second) continue;
    sdp.cliques.push_back(maximal[i]);
    push_block(build_moment_matrix(basis_of[i], sdp));
  }
  if (maximal.empty()) push_block(build_moment_matrix({Monomial::one()}, sdp));

  // Localizers on every maximal clique containing the constraint's terms.
  std::unordered_set<std::string> seen_loc;
  const std::vector<Monomial> unit_basis{Monomial::one()};
  for (const auto* c : usable) {
    if (c->kind == ground::GroundKind::bound) continue;
    const bool eq = c->kind == ground::GroundKind::equality;
    auto terms = sorted_terms(c->poly);
    std::vector<std::size_t> hosts = supersets(terms);
    if (terms.empty()) {
      push_block([&] {
        auto b = build_localizing_matrix(c->poly, eq, unit_basis, d, sdp);
        b.origin = c->id;
        return b;
      }());
      continue;
    }
    for (std::size_t h : hosts) {
      std::string key = eq ? "=" : ">";
      if (share) {
        auto cp = ground::canonicalize(maximal[h], c->poly);
        key += terms_key(cp.terms) + "|" + cp.poly.to_string();
      } else {
        key += terms_key(maximal[h]) + "|" + c->poly.to_string();
      }
      if (!seen_loc.insert(key).second) continue;
      auto b = build_localizing_matrix(c->poly, eq, basis_of[h], d, sdp);
      b.origin = c->id;
      push_block(std::move(b));
    }
  }

  // Expectation bounds become scalar rows.
  std::unordered_set<std::string> seen_rows;
  for (const auto* c : usable) {
    if (c->kind != ground::GroundKind::bound) continue;
    ScalarRow row{c->id, c->poly, form_on_demand(c->poly, sdp)};
    if (seen_rows.insert(form_key(row.form)).second) sdp.scalars.push_back(std::move(row));
  }
  return sdp;
}

BlockCount block_count(const LiftedSdp& sdp) {
  BlockCount bc;
  bc.variables = sdp.variables.size();
  for (const auto& b : sdp.blocks) {
    (b.kind == SymbolicBlock::Kind::psd ? bc.psd_blocks : bc.zero_blocks)++;
    bc.total_entries += b.entries.size();
    bc.largest_block = std::max(bc.largest_block, static_cast<std::size_t>(b.size()));
  }
  bc.scalar_rows = sdp.scalars.size();
  bc.total_entries += sdp.scalars.size();
  return bc;
}

// --- JSON ----------------------------------------------------------------------

nlohmann::json linear_form_to_json(const LinearForm& f) {
  nlohmann::json coeffs = nlohmann::json::object();
  for (const auto& [i, c] : f.coeffs) coeffs[std::to_string(i)] = c;
  return {{"constant", f.constant}, {"coeffs", coeffs}};
}

namespace {

LinearForm linear_form_from_json(const nlohmann::json& j) {
  LinearForm f;
  f.constant = j.at("constant").get<double>();
  for (const auto& [k, v] : j.at("coeffs").items()) f.add(std::stoi(k), v.get<double>());
  return f;
}

nlohmann::json poly_json(const Polynomial& p) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [m, c] : p.terms()) j[m.to_string()] = c;
  return j;
}

Polynomial poly_from_json(const nlohmann::json& j) {
  Polynomial p;
  for (const auto& [k, v] : j.items()) p.add(kb::monomial_from_string(k), v.get<double>());
  return p;
}

}  // namespace

nlohmann::json sdp_to_json(const LiftedSdp& sdp) {
  nlohmann::json j;
  j["degree"] = sdp.degree;
  j["basis"] = sdp.basis == BasisMode::clique ? "clique" : "dense";
  j["sharing"] = sdp.sharing == Sharing::classes ? "classes" : "none";
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : sdp.variables) vars.push_back(v.to_string());
  j["variables"] = vars;

  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : sdp.blocks) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : b.rows) rows.push_back(r.to_string());
    nlohmann::json entries = nlohmann::json::array();
    const int n = b.size();
    for (int i = 0; i < n; ++i)
      for (int jj = i; jj < n; ++jj) {
        auto e = linear_form_to_json(b.at(i, jj));
        e["row"] = i;
        e["col"] = jj;
        entries.push_back(e);
      }
    blocks.push_back({{"kind", b.kind == SymbolicBlock::Kind::psd ? "psd" : "zero"},
                      {"origin", b.origin},
                      {"size", n},
                      {"rows", rows},
                      {"multiplier", poly_json(b.multiplier)},
                      {"entries", entries}});
  }
  j["blocks"] = blocks;

  nlohmann::json scalars = nlohmann::json::array();
  for (const auto& s : sdp.scalars) {
    auto f = linear_form_to_json(s.form);
    f["origin"] = s.origin;
    f["poly"] = poly_json(s.poly);
    scalars.push_back(f);
  }
  j["scalars"] = scalars;
  nlohmann::json warnings = nlohmann::json::array();
  for (const auto& w : sdp.warnings) warnings.push_back(w.message);
  j["warnings"] = warnings;
  return j;
}

LiftedSdp sdp_from_json(const nlohmann::json& j) {
  LiftedSdp sdp;
  sdp.degree = j.at("degree").get<int>();
  sdp.basis = j.value("basis", "clique") == "dense" ? BasisMode::dense : BasisMode::clique;
  sdp.sharing = j.value("sharing", "classes") == "none" ? Sharing::none : Sharing::classes;
  for (const auto& v : j.at("variables")) sdp.add_variable(kb::monomial_from_string(v.get<std::string>()));
  for (const auto& jb : j.at("blocks")) {
    SymbolicBlock b;
    b.kind = jb.at("kind") == "psd" ? SymbolicBlock::Kind::psd : SymbolicBlock::Kind::zero;
    b.origin = jb.at("origin").get<std::string>();
    for (const auto& r : jb.at("rows")) b.rows.push_back(kb::monomial_from_string(r.get<std::string>()));
    b.multiplier = poly_from_json(jb.at("multiplier"));
    const int n = jb.at("size").get<int>();
    if (n != b.size()) throw std::invalid_argument("block size does not match its row list");
    b.entries.resize(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (const auto& e : jb.at("entries"))
      b.entries.at(SymbolicBlock::index(e.at("row").get<int>(), e.at("col").get<int>(), n)) = linear_form_from_json(e);
    sdp.blocks.push_back(std::move(b));
  }
  for (const auto& js : j.at("scalars"))
    sdp.scalars.push_back({js.at("origin").get<std::string>(), poly_from_json(js.at("poly")), linear_form_from_json(js)});
  return sdp;
}

}  // namespace lsos::sos
