#pragma once

#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lsos/cert/certificate.hpp"
#include "lsos/ground/grounder.hpp"
#include "lsos/kb/model.hpp"
#include "lsos/kb/parser.hpp"
#include "lsos/sdp/solver.hpp"
#include "lsos/sos/compiler.hpp"

namespace lsos::testing {

inline std::string data_path(const std::string& name) { return std::string(LSOS_DATA_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline kb::KnowledgeBase parse_or_throw(const std::string& text) {
  auto r = kb::parse_kb(text);
  if (!r.ok()) {
    std::string msg;
    for (const auto& d : r.diagnostics) msg += d.to_string() + "\n";
    throw std::runtime_error("fixture does not parse:\n" + msg);
  }
  return *r.kb;
}

inline kb::KnowledgeBase load_fixture(const std::string& name) { return parse_or_throw(read_text(data_path(name))); }

/// Polynomial from (serialized monomial, coefficient) pairs.
inline kb::Polynomial poly(std::initializer_list<std::pair<const char*, double>> parts) {
  kb::Polynomial p;
  for (const auto& [m, c] : parts) p.add(kb::monomial_from_string(m), c);
  return p;
}

/// Id of the ground constraint with exactly this polynomial and kind.
inline std::string find_id(const ground::GroundTheory& g, ground::GroundKind kind, const kb::Polynomial& p) {
  for (const auto* c : g.all())
    if (c->kind == kind && c->poly == p) return c->id;
  throw std::runtime_error("no ground constraint " + p.to_string());
}

/// A finitely supported distribution over worlds; each world assigns a value
/// to every ground term.
struct World {
  double probability = 0;
  std::function<double(const kb::Term&)> value;
};

inline double moment_of(const kb::Monomial& m, const std::vector<World>& worlds) {
  double e = 0;
  for (const auto& w : worlds) {
    double v = 1;
    for (const auto& [t, k] : m.factors())
      for (int i = 0; i < k; ++i) v *= w.value(t);
    e += w.probability * v;
  }
  return e;
}

/// Moments of a genuine distribution, one per program variable.
inline sdp::MomentAssignment moments_of(const sos::LiftedSdp& sdp, const std::vector<World>& worlds) {
  sdp::MomentAssignment x;
  for (const auto& m : sdp.variables) x.push_back(moment_of(m, worlds));
  return x;
}

}  // namespace lsos::testing
