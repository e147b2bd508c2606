#include "lsos/cert/certificate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "lsos/ground/canonical.hpp"
#include "lsos/kb/parser.hpp"

namespace lsos::cert {

using kb::Monomial;
using kb::Polynomial;
using sos::SymbolicBlock;

namespace {

const double kClip = 1e-9;

Polynomial square(const Polynomial& p) { return p * p; }

const ground::GroundConstraint& lookup(const ground::GroundTheory& g, const std::string& id, ground::GroundKind kind,
                                       const char* what) {
  const auto* c = g.find(id);
  if (!c) throw CertificateError("certificate references unknown constraint '" + id + "'");
  if (c->kind != kind) throw CertificateError("constraint '" + id + "' is not " + std::string(what));
  return *c;
}

// sum_i v_i R_i
Polynomial combine(const std::vector<Monomial>& rows, const Eigen::VectorXd& v, double s) {
  Polynomial p;
  for (int i = 0; i < v.size(); ++i)
    if (v(i) != 0) p.add(rows[i], s * v(i));
  return p;
}

}  // namespace

double Certificate::max_coefficient() const {
  double mx = scale;
  auto upd = [&](const Polynomial& p) { mx = std::max(mx, p.max_abs_coefficient()); };
  for (const auto& p : sigma0) upd(p);
  for (const auto& [id, list] : sigma)
    for (const auto& p : list) upd(p);
  for (const auto& [id, p] : q) upd(p);
  for (const auto& [id, v] : r) mx = std::max(mx, std::abs(v));
  for (const auto& t : renaming) mx = std::max(mx, std::abs(t.coef));
  return mx;
}

Certificate extract_refutation(const sos::LiftedSdp& sdp, const sdp::DualWitness& w, double witness_tol) {
  if (!sdp::verify_witness(sdp, w, witness_tol)) throw CertificateError("dual witness does not verify");
  Certificate cert;
  cert.degree = sdp.degree;

  for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
    const auto& blk = sdp.blocks[b];
    const Eigen::MatrixXd& Y = w.blocks[b];
    if (blk.kind == SymbolicBlock::Kind::zero) {
      Polynomial qb;
      for (int i = 0; i < blk.size(); ++i)
        for (int j = i; j < blk.size(); ++j) {
          double c = i == j ? Y(i, j) : 2 * Y(i, j);
          if (c != 0) qb.add(blk.rows[i] * blk.rows[j], c);
        }
      if (!qb.is_zero()) cert.q[blk.origin] += qb;
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Y);
    const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    std::vector<Polynomial> parts;
    for (int l = 0; l < blk.size(); ++l) {
      double lam = es.eigenvalues()(l);
      if (lam < -kClip * top)
        throw CertificateError("multiplier of block " + std::to_string(b) + " has eigenvalue " + std::to_string(lam));
      if (lam <= 0) continue;
      Polynomial s = combine(blk.rows, es.eigenvectors().col(l), std::sqrt(lam));
      if (!s.is_zero()) parts.push_back(std::move(s));
    }
    if (parts.empty()) continue;
    auto& dst = blk.origin == "moment" ? cert.sigma0 : cert.sigma[blk.origin];
    dst.insert(dst.end(), parts.begin(), parts.end());
  }
  for (std::size_t k = 0; k < sdp.scalars.size(); ++k)
    if (w.scalars[k] > 0) cert.r[sdp.scalars[k].origin] += w.scalars[k];

  // Expand over ground monomials, then move every monomial onto the key the
  // program identifies it with.
  Polynomial total;
  for (const auto& s : cert.sigma0) total += square(s);
  for (const auto& [id, list] : cert.sigma) {
    const Polynomial* mult = nullptr;
    for (const auto& blk : sdp.blocks)
      if (blk.origin == id) mult = &blk.multiplier;
    for (const auto& s : list) total += square(s) * *mult;
  }
  for (const auto& [id, qp] : cert.q)
    for (const auto& blk : sdp.blocks)
      if (blk.origin == id) {
        total += qp * blk.multiplier;
        break;
      }
  for (const auto& row : sdp.scalars)
    if (auto it = cert.r.find(row.origin); it != cert.r.end()) total += it->second * row.poly;

  Polynomial moved;
  for (const auto& [m, c] : total.terms()) {
    Monomial key = sdp.key_of(m);
    if (key != m) cert.renaming.push_back({m, key, c});
    moved.add(key, c);
  }
  const double gamma = -moved.constant_term();
  if (!(gamma > 0)) throw CertificateError("aggregated constant is not negative");
  cert.scale = 1.0 / gamma;
  return cert;
}

Polynomial expand(const ground::GroundTheory& g, const Certificate& cert) {
  Polynomial total;
  for (const auto& s : cert.sigma0) total += square(s);
  for (const auto& [id, list] : cert.sigma) {
    const auto& c = lookup(g, id, ground::GroundKind::inequality, "an inequality");
    Polynomial sum;
    for (const auto& s : list) sum += square(s);
    total += sum * c.poly;
  }
  for (const auto& [id, qp] : cert.q) total += qp * lookup(g, id, ground::GroundKind::equality, "an equality").poly;
  for (const auto& [id, v] : cert.r) {
    if (v < 0) throw CertificateError("negative multiplier for bound '" + id + "'");
    total += v * lookup(g, id, ground::GroundKind::bound, "an expectation bound").poly;
  }
  for (const auto& t : cert.renaming) {
    if (!ground::renaming_equivalent(t.from, t.to))
      throw CertificateError("renaming term " + t.from.to_string() + " -> " + t.to.to_string() +
                             " relates inequivalent monomials");
    total.add(t.to, t.coef);
    total.add(t.from, -t.coef);
  }
  return cert.scale * total;
}

ResidualReport verify_certificate(const ground::GroundTheory& g, const Certificate& cert, double tol) {
  if (!(cert.scale > 0)) throw CertificateError("scale must be positive");
  ResidualReport rep;
  rep.tolerance = tol;
  rep.residual = expand(g, cert) + Polynomial::constant(1.0);
  rep.max_residual = rep.residual.max_abs_coefficient();

  auto note = [&](int deg) { rep.max_product_degree = std::max(rep.max_product_degree, deg); };
  for (const auto& s : cert.sigma0) note(2 * s.degree());
  for (const auto& [id, list] : cert.sigma)
    for (const auto& s : list) note(2 * s.degree() + g.find(id)->poly.degree());
  for (const auto& [id, qp] : cert.q) note(qp.degree() + g.find(id)->poly.degree());
  for (const auto& [id, v] : cert.r) note(g.find(id)->poly.degree());
  rep.degree_ok = cert.degree <= 0 || rep.max_product_degree <= cert.degree;
  rep.pass = rep.max_residual <= tol && rep.degree_ok;
  return rep;
}

sdp::MomentAssignment symmetrize(const sos::LiftedSdp& sdp, const sdp::MomentAssignment& x) {
  if (sdp.sharing == sos::Sharing::classes) return x;
  std::map<Monomial, std::pair<double, int>> acc;
  std::vector<Monomial> cls(sdp.variables.size());
  for (std::size_t i = 0; i < sdp.variables.size(); ++i) {
    cls[i] = ground::canonicalize(sdp.variables[i]).form;
    auto& a = acc[cls[i]];
    a.first += x.at(i);
    a.second += 1;
  }
  sdp::MomentAssignment out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& a = acc[cls[i]];
    out[i] = a.first / a.second;
  }
  return out;
}

std::vector<double> extend_pseudomodel(const sos::LiftedSdp& sdp, const sdp::MomentAssignment& x,
                                       const std::vector<Monomial>& targets) {
  std::map<Monomial, double> value;
  for (std::size_t i = 0; i < sdp.variables.size(); ++i)
    value.emplace(ground::canonicalize(sdp.variables[i]).form, x.at(i));
  std::vector<double> out;
  out.reserve(targets.size());
  for (const auto& t : targets) {
    if (t.is_constant()) {
      out.push_back(1.0);
      continue;
    }
    auto it = value.find(ground::canonicalize(t).form);
    if (it == value.end()) throw std::out_of_range("no class representative for " + t.to_string());
    out.push_back(it->second);
  }
  return out;
}

sdp::MomentAssignment extend_to(const sos::LiftedSdp& sdp, const sdp::MomentAssignment& x,
                                const sos::LiftedSdp& target) {
  return extend_pseudomodel(sdp, x, target.variables);
}

// --- JSON ----------------------------------------------------------------------

namespace {

nlohmann::json poly_json(const Polynomial& p) { return ground::polynomial_to_json(p); }

Polynomial poly_from(const nlohmann::json& j) {
  Polynomial p;
  for (const auto& [k, v] : j.items()) p.add(kb::monomial_from_string(k), v.get<double>());
  return p;
}

}  // namespace

nlohmann::json certificate_to_json(const Certificate& c) {
  nlohmann::json j;
  j["scale"] = c.scale;
  j["degree"] = c.degree;
  j["tolerance"] = c.tolerance;
  auto s0 = nlohmann::json::array();
  for (const auto& p : c.sigma0) s0.push_back(poly_json(p));
  j["sigma0"] = s0;
  auto sg = nlohmann::json::object();
  for (const auto& [id, list] : c.sigma) {
    auto arr = nlohmann::json::array();
    for (const auto& p : list) arr.push_back(poly_json(p));
    sg[id] = arr;
  }
  j["sigma"] = sg;
  auto qj = nlohmann::json::object();
  for (const auto& [id, p] : c.q) qj[id] = poly_json(p);
  j["q"] = qj;
  auto rj = nlohmann::json::object();
  for (const auto& [id, v] : c.r) rj[id] = v;
  j["r"] = rj;
  auto ren = nlohmann::json::array();
  for (const auto& t : c.renaming) ren.push_back({{"from", t.from.to_string()}, {"to", t.to.to_string()}, {"coef", t.coef}});
  j["renaming"] = ren;
  if (!c.universe.empty()) j["universe"] = c.universe;
  if (!c.query.empty()) j["query"] = c.query;
  j["generics"] = c.generics;
  j["max_coefficient"] = c.max_coefficient();
  return j;
}

Certificate certificate_from_json(const nlohmann::json& j) {
  Certificate c;
  try {
    c.scale = j.at("scale").get<double>();
    c.degree = j.value("degree", 0);
    c.tolerance = j.value("tolerance", 1e-4);
    const auto empty_obj = nlohmann::json::object();
    const auto empty_arr = nlohmann::json::array();
    const auto& s0 = j.contains("sigma0") ? j.at("sigma0") : empty_arr;
    const auto& sg = j.contains("sigma") ? j.at("sigma") : empty_obj;
    const auto& qj = j.contains("q") ? j.at("q") : empty_obj;
    const auto& rj = j.contains("r") ? j.at("r") : empty_obj;
    const auto& ren = j.contains("renaming") ? j.at("renaming") : empty_arr;
    for (const auto& p : s0) c.sigma0.push_back(poly_from(p));
    for (const auto& [id, arr] : sg.items())
      for (const auto& p : arr) c.sigma[id].push_back(poly_from(p));
    for (const auto& [id, p] : qj.items()) c.q[id] = poly_from(p);
    for (const auto& [id, v] : rj.items()) c.r[id] = v.get<double>();
    for (const auto& t : ren)
      c.renaming.push_back({kb::monomial_from_string(t.at("from").get<std::string>()),
                            kb::monomial_from_string(t.at("to").get<std::string>()), t.at("coef").get<double>()});
    c.universe = j.value("universe", "");
    c.query = j.value("query", "");
    c.generics = j.value("generics", 0);
  } catch (const nlohmann::json::exception& e) {
    throw CertificateError(std::string("malformed certificate: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CertificateError(std::string("malformed certificate: ") + e.what());
  }
  return c;
}

nlohmann::json report_to_json(const ResidualReport& r, std::size_t max_entries) {
  nlohmann::json j;
  j["pass"] = r.pass;
  j["max_residual"] = r.max_residual;
  j["tolerance"] = r.tolerance;
  j["max_product_degree"] = r.max_product_degree;
  j["degree_ok"] = r.degree_ok;
  std::vector<std::pair<double, Monomial>> worst;
  for (const auto& [m, c] : r.residual.terms()) worst.emplace_back(std::abs(c), m);
  std::sort(worst.begin(), worst.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  auto res = nlohmann::json::array();
  for (std::size_t i = 0; i < worst.size() && i < max_entries; ++i)
    res.push_back({{"monomial", worst[i].second.to_string()}, {"residual", r.residual.coefficient(worst[i].second)}});
  j["largest_residuals"] = res;
  return j;
}

}  // namespace lsos::cert
