#pragma once

#include <map>
#include <nlohmann/json_fwd.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsos/ground/grounder.hpp"
#include "lsos/kb/model.hpp"
#include "lsos/sdp/solver.hpp"
#include "lsos/sos/compiler.hpp"

namespace lsos::cert {

/// coef * (e(to) - e(from)) with `to` a renaming of `from`. Zero under every
/// class-constant pseudomodel, so it acts as an equality multiplier.
struct RenamingTerm {
  kb::Monomial from;
  kb::Monomial to;
  double coef = 0;
};

/// scale * (sum s^2 + sum_i sum s^2 g_i + sum_j q_j h_j + sum_k r_k b_k
///          + renaming terms) = -1
struct Certificate {
  double scale = 1;
  std::vector<kb::Polynomial> sigma0;                       // squared summands
  std::map<std::string, std::vector<kb::Polynomial>> sigma;  // per inequality
  std::map<std::string, kb::Polynomial> q;                   // per equality
  std::map<std::string, double> r;                           // per bound
  std::vector<RenamingTerm> renaming;
  int degree = 0;
  double tolerance = 1e-4;
  std::string universe;  // "ou", "dc" or "k=<n>"
  int generics = 0;      // generic names in the grounding pool
  std::string query;     // appended constraints, one per line

  double max_coefficient() const;
};

struct CertificateError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ResidualReport {
  double max_residual = 0;
  kb::Polynomial residual;  // expansion + 1
  int max_product_degree = 0;
  bool degree_ok = true;
  double tolerance = 0;
  bool pass = false;
};

/// Factor a verified dual witness into a certificate. Throws
/// CertificateError if the witness does not verify at `witness_tol` or has
/// a PSD multiplier with an eigenvalue below the clip threshold.
Certificate extract_refutation(const sos::LiftedSdp& sdp, const sdp::DualWitness& w, double witness_tol = 1e-5);

/// The symbolic identity scale * (...) as a polynomial (without the +1).
kb::Polynomial expand(const ground::GroundTheory& g, const Certificate& cert);

/// Throws CertificateError on a dangling constraint id, a wrong-kind id,
/// a negative r, or a renaming term whose monomials are not equivalent.
ResidualReport verify_certificate(const ground::GroundTheory& g, const Certificate& cert, double tol);

/// Average of every variable over its renaming class. Identity for
/// class-shared encodings.
sdp::MomentAssignment symmetrize(const sos::LiftedSdp& sdp, const sdp::MomentAssignment& x);

/// Value of each target monomial read off its class representative.
/// Throws std::out_of_range when a class is missing.
std::vector<double> extend_pseudomodel(const sos::LiftedSdp& sdp, const sdp::MomentAssignment& x,
                                       const std::vector<kb::Monomial>& targets);

/// Assignment for every variable of `target`, read off `sdp`/`x`.
sdp::MomentAssignment extend_to(const sos::LiftedSdp& sdp, const sdp::MomentAssignment& x,
                                const sos::LiftedSdp& target);

nlohmann::json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const ResidualReport& r, std::size_t max_entries = 20);

}  // namespace lsos::cert
