#pragma once

#include <map>
#include <vector>

#include "lsos/kb/model.hpp"

namespace lsos::ground {

/// Permutation of generic names; constants are always fixed. Names absent
/// from the map are fixed as well.
using Renaming = std::map<kb::Name, kb::Name>;

kb::Term rename(const kb::Term& t, const Renaming& theta);
kb::Monomial rename(const kb::Monomial& m, const Renaming& theta);
kb::Polynomial rename(const kb::Polynomial& p, const Renaming& theta);

/// Distinct generic names of a ground object, in first-occurrence order.
std::vector<kb::Name> generic_names(const kb::Monomial& m);
std::vector<kb::Name> generic_names(const kb::Polynomial& p);
std::vector<kb::Name> generic_names(const std::vector<kb::Term>& terms);

struct Canonical {
  kb::Monomial form;
  Renaming theta;  // rename(input, theta) == form
};

/// Minimum over all injective relabelings of the generic names of `m` onto
/// g1..g_j (j = number of distinct generics in `m`).
Canonical canonicalize(const kb::Monomial& m);

/// Same construction for a set of terms relabeled jointly; `form` is the
/// sorted relabeled set.
struct CanonicalTermSet {
  std::vector<kb::Term> form;
  Renaming theta;
};
CanonicalTermSet canonicalize(const std::vector<kb::Term>& terms);

/// Joint canonical form of a term set together with a polynomial over those
/// terms; two pairs get equal keys iff one renaming maps both onto the other.
struct CanonicalPair {
  std::vector<kb::Term> terms;
  kb::Polynomial poly;
  Renaming theta;
};
CanonicalPair canonicalize(const std::vector<kb::Term>& terms, const kb::Polynomial& p);

bool renaming_equivalent(const kb::Monomial& a, const kb::Monomial& b);

/// Partition of ground monomials keyed by canonical form.
std::map<kb::Monomial, std::vector<kb::Monomial>> equivalence_classes(const std::vector<kb::Monomial>& monomials);

}  // namespace lsos::ground
