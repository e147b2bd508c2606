#include "lsos/ground/canonical.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace lsos::ground {

using kb::Monomial;
using kb::Name;
using kb::Polynomial;
using kb::Term;

Term rename(const Term& t, const Renaming& theta) {
  Term out = t;
  for (auto& a : out.args) {
    if (a.is_variable() || !a.name.is_generic()) continue;
    auto it = theta.find(a.name);
    if (it != theta.end()) a.name = it->second;
  }
  return out;
}

Monomial rename(const Monomial& m, const Renaming& theta) {
  Monomial out;
  for (const auto& [t, e] : m.factors()) out = out * Monomial(rename(t, theta), e);
  return out;
}

Polynomial rename(const Polynomial& p, const Renaming& theta) {
  Polynomial out;
  for (const auto& [m, c] : p.terms()) out.add(rename(m, theta), c);
  return out;
}

namespace {

void push_generics(const Term& t, std::vector<Name>& out) {
  for (const auto& a : t.args)
    if (!a.is_variable() && a.name.is_generic() && std::find(out.begin(), out.end(), a.name) == out.end())
      out.push_back(a.name);
}

bool poly_less(const Polynomial& a, const Polynomial& b) {
  const auto& x = a.terms();
  const auto& y = b.terms();
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(), [](const auto& p, const auto& q) {
    if (p.first != q.first) return p.first < q.first;
    return p.second < q.second;
  });
}

// Calls visit(theta) for every bijection from `names` onto g1..g_n.
template <typename Visit>
void for_each_relabeling(const std::vector<Name>& names, Visit&& visit) {
  std::vector<int> perm(names.size());
  std::iota(perm.begin(), perm.end(), 1);
  do {
    Renaming theta;
    for (std::size_t i = 0; i < names.size(); ++i) theta.emplace(names[i], Name::generic(perm[i]));
    visit(theta);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

std::vector<Term> renamed_sorted(const std::vector<Term>& terms, const Renaming& theta) {
  std::vector<Term> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(rename(t, theta));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<Name> generic_names(const Monomial& m) {
  std::vector<Name> out;
  for (const auto& [t, e] : m.factors()) push_generics(t, out);
  return out;
}

std::vector<Name> generic_names(const Polynomial& p) {
  std::vector<Name> out;
  for (const auto& t : p.terms_used()) push_generics(t, out);
  return out;
}

std::vector<Name> generic_names(const std::vector<Term>& terms) {
  std::vector<Name> out;
  for (const auto& t : terms) push_generics(t, out);
  return out;
}

Canonical canonicalize(const Monomial& m) {
  auto names = generic_names(m);
  Canonical best;
  bool first = true;
  for_each_relabeling(names, [&](const Renaming& theta) {
    Monomial cand = rename(m, theta);
    if (first || cand < best.form) {
      best.form = std::move(cand);
      best.theta = theta;
      first = false;
    }
  });
  return best;
}

CanonicalTermSet canonicalize(const std::vector<Term>& terms) {
  auto names = generic_names(terms);
  CanonicalTermSet best;
  bool first = true;
  for_each_relabeling(names, [&](const Renaming& theta) {
    auto cand = renamed_sorted(terms, theta);
    if (first || cand < best.form) {
      best.form = std::move(cand);
      best.theta = theta;
      first = false;
    }
  });
  return best;
}

CanonicalPair canonicalize(const std::vector<Term>& terms, const Polynomial& p) {
  auto names = generic_names(terms);
  for (const auto& n : generic_names(p))
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  CanonicalPair best;
  bool first = true;
  for_each_relabeling(names, [&](const Renaming& theta) {
    auto cand_terms = renamed_sorted(terms, theta);
    if (!first && best.terms < cand_terms) return;
    Polynomial cand_poly = rename(p, theta);
    if (first || cand_terms < best.terms || poly_less(cand_poly, best.poly)) {
      best.terms = std::move(cand_terms);
      best.poly = std::move(cand_poly);
      best.theta = theta;
      first = false;
    }
  });
  return best;
}

bool renaming_equivalent(const Monomial& a, const Monomial& b) {
  return canonicalize(a).form == canonicalize(b).form;
}

std::map<Monomial, std::vector<Monomial>> equivalence_classes(const std::vector<Monomial>& monomials) {
  std::map<Monomial, std::vector<Monomial>> out;
  std::map<Monomial, std::set<Monomial>> seen;
  for (const auto& m : monomials) {
    auto key = canonicalize(m).form;
    if (seen[key].insert(m).second) out[key].push_back(m);
  }
  return out;
}

}  // namespace lsos::ground
