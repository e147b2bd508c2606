#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "lsos/ground/canonical.hpp"
#include "support.hpp"

using namespace lsos;
using lsos::testing::poly;

namespace {

// Brute-force canonical form: minimum over every injective map of the
// generics of m onto g1..gj.
kb::Monomial brute_canonical(const kb::Monomial& m) {
  auto names = ground::generic_names(m);
  std::vector<int> target(names.size());
  for (std::size_t i = 0; i < target.size(); ++i) target[i] = static_cast<int>(i) + 1;
  std::optional<kb::Monomial> best;
  do {
    ground::Renaming th;
    for (std::size_t i = 0; i < names.size(); ++i) th[names[i]] = kb::Name::generic(target[i]);
    auto r = ground::rename(m, th);
    if (!best || r < *best) best = r;
  } while (std::next_permutation(target.begin(), target.end()));
  return *best;
}

kb::Monomial random_monomial(std::mt19937& rng) {
  const std::vector<std::string> names = {"a", "g1", "g2", "g3", "g4"};
  const std::vector<std::pair<std::string, int>> rels = {{"P", 1}, {"Q", 2}, {"R", 3}};
  kb::Monomial m;
  const int factors = 1 + rng() % 3;
  for (int f = 0; f < factors; ++f) {
    const auto& [rel, arity] = rels[rng() % rels.size()];
    std::string s = rel + "(";
    for (int i = 0; i < arity; ++i) s += (i ? "," : "") + names[rng() % names.size()];
    s += ")";
    m = m * kb::monomial_from_string(s);
  }
  return m;
}

std::set<std::string> canonical_constraints(const ground::GroundTheory& g) {
  std::set<std::string> out;
  for (const auto* c : g.all()) {
    auto terms = c->poly.terms_used();
    out.insert(ground::canonicalize(terms, c->poly).poly.to_string());
  }
  return out;
}

}  // namespace

TEST(Canonical, MatchesBruteForceMinimum) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto m = random_monomial(rng);
    auto c = ground::canonicalize(m);
    EXPECT_EQ(c.form, brute_canonical(m)) << m.to_string();
    EXPECT_EQ(ground::rename(m, c.theta), c.form);
  }
}

TEST(Canonical, InvariantUnderRenamingAndConstantsStayFixed) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    auto m = random_monomial(rng);
    std::vector<int> perm = {1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    ground::Renaming th;
    for (int i = 0; i < 4; ++i) th[kb::Name::generic(i + 1)] = kb::Name::generic(perm[i]);
    auto r = ground::rename(m, th);
    EXPECT_EQ(ground::canonicalize(r).form, ground::canonicalize(m).form);
    EXPECT_TRUE(ground::renaming_equivalent(m, r));
  }
  EXPECT_FALSE(ground::renaming_equivalent(kb::monomial_from_string("P(a)"), kb::monomial_from_string("P(g1)")));
}

TEST(Canonical, ClassesPartitionByRenaming) {
  std::vector<kb::Monomial> ms;
  for (const char* s : {"Q(g1,g2)", "Q(g2,g1)", "Q(g1,g1)", "Q(g2,g2)", "Q(a,g1)", "Q(a,g2)", "Q(g1,a)"})
    ms.push_back(kb::monomial_from_string(s));
  auto cls = ground::equivalence_classes(ms);
  ASSERT_EQ(cls.size(), 4u);
  EXPECT_EQ(cls.at(kb::monomial_from_string("Q(g1,g2)")).size(), 2u);
  EXPECT_EQ(cls.at(kb::monomial_from_string("Q(g1,g1)")).size(), 2u);
  EXPECT_EQ(cls.at(kb::monomial_from_string("Q(a,g1)")).size(), 2u);
}

TEST(Grounder, EnumeratesEverySubstitutionThatPassesTheGuard) {
  auto kb = lsos::testing::parse_or_throw(
      "relation Q/2; constant a;\n"
      "forall x,y : x != y => e(Q(x,y)) >= 0;\n");
  for (int k = 0; k <= 3; ++k) {
    auto g = ground::ground(kb, ground::UniverseMode::names(k));
    const int pool = 1 + k;
    EXPECT_EQ(g.bounds.size(), static_cast<std::size_t>(pool * (pool - 1))) << "k=" << k;
    EXPECT_EQ(g.generic_count, k);
    for (const auto* c : g.all()) {
      const auto& t = c->poly.terms_used().at(0);
      EXPECT_NE(t.args[0], t.args[1]);
    }
  }
}

TEST(Grounder, SortsConstraintsByKind) {
  auto kb = lsos::testing::load_fixture("chebyshev.lsos");
  auto g = ground::ground(kb, ground::UniverseMode::dc());
  EXPECT_EQ(g.generic_count, 0);
  EXPECT_EQ(g.equalities.size(), 1u);    // T boolean
  EXPECT_EQ(g.inequalities.size(), 3u);  // X bound and the two localizers
  EXPECT_EQ(g.bounds.size(), 5u);        // two equalities split, one bound
  EXPECT_NO_THROW(lsos::testing::find_id(g, ground::GroundKind::bound, poly({{"T(o)", 1}, {"1", -0.26}})));
  EXPECT_NO_THROW(lsos::testing::find_id(g, ground::GroundKind::bound, poly({{"X(o)", -1}})));
}

TEST(Grounder, OpenUniverseUsesRankManyGenerics) {
  auto kb = lsos::testing::load_fixture("war.lsos");
  EXPECT_EQ(ground::UniverseMode::ou().generic_count(kb), 3);
  auto g = ground::ground(kb, ground::UniverseMode::ou());
  EXPECT_EQ(g.pool.size(), 5u);
  EXPECT_EQ(g.constant_count, 2);
}

TEST(Grounder, PadsPoolForQueryPlaceholders) {
  auto kb = lsos::testing::load_fixture("heart_rate.lsos");
  ground::GroundOptions opts;
  opts.min_generics = 2;
  auto g = ground::ground(kb, ground::UniverseMode::dc(), opts);
  EXPECT_EQ(g.generic_count, 2);
}

TEST(Grounder, ConstraintSetGrowsMonotonicallyInK) {
  for (const char* f : {"war.lsos", "qp.lsos", "heart_rate.lsos"}) {
    auto kb = lsos::testing::load_fixture(f);
    auto prev = canonical_constraints(ground::ground(kb, ground::UniverseMode::names(0)));
    for (int k = 1; k <= 3; ++k) {
      auto cur = canonical_constraints(ground::ground(kb, ground::UniverseMode::names(k)));
      EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end())) << f << " k=" << k;
      prev = std::move(cur);
    }
  }
}

// The size bound assumes a pool of at least rank-many generic names.
TEST(Grounder, AtomCountRespectsSizeBound) {
  auto kb = lsos::testing::load_fixture("war.lsos");
  for (int k = kb::kb_rank(kb); k <= 5; ++k) {
    auto mode = ground::UniverseMode::names(k);
    auto b = ground::atom_bound(kb, mode);
    EXPECT_LE(static_cast<double>(ground::count_atoms(kb, mode)), b.value) << "k=" << k;
  }
}

TEST(Grounder, GuardEvaluationNeedsBoundVariables) {
  auto g = kb::Guard::not_equal(kb::Arg::var("x"), kb::Arg::of(kb::Name::constant("a")));
  EXPECT_TRUE(ground::eval_guard(g, {{"x", kb::Name::generic(1)}}));
  EXPECT_FALSE(ground::eval_guard(g, {{"x", kb::Name::constant("a")}}));
  EXPECT_THROW(ground::eval_guard(g, {}), std::invalid_argument);
}
