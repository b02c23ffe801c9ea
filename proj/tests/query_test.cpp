#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hornforge/query.hpp"
#include "support/fixture.hpp"
#include "support/oracle.hpp"

using namespace hornforge;
using hftest::rule_of;
using hftest::sample_kg;

TEST(Query, MatchAtomBindsFreeVariables) {
  const KnowledgeGraph& kg = sample_kg();
  const Atom speaks{*kg.relation_id("speaks"), Term::var(0), Term::var(1)};
  EXPECT_EQ(match_atom(kg, speaks, Substitution(2)).size(), 3u);

  Substitution leyen(2);
  leyen.bind(0, *kg.entity_id("U.v.d._Leyen"));
  EXPECT_EQ(match_atom(kg, speaks, leyen).size(), 2u);

  const Atom reflexive{*kg.relation_id("speaks"), Term::var(0), Term::var(0)};
  EXPECT_TRUE(match_atom(kg, reflexive, Substitution(1)).empty());
}

TEST(Query, ObjectIdentityBlocksSharedValues) {
  const KnowledgeGraph kg = hftest::graph_from_tsv("a\tr\ta\na\tr\tb\n");
  const Atom atom{0, Term::var(0), Term::var(1)};
  EXPECT_EQ(match_atom(kg, atom, Substitution(2), false).size(), 2u);
  EXPECT_EQ(match_atom(kg, atom, Substitution(2), true).size(), 1u);
}

TEST(Query, DistinctValuesOfChainEndpoint) {
  const KnowledgeGraph& kg = sample_kg();
  const Rule r = rule_of(kg, hftest::kRuleR);
  const ConjunctiveQuery q(kg, r.body);
  Substitution s(3);
  const VariableId x = r.head.subject.id;
  const VariableId y = r.head.object.id;
  const auto speakers = q.distinct_values(s, x);
  EXPECT_EQ(speakers.size(), 3u);  // everyone has a birth country with a language
  s.bind(x, *kg.entity_id("A._Merkel"));
  const auto langs = q.distinct_values(s, y);
  ASSERT_EQ(langs.size(), 1u);
  EXPECT_EQ(kg.entity_label(langs[0]), "German");
  EXPECT_TRUE(q.exists(s));
}

TEST(Query, SolutionCountMatchesBruteForceEnumeration) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    const KnowledgeGraph kg = hftest::random_graph(rng, 6, 3, 15);
    const Rule r = hftest::random_rule(rng, kg, 3);
    const ConjunctiveQuery q(kg, r.body);
    const VariableId n = variable_bound(r);
    std::size_t solutions = 0;
    Substitution s(n);
    q.for_each_solution(s, [&] {
      ++solutions;
      return true;
    });
    // Brute force over the body variables only.
    std::vector<bool> in_body(n, false);
    for (const Atom& a : r.body) {
      if (a.subject.is_variable()) in_body[a.subject.id] = true;
      if (a.object.is_variable()) in_body[a.object.id] = true;
    }
    std::vector<EntityId> sigma(n, 0);
    std::size_t expected = 0;
    const std::size_t ne = kg.num_entities();
    while (true) {
      bool skip = false;
      for (VariableId v = 0; v < n; ++v) skip = skip || (!in_body[v] && sigma[v] != 0);
      bool ok = !skip;
      for (const Atom& a : r.body) {
        if (!ok) break;
        auto val = [&](Term t) { return t.is_variable() ? sigma[t.id] : t.id; };
        ok = kg.contains(val(a.subject), a.relation, val(a.object));
      }
      if (ok) ++expected;
      VariableId v = 0;
      while (v < n && ++sigma[v] == ne) sigma[v++] = 0;
      if (v == n) break;
    }
    ASSERT_EQ(solutions, expected) << "round " << round;
  }
}
