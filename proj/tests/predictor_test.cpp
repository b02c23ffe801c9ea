#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "hornforge/error.hpp"
#include "hornforge/predictor.hpp"
#include "support/fixture.hpp"
#include "support/oracle.hpp"

using namespace hornforge;
using hftest::kRuleR;
using hftest::rule_of;
using hftest::sample_kg;
using hftest::triple_of;

TEST(Predictor, RunningExamplePredictsMerkelSpeaksGerman) {
  const KnowledgeGraph& kg = sample_kg();
  const auto predictions = apply_rule(kg, rule_of(kg, kRuleR));
  ASSERT_EQ(predictions.size(), 3u);
  std::vector<Triple> novel;
  for (const Prediction& p : predictions) {
    ASSERT_FALSE(p.generating.empty());
    if (!p.in_kg) novel.push_back(p.fact);
  }
  EXPECT_EQ(novel, (std::vector<Triple>{triple_of(kg, "A._Merkel", "speaks", "German")}));
}

TEST(Predictor, PerfectRuleOnlyRepeatsKnownFacts) {
  const KnowledgeGraph& kg = sample_kg();
  const auto predictions = apply_rule(kg, rule_of(kg, "birthCountry(?a, ?b) => nationality(?a, ?b)"));
  EXPECT_EQ(predictions.size(), 3u);
  for (const Prediction& p : predictions) EXPECT_TRUE(p.in_kg);
  EXPECT_TRUE(apply_rule(kg, rule_of(kg, "speaks(?a, ?c) & birthCountry(?c, ?b) => speaks(?a, ?b)")).empty());
  EXPECT_THROW(apply_rule(kg, rule_of(kg, "gender(?a, ?c) => speaks(?a, ?b)")), Error);
}

TEST(Predictor, MergesGeneratingRulesByConfidence) {
  const KnowledgeGraph& kg = sample_kg();
  const std::vector<WeightedRule> rules{
      {rule_of(kg, "nationality(?a, ?c) & officialLang(?c, ?b) => speaks(?a, ?b)"), Rational(2, 3)},
      {rule_of(kg, kRuleR), Rational(1)}};
  for (const Prediction& p : apply_rules(kg, rules)) {
    ASSERT_EQ(p.generating.size(), 2u);
    EXPECT_EQ(p.generating[0], (RuleConfidence{1, Rational(1)}));
    EXPECT_EQ(p.generating[1], (RuleConfidence{0, Rational(2, 3)}));
  }
}

TEST(Predictor, CompletionRanksByConfidenceVectors) {
  const KnowledgeGraph& kg = sample_kg();
  const std::vector<WeightedRule> rules{
      {rule_of(kg, kRuleR), Rational(1)},
      {rule_of(kg, "nationality(?a, ?c) & officialLang(?c, ?b) => speaks(?a, ?b)"), Rational(2, 3)}};
  const auto query = CompletionQuery::parse("speaks(A._Merkel, ?)", kg.vocabulary());
  const auto ranked = complete(kg, rules, query);
  ASSERT_EQ(ranked.size(), 1u);
  EXPECT_EQ(kg.entity_label(ranked[0].entity), "German");
  EXPECT_EQ(ranked[0].confidences, (std::vector<Rational>{Rational(1), Rational(2, 3)}));
}

TEST(Predictor, CompletionBreaksTiesByLabelAndPrefersLongerVectors) {
  const KnowledgeGraph& kg = sample_kg();
  const Rule colleagues = rule_of(kg, "worksFor(?a, ?c) & worksFor(?b, ?c) => speaks(?a, ?b)");
  const auto query = CompletionQuery::parse("speaks(U.v.d._Leyen, ?)", kg.vocabulary());
  const std::vector<WeightedRule> single{{colleagues, Rational(1, 2)}};
  const auto ranked = complete(kg, single, query);
  ASSERT_EQ(ranked.size(), 2u);
  EXPECT_EQ(kg.entity_label(ranked[0].entity), "E._Macron");
  EXPECT_EQ(kg.entity_label(ranked[1].entity), "U.v.d._Leyen");

  // Macron is also derived by a weaker second rule: (1/2, 1/5) beats (1/2).
  const std::vector<WeightedRule> two{
      {colleagues, Rational(1, 2)},
      {rule_of(kg, "worksFor(?a, ?c) & worksFor(?b, ?c) & gender(?b, male) => speaks(?a, ?b)"), Rational(1, 5)}};
  const auto reranked = complete(kg, two, query);
  ASSERT_EQ(reranked.size(), 2u);
  EXPECT_EQ(kg.entity_label(reranked[0].entity), "E._Macron");
  EXPECT_EQ(reranked[0].confidences.size(), 2u);

  const auto reversed = std::vector<WeightedRule>(two.rbegin(), two.rend());
  const auto again = complete(kg, reversed, query);
  ASSERT_EQ(again.size(), reranked.size());
  for (std::size_t i = 0; i < again.size(); ++i) EXPECT_EQ(again[i].entity, reranked[i].entity);
}

TEST(Predictor, CompletionForSubjectsAndMissingRules) {
  const KnowledgeGraph& kg = sample_kg();
  const std::vector<WeightedRule> rules{{rule_of(kg, kRuleR), Rational(1)}};
  const auto who = complete(kg, rules, CompletionQuery::parse("speaks(?, German)", kg.vocabulary()));
  ASSERT_EQ(who.size(), 2u);
  EXPECT_EQ(kg.entity_label(who[0].entity), "A._Merkel");
  EXPECT_TRUE(complete(kg, rules, CompletionQuery::parse("gender(A._Merkel, ?)", kg.vocabulary())).empty());
}

TEST(Predictor, QueryParsing) {
  const Vocabulary v = sample_kg().vocabulary();
  const auto q = CompletionQuery::parse(" speaks( A._Merkel , ? ) ", v);
  EXPECT_TRUE(q.subject.has_value());
  EXPECT_FALSE(q.object.has_value());
  EXPECT_THROW(CompletionQuery::parse("speaks(?, ?)", v), ParseError);
  EXPECT_THROW(CompletionQuery::parse("speaks(A._Merkel, German)", v), ParseError);
  EXPECT_THROW(CompletionQuery::parse("talks(A._Merkel, ?)", v), ParseError);
  EXPECT_THROW(CompletionQuery::parse("speaks A._Merkel", v), ParseError);
}

TEST(Predictor, LocalClosedWorldNegatives) {
  const KnowledgeGraph& kg = sample_kg();
  const auto negatives = generate_negatives(kg, *kg.relation_id("speaks"));
  std::vector<Triple> expected{triple_of(kg, "U.v.d._Leyen", "speaks", "French"),
                               triple_of(kg, "E._Macron", "speaks", "English"),
                               triple_of(kg, "E._Macron", "speaks", "German")};
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(negatives, expected);
  for (const Triple& t : negatives) EXPECT_NE(kg.entity_label(t.subject), "A._Merkel");
  EXPECT_TRUE(generate_negatives(kg, *kg.relation_id("worksFor")).empty());
}

TEST(Predictor, NegativesAreDisjointFromFacts) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const KnowledgeGraph kg = hftest::random_graph(rng, 8, 3, 30);
    for (RelationId r = 0; r < kg.num_relations(); ++r) {
      if (kg.fact_count(r) == 0) {
        EXPECT_THROW(generate_negatives(kg, r), Error);
        continue;
      }
      for (const Triple& t : generate_negatives(kg, r)) {
        ASSERT_FALSE(kg.contains(t));
        ASSERT_FALSE(kg.objects_of(r, t.subject).empty());
      }
    }
  }
}

namespace {

ExampleSets language_examples(const KnowledgeGraph& kg) {
  return ExampleSets({triple_of(kg, "U.v.d._Leyen", "speaks", "German"), triple_of(kg, "E._Macron", "speaks", "French")},
                     {triple_of(kg, "E._Macron", "speaks", "German"), triple_of(kg, "U.v.d._Leyen", "speaks", "French")});
}

}  // namespace

TEST(Predictor, GreedyPicksThePerfectRuleAlone) {
  const KnowledgeGraph& kg = sample_kg();
  const std::vector<Rule> candidates{rule_of(kg, "worksFor(?a, ?c) & worksFor(?b, ?c) => speaks(?a, ?b)"),
                                     rule_of(kg, kRuleR)};
  const auto sel = select_rules_greedy(candidates, language_examples(kg), kg, Rational(1, 2));
  EXPECT_EQ(sel.selected, (std::vector<std::size_t>{1}));
  EXPECT_EQ(sel.weights, (std::vector<Rational>{Rational(1, 2), Rational(0)}));
}

TEST(Predictor, GreedySelectsNothingWithoutImprovement) {
  const KnowledgeGraph& kg = sample_kg();
  const std::vector<Rule> candidates{rule_of(kg, "worksFor(?a, ?c) & worksFor(?b, ?c) => speaks(?a, ?b)")};
  const auto sel = select_rules_greedy(candidates, language_examples(kg), kg, Rational(1, 2));
  EXPECT_TRUE(sel.selected.empty());
  EXPECT_EQ(sel.weights.size(), 1u);
}

TEST(Predictor, GreedyCombinesComplementaryRules) {
  const KnowledgeGraph& kg = sample_kg();
  const std::vector<Rule> candidates{
      rule_of(kg, "birthCountry(?a, France) & officialLang(France, ?b) => speaks(?a, ?b)"),
      rule_of(kg, "birthCountry(?a, Germany) & officialLang(Germany, ?b) => speaks(?a, ?b)")};
  const auto sel = select_rules_greedy(candidates, language_examples(kg), kg, Rational(1));
  EXPECT_EQ(sel.selected.size(), 2u);
  EXPECT_EQ(sel.weights, (std::vector<Rational>{Rational(1), Rational(1, 2), Rational(0)}));
}

TEST(Predictor, InconsistenciesFromNegativeRules) {
  const KnowledgeGraph kg = hftest::graph_from_tsv("p\tgender\tmale\np\tgender\tfemale\nq\tgender\tmale\n");
  const auto parsed = parse_rule_text("gender(?x, male) => !gender(?x, female)", kg.vocabulary());
  const std::vector<NegativeRule> rules{{parsed.rule}};
  const auto found = find_inconsistencies(kg, rules);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].fact, triple_of(kg, "p", "gender", "female"));
  EXPECT_EQ(found[0].evidence, (std::vector<Triple>{triple_of(kg, "p", "gender", "male")}));
  EXPECT_TRUE(find_inconsistencies(kg, std::vector<NegativeRule>{}).empty());

  const KnowledgeGraph& fixture = sample_kg();
  const auto on_fixture = parse_rule_text("gender(?x, male) => !gender(?x, female)", fixture.vocabulary());
  EXPECT_TRUE(find_inconsistencies(fixture, std::vector<NegativeRule>{{on_fixture.rule}}).empty());
}

TEST(Predictor, EveryPredictionIsDerivable) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 200; ++i) {
    const KnowledgeGraph kg = hftest::random_graph(rng, 7, 3, 25);
    const Rule r = hftest::random_safe_rule(rng, kg, 3, true);
    const auto predictions = apply_rule(kg, r);
    std::size_t novel = 0;
    for (const Prediction& p : predictions) {
      ASSERT_TRUE(predicts(kg, r, p.fact));
      ASSERT_EQ(p.in_kg, kg.contains(p.fact));
      novel += !p.in_kg;
    }
    // Predictions in the KG are exactly the supported head substitutions.
    ASSERT_EQ(static_cast<std::int64_t>(predictions.size() - novel), support(kg, r));
    ASSERT_EQ(static_cast<std::int64_t>(predictions.size()), body_size(kg, r, DenominatorKind::cwa))
        << to_string(r, kg.vocabulary()) << "\n" << [&] { std::ostringstream o; write_triples(kg, o); return o.str(); }();
  }
}
