#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "hornforge/error.hpp"
#include "hornforge/kg_store.hpp"
#include "support/fixture.hpp"

using namespace hornforge;
using hftest::sample_kg;
using hftest::triple_of;

TEST(KgStore, LoadsFixture) {
  const KnowledgeGraph& kg = sample_kg();
  EXPECT_EQ(kg.num_facts(), 15u);
  EXPECT_EQ(kg.num_entities(), 11u);
  EXPECT_EQ(kg.num_relations(), 6u);
  EXPECT_TRUE(kg.contains(triple_of(kg, "E._Macron", "speaks", "French")));
  EXPECT_FALSE(kg.contains(triple_of(kg, "A._Merkel", "speaks", "German")));
}

TEST(KgStore, PatternLookups) {
  const KnowledgeGraph& kg = sample_kg();
  const RelationId speaks = *kg.relation_id("speaks");
  const auto leyen = kg.objects_of(speaks, *kg.entity_id("U.v.d._Leyen"));
  ASSERT_EQ(leyen.size(), 2u);
  EXPECT_TRUE(kg.objects_of(speaks, *kg.entity_id("A._Merkel")).empty());
  const auto germans = kg.subjects_of(*kg.relation_id("nationality"), *kg.entity_id("Germany"));
  EXPECT_EQ(germans.size(), 2u);
  EXPECT_EQ(kg.distinct_subjects(speaks).size(), 2u);
  EXPECT_EQ(kg.distinct_objects(speaks).size(), 3u);
  // Macron: nationality, birthCountry, gender, speaks, worksFor.
  EXPECT_EQ(kg.outgoing(*kg.entity_id("E._Macron")).size(), 5u);
  EXPECT_EQ(kg.incoming(*kg.entity_id("Germany")).size(), 4u);
}

TEST(KgStore, DeduplicatesAndSkipsComments) {
  std::istringstream in("# comment\n\na\tr\tb\na\tr\tb\r\nb\tr\tc\n");
  const KnowledgeGraph kg = load_triples(in);
  EXPECT_EQ(kg.num_facts(), 2u);
}

TEST(KgStore, MalformedLineReportsLineNumber) {
  std::istringstream in("a\tr\tb\nonly\ttwo\n");
  try {
    load_triples(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(KgStore, MissingFileThrows) { EXPECT_THROW(load_triples_file("/nonexistent/kg.tsv"), Error); }

TEST(KgStore, RoundTripsThroughTsv) {
  std::ostringstream out;
  write_triples(sample_kg(), out);
  std::istringstream in(out.str());
  const KnowledgeGraph again = load_triples(in);
  ASSERT_EQ(again.num_facts(), sample_kg().num_facts());
  for (const Triple& t : sample_kg().facts()) {
    EXPECT_TRUE(again.contains(triple_of(again, sample_kg().entity_label(t.subject),
                                         sample_kg().relation_label(t.relation), sample_kg().entity_label(t.object))));
  }
}

TEST(KgStore, FunctionalityOfSpeaks) {
  const KnowledgeGraph& kg = sample_kg();
  const RelationStats s = relation_stats(kg, *kg.relation_id("speaks"));
  EXPECT_EQ(s.functionality, Rational(2, 3));
  EXPECT_EQ(s.inverse_functionality, Rational(1));
}

TEST(KgStore, FunctionalityOfEmptyRelationIsUndefined) {
  auto entities = std::make_shared<Dictionary>();
  auto relations = std::make_shared<Dictionary>();
  entities->intern("a");
  relations->intern("r");
  relations->intern("empty");
  const auto kg = KnowledgeGraph::from_triples(entities, relations, {{0, 0, 0}});
  EXPECT_THROW(relation_stats(kg, 1), Error);
}

namespace {

std::vector<std::string> fact_strings(const KnowledgeGraph& kg) {
  std::vector<std::string> out;
  for (const Triple& t : kg.facts()) {
    out.push_back(kg.entity_label(t.subject) + " " + kg.relation_label(t.relation) + " " + kg.entity_label(t.object));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(KgStore, RelevantSubgraphDropsOnlyMerkelAtLengthThree) {
  const KnowledgeGraph& kg = sample_kg();
  const KnowledgeGraph sub = select_relevant_subgraph(kg, *kg.relation_id("speaks"), 3);
  std::vector<std::string> expected = fact_strings(kg);
  std::erase(expected, "A._Merkel nationality Germany");
  std::erase(expected, "A._Merkel birthCountry Germany");
  EXPECT_EQ(fact_strings(sub), expected);
}

TEST(KgStore, RelevantSubgraphAtLengthTwoKeepsHeadFactsOnly) {
  const KnowledgeGraph& kg = sample_kg();
  const KnowledgeGraph sub = select_relevant_subgraph(kg, *kg.relation_id("speaks"), 2);
  EXPECT_EQ(fact_strings(sub), (std::vector<std::string>{"E._Macron speaks French", "U.v.d._Leyen speaks English",
                                                         "U.v.d._Leyen speaks German"}));
  EXPECT_THROW(select_relevant_subgraph(kg, 0, 1), Error);
}

TEST(KgStore, AdjacencyMatrixMatchesFacts) {
  const KnowledgeGraph& kg = sample_kg();
  const RelationId lang = *kg.relation_id("officialLang");
  const SparseBoolMatrix m = adjacency_matrix(kg, lang);
  EXPECT_EQ(m.dim(), kg.num_entities());
  EXPECT_EQ(m.nnz(), 2u);
  EXPECT_TRUE(m.contains(*kg.entity_id("France"), *kg.entity_id("French")));
}
