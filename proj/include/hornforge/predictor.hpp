#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hornforge/kg_store.hpp"
#include "hornforge/metrics.hpp"
#include "hornforge/rational.hpp"
#include "hornforge/rule.hpp"

namespace hornforge {

struct WeightedRule {
  Rule rule;
  Rational confidence;
};

struct RuleConfidence {
  std::size_t rule_index;
  Rational confidence;

  friend bool operator==(const RuleConfidence&, const RuleConfidence&) = default;
};

struct Prediction {
  Triple fact;
  /// Rules that fire for the fact, by descending confidence (then index).
  std::vector<RuleConfidence> generating;
  bool in_kg = false;
};

/// Every head instantiation whose body fires, sorted by fact. Throws
/// Error("unsafe rule") / Error("disconnected rule").
std::vector<Prediction> apply_rule(const KnowledgeGraph& kg, const Rule& rule, Rational confidence = Rational{1},
                                   const EvalOptions& options = {});
/// Predictions of several rules merged per fact.
std::vector<Prediction> apply_rules(const KnowledgeGraph& kg, std::span<const WeightedRule> rules,
                                    const EvalOptions& options = {});

/// `r(h, ?)` or `r(?, t)`.
struct CompletionQuery {
  RelationId relation = 0;
  std::optional<EntityId> subject;
  std::optional<EntityId> object;

  /// Throws ParseError on bad syntax or unknown labels.
  static CompletionQuery parse(std::string_view text, const Vocabulary& vocab);
};

struct Candidate {
  EntityId entity;
  /// Confidences of the rules deriving the candidate, descending.
  std::vector<Rational> confidences;
};

/// Candidates ranked by their confidence vectors compared lexicographically
/// (a longer vector beats its own prefix), then by entity label.
std::vector<Candidate> complete(const KnowledgeGraph& kg, std::span<const WeightedRule> rules,
                                const CompletionQuery& query, const EvalOptions& options = {});

/// Local-closed-world negatives of r: r(s, o) for every subject s of r and
/// every object o of r with r(s, o) absent. Sorted. Throws for an empty r.
std::vector<Triple> generate_negatives(const KnowledgeGraph& kg, RelationId r);

struct GreedySelection {
  std::vector<std::size_t> selected;  // candidate indexes in selection order
  /// weights[0] is the weight of the empty set, weights[k] after k picks.
  std::vector<Rational> weights;
};

/// Adds the candidate with the most negative marginal weight until none is
/// below 0. Ties go to the smaller canonical rule text.
GreedySelection select_rules_greedy(std::span<const Rule> candidates, const ExampleSets& examples,
                                    const KnowledgeGraph& kg, Rational alpha);

/// Rule whose head is negated: body => !head.
struct NegativeRule {
  Rule rule;
};

struct Inconsistency {
  Triple fact;
  std::size_t rule_index;
  std::vector<Triple> evidence;  // body facts of one witness
};

/// Existing facts contradicted by a firing negative rule, sorted by fact then rule.
std::vector<Inconsistency> find_inconsistencies(const KnowledgeGraph& kg, std::span<const NegativeRule> rules,
                                                const EvalOptions& options = {});

}  // namespace hornforge
