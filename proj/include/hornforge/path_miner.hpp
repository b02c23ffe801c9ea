#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <unordered_set>
#include <vector>

#include "hornforge/amie_miner.hpp"
#include "hornforge/kg_store.hpp"
#include "hornforge/metrics.hpp"
#include "hornforge/rule.hpp"

namespace hornforge {

enum class PathShape { cyclic, acyclic };

struct PathProfile {
  std::size_t length = 1;  // body edges, anchor excluded
  PathShape shape = PathShape::cyclic;

  friend auto operator<=>(const PathProfile&, const PathProfile&) = default;
};

/// A fact walked in one direction.
struct Traversal {
  Triple fact;
  bool forward = true;  // subject -> object

  EntityId from() const { return forward ? fact.subject : fact.object; }
  EntityId to() const { return forward ? fact.object : fact.subject; }

  friend bool operator==(const Traversal&, const Traversal&) = default;
};

/// traversals[0] is the anchor (the head witness), walked from the endpoint
/// the walk does not start at into the walk's start; the rest is the walk.
struct GroundPath {
  std::vector<Traversal> traversals;

  const Traversal& anchor() const { return traversals.front(); }
  std::size_t length() const { return traversals.size() - 1; }
  /// The walk ends where the anchor started.
  bool cyclic() const { return traversals.size() > 1 && traversals.back().to() == anchor().from(); }
  PathProfile profile() const { return {length(), cyclic() ? PathShape::cyclic : PathShape::acyclic}; }
};

/// Uniform anchor fact, then uniformly chosen unused incident facts. Returns
/// nullopt when the walk gets stuck, the shape does not match, or (with
/// object identity) an entity would repeat. Throws Error("empty graph").
std::optional<GroundPath> sample_path(const KnowledgeGraph& kg, const PathProfile& profile, std::mt19937_64& rng,
                                      bool object_identity = false);
/// Same with a fixed anchor fact.
std::optional<GroundPath> sample_path_from(const KnowledgeGraph& kg, const PathProfile& profile, const Triple& anchor,
                                           std::mt19937_64& rng, bool object_identity = false);

/// Anchor becomes the head, the walk the body. Cyclic paths give the closed
/// rule; acyclic ones keep the anchor endpoint off the walk as a constant
/// and give two rules: walk end constant, and walk end dangling. Canonical.
std::vector<Rule> generalize(const GroundPath& path);

/// Share of `round_rules` already in `known`; 1.0 for an empty round.
double saturation(const std::vector<Rule>& round_rules, const std::unordered_set<Rule, RuleHash>& known);

struct AnytimeConfig {
  std::size_t rounds = 10;
  /// Paths sampled per round. Ignored when round_ms > 0.
  std::size_t round_samples = 2000;
  /// Wall-clock budget per round; 0 selects the deterministic sample budget.
  std::int64_t round_ms = 0;
  Rational min_confidence{1, 10};
  std::int64_t min_support = 2;
  std::uint64_t seed = 42;
  double saturation_threshold = 0.9;
  std::size_t max_length = 3;
  /// Initial effort weights; profiles not listed start at 1.
  std::map<PathProfile, double> profile_weights;
  ConfidenceKind confidence_kind = ConfidenceKind::standard;
  PcaChoice pca_direction = PcaChoice::subject;
  bool object_identity = false;
  std::size_t thread_count = 1;

  void validate() const;
};

struct AnytimeState {
  std::size_t round = 0;  // rounds completed
  std::size_t current_length = 1;
  std::map<PathProfile, double> weights;
  std::map<Rule, RuleMetrics> stored;
  double last_saturation = 0.0;
};

/// Rounds of sample -> generalize -> score -> store. Effort weights move
/// towards each profile's rate of newly stored rules; saturation unlocks the
/// next path length. With round_ms == 0 the stored set depends only on
/// (kg, config minus thread_count). `on_round` sees the state after each round.
std::vector<MinedRule> mine_anytime(const KnowledgeGraph& kg, const AnytimeConfig& config,
                                    const std::function<void(const AnytimeState&)>& on_round = {});

}  // namespace hornforge
