#pragma once

#include <cstddef>
#include <vector>

#include "hornforge/kg_store.hpp"
#include "hornforge/metrics.hpp"
#include "hornforge/rational.hpp"
#include "hornforge/rule.hpp"

namespace hornforge {

enum class ConfidenceKind { standard, pca };

struct MinerConfig {
  std::size_t max_len = 3;  // atoms, head included
  Rational min_head_coverage{1, 100};
  Rational min_std_confidence{1, 10};
  Rational min_pca_confidence{1, 10};
  bool enable_instantiation = false;
  /// Confidence used for the output threshold, the skyline and the
  /// perfect-rule cut.
  ConfidenceKind confidence_kind = ConfidenceKind::pca;
  PcaChoice pca_direction = PcaChoice::subject;
  bool object_identity = false;
  /// Output a refined rule only if it beats every output ancestor.
  bool skyline = true;
  /// Stop refining closed rules whose confidence is already 1.
  bool perfect_rule_cut = true;
  std::size_t thread_count = 1;

  /// Throws hornforge::Error on max_len < 2 or a threshold outside (0, 1].
  void validate() const;
};

struct MinedRule {
  Rule rule;
  RuleMetrics metrics;
};

/// `=> r(?a, ?b)` for every non-empty relation, plus `=> r(?a, C)` and
/// `=> r(C, ?a)` for every constant C of r when instantiation is enabled.
/// Results are canonical and sorted.
std::vector<Rule> seed_rules(const KnowledgeGraph& kg, const MinerConfig& config);

// The refinement operators append one atom and return canonical, distinct,
// sorted rules. Refinements that could no longer be closed within max_len
// (more open variables than twice the remaining atom slots) are dropped, as
// are body atoms that repeat the head or an existing body atom.

/// New atom joins an existing variable with a fresh one.
std::vector<Rule> refine_dangling(const Rule& rule, const KnowledgeGraph& kg, const MinerConfig& config);
/// New atom over two distinct existing variables.
std::vector<Rule> refine_closing(const Rule& rule, const KnowledgeGraph& kg, const MinerConfig& config);
/// New atom with one existing variable and one constant; only constants that
/// keep the support positive are proposed. Empty when instantiation is off.
std::vector<Rule> refine_instantiated(const Rule& rule, const KnowledgeGraph& kg, const MinerConfig& config);

/// Level-by-level top-down search from the seeds. A rule is refined while
/// its head coverage reaches the threshold and it is shorter than max_len; it
/// is output when closed, above the confidence threshold and (with skyline)
/// strictly more confident than every output rule whose body is a proper
/// subset of its own. Output is sorted by head relation label, descending
/// confidence, descending head coverage and rule text, and does not depend on
/// thread_count.
std::vector<MinedRule> mine(const KnowledgeGraph& kg, const MinerConfig& config);

/// Confidence of `metrics` for the given kind.
Rational confidence_of(const RuleMetrics& metrics, ConfidenceKind kind);

/// Sorts in the order documented for mine().
void sort_mined_rules(std::vector<MinedRule>& rules, const KnowledgeGraph& kg, ConfidenceKind kind);

}  // namespace hornforge
