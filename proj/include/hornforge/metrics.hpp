#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hornforge/kg_store.hpp"
#include "hornforge/rational.hpp"
#include "hornforge/rule.hpp"

namespace hornforge {

/// Which head argument a PCA denominator keeps: `subject` counts firings
/// whose head subject has some known head fact r(x, y'), `object` those whose
/// head object has some r(x', y).
enum class PcaDirection { subject, object };
/// `automatic` picks subject iff functionality >= inverse functionality.
enum class PcaChoice { automatic, subject, object };
enum class DenominatorKind { cwa, pca };

struct EvalOptions {
  /// Distinct variables must bind distinct entities.
  bool object_identity = false;
};

struct RuleMetrics {
  std::int64_t support = 0;
  std::int64_t head_relation_size = 0;
  std::int64_t body_size_cwa = 0;
  std::int64_t body_size_pca = 0;
  PcaDirection pca_direction = PcaDirection::subject;

  Rational head_coverage() const { return ratio_or_zero(support, head_relation_size); }
  Rational std_confidence() const { return ratio_or_zero(support, body_size_cwa); }
  Rational pca_confidence() const { return ratio_or_zero(support, body_size_pca); }

  friend bool operator==(const RuleMetrics&, const RuleMetrics&) = default;
};

struct Confidence {
  Rational value;
  std::int64_t denominator = 0;
  PcaDirection direction = PcaDirection::subject;  // meaningful for PCA only
};

/// Number of distinct head substitutions under which body and head both hold.
/// Defined for any connected rule; the empty body gives the head pattern's
/// fact count. Throws Error("disconnected rule").
std::int64_t support(const KnowledgeGraph& kg, const Rule& rule, const EvalOptions& options = {});

/// support / |head relation|. Throws Error("undefined head coverage") when the
/// head relation has no facts.
Rational head_coverage(const KnowledgeGraph& kg, const Rule& rule, const EvalOptions& options = {});

/// Throws Error("CWA confidence undefined for empty body") for seeds and
/// Error("unsafe rule") when a head variable is missing from the body.
Confidence std_confidence(const KnowledgeGraph& kg, const Rule& rule, const EvalOptions& options = {});
Confidence pca_confidence(const KnowledgeGraph& kg, const Rule& rule, PcaChoice choice,
                          const EvalOptions& options = {});

PcaDirection resolve_pca_direction(const KnowledgeGraph& kg, RelationId head_relation, PcaChoice choice);

/// Exact count of the chosen denominator.
std::int64_t body_size(const KnowledgeGraph& kg, const Rule& rule, DenominatorKind kind,
                       PcaDirection direction = PcaDirection::subject, const EvalOptions& options = {});

struct LazyOutcome {
  bool passed = false;
  /// Exact denominator when passed; the count at which enumeration stopped otherwise.
  std::int64_t denominator = 0;
};

/// Denominator enumeration that gives up as soon as support / count falls
/// below `min_conf`. The pass/fail verdict always equals comparing the eagerly
/// computed confidence with `min_conf`.
LazyOutcome lazy_denominator(const KnowledgeGraph& kg, const Rule& rule, DenominatorKind kind,
                             std::int64_t support, Rational min_conf,
                             PcaDirection direction = PcaDirection::subject, const EvalOptions& options = {});

/// All four measures at once. Requires a safe, connected rule with a body.
RuleMetrics evaluate(const KnowledgeGraph& kg, const Rule& rule, PcaChoice choice = PcaChoice::subject,
                     const EvalOptions& options = {});

/// Whether the rule's body fires with the head bound to `fact`.
bool predicts(const KnowledgeGraph& kg, const Rule& rule, const Triple& fact, const EvalOptions& options = {});

/// Positive (G) and negative (V) ground head facts.
class ExampleSets {
 public:
  /// Sorts and deduplicates both sets; throws Error if they overlap.
  ExampleSets(std::vector<Triple> positives, std::vector<Triple> negatives);

  std::span<const Triple> positives() const noexcept { return positives_; }
  std::span<const Triple> negatives() const noexcept { return negatives_; }

 private:
  std::vector<Triple> positives_;
  std::vector<Triple> negatives_;
};

/// Weight to minimise: alpha * (uncovered positives / |G|) + (1 - alpha) *
/// (covered negatives / |V|). An example is covered when some rule in `rules`
/// predicts it. Throws Error("degenerate example set") if G or V is empty.
Rational rudik_weight(std::span<const Rule> rules, const ExampleSets& examples, const KnowledgeGraph& kg,
                      Rational alpha);

/// w(R + r) - w(R); negative values improve the rule set.
Rational marginal_weight(std::span<const Rule> rules, const Rule& candidate, const ExampleSets& examples,
                         const KnowledgeGraph& kg, Rational alpha);

}  // namespace hornforge
