#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "hornforge/kg_store.hpp"
#include "hornforge/rational.hpp"
#include "hornforge/rule.hpp"
#include "hornforge/sparse_bool_matrix.hpp"

namespace hornforge {

/// Boolean entity vector stored as its sorted nonzero coordinates.
class EntityVector {
 public:
  explicit EntityVector(std::size_t dim) : dim_(dim) {}
  static EntityVector one_hot(std::size_t dim, EntityId e);

  std::size_t dim() const noexcept { return dim_; }
  std::span<const EntityId> nonzeros() const noexcept { return nonzeros_; }
  bool contains(EntityId e) const;

  /// Row-vector product v * M, clamped to {0,1}.
  EntityVector operator*(const SparseBoolMatrix& m) const;

  friend bool operator==(const EntityVector&, const EntityVector&) = default;

 private:
  std::size_t dim_;
  std::vector<EntityId> nonzeros_;
};

/// One body atom of a chain, oriented from the head subject towards the head
/// object. `inverse` means the atom is traversed against its direction.
struct ChainStep {
  RelationId relation;
  bool inverse;
};

/// Orders the body of `rule` as a variable chain from the head subject to the
/// head object (q1(x,z1), q2(z1,z2), ..., qn(z_{n-1},y), in any atom order
/// and orientation). Throws UnsupportedRule("matrix oracle requires chain
/// rules") for any other shape, including constants.
std::vector<ChainStep> chain_of(const Rule& rule);

/// Clamped product of the chain's adjacency matrices (transposed for inverse
/// steps); the identity for an empty chain.
SparseBoolMatrix body_product(const KnowledgeGraph& kg, std::span<const ChainStep> chain);
SparseBoolMatrix body_product(const KnowledgeGraph& kg, const Rule& rule);

struct MatrixMeasures {
  std::int64_t support = 0;
  std::int64_t head_size = 0;
  std::int64_t body_size = 0;

  Rational head_coverage() const { return ratio_or_zero(support, head_size); }
  Rational std_confidence() const { return ratio_or_zero(support, body_size); }
};

/// Support = nnz(body product AND head matrix), head coverage over nnz(head),
/// standard confidence over nnz(body product). Closed chain rules only.
MatrixMeasures matrix_measures(const KnowledgeGraph& kg, const Rule& rule);
std::int64_t matrix_support(const KnowledgeGraph& kg, const Rule& rule);
Rational matrix_head_coverage(const KnowledgeGraph& kg, const Rule& rule);

/// Entities y derived for head(x, y) by pushing the one-hot vector of `x`
/// through the chain. Throws Error for an unknown entity.
EntityVector tensorlog_infer(const KnowledgeGraph& kg, const Rule& rule, EntityId x);
EntityVector tensorlog_infer(const KnowledgeGraph& kg, const Rule& rule, std::string_view x_label);

/// Every closed chain rule with 2..max_len atoms over relations
/// [0, num_relations), canonical and sorted; bodies equal to the head are left out.
std::vector<Rule> closed_chain_rules(std::size_t num_relations, std::size_t max_len);

struct WeightedChainRule {
  Rule rule;
  Rational weight;
};

struct ScoredEntity {
  EntityId entity;
  Rational score;

  friend bool operator==(const ScoredEntity&, const ScoredEntity&) = default;
};

/// score(y) = sum of the weights of the rules deriving y from x. Rules must
/// share one head relation. Sorted by descending score, then entity label.
std::vector<ScoredEntity> aggregate_infer(const KnowledgeGraph& kg, std::span<const WeightedChainRule> rules,
                                          EntityId x);

}  // namespace hornforge
