#include "hornforge/matrix_eval.hpp"

#include <algorithm>
#include <iterator>
#include <map>

#include "hornforge/error.hpp"

namespace hornforge {
namespace {

[[noreturn]] void not_a_chain() { throw UnsupportedRule("matrix oracle requires chain rules"); }

}  // namespace

EntityVector EntityVector::one_hot(std::size_t dim, EntityId e) {
  if (e >= dim) throw Error("entity outside vector dimension");
  EntityVector v(dim);
  v.nonzeros_.push_back(e);
  return v;
}

bool EntityVector::contains(EntityId e) const {
  return std::binary_search(nonzeros_.begin(), nonzeros_.end(), e);
}

EntityVector EntityVector::operator*(const SparseBoolMatrix& m) const {
  if (m.dim() != dim_) throw Error("vector/matrix dimension mismatch");
  EntityVector out(dim_);
  for (EntityId i : nonzeros_) {
    const auto row = m.row(i);
    out.nonzeros_.insert(out.nonzeros_.end(), row.begin(), row.end());
  }
  std::sort(out.nonzeros_.begin(), out.nonzeros_.end());
  out.nonzeros_.erase(std::unique(out.nonzeros_.begin(), out.nonzeros_.end()), out.nonzeros_.end());
  return out;
}

std::vector<ChainStep> chain_of(const Rule& rule) {
  const Atom& head = rule.head;
  if (!head.subject.is_variable() || !head.object.is_variable() || head.subject.id == head.object.id) {
    not_a_chain();
  }
  for (const Atom& a : rule.body) {
    if (!a.subject.is_variable() || !a.object.is_variable() || a.subject.id == a.object.id) not_a_chain();
  }
  if (rule.body.empty()) return {};

  std::vector<bool> used(rule.body.size(), false);
  std::vector<ChainStep> chain;
  std::vector<VariableId> visited{head.subject.id};
  VariableId current = head.subject.id;
  while (chain.size() < rule.body.size()) {
    std::size_t found = rule.body.size();
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
      if (!used[i] && rule.body[i].mentions(current)) {
        if (found != rule.body.size()) not_a_chain();  // branching at `current`
        found = i;
      }
    }
    if (found == rule.body.size()) not_a_chain();
    const Atom& a = rule.body[found];
    used[found] = true;
    const bool inverse = a.object.id == current;
    const VariableId next = inverse ? a.subject.id : a.object.id;
    if (std::find(visited.begin(), visited.end(), next) != visited.end()) not_a_chain();
    chain.push_back({a.relation, inverse});
    visited.push_back(next);
    current = next;
    // The head object may only close the chain.
    if (current == head.object.id && chain.size() != rule.body.size()) not_a_chain();
  }
  if (current != head.object.id) not_a_chain();
  return chain;
}

SparseBoolMatrix body_product(const KnowledgeGraph& kg, std::span<const ChainStep> chain) {
  SparseBoolMatrix product = SparseBoolMatrix::identity(kg.num_entities());
  for (const ChainStep& step : chain) {
    const SparseBoolMatrix m = adjacency_matrix(kg, step.relation);
    product = product * (step.inverse ? m.transpose() : m);
  }
  return product;
}

SparseBoolMatrix body_product(const KnowledgeGraph& kg, const Rule& rule) {
  return body_product(kg, chain_of(rule));
}

MatrixMeasures matrix_measures(const KnowledgeGraph& kg, const Rule& rule) {
  const SparseBoolMatrix body = body_product(kg, rule);
  const SparseBoolMatrix head = adjacency_matrix(kg, rule.head.relation);
  MatrixMeasures m;
  m.support = static_cast<std::int64_t>((body & head).nnz());
  m.head_size = static_cast<std::int64_t>(head.nnz());
  m.body_size = static_cast<std::int64_t>(body.nnz());
  return m;
}

std::int64_t matrix_support(const KnowledgeGraph& kg, const Rule& rule) { return matrix_measures(kg, rule).support; }

Rational matrix_head_coverage(const KnowledgeGraph& kg, const Rule& rule) {
  const MatrixMeasures m = matrix_measures(kg, rule);
  if (m.head_size == 0) throw Error("undefined head coverage");
  return m.head_coverage();
}

EntityVector tensorlog_infer(const KnowledgeGraph& kg, const Rule& rule, EntityId x) {
  if (x >= kg.num_entities()) throw Error("unknown entity");
  const auto chain = chain_of(rule);
  EntityVector v = EntityVector::one_hot(kg.num_entities(), x);
  for (const ChainStep& step : chain) {
    const SparseBoolMatrix m = adjacency_matrix(kg, step.relation);
    v = v * (step.inverse ? m.transpose() : m);
  }
  return v;
}

EntityVector tensorlog_infer(const KnowledgeGraph& kg, const Rule& rule, std::string_view x_label) {
  const auto x = kg.entity_id(x_label);
  if (!x) throw Error("unknown entity '" + std::string(x_label) + "'");
  return tensorlog_infer(kg, rule, *x);
}

std::vector<ScoredEntity> aggregate_infer(const KnowledgeGraph& kg, std::span<const WeightedChainRule> rules,
                                          EntityId x) {
  if (rules.empty()) return {};
  for (const auto& r : rules) {
    if (r.rule.head.relation != rules.front().rule.head.relation) throw Error("rules must share a head relation");
  }
  // Deterministic summation order: canonical rule text.
  std::vector<std::pair<std::string, const WeightedChainRule*>> ordered;
  for (const auto& r : rules) ordered.emplace_back(to_string(canonicalize(r.rule), kg.vocabulary()), &r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::map<EntityId, Rational> scores;
  for (const auto& [text, r] : ordered) {
    const EntityVector derived = tensorlog_infer(kg, r->rule, x);
    for (EntityId y : derived.nonzeros()) scores[y] += r->weight;
  }
  std::vector<ScoredEntity> out;
  for (const auto& [e, score] : scores) out.push_back({e, score});
  std::sort(out.begin(), out.end(), [&](const ScoredEntity& a, const ScoredEntity& b) {
    if (a.score != b.score) return a.score > b.score;
    return kg.entity_label(a.entity) < kg.entity_label(b.entity);
  });
  return out;
}

std::vector<Rule> closed_chain_rules(std::size_t num_relations, std::size_t max_len) {
  std::vector<Rule> out;
  const auto R = static_cast<RelationId>(num_relations);
  for (std::size_t n = 1; n + 1 <= max_len; ++n) {
    // Walk positions 0..n; 0 is the head subject (var 0), n the head object (var 1).
    auto var_at = [n](std::size_t pos) { return Term::var(pos == 0 ? 0 : pos == n ? 1 : static_cast<VariableId>(pos + 1)); };
    std::vector<std::size_t> code(n, 0);  // relation * 2 + inverse, per step
    while (true) {
      for (RelationId head = 0; head < R; ++head) {
        Rule rule;
        rule.head = Atom{head, Term::var(0), Term::var(1)};
        for (std::size_t i = 0; i < n; ++i) {
          const auto rel = static_cast<RelationId>(code[i] / 2);
          const bool inverse = code[i] % 2 == 1;
          rule.body.push_back(inverse ? Atom{rel, var_at(i + 1), var_at(i)} : Atom{rel, var_at(i), var_at(i + 1)});
        }
        if (n == 1 && rule.body[0] == rule.head) continue;
        out.push_back(canonicalize(rule));
      }
      std::size_t i = 0;
      while (i < n && ++code[i] == 2 * num_relations) code[i++] = 0;
      if (i == n || num_relations == 0) break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace hornforge
