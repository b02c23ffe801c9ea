#include "hornforge/metrics.hpp"

#include <algorithm>
#include <iterator>

#include "hornforge/error.hpp"
#include "hornforge/query.hpp"

namespace hornforge {
namespace {

void require_connected(const Rule& rule) {
  if (!is_connected(rule)) throw Error("disconnected rule");
}

void require_confidence_shape(const Rule& rule) {
  if (rule.body.empty()) throw Error("CWA confidence undefined for empty body");
  require_connected(rule);
  if (!is_safe(rule)) throw Error("unsafe rule");
}

// Counts distinct head substitutions whose body fires (and, for PCA, whose
// kept head argument has a known head fact). `keep_going` sees the running
// count after every increment; returning false stops the enumeration.
// Returns {count, stopped}.
std::pair<std::int64_t, bool> count_body(const KnowledgeGraph& kg, const Rule& rule, DenominatorKind kind,
                                         PcaDirection direction, const EvalOptions& options,
                                         const std::function<bool(std::int64_t)>& keep_going) {
  require_confidence_shape(rule);
  const Atom& head = rule.head;
  const auto head_vars = head_variables(rule);
  const VariableId num_vars = variable_bound(rule);
  const ConjunctiveQuery body(kg, rule.body, options.object_identity);

  auto has_head_fact = [&](const Substitution& s) {
    if (kind == DenominatorKind::cwa) return true;
    const Term kept = direction == PcaDirection::subject ? head.subject : head.object;
    const EntityId value = kept.is_constant() ? kept.id : s.at(kept.id);
    return direction == PcaDirection::subject ? !kg.objects_of(head.relation, value).empty()
                                              : !kg.subjects_of(head.relation, value).empty();
  };

  std::int64_t count = 0;
  bool stopped = false;
  auto tally = [&](const Substitution& s) {
    if (!has_head_fact(s)) return true;
    ++count;
    if (!keep_going(count)) stopped = true;
    return !stopped;
  };

  Substitution outer(num_vars);
  if (head_vars.size() == 1) {
    body.for_each_distinct(outer, head_vars[0], [&](EntityId value) {
      Substitution s(num_vars);
      s.bind(head_vars[0], value);
      return tally(s);
    });
    return {count, stopped};
  }

  // Two head variables: enumerate the first, then the second given the first.
  // Filtering the subject early avoids enumerating objects for PCA misses.
  const VariableId first = head_vars[0];
  const VariableId second = head_vars[1];
  body.for_each_distinct(outer, first, [&](EntityId x) {
    Substitution inner(num_vars);
    inner.bind(first, x);
    if (kind == DenominatorKind::pca && direction == PcaDirection::subject && head.subject.is_variable() &&
        head.subject.id == first && kg.objects_of(head.relation, x).empty()) {
      return true;
    }
    Substitution probe(num_vars);
    probe.bind(first, x);
    return body.for_each_distinct(inner, second, [&](EntityId y) {
      probe.bind(second, y);
      const bool more = tally(probe);
      probe.unbind(second);
      return more;
    });
  });
  return {count, stopped};
}

}  // namespace

std::int64_t support(const KnowledgeGraph& kg, const Rule& rule, const EvalOptions& options) {
  require_connected(rule);
  const ConjunctiveQuery body(kg, rule.body, options.object_identity);
  Substitution s(variable_bound(rule));
  std::int64_t count = 0;
  // Each matching head fact is one distinct head substitution.
  for_each_match(kg, rule.head, s, options.object_identity, [&] {
    if (body.exists(s)) ++count;
    return true;
  });
  return count;
}

Rational head_coverage(const KnowledgeGraph& kg, const Rule& rule, const EvalOptions& options) {
  const auto size = static_cast<std::int64_t>(kg.fact_count(rule.head.relation));
  if (size == 0) throw Error("undefined head coverage");
  return Rational(support(kg, rule, options), size);
}

PcaDirection resolve_pca_direction(const KnowledgeGraph& kg, RelationId head_relation, PcaChoice choice) {
  switch (choice) {
    case PcaChoice::subject:
      return PcaDirection::subject;
    case PcaChoice::object:
      return PcaDirection::object;
    case PcaChoice::automatic:
      break;
  }
  if (kg.fact_count(head_relation) == 0) return PcaDirection::subject;
  const RelationStats stats = relation_stats(kg, head_relation);
  return stats.functionality >= stats.inverse_functionality ? PcaDirection::subject : PcaDirection::object;
}

std::int64_t body_size(const KnowledgeGraph& kg, const Rule& rule, DenominatorKind kind, PcaDirection direction,
                       const EvalOptions& options) {
  return count_body(kg, rule, kind, direction, options, [](std::int64_t) { return true; }).first;
}

Confidence std_confidence(const KnowledgeGraph& kg, const Rule& rule, const EvalOptions& options) {
  const std::int64_t den = body_size(kg, rule, DenominatorKind::cwa, PcaDirection::subject, options);
  return {ratio_or_zero(support(kg, rule, options), den), den, PcaDirection::subject};
}

Confidence pca_confidence(const KnowledgeGraph& kg, const Rule& rule, PcaChoice choice, const EvalOptions& options) {
  require_confidence_shape(rule);
  const PcaDirection direction = resolve_pca_direction(kg, rule.head.relation, choice);
  const std::int64_t den = body_size(kg, rule, DenominatorKind::pca, direction, options);
  return {ratio_or_zero(support(kg, rule, options), den), den, direction};
}

LazyOutcome lazy_denominator(const KnowledgeGraph& kg, const Rule& rule, DenominatorKind kind, std::int64_t support,
                             Rational min_conf, PcaDirection direction, const EvalOptions& options) {
  if (min_conf <= Rational{} || min_conf > Rational{1}) throw Error("min_conf must lie in (0, 1]");
  // support / count < num / den  <=>  support * den < num * count
  const __int128 lhs = static_cast<__int128>(support) * min_conf.den();
  const auto [count, stopped] = count_body(kg, rule, kind, direction, options, [&](std::int64_t n) {
    return !(lhs < static_cast<__int128>(min_conf.num()) * n);
  });
  if (stopped) return {false, count};
  return {ratio_or_zero(support, count) >= min_conf, count};
}

RuleMetrics evaluate(const KnowledgeGraph& kg, const Rule& rule, PcaChoice choice, const EvalOptions& options) {
  require_confidence_shape(rule);
  RuleMetrics m;
  m.support = support(kg, rule, options);
  m.head_relation_size = static_cast<std::int64_t>(kg.fact_count(rule.head.relation));
  m.pca_direction = resolve_pca_direction(kg, rule.head.relation, choice);
  m.body_size_cwa = body_size(kg, rule, DenominatorKind::cwa, m.pca_direction, options);
  m.body_size_pca = body_size(kg, rule, DenominatorKind::pca, m.pca_direction, options);
  return m;
}

bool predicts(const KnowledgeGraph& kg, const Rule& rule, const Triple& fact, const EvalOptions& options) {
  if (rule.head.relation != fact.relation) return false;
  Substitution s(variable_bound(rule));
  bool consistent = true;
  auto bind = [&](Term t, EntityId e) {
    if (t.is_constant()) {
      consistent = consistent && t.id == e;
    } else if (auto current = s.get(t.id)) {
      consistent = consistent && *current == e;
    } else {
      if (options.object_identity && s.maps_to(e, t.id)) consistent = false;
      s.bind(t.id, e);
    }
  };
  bind(rule.head.subject, fact.subject);
  bind(rule.head.object, fact.object);
  if (!consistent) return false;
  return ConjunctiveQuery(kg, rule.body, options.object_identity).exists(s);
}

ExampleSets::ExampleSets(std::vector<Triple> positives, std::vector<Triple> negatives)
    : positives_(std::move(positives)), negatives_(std::move(negatives)) {
  for (auto* set : {&positives_, &negatives_}) {
    std::sort(set->begin(), set->end());
    set->erase(std::unique(set->begin(), set->end()), set->end());
  }
  std::vector<Triple> overlap;
  std::set_intersection(positives_.begin(), positives_.end(), negatives_.begin(), negatives_.end(),
                        std::back_inserter(overlap));
  if (!overlap.empty()) throw Error("positive and negative examples overlap");
}

Rational rudik_weight(std::span<const Rule> rules, const ExampleSets& examples, const KnowledgeGraph& kg,
                      Rational alpha) {
  if (examples.positives().empty() || examples.negatives().empty()) throw Error("degenerate example set");
  if (alpha < Rational{} || alpha > Rational{1}) throw Error("alpha must lie in [0, 1]");
  auto covered = [&](const Triple& fact) {
    return std::any_of(rules.begin(), rules.end(), [&](const Rule& r) { return predicts(kg, r, fact); });
  };
  const auto uncovered_pos = std::count_if(examples.positives().begin(), examples.positives().end(),
                                           [&](const Triple& t) { return !covered(t); });
  const auto covered_neg = std::count_if(examples.negatives().begin(), examples.negatives().end(), covered);
  const auto g = static_cast<std::int64_t>(examples.positives().size());
  const auto v = static_cast<std::int64_t>(examples.negatives().size());
  return alpha * Rational(uncovered_pos, g) + (Rational{1} - alpha) * Rational(covered_neg, v);
}

Rational marginal_weight(std::span<const Rule> rules, const Rule& candidate, const ExampleSets& examples,
                         const KnowledgeGraph& kg, Rational alpha) {
  std::vector<Rule> extended(rules.begin(), rules.end());
  extended.push_back(candidate);
  return rudik_weight(extended, examples, kg, alpha) - rudik_weight(rules, examples, kg, alpha);
}

}  // namespace hornforge
