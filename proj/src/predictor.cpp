#include "hornforge/predictor.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "hornforge/error.hpp"
#include "hornforge/query.hpp"

namespace hornforge {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

void check_executable(const Rule& rule) {
  if (!is_connected(rule)) throw Error("disconnected rule");
  if (!is_safe(rule)) throw Error("unsafe rule");
}

// Calls on_head(s, o) once per distinct head instantiation whose body fires.
// `bindings` may pre-bind head variables.
void for_each_head(const KnowledgeGraph& kg, const Rule& rule, Substitution& bindings, const EvalOptions& options,
                   const std::function<void(EntityId, EntityId)>& on_head) {
  const ConjunctiveQuery body(kg, rule.body, options.object_identity);
  const auto head_vars = head_variables(rule);
  auto emit = [&] {
    const Atom ground = apply_substitution(rule.head, bindings);
    on_head(ground.subject.id, ground.object.id);
  };
  auto free_vars = head_vars;
  std::erase_if(free_vars, [&](VariableId v) { return bindings.is_bound(v); });
  if (free_vars.empty()) {
    if (body.exists(bindings)) emit();
    return;
  }
  // The enumeration reads its own copy of the bindings; extend a separate one.
  Substitution outer = bindings;
  body.for_each_distinct(outer, free_vars[0], [&](EntityId first) {
    bindings.bind(free_vars[0], first);
    if (free_vars.size() == 1) {
      emit();
    } else {
      Substitution inner = bindings;
      body.for_each_distinct(inner, free_vars[1], [&](EntityId second) {
        bindings.bind(free_vars[1], second);
        emit();
        bindings.unbind(free_vars[1]);
        return true;
      });
    }
    bindings.unbind(free_vars[0]);
    return true;
  });
}

void sort_generating(std::vector<RuleConfidence>& g) {
  std::sort(g.begin(), g.end(), [](const RuleConfidence& a, const RuleConfidence& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.rule_index < b.rule_index;
  });
}

}  // namespace

std::vector<Prediction> apply_rule(const KnowledgeGraph& kg, const Rule& rule, Rational confidence,
                                   const EvalOptions& options) {
  const WeightedRule weighted{rule, confidence};
  return apply_rules(kg, std::span(&weighted, 1), options);
}

std::vector<Prediction> apply_rules(const KnowledgeGraph& kg, std::span<const WeightedRule> rules,
                                    const EvalOptions& options) {
  std::map<Triple, std::vector<RuleConfidence>> by_fact;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Rule& rule = rules[i].rule;
    check_executable(rule);
    Substitution bindings(variable_bound(rule));
    for_each_head(kg, rule, bindings, options, [&](EntityId s, EntityId o) {
      by_fact[Triple{s, rule.head.relation, o}].push_back({i, rules[i].confidence});
    });
  }
  std::vector<Prediction> out;
  out.reserve(by_fact.size());
  for (auto& [fact, generating] : by_fact) {
    sort_generating(generating);
    out.push_back({fact, std::move(generating), kg.contains(fact)});
  }
  return out;
}

CompletionQuery CompletionQuery::parse(std::string_view text, const Vocabulary& vocab) {
  text = trim(text);
  const auto open = text.find('(');
  const auto comma = text.find(',');
  if (open == std::string_view::npos || comma == std::string_view::npos || comma < open || text.back() != ')') {
    throw ParseError(0, "query must look like rel(subject, ?) or rel(?, object)");
  }
  CompletionQuery q;
  const std::string_view rel = trim(text.substr(0, open));
  const auto r = vocab.relations.find(rel);
  if (!r) throw ParseError(0, "unknown relation '" + std::string(rel) + "'");
  q.relation = *r;
  auto term = [&](std::string_view s) -> std::optional<EntityId> {
    s = trim(s);
    if (s == "?") return std::nullopt;
    const auto e = vocab.entities.find(s);
    if (!e) throw ParseError(0, "unknown entity '" + std::string(s) + "'");
    return e;
  };
  q.subject = term(text.substr(open + 1, comma - open - 1));
  q.object = term(text.substr(comma + 1, text.size() - comma - 2));
  if (q.subject.has_value() == q.object.has_value()) {
    throw ParseError(0, "query needs exactly one '?'");
  }
  return q;
}

std::vector<Candidate> complete(const KnowledgeGraph& kg, std::span<const WeightedRule> rules,
                                const CompletionQuery& query, const EvalOptions& options) {
  const bool ask_object = query.subject.has_value();
  const EntityId given = ask_object ? *query.subject : *query.object;
  std::map<EntityId, std::vector<Rational>> found;
  for (const WeightedRule& wr : rules) {
    const Rule& rule = wr.rule;
    if (rule.head.relation != query.relation) continue;
    check_executable(rule);
    const Term fixed = ask_object ? rule.head.subject : rule.head.object;
    Substitution bindings(variable_bound(rule));
    if (fixed.is_constant()) {
      if (fixed.id != given) continue;
    } else {
      bindings.bind(fixed.id, given);
    }
    std::vector<EntityId> hits;
    for_each_head(kg, rule, bindings, options, [&](EntityId s, EntityId o) { hits.push_back(ask_object ? o : s); });
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    for (EntityId e : hits) found[e].push_back(wr.confidence);
  }

  std::vector<Candidate> out;
  for (auto& [e, confs] : found) {
    std::sort(confs.begin(), confs.end(), std::greater<>());
    out.push_back({e, std::move(confs)});
  }
  std::sort(out.begin(), out.end(), [&](const Candidate& a, const Candidate& b) {
    const std::size_t n = std::min(a.confidences.size(), b.confidences.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (a.confidences[i] != b.confidences[i]) return a.confidences[i] > b.confidences[i];
    }
    if (a.confidences.size() != b.confidences.size()) return a.confidences.size() > b.confidences.size();
    return kg.entity_label(a.entity) < kg.entity_label(b.entity);
  });
  return out;
}

std::vector<Triple> generate_negatives(const KnowledgeGraph& kg, RelationId r) {
  if (kg.fact_count(r) == 0) throw Error("empty relation");
  std::vector<Triple> out;
  const auto objects = kg.distinct_objects(r);
  for (EntityId s : kg.distinct_subjects(r)) {
    for (EntityId o : objects) {
      if (!kg.contains(s, r, o)) out.push_back({s, r, o});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

GreedySelection select_rules_greedy(std::span<const Rule> candidates, const ExampleSets& examples,
                                    const KnowledgeGraph& kg, Rational alpha) {
  std::vector<std::string> texts;
  texts.reserve(candidates.size());
  for (const Rule& r : candidates) texts.push_back(to_string(canonicalize(r), kg.vocabulary()));

  GreedySelection result;
  std::vector<Rule> chosen;
  std::vector<bool> taken(candidates.size(), false);
  result.weights.push_back(rudik_weight(chosen, examples, kg, alpha));
  while (true) {
    std::optional<std::size_t> best;
    Rational best_marginal;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (taken[i]) continue;
      const Rational m = marginal_weight(chosen, candidates[i], examples, kg, alpha);
      if (!best || m < best_marginal || (m == best_marginal && texts[i] < texts[*best])) {
        best = i;
        best_marginal = m;
      }
    }
    if (!best || best_marginal >= Rational{}) break;
    taken[*best] = true;
    chosen.push_back(candidates[*best]);
    result.selected.push_back(*best);
    result.weights.push_back(result.weights.back() + best_marginal);
  }
  return result;
}

std::vector<Inconsistency> find_inconsistencies(const KnowledgeGraph& kg, std::span<const NegativeRule> rules,
                                                const EvalOptions& options) {
  std::vector<Inconsistency> out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Rule& rule = rules[i].rule;
    if (!is_connected(rule)) throw Error("disconnected rule");
    const ConjunctiveQuery body(kg, rule.body, options.object_identity);
    Substitution bindings(variable_bound(rule));
    for_each_match(kg, rule.head, bindings, options.object_identity, [&] {
      body.for_each_solution(bindings, [&] {
        const Atom fact = apply_substitution(rule.head, bindings);
        Inconsistency inc{{fact.subject.id, fact.relation, fact.object.id}, i, {}};
        for (const Atom& a : apply_substitution(rule.body, bindings)) {
          inc.evidence.push_back({a.subject.id, a.relation, a.object.id});
        }
        out.push_back(std::move(inc));
        return false;  // one witness is enough
      });
      return true;
    });
  }
  std::sort(out.begin(), out.end(), [](const Inconsistency& a, const Inconsistency& b) {
    return std::tie(a.fact, a.rule_index) < std::tie(b.fact, b.rule_index);
  });
  return out;
}

}  // namespace hornforge
