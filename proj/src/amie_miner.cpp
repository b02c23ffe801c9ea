#include "hornforge/amie_miner.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "hornforge/error.hpp"
#include "hornforge/query.hpp"
#include "parallel.hpp"

namespace hornforge {
namespace {

using RuleSet = std::unordered_set<Rule, RuleHash>;

std::vector<RelationId> non_empty_relations(const KnowledgeGraph& kg) {
  std::vector<RelationId> out;
  for (RelationId r = 0; r < kg.num_relations(); ++r) {
    if (kg.fact_count(r) > 0) out.push_back(r);
  }
  return out;
}

bool repeats_existing_atom(const Rule& rule, const Atom& atom) {
  return atom == rule.head || std::find(rule.body.begin(), rule.body.end(), atom) != rule.body.end();
}

// Appends `atom` if the result can still become closed within max_len.
void try_extend(const Rule& rule, const Atom& atom, const MinerConfig& config, RuleSet& out) {
  if (repeats_existing_atom(rule, atom)) return;
  Rule refined = rule;
  refined.body.push_back(atom);
  const std::size_t slots_left = config.max_len - refined.length();
  if (open_variable_count(refined) > 2 * slots_left) return;
  out.insert(canonicalize(refined));
}

std::vector<Rule> sorted(RuleSet set) {
  std::vector<Rule> out(std::make_move_iterator(set.begin()), std::make_move_iterator(set.end()));
  std::sort(out.begin(), out.end());
  return out;
}

bool within_length(const Rule& rule, const MinerConfig& config) { return rule.length() < config.max_len; }

struct LevelOutcome {
  std::optional<MinedRule> output;
  std::optional<Rational> confidence;  // of the output rule
  std::vector<Rule> refinements;
};

class Miner {
 public:
  Miner(const KnowledgeGraph& kg, const MinerConfig& config)
      : kg_(kg), config_(config), options_{config.object_identity} {}

  std::vector<MinedRule> run() {
    struct Candidate {
      Rule rule;
      std::int64_t support;
    };
    std::vector<Candidate> level;
    for (Rule& seed : seed_rules(kg_, config_)) {
      seen_.insert(seed);
      const std::int64_t supp = support(kg_, seed, options_);
      if (passes_head_coverage(seed, supp)) level.push_back({std::move(seed), supp});
    }

    std::vector<MinedRule> outputs;
    while (!level.empty()) {
      std::vector<LevelOutcome> outcomes(level.size());
      detail::parallel_for(level.size(), config_.thread_count, [&](std::size_t i) {
        outcomes[i] = process(level[i].rule, level[i].support);
      });

      std::vector<Rule> fresh;
      for (std::size_t i = 0; i < level.size(); ++i) {
        LevelOutcome& outcome = outcomes[i];
        if (outcome.output) {
          output_confidence_.emplace(outcome.output->rule, *outcome.confidence);
          outputs.push_back(std::move(*outcome.output));
        }
        for (Rule& r : outcome.refinements) {
          if (seen_.insert(r).second) fresh.push_back(std::move(r));
        }
      }
      std::sort(fresh.begin(), fresh.end());

      std::vector<std::int64_t> supports(fresh.size());
      detail::parallel_for(fresh.size(), config_.thread_count,
                           [&](std::size_t i) { supports[i] = support(kg_, fresh[i], options_); });
      level.clear();
      for (std::size_t i = 0; i < fresh.size(); ++i) {
        if (passes_head_coverage(fresh[i], supports[i])) level.push_back({std::move(fresh[i]), supports[i]});
      }
    }
    sort_mined_rules(outputs, kg_, config_.confidence_kind);
    return outputs;
  }

 private:
  bool passes_head_coverage(const Rule& rule, std::int64_t supp) const {
    const auto size = static_cast<std::int64_t>(kg_.fact_count(rule.head.relation));
    return size > 0 && Rational(supp, size) >= config_.min_head_coverage;
  }

  LevelOutcome process(const Rule& rule, std::int64_t supp) const {
    LevelOutcome outcome;
    bool perfect = false;
    if (!rule.body.empty() && is_closed(rule)) {
      const PcaDirection direction = resolve_pca_direction(kg_, rule.head.relation, config_.pca_direction);
      const bool pca = config_.confidence_kind == ConfidenceKind::pca;
      const LazyOutcome lazy =
          lazy_denominator(kg_, rule, pca ? DenominatorKind::pca : DenominatorKind::cwa, supp,
                           pca ? config_.min_pca_confidence : config_.min_std_confidence, direction, options_);
      if (lazy.passed) {
        const Rational conf = ratio_or_zero(supp, lazy.denominator);
        perfect = conf == Rational{1};
        if (!config_.skyline || beats_ancestors(rule, conf)) {
          RuleMetrics m;
          m.support = supp;
          m.head_relation_size = static_cast<std::int64_t>(kg_.fact_count(rule.head.relation));
          m.pca_direction = direction;
          m.body_size_cwa = pca ? body_size(kg_, rule, DenominatorKind::cwa, direction, options_) : lazy.denominator;
          m.body_size_pca = pca ? lazy.denominator : body_size(kg_, rule, DenominatorKind::pca, direction, options_);
          outcome.output = MinedRule{rule, m};
          outcome.confidence = conf;
        }
      }
    }
    if (within_length(rule, config_) && !(perfect && config_.perfect_rule_cut)) {
      for (auto* op : {&refine_dangling, &refine_closing, &refine_instantiated}) {
        auto refined = (*op)(rule, kg_, config_);
        outcome.refinements.insert(outcome.refinements.end(), std::make_move_iterator(refined.begin()),
                                   std::make_move_iterator(refined.end()));
      }
    }
    return outcome;
  }

  // Ancestors are output rules with the same head whose body is a proper,
  // non-empty subset of this body (compared in canonical form).
  bool beats_ancestors(const Rule& rule, const Rational& conf) const {
    const std::size_t n = rule.body.size();
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
      Rule sub;
      sub.head = rule.head;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::uint64_t{1} << i)) sub.body.push_back(rule.body[i]);
      }
      const auto it = output_confidence_.find(canonicalize(sub));
      if (it != output_confidence_.end() && !(conf > it->second)) return false;
    }
    return true;
  }

  const KnowledgeGraph& kg_;
  const MinerConfig& config_;
  EvalOptions options_;
  RuleSet seen_;
  std::unordered_map<Rule, Rational, RuleHash> output_confidence_;
};

}  // namespace

void MinerConfig::validate() const {
  if (max_len < 2) throw Error("max_len must be at least 2");
  for (const Rational& t : {min_head_coverage, min_std_confidence, min_pca_confidence}) {
    if (t <= Rational{} || t > Rational{1}) throw Error("thresholds must lie in (0, 1]");
  }
  if (max_len > 64) throw Error("max_len too large");
}

std::vector<Rule> seed_rules(const KnowledgeGraph& kg, const MinerConfig& config) {
  RuleSet seeds;
  for (RelationId r : non_empty_relations(kg)) {
    seeds.insert(Rule{{}, Atom{r, Term::var(0), Term::var(1)}});
    if (config.enable_instantiation) {
      for (EntityId c : kg.distinct_objects(r)) seeds.insert(Rule{{}, Atom{r, Term::var(0), Term::constant(c)}});
      for (EntityId c : kg.distinct_subjects(r)) seeds.insert(Rule{{}, Atom{r, Term::constant(c), Term::var(0)}});
    }
  }
  return sorted(std::move(seeds));
}

std::vector<Rule> refine_dangling(const Rule& rule, const KnowledgeGraph& kg, const MinerConfig& config) {
  if (!within_length(rule, config)) return {};
  RuleSet out;
  const VariableId fresh = variable_bound(rule);
  for (VariableId v : variables(rule)) {
    for (RelationId r : non_empty_relations(kg)) {
      try_extend(rule, Atom{r, Term::var(v), Term::var(fresh)}, config, out);
      try_extend(rule, Atom{r, Term::var(fresh), Term::var(v)}, config, out);
    }
  }
  return sorted(std::move(out));
}

std::vector<Rule> refine_closing(const Rule& rule, const KnowledgeGraph& kg, const MinerConfig& config) {
  if (!within_length(rule, config)) return {};
  RuleSet out;
  const auto vars = variables(rule);
  for (VariableId u : vars) {
    for (VariableId v : vars) {
      if (u == v) continue;  // no reflexive atoms
      for (RelationId r : non_empty_relations(kg)) try_extend(rule, Atom{r, Term::var(u), Term::var(v)}, config, out);
    }
  }
  return sorted(std::move(out));
}

std::vector<Rule> refine_instantiated(const Rule& rule, const KnowledgeGraph& kg, const MinerConfig& config) {
  if (!config.enable_instantiation || !within_length(rule, config)) return {};
  RuleSet out;
  std::vector<Atom> all = rule.body;
  all.push_back(rule.head);
  const ConjunctiveQuery query(kg, all, config.object_identity);
  for (VariableId v : variables(rule)) {
    Substitution s(variable_bound(rule));
    const std::vector<EntityId> values = query.distinct_values(s, v);
    for (RelationId r : non_empty_relations(kg)) {
      std::vector<EntityId> as_object;
      std::vector<EntityId> as_subject;
      for (EntityId e : values) {
        const auto objs = kg.objects_of(r, e);
        as_object.insert(as_object.end(), objs.begin(), objs.end());
        const auto subs = kg.subjects_of(r, e);
        as_subject.insert(as_subject.end(), subs.begin(), subs.end());
      }
      for (auto* list : {&as_object, &as_subject}) {
        std::sort(list->begin(), list->end());
        list->erase(std::unique(list->begin(), list->end()), list->end());
      }
      for (EntityId c : as_object) try_extend(rule, Atom{r, Term::var(v), Term::constant(c)}, config, out);
      for (EntityId c : as_subject) try_extend(rule, Atom{r, Term::constant(c), Term::var(v)}, config, out);
    }
  }
  return sorted(std::move(out));
}

std::vector<MinedRule> mine(const KnowledgeGraph& kg, const MinerConfig& config) {
  config.validate();
  return Miner(kg, config).run();
}

Rational confidence_of(const RuleMetrics& metrics, ConfidenceKind kind) {
  return kind == ConfidenceKind::pca ? metrics.pca_confidence() : metrics.std_confidence();
}

void sort_mined_rules(std::vector<MinedRule>& rules, const KnowledgeGraph& kg, ConfidenceKind kind) {
  struct Keyed {
    std::string head;
    Rational confidence;
    Rational head_coverage;
    std::string text;
    MinedRule rule;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(rules.size());
  for (MinedRule& r : rules) {
    keyed.push_back({kg.relation_label(r.rule.head.relation), confidence_of(r.metrics, kind),
                     r.metrics.head_coverage(), to_string(r.rule, kg.vocabulary()), std::move(r)});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.head != b.head) return a.head < b.head;
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.head_coverage != b.head_coverage) return a.head_coverage > b.head_coverage;
    return a.text < b.text;
  });
  rules.clear();
  for (Keyed& k : keyed) rules.push_back(std::move(k.rule));
}

}  // namespace hornforge
