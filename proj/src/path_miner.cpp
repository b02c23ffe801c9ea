#include "hornforge/path_miner.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

#include "hornforge/error.hpp"
#include "parallel.hpp"

namespace hornforge {
namespace {

constexpr std::size_t kChunk = 64;
constexpr double kEma = 0.5;
constexpr double kWeightFloor = 1e-3;

std::vector<Traversal> incident(const KnowledgeGraph& kg, EntityId e) {
  std::vector<Traversal> out;
  for (const Edge& edge : kg.outgoing(e)) out.push_back({{e, edge.relation, edge.other}, true});
  for (const Edge& edge : kg.incoming(e)) {
    if (edge.other == e) continue;  // self-loop, already listed as outgoing
    out.push_back({{edge.other, edge.relation, e}, false});
  }
  return out;
}

}  // namespace

std::optional<GroundPath> sample_path_from(const KnowledgeGraph& kg, const PathProfile& profile, const Triple& anchor,
                                           std::mt19937_64& rng, bool object_identity) {
  if (profile.length == 0) throw Error("path length must be at least 1");
  if (anchor.subject == anchor.object) return std::nullopt;
  const bool cyclic = profile.shape == PathShape::cyclic;
  // Cyclic walks run subject -> object; acyclic ones start at either end.
  const bool start_at_subject = cyclic || std::bernoulli_distribution(0.5)(rng);
  GroundPath path;
  path.traversals.push_back({anchor, !start_at_subject});
  const EntityId home = path.anchor().from();

  std::vector<EntityId> visited{anchor.subject, anchor.object};
  EntityId current = path.anchor().to();
  for (std::size_t step = 1; step <= profile.length; ++step) {
    std::vector<Traversal> options = incident(kg, current);
    std::erase_if(options, [&](const Traversal& t) {
      return std::any_of(path.traversals.begin(), path.traversals.end(),
                         [&](const Traversal& used) { return used.fact == t.fact; });
    });
    if (options.empty()) return std::nullopt;
    const Traversal next = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    const bool last = step == profile.length;
    const bool closes = next.to() == home;
    if (object_identity && std::find(visited.begin(), visited.end(), next.to()) != visited.end() &&
        !(last && cyclic && closes)) {
      return std::nullopt;
    }
    visited.push_back(next.to());
    path.traversals.push_back(next);
    current = next.to();
  }
  if (path.cyclic() != cyclic) return std::nullopt;
  return path;
}

std::optional<GroundPath> sample_path(const KnowledgeGraph& kg, const PathProfile& profile, std::mt19937_64& rng,
                                      bool object_identity) {
  if (kg.num_facts() == 0) throw Error("empty graph");
  const auto facts = kg.facts();
  const Triple anchor = facts[std::uniform_int_distribution<std::size_t>(0, facts.size() - 1)(rng)];
  return sample_path_from(kg, profile, anchor, rng, object_identity);
}

std::vector<Rule> generalize(const GroundPath& path) {
  const std::size_t n = path.length();
  const Traversal& anchor = path.anchor();
  // Walk position i (0 = walk start, n = walk end) -> term. Every position
  // gets its own variable, so the path itself is always a witness.
  std::vector<std::optional<Term>> terms(n + 1);
  terms[0] = Term::var(0);
  VariableId next_var = 1;
  for (std::size_t i = 1; i < n; ++i) terms[i] = Term::var(next_var++);

  auto build = [&](Term end_term, Term home_term) {
    terms[n] = end_term;
    Rule rule;
    const Term start_term = *terms[0];
    rule.head = anchor.forward ? Atom{anchor.fact.relation, home_term, start_term}
                               : Atom{anchor.fact.relation, start_term, home_term};
    for (std::size_t i = 1; i <= n; ++i) {
      const Traversal& t = path.traversals[i];
      const Term from = *terms[i - 1];
      const Term to = *terms[i];
      rule.body.push_back(t.forward ? Atom{t.fact.relation, from, to} : Atom{t.fact.relation, to, from});
    }
    return canonicalize(rule);
  };

  std::vector<Rule> out;
  if (path.cyclic()) {
    const Term home = Term::var(next_var);
    out.push_back(build(home, home));
  } else {
    const Term home = Term::constant(anchor.from());
    out.push_back(build(Term::constant(path.traversals.back().to()), home));
    out.push_back(build(Term::var(next_var), home));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double saturation(const std::vector<Rule>& round_rules, const std::unordered_set<Rule, RuleHash>& known) {
  if (round_rules.empty()) return 1.0;
  const auto hits = std::count_if(round_rules.begin(), round_rules.end(),
                                  [&](const Rule& r) { return known.contains(r); });
  return static_cast<double>(hits) / static_cast<double>(round_rules.size());
}

void AnytimeConfig::validate() const {
  if (max_length == 0) throw Error("max path length must be at least 1");
  if (min_confidence < Rational{} || min_confidence > Rational{1}) throw Error("min confidence must lie in [0, 1]");
  if (min_support < 1) throw Error("min support must be at least 1");
  if (!(saturation_threshold >= 0.0 && saturation_threshold <= 1.0)) throw Error("saturation threshold must lie in [0, 1]");
  for (const auto& [profile, weight] : profile_weights) {
    if (profile.length == 0) throw Error("path length must be at least 1");
    if (!(weight >= 0.0)) throw Error("profile weights must be non-negative");
  }
}

namespace {

struct Sampled {
  Rule rule;
  PathProfile profile;
};

class AnytimeMiner {
 public:
  AnytimeMiner(const KnowledgeGraph& kg, const AnytimeConfig& config) : kg_(kg), config_(config) {
    state_.current_length = 1;
    unlock(1);
  }

  std::vector<MinedRule> run(const std::function<void(const AnytimeState&)>& on_round) {
    for (std::size_t round = 0; round < config_.rounds; ++round) {
      run_round(round);
      state_.round = round + 1;
      if (on_round) on_round(state_);
    }
    std::vector<MinedRule> out;
    out.reserve(state_.stored.size());
    for (const auto& [rule, metrics] : state_.stored) out.push_back({rule, metrics});
    sort_mined_rules(out, kg_, config_.confidence_kind);
    return out;
  }

 private:
  void unlock(std::size_t length) {
    for (PathShape shape : {PathShape::cyclic, PathShape::acyclic}) {
      const PathProfile p{length, shape};
      const auto it = config_.profile_weights.find(p);
      state_.weights.emplace(p, it == config_.profile_weights.end() ? 1.0 : it->second);
    }
  }

  std::vector<Sampled> sample_chunk(std::size_t round, std::size_t chunk, std::size_t count,
                                    const std::vector<PathProfile>& profiles,
                                    const std::vector<double>& weights) const {
    std::seed_seq seq{static_cast<std::uint32_t>(config_.seed), static_cast<std::uint32_t>(config_.seed >> 32),
                      static_cast<std::uint32_t>(round), static_cast<std::uint32_t>(chunk)};
    std::mt19937_64 rng(seq);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::vector<Sampled> out;
    for (std::size_t i = 0; i < count; ++i) {
      const PathProfile& profile = profiles[pick(rng)];
      const auto path = sample_path(kg_, profile, rng, config_.object_identity);
      if (!path) continue;
      for (Rule& r : generalize(*path)) out.push_back({std::move(r), profile});
    }
    return out;
  }

  std::vector<Sampled> sample_round(std::size_t round, const std::vector<PathProfile>& profiles,
                                    const std::vector<double>& weights) const {
    std::vector<std::vector<Sampled>> chunks;
    if (config_.round_ms > 0) {
      const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(config_.round_ms);
      const std::size_t batch = std::max<std::size_t>(1, config_.thread_count);
      while (std::chrono::steady_clock::now() < deadline) {
        const std::size_t first = chunks.size();
        chunks.resize(first + batch);
        detail::parallel_for(batch, config_.thread_count, [&](std::size_t i) {
          chunks[first + i] = sample_chunk(round, first + i, kChunk, profiles, weights);
        });
      }
    } else {
      const std::size_t count = (config_.round_samples + kChunk - 1) / kChunk;
      chunks.resize(count);
      detail::parallel_for(count, config_.thread_count, [&](std::size_t i) {
        const std::size_t n = std::min(kChunk, config_.round_samples - i * kChunk);
        chunks[i] = sample_chunk(round, i, n, profiles, weights);
      });
    }
    std::vector<Sampled> merged;
    for (auto& c : chunks) merged.insert(merged.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
    return merged;
  }

  void run_round(std::size_t round) {
    std::vector<PathProfile> profiles;
    std::vector<double> weights;
    for (const auto& [p, w] : state_.weights) {
      profiles.push_back(p);
      weights.push_back(w);
    }
    if (kg_.num_facts() == 0) return;

    // Distinct rules of this round, each credited to the profile that first produced it.
    std::vector<Sampled> sampled = sample_round(round, profiles, weights);
    std::unordered_set<Rule, RuleHash> in_round;
    std::vector<Sampled> distinct;
    for (Sampled& s : sampled) {
      if (in_round.insert(s.rule).second) distinct.push_back(std::move(s));
    }
    std::vector<Rule> round_rules;
    round_rules.reserve(distinct.size());
    for (const Sampled& s : distinct) round_rules.push_back(s.rule);
    state_.last_saturation = saturation(round_rules, seen_);

    std::vector<const Sampled*> fresh;
    for (const Sampled& s : distinct) {
      if (!seen_.contains(s.rule)) fresh.push_back(&s);
    }
    std::vector<std::optional<RuleMetrics>> scored(fresh.size());
    const EvalOptions options{config_.object_identity};
    detail::parallel_for(fresh.size(), config_.thread_count, [&](std::size_t i) {
      const Rule& rule = fresh[i]->rule;
      if (support(kg_, rule, options) < config_.min_support) return;
      RuleMetrics m = evaluate(kg_, rule, config_.pca_direction, options);
      if (confidence_of(m, config_.confidence_kind) >= config_.min_confidence) scored[i] = m;
    });

    std::map<PathProfile, std::size_t> yield;
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      seen_.insert(fresh[i]->rule);
      if (scored[i]) {
        state_.stored.emplace(fresh[i]->rule, *scored[i]);
        ++yield[fresh[i]->profile];
      }
    }

    // Effort moves towards each profile's share of this round's new rules.
    std::size_t total_yield = 0;
    for (const auto& [p, y] : yield) total_yield += y;
    for (auto& [p, w] : state_.weights) {
      const double share = total_yield == 0 ? 1.0 / static_cast<double>(state_.weights.size())
                                            : static_cast<double>(yield[p]) / static_cast<double>(total_yield);
      w = std::max(kWeightFloor, kEma * w + (1.0 - kEma) * share * static_cast<double>(state_.weights.size()));
    }

    if (state_.last_saturation >= config_.saturation_threshold && state_.current_length < config_.max_length) {
      unlock(++state_.current_length);
    }
  }

  const KnowledgeGraph& kg_;
  const AnytimeConfig& config_;
  AnytimeState state_;
  std::unordered_set<Rule, RuleHash> seen_;
};

}  // namespace

std::vector<MinedRule> mine_anytime(const KnowledgeGraph& kg, const AnytimeConfig& config,
                                    const std::function<void(const AnytimeState&)>& on_round) {
  config.validate();
  return AnytimeMiner(kg, config).run(on_round);
}

}  // namespace hornforge
