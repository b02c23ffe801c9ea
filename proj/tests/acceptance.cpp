// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "hornforge/amie_miner.hpp"
#include "hornforge/error.hpp"
#include "hornforge/matrix_eval.hpp"
#include "hornforge/metrics.hpp"
#include "hornforge/path_miner.hpp"
#include "hornforge/predictor.hpp"
#include "support/fixture.hpp"
#include "support/oracle.hpp"

using namespace hornforge;
using hftest::rule_of;
using hftest::sample_kg;
using hftest::triple_of;

namespace {

// Thrown by `require` with a description of the first broken expectation.
struct Violation {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Violation{what};
}

bool has_rule(const std::vector<MinedRule>& mined, const KnowledgeGraph& kg, const std::string& text) {
  const Rule r = canonicalize(rule_of(kg, text));
  return std::any_of(mined.begin(), mined.end(), [&](const MinedRule& m) { return canonicalize(m.rule) == r; });
}

std::string mine_cli(const std::vector<std::string>& extra) {
  std::vector<std::string> args{"hornforge", "mine", "-i", hftest::fixture_path("sample_kg.tsv")};
  args.insert(args.end(), extra.begin(), extra.end());
  std::ostringstream out, err;
  require(cli::run(args, out, err) == 0, "mine failed: " + err.str());
  return out.str();
}

// --- criteria ---------------------------------------------------------------

std::string fixture_exactness() {
  const KnowledgeGraph kg = load_triples_file(hftest::fixture_path("sample_kg.tsv"));
  const Rule r = rule_of(kg, hftest::kRuleR);
  const RuleMetrics m = evaluate(kg, r, PcaChoice::subject);
  require(m.support == 2, "support");
  require(m.head_coverage() == Rational(2, 3), "head coverage");
  require(m.std_confidence() == Rational(2, 3), "std confidence");
  require(m.pca_confidence() == Rational(1), "pca confidence");
  require(m.pca_direction == PcaDirection::subject, "pca direction");
  return "supp 2, hc 2/3, std 2/3, pca 1 (subject)";
}

std::string tensorlog() {
  const KnowledgeGraph kg = load_triples_file(hftest::fixture_path("tensorlog_subgraph.tsv"));
  require(kg.num_entities() == 5, "slice has 5 entities");
  const EntityVector v = tensorlog_infer(kg, rule_of(kg, hftest::kRuleR), "E._Macron");
  require(v == EntityVector::one_hot(5, *kg.entity_id("French")), "one-hot French");
  return "Macron -> one-hot French";
}

std::string relevant_subgraph() {
  const KnowledgeGraph& kg = sample_kg();
  const KnowledgeGraph sub = select_relevant_subgraph(kg, *kg.relation_id("speaks"), 3);
  std::vector<Triple> dropped;
  for (const Triple& t : kg.facts()) {
    if (!sub.contains(t)) dropped.push_back(t);
  }
  require(sub.num_facts() + dropped.size() == kg.num_facts(), "subgraph is a subset");
  std::vector<Triple> expected{triple_of(kg, "A._Merkel", "nationality", "Germany"),
                               triple_of(kg, "A._Merkel", "birthCountry", "Germany")};
  std::sort(expected.begin(), expected.end());
  std::sort(dropped.begin(), dropped.end());
  require(dropped == expected, "exactly the two Merkel facts are excluded");
  return "excluded: A._Merkel nationality/birthCountry Germany";
}

std::string amie_defaults() {
  const KnowledgeGraph& kg = sample_kg();
  const auto mined = mine(kg, MinerConfig{});
  require(has_rule(mined, kg, hftest::kRuleR), "R mined");
  require(has_rule(mined, kg, "birthCountry(?a, ?b) => nationality(?a, ?b)"), "birthCountry => nationality mined");
  const std::string first = mine_cli({});
  for (int i = 0; i < 2; ++i) require(mine_cli({}) == first, "repeat runs differ");
  require(mine_cli({"--threads", "1"}) == first, "threads 1 differs");
  require(mine_cli({"--threads", "4"}) == first, "threads 4 differs");
  return std::to_string(mined.size()) + " rules, byte-identical x3 and threads 1/4";
}

std::string oracle_equivalence() {
  std::mt19937_64 rng(20240501);
  std::size_t rules = 0;
  const int graphs = 1000;
  for (int g = 0; g < graphs; ++g) {
    const KnowledgeGraph kg = hftest::random_graph(rng, 8, 4, 30);
    for (const Rule& r : closed_chain_rules(kg.num_relations(), 3)) {
      const auto oracle = hftest::brute_force_metrics(kg, r);
      const RuleMetrics m = evaluate(kg, r, PcaChoice::subject);
      const MatrixMeasures mx = matrix_measures(kg, r);
      const std::int64_t pca_object = body_size(kg, r, DenominatorKind::pca, PcaDirection::object);
      const std::string where = "graph " + std::to_string(g) + ": " + to_string(r, kg.vocabulary());
      require(m.support == oracle.support && mx.support == oracle.support, "support at " + where);
      require(m.body_size_cwa == oracle.body_cwa && mx.body_size == oracle.body_cwa, "body size at " + where);
      require(m.body_size_pca == oracle.body_pca_subject, "pca subject at " + where);
      require(pca_object == oracle.body_pca_object, "pca object at " + where);
      require(mx.head_size == m.head_relation_size, "head size at " + where);
      ++rules;
    }
  }
  return std::to_string(graphs) + " graphs, " + std::to_string(rules) + " rules";
}

std::string invariants() {
  constexpr int kCases = 500;
  std::mt19937_64 rng(77);
  std::map<std::string, int> cases;

  // Refinement never raises support or head coverage.
  MinerConfig refine_cfg;
  refine_cfg.max_len = 4;
  refine_cfg.enable_instantiation = true;
  while (cases["anti-monotonicity"] < kCases) {
    const KnowledgeGraph kg = hftest::random_graph(rng, 7, 3, 25);
    const Rule r = canonicalize(hftest::random_rule(rng, kg, 2, true));
    if (kg.fact_count(r.head.relation) == 0) continue;
    const std::int64_t s = support(kg, r);
    const Rational hc = head_coverage(kg, r);
    std::vector<Rule> children = refine_dangling(r, kg, refine_cfg);
    for (auto* f : {&refine_closing, &refine_instantiated}) {
      auto more = f(r, kg, refine_cfg);
      children.insert(children.end(), more.begin(), more.end());
    }
    if (children.empty()) continue;
    for (const Rule& c : children) {
      require(support(kg, c) <= s, "support grew: " + to_string(c, kg.vocabulary()));
      require(head_coverage(kg, c) <= hc, "head coverage grew: " + to_string(c, kg.vocabulary()));
    }
    ++cases["anti-monotonicity"];
  }

  // PCA confidence dominates standard confidence, either direction, with or without OI.
  while (cases["pca >= std"] < kCases) {
    const KnowledgeGraph kg = hftest::random_graph(rng, 8, 3, 30);
    const Rule r = hftest::random_safe_rule(rng, kg, 3, true);
    const EvalOptions opts{cases["pca >= std"] % 2 == 1};
    const Rational std_conf = std_confidence(kg, r, opts).value;
    for (PcaChoice c : {PcaChoice::subject, PcaChoice::object}) {
      require(pca_confidence(kg, r, c, opts).value >= std_conf, "pca < std: " + to_string(r, kg.vocabulary()));
    }
    ++cases["pca >= std"];
  }

  // The lazy threshold test decides exactly as the eager ratio does.
  while (cases["lazy == eager"] < kCases) {
    const KnowledgeGraph kg = hftest::random_graph(rng, 8, 3, 30);
    const Rule r = hftest::random_safe_rule(rng, kg, 3, true);
    const std::int64_t s = support(kg, r);
    const Rational min_conf(std::uniform_int_distribution<std::int64_t>(1, 10)(rng), 10);
    for (DenominatorKind kind : {DenominatorKind::cwa, DenominatorKind::pca}) {
      for (PcaDirection d : {PcaDirection::subject, PcaDirection::object}) {
        const std::int64_t eager = body_size(kg, r, kind, d);
        const LazyOutcome lazy = lazy_denominator(kg, r, kind, s, min_conf, d);
        require(lazy.passed == (ratio_or_zero(s, eager) >= min_conf), "lazy decision: " + to_string(r, kg.vocabulary()));
        if (lazy.passed) require(lazy.denominator == eager, "lazy count: " + to_string(r, kg.vocabulary()));
      }
    }
    ++cases["lazy == eager"];
  }

  // Every rule generalized from a sampled path is supported by that path.
  while (cases["path witness"] < kCases) {
    const KnowledgeGraph kg = hftest::random_graph(rng, 7, 3, 25);
    const int i = cases["path witness"];
    const PathProfile profile{std::size_t(1 + i % 3), i % 2 ? PathShape::cyclic : PathShape::acyclic};
    const bool oi = i % 4 >= 2;
    const auto path = sample_path(kg, profile, rng, oi);
    if (!path) continue;
    const Triple& head = path->anchor().fact;
    for (const Rule& r : generalize(*path)) {
      require(predicts(kg, r, head, {oi}), "anchor not derived: " + to_string(r, kg.vocabulary()));
      require(support(kg, r, {oi}) >= 1, "unsupported: " + to_string(r, kg.vocabulary()));
    }
    ++cases["path witness"];
  }

  // The anytime store only grows and stored metrics never change.
  while (cases["anytime monotonicity"] < kCases) {
    const KnowledgeGraph kg = hftest::random_graph(rng, 8, 3, 30);
    AnytimeConfig config;
    config.rounds = 4;
    config.round_samples = 60;
    config.seed = rng();
    std::map<Rule, RuleMetrics> previous;
    mine_anytime(kg, config, [&](const AnytimeState& state) {
      for (const auto& [rule, metrics] : previous) {
        require(state.stored.contains(rule), "stored rule dropped");
        require(state.stored.at(rule) == metrics, "stored metrics changed");
      }
      previous = state.stored;
      ++cases["anytime monotonicity"];
    });
  }

  std::string summary;
  for (const auto& [name, n] : cases) summary += (summary.empty() ? "" : ", ") + name + " " + std::to_string(n);
  return summary;
}

std::string scale() {
  const KnowledgeGraph kg = hftest::synthetic_graph(7, 100000, 20, 10000, true);
  require(kg.num_facts() == 100000, "fact count");
  const auto mined = mine(kg, MinerConfig{});
  require(has_rule(mined, kg, "r0(?a, ?b) => r1(?a, ?b)"), "planted rule r0 => r1 found");
  return std::to_string(kg.num_facts()) + " facts, " + std::to_string(mined.size()) + " rules";
}

std::string greedy() {
  // Perfectly coverable construction: the running example rule covers every
  // positive speaks fact and none of the LCWA negatives.
  const KnowledgeGraph& kg = sample_kg();
  const ExampleSets language({triple_of(kg, "U.v.d._Leyen", "speaks", "German"),
                              triple_of(kg, "E._Macron", "speaks", "French")},
                             {triple_of(kg, "E._Macron", "speaks", "German"),
                              triple_of(kg, "U.v.d._Leyen", "speaks", "French")});
  const std::vector<Rule> fixture_candidates{
      rule_of(kg, "worksFor(?a, ?c) & worksFor(?b, ?c) => speaks(?a, ?b)"), rule_of(kg, hftest::kRuleR),
      rule_of(kg, "nationality(?a, ?c) & officialLang(?c, ?b) => speaks(?a, ?b)")};
  const auto perfect = select_rules_greedy(fixture_candidates, language, kg, Rational(1, 2));
  require(!perfect.weights.empty() && perfect.weights.back() == Rational(0), "final weight 0");

  // Random instances: weights strictly decrease and match a recomputation;
  // at termination every remaining candidate has marginal >= 0.
  std::mt19937_64 rng(31);
  int instances = 0;
  while (instances < 200) {
    const KnowledgeGraph g = hftest::random_graph(rng, 8, 3, 30);
    const RelationId head = std::uniform_int_distribution<RelationId>(0, g.num_relations() - 1)(rng);
    if (g.fact_count(head) == 0) continue;
    const auto negatives = generate_negatives(g, head);
    if (negatives.empty()) continue;
    std::vector<Triple> positives;
    for (const Triple& t : g.facts()) {
      if (t.relation == head) positives.push_back(t);
    }
    std::vector<Rule> candidates;
    for (int k = 0; k < 12; ++k) {
      Rule r = hftest::random_safe_rule(rng, g, 2, k % 3 == 0);
      if (r.head.relation != head || !r.head.subject.is_variable() || !r.head.object.is_variable()) continue;
      candidates.push_back(std::move(r));
    }
    const ExampleSets examples(positives, negatives);
    const Rational alpha(std::uniform_int_distribution<std::int64_t>(0, 4)(rng), 4);
    const auto sel = select_rules_greedy(candidates, examples, g, alpha);
    require(sel.weights.size() == sel.selected.size() + 1, "one weight per pick");
    std::vector<Rule> chosen;
    require(sel.weights[0] == rudik_weight(chosen, examples, g, alpha), "initial weight");
    for (std::size_t k = 0; k < sel.selected.size(); ++k) {
      chosen.push_back(candidates[sel.selected[k]]);
      require(sel.weights[k + 1] < sel.weights[k], "weight did not decrease");
      require(sel.weights[k + 1] == rudik_weight(chosen, examples, g, alpha), "weight mismatch");
    }
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (std::find(sel.selected.begin(), sel.selected.end(), c) != sel.selected.end()) continue;
      require(marginal_weight(chosen, candidates[c], examples, g, alpha) >= Rational(0), "rejected improving rule");
    }
    ++instances;
  }
  return "perfect construction ends at 0; 200 random instances monotone";
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0 means no time bound
  std::function<std::string()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "fixture exactness", 1, fixture_exactness},
      {2, "TensorLog inference", 0, tensorlog},
      {3, "relevant subgraph", 0, relevant_subgraph},
      {4, "AMIE defaults", 5, amie_defaults},
      {5, "oracle equivalence", 60, oracle_equivalence},
      {6, "invariants", 0, invariants},
      {7, "scale", 120, scale},
      {8, "greedy selection", 0, greedy},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.check();
    } catch (const Violation& v) {
      ok = false;
      detail = v.what;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && c.limit_s > 0 && seconds >= c.limit_s) {
      ok = false;
      detail += " (over the " + std::to_string(static_cast<int>(c.limit_s)) + " s budget)";
    }
    failures += !ok;
    char time_buf[32];
    std::snprintf(time_buf, sizeof time_buf, "%.3f s", seconds);
    std::cout << "criterion " << c.id << " " << c.name << ": " << (ok ? "PASS" : "FAIL") << " [" << time_buf
              << "] " << detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
