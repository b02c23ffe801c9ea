#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "hornforge/amie_miner.hpp"
#include "hornforge/error.hpp"
#include "hornforge/kg_store.hpp"
#include "hornforge/matrix_eval.hpp"
#include "hornforge/metrics.hpp"
#include "hornforge/path_miner.hpp"
#include "hornforge/predictor.hpp"

namespace hornforge::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Missing or unreadable input files.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t resolve_threads(const CLI::Option* flag, std::size_t value) {
  if (flag->count() > 0) {
    if (value == 0) throw UsageError("--threads must be at least 1");
    return value;
  }
  const char* env = std::getenv("HORNFORGE_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  std::size_t parsed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, parsed);
  if (ec != std::errc() || ptr != end || parsed == 0) {
    throw UsageError("HORNFORGE_THREADS must be a positive integer");
  }
  return parsed;
}

Rational threshold(const std::string& text, const char* flag) {
  Rational value;
  try {
    value = Rational::parse(text);
  } catch (const Error&) {
    throw UsageError(std::string(flag) + ": not a number: " + text);
  }
  if (value <= Rational{} || value > Rational{1}) throw UsageError(std::string(flag) + " must lie in (0, 1]");
  return value;
}

PcaChoice pca_choice(const std::string& s) {
  if (s == "auto") return PcaChoice::automatic;
  return s == "object" ? PcaChoice::object : PcaChoice::subject;
}

KnowledgeGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return load_triples(in);
}

// Rule files: one rule per line in the first tab-separated column; blank
// lines, '#' comments and a `rule` header row are skipped.
std::vector<ParsedRule> load_rules(const std::string& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::vector<ParsedRule> rules;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string text = line.substr(0, line.find('\t'));
    if (text.find_first_not_of(" \t") == std::string::npos || text.front() == '#' || text == "rule") continue;
    try {
      rules.push_back(parse_rule_text(text, vocab));
    } catch (const Error& e) {
      throw ParseError(number, e.what());
    }
  }
  return rules;
}

void emit(const std::string& text, const std::string& output, std::ostream& out) {
  if (output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(output, std::ios::binary);
  if (!file) throw InputError("cannot write " + output);
  file << text;
}

const char* direction_name(PcaDirection d) { return d == PcaDirection::subject ? "subject" : "object"; }

std::string rule_table(const KnowledgeGraph& kg, const std::vector<MinedRule>& rules) {
  std::ostringstream os;
  os << "rule\tsupport\tsupport_frac_hc\thead_coverage\tstd_conf\tpca_conf\tpca_direction\tstd_conf_frac\tpca_conf_frac\n";
  for (const MinedRule& r : rules) {
    const RuleMetrics& m = r.metrics;
    os << to_string(r.rule, kg.vocabulary()) << '\t' << m.support << '\t' << m.head_coverage().to_string() << '\t'
       << m.head_coverage().to_decimal() << '\t' << m.std_confidence().to_decimal() << '\t'
       << m.pca_confidence().to_decimal() << '\t' << direction_name(m.pca_direction) << '\t'
       << m.std_confidence().to_string() << '\t' << m.pca_confidence().to_string() << '\n';
  }
  return os.str();
}

std::string conf_vector(const std::vector<Rational>& confidences) {
  std::string out;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    if (i > 0) out += ',';
    out += confidences[i].to_decimal();
  }
  return out;
}

std::string fact_text(const KnowledgeGraph& kg, const Triple& t) {
  return kg.entity_label(t.subject) + '\t' + kg.relation_label(t.relation) + '\t' + kg.entity_label(t.object);
}

struct MineFlags {
  std::string miner = "amie";
  std::size_t max_len = 3;
  std::string min_hc = "0.01";
  std::string min_conf = "0.1";
  std::string min_std_conf;
  std::string min_pca_conf;
  bool instantiation = false;
  std::string confidence;
  std::string pca_direction = "subject";
  bool object_identity = false;
  bool no_skyline = false;
  bool no_perfect_cut = false;
  std::size_t rounds = 10;
  std::size_t round_samples = 2000;
  std::int64_t round_ms = 0;
  std::uint64_t seed = 42;
  std::int64_t min_support = 2;
  double saturation = 0.9;
  std::size_t max_path_len = 3;
};

int run_mine(const CLI::App& cmd, const MineFlags& f, const std::string& input, const std::string& output,
             std::size_t threads, std::ostream& out) {
  const bool amie = f.miner == "amie";
  for (const char* name : amie ? std::vector<const char*>{"--rounds", "--round-samples", "--round-ms", "--seed",
                                                          "--min-support", "--saturation", "--max-path-len"}
                               : std::vector<const char*>{"--max-len", "--min-hc", "--instantiation",
                                                          "--no-skyline", "--no-perfect-cut"}) {
    if (cmd.count(name) > 0) throw UsageError(std::string(name) + " does not apply to --miner " + f.miner);
  }
  const std::string kind = !f.confidence.empty() ? f.confidence : (amie ? "pca" : "std");
  const Rational min_conf = threshold(f.min_conf, "--min-conf");
  const Rational min_std = f.min_std_conf.empty() ? min_conf : threshold(f.min_std_conf, "--min-std-conf");
  const Rational min_pca = f.min_pca_conf.empty() ? min_conf : threshold(f.min_pca_conf, "--min-pca-conf");
  const ConfidenceKind confidence_kind = kind == "std" ? ConfidenceKind::standard : ConfidenceKind::pca;

  std::vector<MinedRule> rules;
  if (amie) {
    MinerConfig config;
    config.max_len = f.max_len;
    config.min_head_coverage = threshold(f.min_hc, "--min-hc");
    config.min_std_confidence = min_std;
    config.min_pca_confidence = min_pca;
    config.enable_instantiation = f.instantiation;
    config.confidence_kind = confidence_kind;
    config.pca_direction = pca_choice(f.pca_direction);
    config.object_identity = f.object_identity;
    config.skyline = !f.no_skyline;
    config.perfect_rule_cut = !f.no_perfect_cut;
    config.thread_count = threads;
    if (config.max_len < 2) throw UsageError("--max-len must be at least 2");
    const KnowledgeGraph kg = load_graph(input);
    rules = mine(kg, config);
    emit(rule_table(kg, rules), output, out);
  } else {
    AnytimeConfig config;
    config.rounds = f.rounds;
    config.round_samples = f.round_samples;
    config.round_ms = f.round_ms;
    config.seed = f.seed;
    config.min_support = f.min_support;
    config.saturation_threshold = f.saturation;
    config.max_length = f.max_path_len;
    config.confidence_kind = confidence_kind;
    config.min_confidence = confidence_kind == ConfidenceKind::standard ? min_std : min_pca;
    config.pca_direction = pca_choice(f.pca_direction);
    config.object_identity = f.object_identity;
    config.thread_count = threads;
    try {
      config.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    const KnowledgeGraph kg = load_graph(input);
    rules = mine_anytime(kg, config);
    emit(rule_table(kg, rules), output, out);
  }
  return kExitOk;
}

int run_verify(const std::string& input, const std::string& rules_path, std::size_t max_len,
               const std::string& output, std::ostream& out) {
  if (max_len < 2) throw UsageError("--max-len must be at least 2");
  const KnowledgeGraph kg = load_graph(input);
  std::vector<Rule> rules;
  if (rules_path.empty()) {
    rules = closed_chain_rules(kg.num_relations(), max_len);
  } else {
    for (ParsedRule& p : load_rules(rules_path, kg.vocabulary())) {
      if (!p.negated_head) rules.push_back(std::move(p.rule));
    }
  }
  std::ostringstream os;
  os << "rule\tsupport\tmatrix_support\thead_coverage\tmatrix_head_coverage\tstd_conf\tmatrix_std_conf\tstatus\n";
  std::size_t checked = 0, diverged = 0, unsupported = 0;
  for (const Rule& rule : rules) {
    MatrixMeasures mm;
    try {
      mm = matrix_measures(kg, rule);
    } catch (const UnsupportedRule&) {
      ++unsupported;
      continue;
    }
    const std::int64_t supp = support(kg, rule);
    const std::int64_t head = static_cast<std::int64_t>(kg.fact_count(rule.head.relation));
    const Rational hc = ratio_or_zero(supp, head);
    const Rational std_conf = ratio_or_zero(supp, body_size(kg, rule, DenominatorKind::cwa));
    const bool ok = supp == mm.support && hc == mm.head_coverage() && std_conf == mm.std_confidence();
    ++checked;
    if (!ok) ++diverged;
    // Only print rules that fire, plus every divergence.
    if (supp == 0 && mm.support == 0 && ok) continue;
    os << to_string(rule, kg.vocabulary()) << '\t' << supp << '\t' << mm.support << '\t' << hc.to_string() << '\t'
       << mm.head_coverage().to_string() << '\t' << std_conf.to_string() << '\t' << mm.std_confidence().to_string()
       << '\t' << (ok ? "ok" : "DIVERGED") << '\n';
  }
  os << "# checked " << checked << " diverged " << diverged << " unsupported " << unsupported << '\n';
  emit(os.str(), output, out);
  return diverged == 0 ? kExitOk : kExitFailure;
}

struct PredictFlags {
  std::string rules;
  std::string query;
  std::size_t top = 10;
  std::string confidence = "pca";
  std::string pca_direction = "subject";
  bool object_identity = false;
  bool inconsistencies = false;
};

int run_predict(const PredictFlags& f, const std::string& input, const std::string& output, std::ostream& out) {
  if (f.inconsistencies && !f.query.empty()) throw UsageError("--inconsistencies cannot be combined with --query");
  const KnowledgeGraph kg = load_graph(input);
  const EvalOptions options{f.object_identity};
  std::vector<WeightedRule> positive;
  std::vector<NegativeRule> negative;
  for (ParsedRule& p : load_rules(f.rules, kg.vocabulary())) {
    if (p.negated_head) {
      negative.push_back({std::move(p.rule)});
      continue;
    }
    const RuleMetrics m = evaluate(kg, p.rule, pca_choice(f.pca_direction), options);
    const Rational conf = f.confidence == "std" ? m.std_confidence() : m.pca_confidence();
    positive.push_back({std::move(p.rule), conf});
  }

  std::ostringstream os;
  if (f.inconsistencies) {
    os << "subject\trelation\tobject\trule\tevidence\n";
    for (const Inconsistency& inc : find_inconsistencies(kg, negative, options)) {
      std::string evidence;
      for (const Triple& t : inc.evidence) {
        if (!evidence.empty()) evidence += " & ";
        evidence += to_string(Atom{t.relation, Term::constant(t.subject), Term::constant(t.object)}, kg.vocabulary());
      }
      os << fact_text(kg, inc.fact) << '\t' << to_string(negative[inc.rule_index].rule, kg.vocabulary(), true) << '\t'
         << evidence << '\n';
    }
  } else if (!f.query.empty()) {
    const CompletionQuery query = CompletionQuery::parse(f.query, kg.vocabulary());
    const auto ranked = complete(kg, positive, query, options);
    os << "rank\tcandidate\tconf_vector\n";
    for (std::size_t i = 0; i < ranked.size() && (f.top == 0 || i < f.top); ++i) {
      os << i + 1 << '\t' << kg.entity_label(ranked[i].entity) << '\t' << conf_vector(ranked[i].confidences) << '\n';
    }
  } else {
    // Novel facts only, most confident first.
    struct Row {
      std::string fact;
      std::vector<Rational> confs;
    };
    std::vector<Row> rows;
    for (const Prediction& p : apply_rules(kg, positive, options)) {
      if (p.in_kg) continue;
      Row row{fact_text(kg, p.fact), {}};
      for (const RuleConfidence& g : p.generating) row.confs.push_back(g.confidence);
      rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.confs.front() != b.confs.front()) return a.confs.front() > b.confs.front();
      return a.fact < b.fact;
    });
    os << "subject\trelation\tobject\tconf_vector\n";
    for (std::size_t i = 0; i < rows.size() && (f.top == 0 || i < f.top); ++i) {
      os << rows[i].fact << '\t' << conf_vector(rows[i].confs) << '\n';
    }
  }
  emit(os.str(), output, out);
  return kExitOk;
}

int run_stats(const std::string& input, const std::string& output, std::ostream& out) {
  const KnowledgeGraph kg = load_graph(input);
  std::vector<RelationId> relations;
  for (RelationId r = 0; r < kg.num_relations(); ++r) relations.push_back(r);
  std::sort(relations.begin(), relations.end(),
            [&](RelationId a, RelationId b) { return kg.relation_label(a) < kg.relation_label(b); });
  std::ostringstream os;
  os << "# entities " << kg.num_entities() << " relations " << kg.num_relations() << " facts " << kg.num_facts()
     << '\n';
  os << "relation\tfacts\tsubjects\tobjects\tfunctionality\tinverse_functionality\n";
  for (RelationId r : relations) {
    if (kg.fact_count(r) == 0) continue;
    const RelationStats s = relation_stats(kg, r);
    os << kg.relation_label(r) << '\t' << s.fact_count << '\t' << s.distinct_subjects << '\t' << s.distinct_objects
       << '\t' << s.functionality.to_decimal() << '\t' << s.inverse_functionality.to_decimal() << '\n';
  }
  emit(os.str(), output, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Horn rule mining over knowledge graphs", "hornforge"};
  app.require_subcommand(1);

  std::string input, output;
  std::size_t threads_value = 1;

  auto* mine_cmd = app.add_subcommand("mine", "Mine rules and print the rule table");
  auto* verify_cmd = app.add_subcommand("verify", "Cross-check index metrics with the matrix oracle");
  auto* predict_cmd = app.add_subcommand("predict", "Execute rules: completion queries, new facts, inconsistencies");
  auto* stats_cmd = app.add_subcommand("stats", "Per-relation statistics");
  std::vector<CLI::Option*> thread_flags;
  for (auto* cmd : {mine_cmd, verify_cmd, predict_cmd, stats_cmd}) {
    cmd->add_option("-i,--input", input, "Triples TSV (subject, relation, object)")->required();
    cmd->add_option("-o,--output", output, "Write here instead of stdout");
    thread_flags.push_back(cmd->add_option("--threads", threads_value, "Worker threads (env HORNFORGE_THREADS)"));
  }

  MineFlags mf;
  mine_cmd->add_option("--miner", mf.miner)->check(CLI::IsMember({"amie", "anyburl"}));
  mine_cmd->add_option("--max-len", mf.max_len, "Atoms per rule, head included");
  mine_cmd->add_option("--min-hc", mf.min_hc, "Head coverage threshold");
  mine_cmd->add_option("--min-conf", mf.min_conf, "Confidence threshold (std and pca)");
  mine_cmd->add_option("--min-std-conf", mf.min_std_conf);
  mine_cmd->add_option("--min-pca-conf", mf.min_pca_conf);
  mine_cmd->add_flag("--instantiation", mf.instantiation, "Allow constants in rules");
  mine_cmd->add_option("--confidence", mf.confidence, "Confidence used for filtering and ranking")
      ->check(CLI::IsMember({"std", "pca"}));
  mine_cmd->add_option("--pca-direction", mf.pca_direction)->check(CLI::IsMember({"subject", "object", "auto"}));
  mine_cmd->add_flag("--oi", mf.object_identity, "Object identity: distinct variables bind distinct entities");
  mine_cmd->add_flag("--no-skyline", mf.no_skyline);
  mine_cmd->add_flag("--no-perfect-cut", mf.no_perfect_cut);
  mine_cmd->add_option("--rounds", mf.rounds);
  mine_cmd->add_option("--round-samples", mf.round_samples);
  mine_cmd->add_option("--round-ms", mf.round_ms, "Wall-clock round budget (nondeterministic)");
  mine_cmd->add_option("--seed", mf.seed);
  mine_cmd->add_option("--min-support", mf.min_support);
  mine_cmd->add_option("--saturation", mf.saturation);
  mine_cmd->add_option("--max-path-len", mf.max_path_len);

  std::string verify_rules;
  std::size_t verify_max_len = 3;
  verify_cmd->add_option("--rules", verify_rules, "Rule file (default: every closed chain rule)");
  verify_cmd->add_option("--max-len", verify_max_len);

  PredictFlags pf;
  predict_cmd->add_option("--rules", pf.rules, "Rule file")->required();
  predict_cmd->add_option("--query", pf.query, "rel(subject, ?) or rel(?, object)");
  predict_cmd->add_option("--top", pf.top, "Rows to print, 0 for all");
  predict_cmd->add_option("--confidence", pf.confidence)->check(CLI::IsMember({"std", "pca"}));
  predict_cmd->add_option("--pca-direction", pf.pca_direction)->check(CLI::IsMember({"subject", "object", "auto"}));
  predict_cmd->add_flag("--oi", pf.object_identity);
  predict_cmd->add_flag("--inconsistencies", pf.inconsistencies, "Report facts contradicted by negative rules");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const CLI::Option* thread_flag = nullptr;
    for (auto* opt : thread_flags) {
      if (opt->count() > 0) thread_flag = opt;
    }
    const std::size_t threads = resolve_threads(thread_flag ? thread_flag : thread_flags.front(), threads_value);
    if (!std::filesystem::exists(input)) throw InputError("cannot open " + input);
    if (*mine_cmd) return run_mine(*mine_cmd, mf, input, output, threads, out);
    if (*verify_cmd) return run_verify(input, verify_rules, verify_max_len, output, out);
    if (*predict_cmd) return run_predict(pf, input, output, out);
    return run_stats(input, output, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace hornforge::cli
