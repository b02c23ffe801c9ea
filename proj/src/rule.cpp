#include "hornforge/rule.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "hornforge/error.hpp"

namespace hornforge {
namespace {

template <class F>
void for_each_atom(const Rule& rule, F&& f) {
  f(rule.head);
  for (const Atom& a : rule.body) f(a);
}

void hash_combine(std::size_t& seed, std::size_t value) {
  seed ^= value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

// Variable renumbering used while searching for the canonical body order.
struct Numbering {
  std::vector<std::int64_t> map;  // original index -> canonical index, -1 if unassigned
  std::uint32_t next = 0;

  Term assign(Term t) {
    if (t.is_constant()) return t;
    auto& slot = map[t.id];
    if (slot < 0) slot = next++;
    return Term::var(static_cast<VariableId>(slot));
  }
  Atom assign(const Atom& a) {
    Atom out = a;
    out.subject = assign(a.subject);
    out.object = assign(a.object);
    return out;
  }
};

void search_canonical(const std::vector<Atom>& body, std::vector<bool>& used, Numbering numbering,
                      std::vector<Atom>& prefix, std::optional<std::vector<Atom>>& best) {
  if (prefix.size() == body.size()) {
    if (!best || prefix < *best) best = prefix;
    return;
  }
  std::optional<Atom> smallest;
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (used[i]) continue;
    Numbering trial = numbering;
    const Atom encoded = trial.assign(body[i]);
    if (!smallest || encoded < *smallest) {
      smallest = encoded;
      ties.assign(1, i);
    } else if (encoded == *smallest) {
      ties.push_back(i);
    }
  }
  // Every branch shares the same prefix, so only a strictly larger prefix
  // than the incumbent's could be pruned; that cannot happen here.
  for (std::size_t i : ties) {
    Numbering next = numbering;
    prefix.push_back(next.assign(body[i]));
    used[i] = true;
    search_canonical(body, used, next, prefix, best);
    used[i] = false;
    prefix.pop_back();
  }
}

std::string variable_name(std::uint32_t index) {
  if (index < 26) return std::string(1, static_cast<char>('a' + index));
  return "v" + std::to_string(index);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

class RuleParser {
 public:
  explicit RuleParser(const Vocabulary& vocab) : vocab_(vocab) {}

  Atom atom(std::string_view text) {
    text = trim(text);
    const auto open = text.find('(');
    const auto comma = text.find(',', open == std::string_view::npos ? 0 : open);
    if (open == std::string_view::npos || comma == std::string_view::npos || text.back() != ')') {
      throw ParseError(0, "malformed atom '" + std::string(text) + "'");
    }
    const auto rel_label = trim(text.substr(0, open));
    const auto relation = vocab_.relations.find(rel_label);
    if (!relation) throw ParseError(0, "unknown relation '" + std::string(rel_label) + "'");
    Atom a;
    a.relation = *relation;
    a.subject = term(text.substr(open + 1, comma - open - 1));
    a.object = term(text.substr(comma + 1, text.size() - comma - 2));
    if (!a.has_variable()) throw ParseError(0, "rule atom without variables '" + std::string(text) + "'");
    return a;
  }

 private:
  Term term(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw ParseError(0, "empty term");
    if (text.front() == '?') {
      const std::string name(text.substr(1));
      if (name.empty()) throw ParseError(0, "unnamed variable");
      auto [it, inserted] = variables_.try_emplace(name, static_cast<VariableId>(variables_.size()));
      return Term::var(it->second);
    }
    const auto entity = vocab_.entities.find(text);
    if (!entity) throw ParseError(0, "unknown entity '" + std::string(text) + "'");
    return Term::constant(*entity);
  }

  const Vocabulary& vocab_;
  std::map<std::string, VariableId> variables_;
};

}  // namespace

std::size_t RuleHash::operator()(const Rule& rule) const noexcept {
  std::size_t seed = rule.body.size();
  for_each_atom(rule, [&](const Atom& a) {
    hash_combine(seed, a.relation);
    hash_combine(seed, (static_cast<std::size_t>(a.subject.kind) << 32) | a.subject.id);
    hash_combine(seed, (static_cast<std::size_t>(a.object.kind) << 32) | a.object.id);
  });
  return seed;
}

void Substitution::bind(VariableId v, EntityId e) {
  if (v >= values_.size()) values_.resize(v + 1, kUnbound);
  values_[v] = e;
}

bool Substitution::maps_to(EntityId e, std::optional<VariableId> except) const {
  for (VariableId v = 0; v < values_.size(); ++v) {
    if (values_[v] == e && (!except || *except != v)) return true;
  }
  return false;
}

bool Substitution::is_injective() const {
  std::vector<EntityId> bound;
  for (EntityId e : values_) {
    if (e != kUnbound) bound.push_back(e);
  }
  std::sort(bound.begin(), bound.end());
  return std::adjacent_find(bound.begin(), bound.end()) == bound.end();
}

std::vector<VariableId> variables(const Rule& rule) {
  std::vector<VariableId> vars;
  for_each_atom(rule, [&](const Atom& a) {
    for (const Term& t : {a.subject, a.object}) {
      if (t.is_variable()) vars.push_back(t.id);
    }
  });
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

VariableId variable_bound(const Rule& rule) {
  const auto vars = variables(rule);
  return vars.empty() ? 0 : vars.back() + 1;
}

std::vector<VariableId> head_variables(const Rule& rule) {
  std::vector<VariableId> vars;
  if (rule.head.subject.is_variable()) vars.push_back(rule.head.subject.id);
  if (rule.head.object.is_variable() && (vars.empty() || vars.front() != rule.head.object.id)) {
    vars.push_back(rule.head.object.id);
  }
  return vars;
}

std::vector<std::size_t> variable_atom_counts(const Rule& rule) {
  std::vector<std::size_t> counts(variable_bound(rule), 0);
  for_each_atom(rule, [&](const Atom& a) {
    if (a.subject.is_variable()) ++counts[a.subject.id];
    if (a.object.is_variable() && !(a.subject.is_variable() && a.subject.id == a.object.id)) ++counts[a.object.id];
  });
  return counts;
}

std::size_t open_variable_count(const Rule& rule) {
  const auto counts = variable_atom_counts(rule);
  return static_cast<std::size_t>(std::count(counts.begin(), counts.end(), std::size_t{1}));
}

bool is_connected(const Rule& rule) {
  std::vector<const Atom*> atoms;
  for_each_atom(rule, [&](const Atom& a) { atoms.push_back(&a); });
  std::vector<std::size_t> parent(atoms.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      const bool shared = (atoms[i]->subject.is_variable() && atoms[j]->mentions(atoms[i]->subject.id)) ||
                          (atoms[i]->object.is_variable() && atoms[j]->mentions(atoms[i]->object.id));
      if (shared) parent[find(i)] = find(j);
    }
  }
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (find(i) != find(0)) return false;
  }
  return true;
}

bool is_safe(const Rule& rule) {
  for (VariableId v : head_variables(rule)) {
    const bool in_body = std::any_of(rule.body.begin(), rule.body.end(), [v](const Atom& a) { return a.mentions(v); });
    if (!in_body) return false;
  }
  return true;
}

bool is_closed(const Rule& rule) {
  const auto counts = variable_atom_counts(rule);
  for (VariableId v : variables(rule)) {
    if (counts[v] < 2) return false;
  }
  return true;
}

Atom apply_substitution(const Atom& atom, const Substitution& sigma) {
  auto apply = [&](Term t) {
    if (t.is_variable()) {
      if (auto e = sigma.get(t.id)) return Term::constant(*e);
    }
    return t;
  };
  return Atom{atom.relation, apply(atom.subject), apply(atom.object)};
}

std::vector<Atom> apply_substitution(std::span<const Atom> atoms, const Substitution& sigma) {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const Atom& a : atoms) out.push_back(apply_substitution(a, sigma));
  return out;
}

Rule canonicalize(const Rule& rule) {
  Numbering numbering;
  numbering.map.assign(variable_bound(rule), -1);
  Rule out;
  out.head = numbering.assign(rule.head);
  std::vector<bool> used(rule.body.size(), false);
  std::vector<Atom> prefix;
  std::optional<std::vector<Atom>> best;
  search_canonical(rule.body, used, numbering, prefix, best);
  out.body = std::move(*best);
  return out;
}

std::string to_string(const Atom& atom, const Vocabulary& vocab) {
  auto term = [&](Term t) {
    return t.is_variable() ? "?" + variable_name(t.id) : vocab.entities.label(t.id);
  };
  return vocab.relations.label(atom.relation) + "(" + term(atom.subject) + ", " + term(atom.object) + ")";
}

std::string to_string(const Rule& rule, const Vocabulary& vocab, bool negated_head) {
  Numbering numbering;
  numbering.map.assign(variable_bound(rule), -1);
  const Atom head = numbering.assign(rule.head);
  std::vector<Atom> body;
  for (const Atom& a : rule.body) body.push_back(numbering.assign(a));
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i > 0) out += " & ";
    out += to_string(body[i], vocab);
  }
  out += body.empty() ? "=> " : " => ";
  if (negated_head) out += "!";
  out += to_string(head, vocab);
  return out;
}

ParsedRule parse_rule_text(std::string_view text, const Vocabulary& vocab) {
  const auto arrow = text.find("=>");
  if (arrow == std::string_view::npos) throw ParseError(0, "rule without '=>'");
  RuleParser parser(vocab);
  ParsedRule parsed;
  std::string_view body = trim(text.substr(0, arrow));
  while (!body.empty()) {
    const auto amp = body.find('&');
    parsed.rule.body.push_back(parser.atom(body.substr(0, amp)));
    if (amp == std::string_view::npos) break;
    body = trim(body.substr(amp + 1));
    if (body.empty()) throw ParseError(0, "dangling '&' in rule body");
  }
  std::string_view head = trim(text.substr(arrow + 2));
  if (!head.empty() && head.front() == '!') {
    parsed.negated_head = true;
    head.remove_prefix(1);
  }
  parsed.rule.head = parser.atom(head);
  return parsed;
}

Rule parse_rule(std::string_view text, const Vocabulary& vocab) {
  ParsedRule parsed = parse_rule_text(text, vocab);
  if (parsed.negated_head) throw ParseError(0, "negated head in a positive rule");
  return std::move(parsed.rule);
}

}  // namespace hornforge
