#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hornforge/dictionary.hpp"

namespace hornforge {

using VariableId = std::uint32_t;

struct Term {
  enum class Kind : std::uint8_t { variable, constant };

  Kind kind = Kind::variable;
  std::uint32_t id = 0;  // variable index or entity id

  static constexpr Term var(VariableId v) { return {Kind::variable, v}; }
  static constexpr Term constant(EntityId e) { return {Kind::constant, e}; }
  constexpr bool is_variable() const { return kind == Kind::variable; }
  constexpr bool is_constant() const { return kind == Kind::constant; }

  friend auto operator<=>(const Term&, const Term&) = default;
};

/// Binary atom relation(subject, object). Inside a rule at least one term is
/// a variable; instantiated atoms may be ground.
struct Atom {
  RelationId relation = 0;
  Term subject;
  Term object;

  bool has_variable() const { return subject.is_variable() || object.is_variable(); }
  bool mentions(VariableId v) const {
    return (subject.is_variable() && subject.id == v) || (object.is_variable() && object.id == v);
  }

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

/// Horn rule `body => head`. The body may be empty (search seeds).
struct Rule {
  std::vector<Atom> body;
  Atom head;

  /// Number of atoms, head included.
  std::size_t length() const { return body.size() + 1; }

  friend auto operator<=>(const Rule&, const Rule&) = default;
};

struct RuleHash {
  std::size_t operator()(const Rule& rule) const noexcept;
};

/// Partial map from variable index to entity.
class Substitution {
 public:
  Substitution() = default;
  explicit Substitution(std::size_t num_variables) : values_(num_variables, kUnbound) {}

  bool is_bound(VariableId v) const { return v < values_.size() && values_[v] != kUnbound; }
  std::optional<EntityId> get(VariableId v) const {
    if (!is_bound(v)) return std::nullopt;
    return values_[v];
  }
  EntityId at(VariableId v) const { return values_.at(v); }
  void bind(VariableId v, EntityId e);
  void unbind(VariableId v) {
    if (v < values_.size()) values_[v] = kUnbound;
  }
  /// True if some bound variable other than `except` maps to `e`.
  bool maps_to(EntityId e, std::optional<VariableId> except = std::nullopt) const;
  bool is_injective() const;
  std::size_t capacity() const noexcept { return values_.size(); }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  static constexpr EntityId kUnbound = ~EntityId{0};
  std::vector<EntityId> values_;
};

/// Distinct variables of the rule in ascending order.
std::vector<VariableId> variables(const Rule& rule);
/// One past the largest variable index used (0 for a ground rule).
VariableId variable_bound(const Rule& rule);
std::vector<VariableId> head_variables(const Rule& rule);
/// Number of distinct atoms (head or body) each variable occurs in, indexed by
/// variable; 0 for unused indexes.
std::vector<std::size_t> variable_atom_counts(const Rule& rule);
/// Variables occurring in exactly one atom.
std::size_t open_variable_count(const Rule& rule);

/// Every atom transitively shares a variable with every other atom.
bool is_connected(const Rule& rule);
/// Every head variable occurs in the body.
bool is_safe(const Rule& rule);
/// Every variable occurs in at least two atoms.
bool is_closed(const Rule& rule);

Atom apply_substitution(const Atom& atom, const Substitution& sigma);
std::vector<Atom> apply_substitution(std::span<const Atom> atoms, const Substitution& sigma);

/// Canonical representative of the rule's alpha-equivalence class. Head
/// variables are numbered first (subject, then object); the body order is the
/// one whose first-appearance numbering gives the lexicographically smallest
/// atom sequence, which sorts atoms by relation id first.
Rule canonicalize(const Rule& rule);

/// Renders `rel(?a, ?b) & rel2(?b, ?c) => rel3(?a, ?c)`. Variables are named
/// by first appearance scanning the head, then the body; constants print
/// their labels. An empty body renders as `=> head`.
std::string to_string(const Rule& rule, const Vocabulary& vocab, bool negated_head = false);
std::string to_string(const Atom& atom, const Vocabulary& vocab);

struct ParsedRule {
  Rule rule;
  bool negated_head = false;
};

/// Parses the textual grammar (`!` before the head marks a negative rule).
/// Unknown relation or entity labels raise ParseError.
ParsedRule parse_rule_text(std::string_view text, const Vocabulary& vocab);
/// As parse_rule_text, rejecting negated heads.
Rule parse_rule(std::string_view text, const Vocabulary& vocab);

}  // namespace hornforge
