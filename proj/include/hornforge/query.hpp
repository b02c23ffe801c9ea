#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_set>
#include <vector>

#include "hornforge/kg_store.hpp"
#include "hornforge/rule.hpp"

namespace hornforge {

/// Calls `on_match` once per extension of `bindings` under which `atom`
/// becomes a fact of `kg`. The atom's free variables are bound in `bindings`
/// during the callback and unbound again afterwards. Return false from the
/// callback to stop early; the function returns false iff it was stopped.
/// With `object_identity`, a variable never takes a value already held by a
/// different variable.
bool for_each_match(const KnowledgeGraph& kg, const Atom& atom, Substitution& bindings, bool object_identity,
                    const std::function<bool()>& on_match);

/// All extensions of `bindings` matching `atom`, without duplicates.
std::vector<Substitution> match_atom(const KnowledgeGraph& kg, const Atom& atom, const Substitution& bindings,
                                     bool object_identity = false);

/// Backtracking evaluator for a conjunction of atoms. At each step it joins
/// the atom with the fewest candidate facts under the current bindings.
class ConjunctiveQuery {
 public:
  ConjunctiveQuery(const KnowledgeGraph& kg, std::span<const Atom> atoms, bool object_identity = false);

  /// Whether some extension of `bindings` satisfies every atom.
  bool exists(Substitution& bindings) const;

  /// Streams each distinct value `var` takes over the satisfying extensions
  /// of `bindings`. Once a value is found its remaining search is cut, so the
  /// cost is driven by distinct values rather than by all solutions.
  bool for_each_distinct(Substitution& bindings, VariableId var,
                         const std::function<bool(EntityId)>& on_value) const;
  std::vector<EntityId> distinct_values(Substitution& bindings, VariableId var) const;

  /// Every satisfying extension (all atom variables bound in the callback).
  bool for_each_solution(Substitution& bindings, const std::function<bool()>& on_solution) const;

 private:
  using Mask = std::uint64_t;

  struct Choice {
    std::size_t atom;
    std::size_t candidates;
  };

  std::size_t candidate_count(const Atom& atom, const Substitution& bindings) const;
  // Most selective remaining atom; prefers atoms mentioning `focus` when no
  // atom is (almost) fully determined.
  Choice pick(Mask remaining, const Substitution& bindings, std::optional<VariableId> focus) const;
  bool exists_from(Mask remaining, Substitution& bindings) const;
  bool project_from(Mask remaining, Substitution& bindings, VariableId var, std::unordered_set<EntityId>& seen,
                    const std::function<bool(EntityId)>& on_value) const;
  bool solve_from(Mask remaining, Substitution& bindings, const std::function<bool()>& on_solution) const;

  const KnowledgeGraph& kg_;
  std::vector<Atom> atoms_;
  bool object_identity_;
};

}  // namespace hornforge
