#include "hornforge/query.hpp"

#include <algorithm>
#include <bit>

#include "hornforge/error.hpp"

namespace hornforge {
namespace {

std::optional<EntityId> resolve(Term t, const Substitution& s) {
  if (t.is_constant()) return t.id;
  return s.get(t.id);
}

// Binds `t` to `e` unless it is already bound or a constant; returns whether
// the binding is consistent. `bound_here` reports whether a binding was made.
bool bind_term(Term t, EntityId e, Substitution& s, bool object_identity, bool& bound_here) {
  bound_here = false;
  if (t.is_constant()) return t.id == e;
  if (auto current = s.get(t.id)) return *current == e;
  if (object_identity && s.maps_to(e, t.id)) return false;
  s.bind(t.id, e);
  bound_here = true;
  return true;
}

}  // namespace

bool for_each_match(const KnowledgeGraph& kg, const Atom& atom, Substitution& bindings, bool object_identity,
                    const std::function<bool()>& on_match) {
  const auto s = resolve(atom.subject, bindings);
  const auto o = resolve(atom.object, bindings);
  const RelationId r = atom.relation;

  auto try_pair = [&](EntityId subj, EntityId obj) {
    bool bound_s = false;
    bool bound_o = false;
    bool keep_going = true;
    if (bind_term(atom.subject, subj, bindings, object_identity, bound_s) &&
        bind_term(atom.object, obj, bindings, object_identity, bound_o)) {
      keep_going = on_match();
    }
    if (bound_o) bindings.unbind(atom.object.id);
    if (bound_s) bindings.unbind(atom.subject.id);
    return keep_going;
  };

  if (s && o) {
    if (kg.contains(*s, r, *o)) return try_pair(*s, *o);
    return true;
  }
  if (s) {
    for (EntityId obj : kg.objects_of(r, *s)) {
      if (!try_pair(*s, obj)) return false;
    }
    return true;
  }
  if (o) {
    for (EntityId subj : kg.subjects_of(r, *o)) {
      if (!try_pair(subj, *o)) return false;
    }
    return true;
  }
  for (const Triple& t : kg.facts_of(r)) {
    if (!try_pair(t.subject, t.object)) return false;
  }
  return true;
}

std::vector<Substitution> match_atom(const KnowledgeGraph& kg, const Atom& atom, const Substitution& bindings,
                                     bool object_identity) {
  std::vector<Substitution> out;
  Substitution work = bindings;
  for_each_match(kg, atom, work, object_identity, [&] {
    out.push_back(work);
    return true;
  });
  return out;
}

ConjunctiveQuery::ConjunctiveQuery(const KnowledgeGraph& kg, std::span<const Atom> atoms, bool object_identity)
    : kg_(kg), atoms_(atoms.begin(), atoms.end()), object_identity_(object_identity) {
  if (atoms_.size() > 64) throw Error("conjunction longer than 64 atoms");
}

std::size_t ConjunctiveQuery::candidate_count(const Atom& atom, const Substitution& bindings) const {
  const auto s = resolve(atom.subject, bindings);
  const auto o = resolve(atom.object, bindings);
  if (s && o) return kg_.contains(*s, atom.relation, *o) ? 1 : 0;
  if (s) return kg_.objects_of(atom.relation, *s).size();
  if (o) return kg_.subjects_of(atom.relation, *o).size();
  return kg_.fact_count(atom.relation);
}

ConjunctiveQuery::Choice ConjunctiveQuery::pick(Mask remaining, const Substitution& bindings,
                                                std::optional<VariableId> focus) const {
  Choice best{atoms_.size(), 0};
  Choice best_focus{atoms_.size(), 0};
  for (Mask m = remaining; m != 0; m &= m - 1) {
    const auto i = static_cast<std::size_t>(std::countr_zero(m));
    const std::size_t count = candidate_count(atoms_[i], bindings);
    if (count == 0) return {i, 0};
    if (best.atom == atoms_.size() || count < best.candidates) best = {i, count};
    if (focus && atoms_[i].mentions(*focus) &&
        (best_focus.atom == atoms_.size() || count < best_focus.candidates)) {
      best_focus = {i, count};
    }
  }
  if (best.candidates > 1 && best_focus.atom != atoms_.size()) return best_focus;
  return best;
}

bool ConjunctiveQuery::exists(Substitution& bindings) const {
  const Mask all = atoms_.empty() ? 0 : (~Mask{0} >> (64 - atoms_.size()));
  return exists_from(all, bindings);
}

bool ConjunctiveQuery::exists_from(Mask remaining, Substitution& bindings) const {
  if (remaining == 0) return true;
  const Choice choice = pick(remaining, bindings, std::nullopt);
  if (choice.candidates == 0) return false;
  const Mask rest = remaining & ~(Mask{1} << choice.atom);
  bool found = false;
  for_each_match(kg_, atoms_[choice.atom], bindings, object_identity_, [&] {
    found = exists_from(rest, bindings);
    return !found;
  });
  return found;
}

bool ConjunctiveQuery::for_each_distinct(Substitution& bindings, VariableId var,
                                         const std::function<bool(EntityId)>& on_value) const {
  const Mask all = atoms_.empty() ? 0 : (~Mask{0} >> (64 - atoms_.size()));
  std::unordered_set<EntityId> seen;
  return project_from(all, bindings, var, seen, on_value);
}

bool ConjunctiveQuery::project_from(Mask remaining, Substitution& bindings, VariableId var,
                                    std::unordered_set<EntityId>& seen,
                                    const std::function<bool(EntityId)>& on_value) const {
  if (auto value = bindings.get(var)) {
    if (seen.contains(*value)) return true;
    if (!exists_from(remaining, bindings)) return true;
    seen.insert(*value);
    return on_value(*value);
  }
  if (remaining == 0) return true;  // var does not occur in the conjunction
  const Choice choice = pick(remaining, bindings, var);
  if (choice.candidates == 0) return true;
  const Mask rest = remaining & ~(Mask{1} << choice.atom);
  return for_each_match(kg_, atoms_[choice.atom], bindings, object_identity_,
                        [&] { return project_from(rest, bindings, var, seen, on_value); });
}

std::vector<EntityId> ConjunctiveQuery::distinct_values(Substitution& bindings, VariableId var) const {
  std::vector<EntityId> out;
  for_each_distinct(bindings, var, [&](EntityId e) {
    out.push_back(e);
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

bool ConjunctiveQuery::for_each_solution(Substitution& bindings, const std::function<bool()>& on_solution) const {
  const Mask all = atoms_.empty() ? 0 : (~Mask{0} >> (64 - atoms_.size()));
  return solve_from(all, bindings, on_solution);
}

bool ConjunctiveQuery::solve_from(Mask remaining, Substitution& bindings,
                                  const std::function<bool()>& on_solution) const {
  if (remaining == 0) return on_solution();
  const Choice choice = pick(remaining, bindings, std::nullopt);
  if (choice.candidates == 0) return true;
  const Mask rest = remaining & ~(Mask{1} << choice.atom);
  return for_each_match(kg_, atoms_[choice.atom], bindings, object_identity_,
                        [&] { return solve_from(rest, bindings, on_solution); });
}

}  // namespace hornforge
