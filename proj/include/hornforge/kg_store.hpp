#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hornforge/dictionary.hpp"
#include "hornforge/rational.hpp"
#include "hornforge/sparse_bool_matrix.hpp"

namespace hornforge {

struct Triple {
  EntityId subject;
  RelationId relation;
  EntityId object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// One incident edge of an entity: the relation and the entity at the other end.
struct Edge {
  RelationId relation;
  EntityId other;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct RelationStats {
  RelationId relation;
  std::size_t fact_count;
  std::size_t distinct_subjects;
  std::size_t distinct_objects;
  Rational functionality;          // distinct_subjects / fact_count
  Rational inverse_functionality;  // distinct_objects / fact_count
};

/// Immutable, interned triple store.
///
/// Facts are kept duplicate-free. For each relation there is a subject-keyed
/// and an object-keyed adjacency list, and for each entity the outgoing and
/// incoming edges across all relations, so every bound-argument pattern of a
/// binary atom resolves to one contiguous sorted span.
///
/// Subgraphs share the dictionaries of their parent graph, so ids (and matrix
/// dimensions) stay comparable between the two.
class KnowledgeGraph {
 public:
  KnowledgeGraph();

  /// Builds the graph from id triples over the given dictionaries. Duplicate
  /// triples are dropped; ids outside the dictionaries are rejected.
  static KnowledgeGraph from_triples(std::shared_ptr<const Dictionary> entities,
                                     std::shared_ptr<const Dictionary> relations, std::vector<Triple> facts);

  const Dictionary& entities() const noexcept { return *entities_; }
  const Dictionary& relations() const noexcept { return *relations_; }
  const std::shared_ptr<const Dictionary>& entity_dictionary() const noexcept { return entities_; }
  const std::shared_ptr<const Dictionary>& relation_dictionary() const noexcept { return relations_; }
  Vocabulary vocabulary() const noexcept { return {*entities_, *relations_}; }

  std::size_t num_entities() const noexcept { return entities_->size(); }
  std::size_t num_relations() const noexcept { return relations_->size(); }
  std::size_t num_facts() const noexcept { return facts_.size(); }

  /// All facts ordered by (relation, subject, object).
  std::span<const Triple> facts() const noexcept { return facts_; }
  /// Facts of one relation, ordered by (subject, object).
  std::span<const Triple> facts_of(RelationId r) const;

  bool contains(EntityId s, RelationId r, EntityId o) const;
  bool contains(const Triple& t) const { return contains(t.subject, t.relation, t.object); }
  std::span<const EntityId> objects_of(RelationId r, EntityId s) const;
  std::span<const EntityId> subjects_of(RelationId r, EntityId o) const;
  std::span<const EntityId> distinct_subjects(RelationId r) const;
  std::span<const EntityId> distinct_objects(RelationId r) const;
  std::size_t fact_count(RelationId r) const { return facts_of(r).size(); }

  std::span<const Edge> outgoing(EntityId e) const;
  std::span<const Edge> incoming(EntityId e) const;

  std::optional<EntityId> entity_id(std::string_view label) const { return entities_->find(label); }
  std::optional<RelationId> relation_id(std::string_view label) const { return relations_->find(label); }
  const std::string& entity_label(EntityId e) const { return entities_->label(e); }
  const std::string& relation_label(RelationId r) const { return relations_->label(r); }

 private:
  struct Adjacency {
    std::vector<EntityId> keys;
    std::vector<std::uint32_t> offsets;
    std::vector<EntityId> values;
    // Optional direct map entity -> position in `keys` (kNoKey if absent);
    // built when the graph is small enough, otherwise lookups binary-search.
    std::vector<std::uint32_t> slot;

    static constexpr std::uint32_t kNoKey = ~std::uint32_t{0};
    void build_slots(std::size_t num_entities);
    std::span<const EntityId> find(EntityId key) const;
  };

  struct RelationIndex {
    std::size_t begin = 0;  // range into facts_
    std::size_t end = 0;
    Adjacency by_subject;
    Adjacency by_object;
  };

  std::shared_ptr<const Dictionary> entities_;
  std::shared_ptr<const Dictionary> relations_;
  std::vector<Triple> facts_;
  std::vector<RelationIndex> relation_index_;
  std::vector<std::uint32_t> out_offsets_, in_offsets_;
  std::vector<Edge> out_edges_, in_edges_;
};

/// Reads `subject<TAB>relation<TAB>object` lines. Blank lines and lines
/// starting with '#' are skipped; a trailing '\r' is ignored. Throws
/// ParseError carrying the 1-based line number on a malformed line.
KnowledgeGraph load_triples(std::istream& in);
KnowledgeGraph load_triples_file(const std::filesystem::path& path);
/// Writes every fact as a TSV line, in fact order.
void write_triples(const KnowledgeGraph& kg, std::ostream& out);

/// Throws hornforge::Error("undefined functionality") for an empty relation.
RelationStats relation_stats(const KnowledgeGraph& kg, RelationId r);

/// Relevant-subgraph extraction for a head relation and a maximum rule length
/// (in atoms, head included). Entity layer 0 holds the endpoints of the head
/// relation's facts; each further layer, up to layer max_len - 2, adds every
/// entity linked to an earlier layer by any fact. The result keeps the facts
/// whose subject and object both lie in the union of the layers.
KnowledgeGraph select_relevant_subgraph(const KnowledgeGraph& kg, RelationId head_relation, std::size_t max_len);

/// |E| x |E| adjacency matrix of one relation.
SparseBoolMatrix adjacency_matrix(const KnowledgeGraph& kg, RelationId r);

}  // namespace hornforge
