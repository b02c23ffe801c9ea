#include "hornforge/kg_store.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "hornforge/error.hpp"

namespace hornforge {
namespace {

bool relation_major(const Triple& a, const Triple& b) {
  return std::tie(a.relation, a.subject, a.object) < std::tie(b.relation, b.subject, b.object);
}

// Splits `line` on tabs; returns false unless there are exactly three fields.
bool split_triple(std::string_view line, std::string_view (&fields)[3]) {
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const auto tab = line.find('\t', start);
    if (i < 2) {
      if (tab == std::string_view::npos) return false;
      fields[i] = line.substr(start, tab - start);
      start = tab + 1;
    } else {
      if (tab != std::string_view::npos) return false;
      fields[i] = line.substr(start);
    }
  }
  return !fields[0].empty() && !fields[1].empty() && !fields[2].empty();
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message), line_(line) {}

std::uint32_t Dictionary::intern(std::string_view label) {
  auto [it, inserted] = ids_.try_emplace(std::string(label), static_cast<std::uint32_t>(labels_.size()));
  if (inserted) labels_.push_back(it->first);
  return it->second;
}

std::optional<std::uint32_t> Dictionary::find(std::string_view label) const {
  const auto it = ids_.find(std::string(label));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void KnowledgeGraph::Adjacency::build_slots(std::size_t num_entities) {
  slot.assign(num_entities, kNoKey);
  for (std::size_t i = 0; i < keys.size(); ++i) slot[keys[i]] = static_cast<std::uint32_t>(i);
}

std::span<const EntityId> KnowledgeGraph::Adjacency::find(EntityId key) const {
  if (!slot.empty()) {
    if (key >= slot.size() || slot[key] == kNoKey) return {};
    const std::uint32_t i = slot[key];
    return {values.data() + offsets[i], values.data() + offsets[i + 1]};
  }
  const auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return {};
  const auto i = static_cast<std::size_t>(it - keys.begin());
  return {values.data() + offsets[i], values.data() + offsets[i + 1]};
}

KnowledgeGraph::KnowledgeGraph()
    : entities_(std::make_shared<Dictionary>()), relations_(std::make_shared<Dictionary>()), out_offsets_{0},
      in_offsets_{0} {}

KnowledgeGraph KnowledgeGraph::from_triples(std::shared_ptr<const Dictionary> entities,
                                            std::shared_ptr<const Dictionary> relations, std::vector<Triple> facts) {
  KnowledgeGraph kg;
  kg.entities_ = std::move(entities);
  kg.relations_ = std::move(relations);
  const std::size_t num_entities = kg.entities_->size();
  const std::size_t num_relations = kg.relations_->size();
  for (const Triple& t : facts) {
    if (t.subject >= num_entities || t.object >= num_entities || t.relation >= num_relations) {
      throw Error("triple id outside dictionary");
    }
  }
  std::sort(facts.begin(), facts.end(), relation_major);
  facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
  kg.facts_ = std::move(facts);

  kg.relation_index_.resize(num_relations);
  std::size_t pos = 0;
  for (RelationId r = 0; r < num_relations; ++r) {
    RelationIndex& idx = kg.relation_index_[r];
    idx.begin = pos;
    while (pos < kg.facts_.size() && kg.facts_[pos].relation == r) ++pos;
    idx.end = pos;

    // Facts are (subject, object)-sorted within the relation already.
    idx.by_subject.offsets.push_back(0);
    for (std::size_t i = idx.begin; i < idx.end; ++i) {
      const Triple& t = kg.facts_[i];
      if (idx.by_subject.keys.empty() || idx.by_subject.keys.back() != t.subject) {
        if (!idx.by_subject.keys.empty()) idx.by_subject.offsets.push_back(static_cast<std::uint32_t>(idx.by_subject.values.size()));
        idx.by_subject.keys.push_back(t.subject);
      }
      idx.by_subject.values.push_back(t.object);
    }
    if (!idx.by_subject.keys.empty()) idx.by_subject.offsets.push_back(static_cast<std::uint32_t>(idx.by_subject.values.size()));

    std::vector<std::pair<EntityId, EntityId>> inverse;
    inverse.reserve(idx.end - idx.begin);
    for (std::size_t i = idx.begin; i < idx.end; ++i) inverse.emplace_back(kg.facts_[i].object, kg.facts_[i].subject);
    std::sort(inverse.begin(), inverse.end());
    idx.by_object.offsets.push_back(0);
    for (const auto& [o, s] : inverse) {
      if (idx.by_object.keys.empty() || idx.by_object.keys.back() != o) {
        if (!idx.by_object.keys.empty()) idx.by_object.offsets.push_back(static_cast<std::uint32_t>(idx.by_object.values.size()));
        idx.by_object.keys.push_back(o);
      }
      idx.by_object.values.push_back(s);
    }
    if (!idx.by_object.keys.empty()) idx.by_object.offsets.push_back(static_cast<std::uint32_t>(idx.by_object.values.size()));
  }

  // Direct slot tables cost 8 bytes per (relation, entity); cap them at 64 MiB.
  constexpr std::size_t kMaxSlots = std::size_t{1} << 23;
  if (num_relations * num_entities <= kMaxSlots) {
    for (RelationIndex& idx : kg.relation_index_) {
      idx.by_subject.build_slots(num_entities);
      idx.by_object.build_slots(num_entities);
    }
  }

  // Entity-major edge lists (counting sort keeps the (relation, other) order).
  kg.out_offsets_.assign(num_entities + 1, 0);
  kg.in_offsets_.assign(num_entities + 1, 0);
  for (const Triple& t : kg.facts_) {
    ++kg.out_offsets_[t.subject + 1];
    ++kg.in_offsets_[t.object + 1];
  }
  for (std::size_t e = 0; e < num_entities; ++e) {
    kg.out_offsets_[e + 1] += kg.out_offsets_[e];
    kg.in_offsets_[e + 1] += kg.in_offsets_[e];
  }
  kg.out_edges_.resize(kg.facts_.size());
  kg.in_edges_.resize(kg.facts_.size());
  std::vector<std::uint32_t> out_fill(kg.out_offsets_.begin(), kg.out_offsets_.end() - 1);
  std::vector<std::uint32_t> in_fill(kg.in_offsets_.begin(), kg.in_offsets_.end() - 1);
  for (const Triple& t : kg.facts_) {
    kg.out_edges_[out_fill[t.subject]++] = Edge{t.relation, t.object};
  }
  std::vector<Triple> by_object(kg.facts_);
  std::sort(by_object.begin(), by_object.end(), [](const Triple& a, const Triple& b) {
    return std::tie(a.relation, a.object, a.subject) < std::tie(b.relation, b.object, b.subject);
  });
  for (const Triple& t : by_object) {
    kg.in_edges_[in_fill[t.object]++] = Edge{t.relation, t.subject};
  }
  return kg;
}

std::span<const Triple> KnowledgeGraph::facts_of(RelationId r) const {
  if (r >= relation_index_.size()) return {};
  const RelationIndex& idx = relation_index_[r];
  return {facts_.data() + idx.begin, facts_.data() + idx.end};
}

bool KnowledgeGraph::contains(EntityId s, RelationId r, EntityId o) const {
  const auto objects = objects_of(r, s);
  return std::binary_search(objects.begin(), objects.end(), o);
}

std::span<const EntityId> KnowledgeGraph::objects_of(RelationId r, EntityId s) const {
  if (r >= relation_index_.size()) return {};
  return relation_index_[r].by_subject.find(s);
}

std::span<const EntityId> KnowledgeGraph::subjects_of(RelationId r, EntityId o) const {
  if (r >= relation_index_.size()) return {};
  return relation_index_[r].by_object.find(o);
}

std::span<const EntityId> KnowledgeGraph::distinct_subjects(RelationId r) const {
  if (r >= relation_index_.size()) return {};
  return relation_index_[r].by_subject.keys;
}

std::span<const EntityId> KnowledgeGraph::distinct_objects(RelationId r) const {
  if (r >= relation_index_.size()) return {};
  return relation_index_[r].by_object.keys;
}

std::span<const Edge> KnowledgeGraph::outgoing(EntityId e) const {
  if (e + 1 >= out_offsets_.size()) return {};
  return {out_edges_.data() + out_offsets_[e], out_edges_.data() + out_offsets_[e + 1]};
}

std::span<const Edge> KnowledgeGraph::incoming(EntityId e) const {
  if (e + 1 >= in_offsets_.size()) return {};
  return {in_edges_.data() + in_offsets_[e], in_edges_.data() + in_offsets_[e + 1]};
}

KnowledgeGraph load_triples(std::istream& in) {
  auto entities = std::make_shared<Dictionary>();
  auto relations = std::make_shared<Dictionary>();
  std::vector<Triple> facts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.empty() || view.front() == '#') continue;
    std::string_view fields[3];
    if (!split_triple(view, fields)) {
      throw ParseError(line_no, "expected 3 tab-separated fields");
    }
    // Interning order: subject, relation, object.
    const EntityId s = entities->intern(fields[0]);
    const RelationId r = relations->intern(fields[1]);
    const EntityId o = entities->intern(fields[2]);
    facts.push_back({s, r, o});
  }
  return KnowledgeGraph::from_triples(std::move(entities), std::move(relations), std::move(facts));
}

KnowledgeGraph load_triples_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return load_triples(in);
}

void write_triples(const KnowledgeGraph& kg, std::ostream& out) {
  for (const Triple& t : kg.facts()) {
    out << kg.entity_label(t.subject) << '\t' << kg.relation_label(t.relation) << '\t' << kg.entity_label(t.object)
        << '\n';
  }
}

RelationStats relation_stats(const KnowledgeGraph& kg, RelationId r) {
  const std::size_t count = kg.fact_count(r);
  if (count == 0) throw Error("undefined functionality");
  const std::size_t subjects = kg.distinct_subjects(r).size();
  const std::size_t objects = kg.distinct_objects(r).size();
  return RelationStats{r,
                       count,
                       subjects,
                       objects,
                       Rational(static_cast<std::int64_t>(subjects), static_cast<std::int64_t>(count)),
                       Rational(static_cast<std::int64_t>(objects), static_cast<std::int64_t>(count))};
}

KnowledgeGraph select_relevant_subgraph(const KnowledgeGraph& kg, RelationId head_relation, std::size_t max_len) {
  if (max_len < 2) throw Error("rule length must be at least 2");
  std::vector<char> selected(kg.num_entities(), 0);
  std::vector<EntityId> frontier;
  for (const Triple& t : kg.facts_of(head_relation)) {
    for (EntityId e : {t.subject, t.object}) {
      if (!selected[e]) {
        selected[e] = 1;
        frontier.push_back(e);
      }
    }
  }
  // Layers 1 .. max_len - 2; a new layer only needs the previous one's
  // neighbours since earlier layers were expanded already.
  for (std::size_t layer = 1; layer + 2 <= max_len && !frontier.empty(); ++layer) {
    std::vector<EntityId> next;
    for (EntityId e : frontier) {
      for (const auto edges : {kg.outgoing(e), kg.incoming(e)}) {
        for (const Edge& edge : edges) {
          if (!selected[edge.other]) {
            selected[edge.other] = 1;
            next.push_back(edge.other);
          }
        }
      }
    }
    frontier = std::move(next);
  }
  std::vector<Triple> kept;
  for (const Triple& t : kg.facts()) {
    if (selected[t.subject] && selected[t.object]) kept.push_back(t);
  }
  return KnowledgeGraph::from_triples(kg.entity_dictionary(), kg.relation_dictionary(), std::move(kept));
}

SparseBoolMatrix adjacency_matrix(const KnowledgeGraph& kg, RelationId r) {
  std::vector<SparseBoolMatrix::Coordinate> coords;
  for (const Triple& t : kg.facts_of(r)) coords.emplace_back(t.subject, t.object);
  return SparseBoolMatrix::from_coordinates(kg.num_entities(), std::move(coords));
}

}  // namespace hornforge
