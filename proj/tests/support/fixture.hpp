#pragma once

#include <string>

#include "hornforge/kg_store.hpp"
#include "hornforge/rule.hpp"

namespace hftest {
using namespace hornforge;

inline std::string fixture_path(const std::string& name) { return std::string(HORNFORGE_FIXTURE_DIR) + "/" + name; }

inline const KnowledgeGraph& sample_kg() {
  static const KnowledgeGraph kg = load_triples_file(fixture_path("sample_kg.tsv"));
  return kg;
}

inline Rule rule_of(const KnowledgeGraph& kg, const std::string& text) { return parse_rule(text, kg.vocabulary()); }

inline Triple triple_of(const KnowledgeGraph& kg, const std::string& s, const std::string& r, const std::string& o) {
  return {*kg.entity_id(s), *kg.relation_id(r), *kg.entity_id(o)};
}

// The running example: languages follow from the birth country.
inline constexpr const char* kRuleR = "birthCountry(?a, ?c) & officialLang(?c, ?b) => speaks(?a, ?b)";

}  // namespace hftest
