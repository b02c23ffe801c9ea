#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hornforge {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

/// Bijection between labels and dense ids, assigned in first-appearance order.
class Dictionary {
 public:
  std::uint32_t intern(std::string_view label);
  std::optional<std::uint32_t> find(std::string_view label) const;
  const std::string& label(std::uint32_t id) const { return labels_.at(id); }
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

/// Read-only pair of dictionaries used to print and parse rules.
struct Vocabulary {
  const Dictionary& entities;
  const Dictionary& relations;
};

}  // namespace hornforge
