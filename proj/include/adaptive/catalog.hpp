#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "adaptive/types.hpp"

namespace adaptive {

struct SkillSpec {
  SkillId id;
  std::vector<SkillId> prerequisites;
};

// Immutable, validated content catalog.
//
// Items are stored sorted by id, so comparing two index sequences
// lexicographically gives the same answer as comparing the id sequences.
// The skill graph is the union of the explicit skill edges and the edges
// implied by item prerequisites (prerequisite skill -> every skill the item
// teaches). It must be acyclic.
class Catalog {
 public:
  // An item's skill and prerequisite maps keyed by skill index.
  struct IndexedItem {
    std::vector<std::pair<std::uint32_t, double>> skills;
    std::vector<std::pair<std::uint32_t, double>> prerequisites;
  };

  Catalog() = default;

  // Throws CatalogError naming the offending id on duplicates, dangling
  // references, out-of-range values or prerequisite cycles.
  static Catalog build(std::vector<SkillSpec> skills,
                       std::vector<ContentItem> items);

  const std::vector<ContentItem>& items() const { return items_; }
  const ContentItem& item(std::size_t index) const { return items_[index]; }
  const IndexedItem& indexed(std::size_t index) const { return indexed_[index]; }
  const ContentItem* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;

  // Sorted skill ids.
  const std::vector<SkillId>& skills() const { return skill_ids_; }
  bool has_skill(std::string_view id) const;
  std::optional<std::size_t> skill_index(std::string_view id) const;

  // Direct prerequisite skills of `skill` (sorted, explicit + implied).
  const std::vector<SkillId>& prerequisites_of(const SkillId& skill) const;
  // Length of the longest prerequisite chain ending at `skill`.
  int depth_of(const SkillId& skill) const;
  // Every skill that must be learned before `skill`, transitively.
  std::vector<SkillId> transitive_prerequisites(const SkillId& skill) const;

  // Explicitly declared skill specs, as loaded.
  const std::vector<SkillSpec>& skill_specs() const { return skill_specs_; }

 private:
  std::vector<SkillSpec> skill_specs_;
  std::vector<ContentItem> items_;
  std::vector<IndexedItem> indexed_;
  std::vector<SkillId> skill_ids_;
  std::unordered_map<std::string, std::size_t> item_index_;
  std::unordered_map<std::string, std::size_t> skill_index_;
  std::vector<std::vector<SkillId>> prereqs_;
  std::vector<int> depth_;
};

Catalog catalog_from_json(const nlohmann::json& doc);
nlohmann::json catalog_to_json(const Catalog& catalog);
Catalog load_catalog(const std::filesystem::path& path);

}  // namespace adaptive
