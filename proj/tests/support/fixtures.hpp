#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "adaptive/catalog.hpp"
#include "adaptive/types.hpp"

namespace fixtures {

using namespace adaptive;

inline ContentItem item(std::string id, std::map<SkillId, double> skills, double difficulty,
                        Modality modality = Modality::kText,
                        std::map<SkillId, double> prerequisites = {}) {
  ContentItem it;
  it.id = std::move(id);
  it.skills = std::move(skills);
  it.difficulty = difficulty;
  it.modality = modality;
  it.prerequisites = std::move(prerequisites);
  return it;
}

inline const Catalog& reference_catalog() {
  static const Catalog catalog =
      load_catalog(std::filesystem::path(ADAPTIVE_DATA_DIR) / "reference_catalog.json");
  return catalog;
}

// s1 -> s2 chain with two items each, plus an independent s3.
inline Catalog chain_catalog() {
  return Catalog::build(
      {{"s1", {}}, {"s2", {"s1"}}, {"s3", {}}},
      {item("a-easy", {{"s1", 1.0}}, 0.2, Modality::kVideo),
       item("a-quiz", {{"s1", 1.0}}, 0.3, Modality::kQuiz),
       item("b-easy", {{"s2", 1.0}}, 0.4, Modality::kText, {{"s1", 0.3}}),
       item("b-quiz", {{"s2", 1.0}}, 0.5, Modality::kQuiz, {{"s1", 0.3}}),
       item("c-quiz", {{"s3", 1.0}}, 0.3, Modality::kQuiz)});
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("adaptive-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
