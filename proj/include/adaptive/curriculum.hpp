#pragma once

#include <set>
#include <vector>

#include "adaptive/catalog.hpp"
#include "adaptive/types.hpp"

namespace adaptive {

struct CurriculumConfig {
  double mastery_threshold = 0.8;  // theta

  bool operator==(const CurriculumConfig&) const = default;
};

struct CurriculumUnit {
  SkillId target_skill;
  std::vector<ItemId> item_pool;  // every item teaching target_skill
  double mastery_threshold = 0.8;

  bool operator==(const CurriculumUnit&) const = default;
};

struct Curriculum {
  std::vector<CurriculumUnit> units;
  Tick generated_at = 0;

  bool empty() const { return units.empty(); }
  bool operator==(const Curriculum&) const = default;
};

// One unit per objective skill (and transitive prerequisite skill) whose
// mastery is below threshold, ordered by prerequisite depth then skill id.
// Skills no item teaches are skipped. Pools are sorted by
// |difficulty - mastery(target)| then item id.
//
// Throws ValidationError for objectives the catalog does not know.
Curriculum generate_curriculum(const LearnerProfile& profile,
                               const Catalog& catalog,
                               const std::set<SkillId>& objectives,
                               const CurriculumConfig& cfg = {});

// Regenerates for the updated profile while keeping the active (first) unit
// in front until its skill reaches threshold. The active unit gives way if a
// prerequisite of it has re-entered the curriculum.
Curriculum refresh_curriculum(const LearnerProfile& updated,
                              const Catalog& catalog,
                              const Curriculum& current,
                              const std::set<SkillId>& objectives,
                              const CurriculumConfig& cfg = {});

// Unit pools concatenated in unit order with duplicates dropped.
std::vector<ItemId> static_item_order(const Curriculum& curriculum);

}  // namespace adaptive
