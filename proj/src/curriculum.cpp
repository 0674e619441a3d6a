#include "adaptive/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "adaptive/errors.hpp"

namespace adaptive {

namespace {

CurriculumUnit make_unit(const SkillId& skill, const LearnerProfile& profile,
                         const Catalog& catalog, double threshold) {
  CurriculumUnit unit;
  unit.target_skill = skill;
  unit.mastery_threshold = threshold;
  const double m = profile.mastery_of(skill);
  std::vector<std::pair<double, const ContentItem*>> ranked;
  for (const auto& it : catalog.items()) {
    auto w = it.skills.find(skill);
    if (w != it.skills.end() && w->second > 0.0) {
      ranked.emplace_back(std::abs(it.difficulty - m), &it);
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->id < b.second->id;
  });
  for (const auto& [gap, it] : ranked) unit.item_pool.push_back(it->id);
  return unit;
}

}  // namespace

Curriculum generate_curriculum(const LearnerProfile& profile,
                               const Catalog& catalog,
                               const std::set<SkillId>& objectives,
                               const CurriculumConfig& cfg) {
  std::set<SkillId> needed;
  for (const auto& obj : objectives) {
    if (!catalog.has_skill(obj)) {
      throw ValidationError(fmt::format("unknown objective skill '{}'", obj),
                            "objectives");
    }
    needed.insert(obj);
    for (auto& p : catalog.transitive_prerequisites(obj)) needed.insert(p);
  }

  std::vector<SkillId> open;
  for (const auto& s : needed) {
    if (profile.mastery_of(s) < cfg.mastery_threshold) open.push_back(s);
  }
  std::stable_sort(open.begin(), open.end(),
                   [&](const SkillId& a, const SkillId& b) {
                     int da = catalog.depth_of(a), db = catalog.depth_of(b);
                     if (da != db) return da < db;
                     return a < b;
                   });

  Curriculum c;
  c.generated_at = profile.last_tick();
  for (const auto& s : open) {
    CurriculumUnit unit = make_unit(s, profile, catalog, cfg.mastery_threshold);
    if (!unit.item_pool.empty()) c.units.push_back(std::move(unit));
  }
  return c;
}

Curriculum refresh_curriculum(const LearnerProfile& updated,
                              const Catalog& catalog,
                              const Curriculum& current,
                              const std::set<SkillId>& objectives,
                              const CurriculumConfig& cfg) {
  Curriculum fresh = generate_curriculum(updated, catalog, objectives, cfg);
  fresh.generated_at = std::max(current.generated_at + 1, updated.last_tick());
  if (current.units.empty()) return fresh;

  const SkillId& active = current.units.front().target_skill;
  if (updated.mastery_of(active) >= current.units.front().mastery_threshold) {
    return fresh;
  }
  auto prereqs = catalog.transitive_prerequisites(active);
  std::unordered_set<SkillId> prereq_set(prereqs.begin(), prereqs.end());
  for (const auto& u : fresh.units) {
    if (prereq_set.count(u.target_skill)) return fresh;
  }

  auto pos = std::find_if(fresh.units.begin(), fresh.units.end(),
                          [&](const CurriculumUnit& u) {
                            return u.target_skill == active;
                          });
  CurriculumUnit unit;
  if (pos != fresh.units.end()) {
    unit = std::move(*pos);
    fresh.units.erase(pos);
  } else {
    unit = make_unit(active, updated, catalog,
                     current.units.front().mastery_threshold);
    if (unit.item_pool.empty()) return fresh;
  }
  fresh.units.insert(fresh.units.begin(), std::move(unit));
  return fresh;
}

std::vector<ItemId> static_item_order(const Curriculum& curriculum) {
  std::vector<ItemId> out;
  std::unordered_set<ItemId> seen;
  for (const auto& u : curriculum.units) {
    for (const auto& id : u.item_pool) {
      if (seen.insert(id).second) out.push_back(id);
    }
  }
  return out;
}

}  // namespace adaptive
