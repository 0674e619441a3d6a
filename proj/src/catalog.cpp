#include "adaptive/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>

#include <fmt/format.h>

#include "adaptive/errors.hpp"

namespace adaptive {

namespace {

bool is_token(std::string_view s) {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::kVideo: return "video";
    case Modality::kText: return "text";
    case Modality::kExercise: return "exercise";
    case Modality::kQuiz: return "quiz";
  }
  return "text";
}

Modality parse_modality(std::string_view name) {
  for (Modality m : kAllModalities) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError(fmt::format("unknown modality '{}'", name),
                        "modality");
}

double LearnerProfile::mastery_of(const SkillId& skill) const {
  auto it = mastery.find(skill);
  return it == mastery.end() ? 0.0 : it->second;
}

double LearnerProfile::preference_of(Modality m) const {
  auto it = preferences.find(m);
  return it == preferences.end() ? 0.5 : it->second;
}

Tick LearnerProfile::last_tick() const {
  return history.empty() ? 0 : history.back().timestamp;
}

LearnerProfile make_profile(std::string learner_id) {
  LearnerProfile p;
  p.learner_id = std::move(learner_id);
  for (Modality m : kAllModalities) p.preferences[m] = 0.5;
  return p;
}

Catalog Catalog::build(std::vector<SkillSpec> skills,
                       std::vector<ContentItem> items) {
  Catalog c;
  std::set<SkillId> declared;
  for (const auto& s : skills) {
    if (!is_token(s.id)) {
      throw CatalogError(fmt::format("invalid skill id '{}'", s.id));
    }
    if (!declared.insert(s.id).second) {
      throw CatalogError(fmt::format("duplicate skill '{}'", s.id));
    }
  }
  for (const auto& s : skills) {
    for (const auto& p : s.prerequisites) {
      if (!declared.count(p)) {
        throw CatalogError(fmt::format(
            "skill '{}' requires unknown skill '{}'", s.id, p));
      }
    }
  }

  std::sort(items.begin(), items.end(),
            [](const ContentItem& a, const ContentItem& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    if (!is_token(it.id)) {
      throw CatalogError(fmt::format("invalid item id '{}'", it.id));
    }
    if (i > 0 && items[i - 1].id == it.id) {
      throw CatalogError(fmt::format("duplicate item '{}'", it.id));
    }
    if (it.skills.empty()) {
      throw CatalogError(fmt::format("item '{}' teaches no skill", it.id));
    }
    bool any_positive = false;
    for (const auto& [skill, w] : it.skills) {
      if (!declared.count(skill)) {
        throw CatalogError(fmt::format(
            "item '{}' references unknown skill '{}'", it.id, skill));
      }
      if (!in_unit(w)) {
        throw CatalogError(fmt::format(
            "item '{}' has skill weight out of range for '{}'", it.id, skill));
      }
      any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) {
      throw CatalogError(
          fmt::format("item '{}' has no positive skill weight", it.id));
    }
    if (!in_unit(it.difficulty)) {
      throw CatalogError(
          fmt::format("item '{}' difficulty out of range", it.id));
    }
    if (!(it.duration_minutes > 0.0) || !std::isfinite(it.duration_minutes)) {
      throw CatalogError(
          fmt::format("item '{}' duration must be positive", it.id));
    }
    for (const auto& [skill, threshold] : it.prerequisites) {
      if (!declared.count(skill)) {
        throw CatalogError(fmt::format(
            "item '{}' requires unknown skill '{}'", it.id, skill));
      }
      if (!in_unit(threshold)) {
        throw CatalogError(fmt::format(
            "item '{}' prerequisite threshold out of range for '{}'", it.id,
            skill));
      }
    }
  }

  c.skill_ids_.assign(declared.begin(), declared.end());
  for (std::size_t i = 0; i < c.skill_ids_.size(); ++i) {
    c.skill_index_.emplace(c.skill_ids_[i], i);
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    c.item_index_.emplace(items[i].id, i);
  }
  c.indexed_.resize(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& x = c.indexed_[i];
    for (const auto& [skill, w] : items[i].skills) {
      x.skills.emplace_back(static_cast<std::uint32_t>(c.skill_index_.at(skill)), w);
    }
    for (const auto& [skill, threshold] : items[i].prerequisites) {
      x.prerequisites.emplace_back(
          static_cast<std::uint32_t>(c.skill_index_.at(skill)), threshold);
    }
  }

  std::vector<std::set<SkillId>> edges(c.skill_ids_.size());
  for (const auto& s : skills) {
    auto& e = edges[c.skill_index_.at(s.id)];
    e.insert(s.prerequisites.begin(), s.prerequisites.end());
  }
  for (const auto& it : items) {
    for (const auto& [taught, w] : it.skills) {
      if (w <= 0.0) continue;
      for (const auto& [req, threshold] : it.prerequisites) {
        if (req != taught) edges[c.skill_index_.at(taught)].insert(req);
      }
    }
  }
  c.prereqs_.resize(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    c.prereqs_[i].assign(edges[i].begin(), edges[i].end());
    if (edges[i].count(c.skill_ids_[i])) {
      throw CatalogError(fmt::format(
          "prerequisite cycle through skill '{}'", c.skill_ids_[i]));
    }
  }

  // Depth by DFS; a grey node on the stack means a cycle.
  enum class Mark { kWhite, kGrey, kBlack };
  std::vector<Mark> mark(edges.size(), Mark::kWhite);
  c.depth_.assign(edges.size(), 0);
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    mark[v] = Mark::kGrey;
    int d = 0;
    for (const auto& p : c.prereqs_[v]) {
      std::size_t u = c.skill_index_.at(p);
      if (mark[u] == Mark::kGrey) {
        throw CatalogError(fmt::format(
            "prerequisite cycle through skill '{}'", c.skill_ids_[u]));
      }
      if (mark[u] == Mark::kWhite) visit(u);
      d = std::max(d, c.depth_[u] + 1);
    }
    c.depth_[v] = d;
    mark[v] = Mark::kBlack;
  };
  for (std::size_t v = 0; v < edges.size(); ++v) {
    if (mark[v] == Mark::kWhite) visit(v);
  }

  c.skill_specs_ = std::move(skills);
  c.items_ = std::move(items);
  return c;
}

const ContentItem* Catalog::find(std::string_view id) const {
  auto idx = index_of(id);
  return idx ? &items_[*idx] : nullptr;
}

std::optional<std::size_t> Catalog::index_of(std::string_view id) const {
  auto it = item_index_.find(std::string(id));
  if (it == item_index_.end()) return std::nullopt;
  return it->second;
}

bool Catalog::has_skill(std::string_view id) const {
  return skill_index_.count(std::string(id)) != 0;
}

std::optional<std::size_t> Catalog::skill_index(std::string_view id) const {
  auto it = skill_index_.find(std::string(id));
  if (it == skill_index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<SkillId>& Catalog::prerequisites_of(
    const SkillId& skill) const {
  static const std::vector<SkillId> kNone;
  auto idx = skill_index(skill);
  return idx ? prereqs_[*idx] : kNone;
}

int Catalog::depth_of(const SkillId& skill) const {
  auto idx = skill_index(skill);
  return idx ? depth_[*idx] : 0;
}

std::vector<SkillId> Catalog::transitive_prerequisites(
    const SkillId& skill) const {
  std::set<SkillId> seen;
  std::vector<SkillId> stack = prerequisites_of(skill);
  while (!stack.empty()) {
    SkillId s = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(s).second) continue;
    for (const auto& p : prerequisites_of(s)) stack.push_back(p);
  }
  return {seen.begin(), seen.end()};
}

namespace {

std::map<SkillId, double> read_weights(const nlohmann::json& j,
                                       const std::string& owner,
                                       const char* field) {
  std::map<SkillId, double> out;
  if (j.is_null()) return out;
  if (!j.is_object()) {
    throw CatalogError(
        fmt::format("item '{}': field '{}' must be an object", owner, field));
  }
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) {
      throw CatalogError(fmt::format(
          "item '{}': field '{}.{}' must be a number", owner, field, k));
    }
    out[k] = v.get<double>();
  }
  return out;
}

}  // namespace

Catalog catalog_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("skills") || !doc.contains("items")) {
    throw CatalogError("catalog must have top-level 'skills' and 'items'");
  }
  std::vector<SkillSpec> skills;
  for (const auto& s : doc.at("skills")) {
    SkillSpec spec;
    if (s.is_string()) {
      spec.id = s.get<std::string>();
    } else {
      if (!s.contains("id") || !s.at("id").is_string()) {
        throw CatalogError("skill entry without string 'id'");
      }
      spec.id = s.at("id").get<std::string>();
      if (s.contains("prerequisites")) {
        for (const auto& p : s.at("prerequisites")) {
          spec.prerequisites.push_back(p.get<std::string>());
        }
      }
    }
    skills.push_back(std::move(spec));
  }
  std::vector<ContentItem> items;
  for (const auto& j : doc.at("items")) {
    ContentItem it;
    if (!j.contains("id") || !j.at("id").is_string()) {
      throw CatalogError("item entry without string 'id'");
    }
    it.id = j.at("id").get<std::string>();
    try {
      it.skills = read_weights(j.value("skills", nlohmann::json()), it.id,
                               "skills");
      it.difficulty = j.at("difficulty").get<double>();
      it.modality = parse_modality(j.at("modality").get<std::string>());
      it.duration_minutes = j.at("duration_minutes").get<double>();
      it.prerequisites = read_weights(
          j.value("prerequisites", nlohmann::json()), it.id, "prerequisites");
    } catch (const nlohmann::json::exception& e) {
      throw CatalogError(fmt::format("item '{}': {}", it.id, e.what()));
    } catch (const ValidationError& e) {
      throw CatalogError(fmt::format("item '{}': {}", it.id, e.what()));
    }
    items.push_back(std::move(it));
  }
  return Catalog::build(std::move(skills), std::move(items));
}

nlohmann::json catalog_to_json(const Catalog& catalog) {
  nlohmann::json skills = nlohmann::json::array();
  for (const auto& s : catalog.skill_specs()) {
    skills.push_back({{"id", s.id}, {"prerequisites", s.prerequisites}});
  }
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : catalog.items()) {
    items.push_back({{"id", it.id},
                     {"skills", it.skills},
                     {"difficulty", it.difficulty},
                     {"modality", std::string(to_string(it.modality))},
                     {"duration_minutes", it.duration_minutes},
                     {"prerequisites", it.prerequisites}});
  }
  return {{"skills", skills}, {"items", items}};
}

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CatalogError(fmt::format("cannot open catalog '{}'", path.string()));
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw CatalogError(
        fmt::format("catalog '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return catalog_from_json(doc);
}

}  // namespace adaptive
