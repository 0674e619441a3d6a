#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adaptive {

using SkillId = std::string;
using ItemId = std::string;
// Abstract integer clock. One tick per interaction.
using Tick = std::int64_t;

enum class Modality { kVideo, kText, kExercise, kQuiz };

inline constexpr std::array<Modality, 4> kAllModalities = {
    Modality::kVideo, Modality::kText, Modality::kExercise, Modality::kQuiz};

std::string_view to_string(Modality m);
// Throws ValidationError for unknown names.
Modality parse_modality(std::string_view name);

struct ContentItem {
  ItemId id;
  std::map<SkillId, double> skills;  // weight in [0,1], at least one > 0
  double difficulty = 0.0;
  Modality modality = Modality::kText;
  double duration_minutes = 1.0;
  std::map<SkillId, double> prerequisites;  // minimum mastery per skill

  bool assessable() const { return modality == Modality::kQuiz; }
  bool operator==(const ContentItem&) const = default;
};

struct AssessmentResult {
  ItemId item_id;
  std::map<SkillId, double> skills_assessed;
  double score = 0.0;
  double response_time_s = 1.0;
  Tick timestamp = 0;

  bool operator==(const AssessmentResult&) const = default;
};

struct InteractionRecord {
  ItemId item_id;
  Tick timestamp = 0;
  // Absent when an assessment was fused without an enclosing observation.
  std::optional<double> engagement_observed;
  std::optional<AssessmentResult> assessment;
  // Whether the item was the head of the engine's recommendation.
  bool planned = true;

  bool operator==(const InteractionRecord&) const = default;
};

// The five analytics signals, in this fixed order.
struct RollingMetrics {
  double rolling_accuracy = 0.5;
  double accuracy_trend = 0.0;
  double mean_engagement = 0.5;
  double pace = 0.0;
  double streak = 0.0;

  bool operator==(const RollingMetrics&) const = default;
};

inline constexpr std::size_t kSignalDim = 5;
using SignalVector = std::array<double, kSignalDim>;

inline SignalVector to_signals(const RollingMetrics& m) {
  return {m.rolling_accuracy, m.accuracy_trend, m.mean_engagement, m.pace,
          m.streak};
}

struct LearnerProfile {
  std::string learner_id;
  std::map<SkillId, double> mastery;
  std::map<Modality, double> preferences;
  double engagement = 0.5;
  std::vector<InteractionRecord> history;
  RollingMetrics metrics;

  // Unseen skills read as 0.
  double mastery_of(const SkillId& skill) const;
  // Unseen modalities read as 0.5.
  double preference_of(Modality m) const;
  // Timestamp of the latest interaction, 0 when history is empty.
  Tick last_tick() const;

  bool operator==(const LearnerProfile&) const = default;
};

// Cold-start profile: empty mastery, neutral preferences, engagement 0.5.
LearnerProfile make_profile(std::string learner_id);

}  // namespace adaptive
