#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adaptive/types.hpp"

namespace adaptive {

struct FusionConfig {
  double lambda = 0.3;     // mastery EMA rate
  double mu = 0.2;         // engagement and modality-preference EMA rate
  std::size_t window = 10; // W, in assessments / interactions

  bool operator==(const FusionConfig&) const = default;
};

// What was observed alongside an interaction, when anything was.
struct Observation {
  double engagement = 0.5;
  std::optional<Modality> modality;
};

// Folds one assessment into the profile and returns the new profile.
//
// For every assessed skill s with weight w:
//   mastery'_s = (1 - lambda * w) * mastery_s + lambda * w * score
// (evaluated as mastery_s + lambda * w * (score - mastery_s)).
// Engagement (and the item modality's preference) move toward the observed
// engagement at rate mu when an observation is supplied. The interaction is
// appended to the history and the rolling metrics are recomputed.
//
// Throws ValidationError for out-of-range inputs and OrderingError when the
// result is older than the latest history entry.
LearnerProfile fuse_assessment(const LearnerProfile& profile,
                               const AssessmentResult& result,
                               const FusionConfig& cfg,
                               std::optional<Observation> observed = {},
                               bool planned = true);

// Records a non-assessed interaction: history, engagement EMA, modality
// preference EMA, rolling metrics. Mastery is untouched.
LearnerProfile observe_interaction(const LearnerProfile& profile,
                                   const ItemId& item_id, Tick timestamp,
                                   const Observation& observed,
                                   const FusionConfig& cfg,
                                   bool planned = true);

// (rolling_accuracy, accuracy_trend, mean_engagement, pace, streak) over the
// trailing window. Empty windows fall back to (0.5, 0, 0.5, 0, 0).
RollingMetrics compute_metrics(const LearnerProfile& profile,
                               const FusionConfig& cfg);
SignalVector compute_signals(const LearnerProfile& profile,
                             const FusionConfig& cfg);

// Every invariant violation, empty when the profile is well formed.
std::vector<std::string> validate_profile(const LearnerProfile& profile);

void validate(const FusionConfig& cfg);

}  // namespace adaptive
