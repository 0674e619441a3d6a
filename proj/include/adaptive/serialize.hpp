#pragma once

// JSON mappings for the domain types. Doubles round-trip exactly, which the
// event log relies on.

#include <json.hpp>

#include "adaptive/analytics.hpp"
#include "adaptive/curriculum.hpp"
#include "adaptive/fusion.hpp"
#include "adaptive/pathway.hpp"
#include "adaptive/provider.hpp"
#include "adaptive/types.hpp"

namespace adaptive {

using nlohmann::json;

void to_json(json& j, Modality m);
void from_json(const json& j, Modality& m);

void to_json(json& j, const AssessmentResult& r);
void from_json(const json& j, AssessmentResult& r);

void to_json(json& j, const InteractionRecord& r);
void from_json(const json& j, InteractionRecord& r);

void to_json(json& j, const RollingMetrics& m);
void from_json(const json& j, RollingMetrics& m);

void to_json(json& j, const LearnerProfile& p);
void from_json(const json& j, LearnerProfile& p);

void to_json(json& j, const CurriculumUnit& u);
void from_json(const json& j, CurriculumUnit& u);

void to_json(json& j, const Curriculum& c);
void from_json(const json& j, Curriculum& c);

void to_json(json& j, const Pathway& p);
void from_json(const json& j, Pathway& p);

void to_json(json& j, const ScoredPathway& s);
void from_json(const json& j, ScoredPathway& s);

void to_json(json& j, const AnalyticsState& s);
void from_json(const json& j, AnalyticsState& s);

void to_json(json& j, const RewardConfig& c);
void from_json(const json& j, RewardConfig& c);

void to_json(json& j, const FusionConfig& c);
void from_json(const json& j, FusionConfig& c);

void to_json(json& j, const CurriculumConfig& c);
void from_json(const json& j, CurriculumConfig& c);

void to_json(json& j, const TrainerConfig& c);
void from_json(const json& j, TrainerConfig& c);

void to_json(json& j, const Explanation& e);
void from_json(const json& j, Explanation& e);

}  // namespace adaptive
