#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "adaptive/analytics.hpp"
#include "adaptive/catalog.hpp"
#include "adaptive/curriculum.hpp"
#include "adaptive/fusion.hpp"
#include "adaptive/pathway.hpp"
#include "adaptive/types.hpp"

namespace adaptive {

class Provider;

// Simulated learner. Latent ability is ground truth; the engine never sees
// it directly.
struct SimStudent {
  std::map<SkillId, double> ability;
  double learn_rate = 0.2;  // g
  std::map<Modality, double> modality_affinity;
  double frustration_threshold = 0.25;
  double boredom_threshold = 0.25;
  double guess_floor = 0.1;  // c

  bool operator==(const SimStudent&) const = default;
};

enum class AblationStrategy {
  kFullFramework,
  kNoRealTimeAdjustment,
  kNoPersonalizedRecommendations,
  kFixedLearningPath,
  kBasicAssessmentOnly,
  kStaticResourceAllocation,
};

inline constexpr std::array<AblationStrategy, 6> kAllStrategies = {
    AblationStrategy::kFullFramework,
    AblationStrategy::kNoRealTimeAdjustment,
    AblationStrategy::kNoPersonalizedRecommendations,
    AblationStrategy::kFixedLearningPath,
    AblationStrategy::kBasicAssessmentOnly,
    AblationStrategy::kStaticResourceAllocation,
};

// Enum name, e.g. "NoRealTimeAdjustment".
std::string_view to_string(AblationStrategy s);
// Human label, e.g. "No Real-Time Adjustment".
std::string_view strategy_label(AblationStrategy s);
// Accepts the enum name or the human label.
AblationStrategy parse_strategy(std::string_view name);

// When the engine re-runs pathway selection.
enum class Reselection {
  kRealTime,      // before every interaction, from the live profile
  kSessionStart,  // once; afterwards the static curriculum order is walked
};

struct SimConfig {
  std::size_t cohort_size = 200;
  std::size_t episodes = 50;
  std::size_t formative_every = 5;
  std::uint64_t seed = 0;
  AblationStrategy strategy = AblationStrategy::kFullFramework;
  Reselection reselection = Reselection::kRealTime;
  double retention_delay = 10.0;
  // Empty means every catalog skill.
  std::set<SkillId> objectives;
};

void validate(const SimConfig& cfg);

struct EngineConfig {
  RewardConfig reward;
  FusionConfig fusion;
  CurriculumConfig curriculum;
  TrainerConfig trainer;
  double base_stability = 5.0;
};

// Constants of the simulated student's own difficulty-fit kernel. They equal
// the engine defaults but are deliberately independent of EngineConfig so
// that engine ablations never change the students.
inline constexpr double kStudentStretch = 0.10;
inline constexpr double kStudentKernelWidth = 0.15;
inline constexpr double kResponseSlope = 4.0;
inline constexpr double kEngagementNoiseSd = 0.05;
inline constexpr double kDisengagedFloor = 0.05;

using Rng = std::mt19937_64;

// Independent stream per (seed, student, purpose).
Rng substream(std::uint64_t seed, std::uint64_t student, std::uint64_t purpose);

std::vector<SimStudent> spawn_cohort(const Catalog& catalog,
                                     const SimConfig& cfg);

// Skill-weighted latent ability over the item's skills.
double latent_ability(const SimStudent& student, const ContentItem& item);
double student_fit(const SimStudent& student, const ContentItem& item);

// p = c + (1 - c) * sigmoid(k * (a - difficulty)).
double correct_probability(const SimStudent& student, const ContentItem& item);

// Assessment for quiz items, nullopt (and no draws) otherwise.
std::optional<AssessmentResult> respond(const SimStudent& student,
                                        const ContentItem& item, Tick tick,
                                        Rng& rng);

// a'_s = a_s + g * fit * (1 - a_s) for every skill the item teaches.
SimStudent learn(const SimStudent& student, const ContentItem& item);

// clamp(0.7 fit + 0.3 affinity + noise); 0.05 when the fit falls below the
// frustration (too hard) or boredom (too easy) threshold.
double engagement_response(const SimStudent& student, const ContentItem& item,
                           double noise);
double engage(const SimStudent& student, const ContentItem& item, Rng& rng);

struct StudentOutcome {
  double les = 0.0;
  double krr = 0.0;
  SessionLog log;
  SimStudent final_student;
  LearnerProfile final_profile;
  std::map<SkillId, double> exposures;
  std::size_t explanations = 0;
};

StudentOutcome simulate_student(const Catalog& catalog,
                                const SimStudent& student, std::size_t index,
                                const SimConfig& cfg,
                                const EngineConfig& engine,
                                const Provider* provider = nullptr);

struct StudentResult {
  std::size_t index = 0;
  double les = 0.0;
  double krr = 0.0;

  bool operator==(const StudentResult&) const = default;
};

struct SessionReport {
  AblationStrategy strategy = AblationStrategy::kFullFramework;
  Reselection reselection = Reselection::kRealTime;
  std::uint64_t seed = 0;
  std::size_t cohort_size = 0;
  std::size_t episodes = 0;
  std::size_t interactions = 0;
  std::vector<StudentResult> students;
  double mean_les = 0.0;
  double sd_les = 0.0;
  double mean_krr = 0.0;
  double sd_krr = 0.0;
  std::size_t explanations = 0;

  bool operator==(const SessionReport&) const = default;
};

// Runs the whole cohort. Throws SetupError when the catalog offers nothing
// to start with and DomainError when there is nothing to score.
SessionReport run_session(const Catalog& catalog, const SimConfig& cfg,
                          const EngineConfig& engine = {},
                          const Provider* provider = nullptr);

// Every strategy for every seed, seed-major.
std::vector<SessionReport> run_ablation_matrix(
    const Catalog& catalog, const SimConfig& base,
    const std::vector<std::uint64_t>& seeds, const EngineConfig& engine = {},
    const Provider* provider = nullptr);

nlohmann::json report_to_json(const SessionReport& report);
SessionReport report_from_json(const nlohmann::json& doc);
SimConfig sim_config_from_json(const nlohmann::json& doc);

}  // namespace adaptive
