#pragma once

#include <optional>
#include <set>
#include <vector>

#include "adaptive/catalog.hpp"
#include "adaptive/curriculum.hpp"
#include "adaptive/types.hpp"

namespace adaptive {

struct RewardConfig {
  double beta = 0.6;            // engagement weight
  double gamma = 0.4;           // quality weight
  std::size_t horizon = 3;      // h, maximum pathway length
  std::size_t beam_width = 8;   // k
  double stretch = 0.10;        // delta, target difficulty above mastery
  double kernel_width = 0.15;   // sigma of the difficulty-fit kernel
  double projected_gain = 0.2;  // optimistic per-item mastery gain
  // When set, replaces the learner's modality preference in the engagement
  // estimate (resources are no longer matched to the learner).
  std::optional<double> fixed_preference;

  bool operator==(const RewardConfig&) const = default;
};

void validate(const RewardConfig& cfg);

struct Pathway {
  std::vector<ItemId> items;

  bool empty() const { return items.empty(); }
  bool operator==(const Pathway&) const = default;
  auto operator<=>(const Pathway&) const = default;
};

struct ScoredPathway {
  Pathway pathway;
  double engagement = 0.0;  // E
  double quality = 0.0;     // Q
  double reward = 0.0;      // R = beta * E + gamma * Q

  bool operator==(const ScoredPathway&) const = default;
};

// Non-owning bundle of what the engine knows about a learner right now.
struct LearnerContext {
  const LearnerProfile& profile;
  const Curriculum& curriculum;
  const std::set<SkillId>& objectives;
};

// Gaussian bump peaking where difficulty == mastery + stretch.
double difficulty_fit(double difficulty, double mastery, double stretch,
                      double width);

// Skill-weight-averaged mastery over the item's skills.
double weighted_mastery(const ContentItem& item, const LearnerProfile& profile);

struct ItemBreakdown {
  ItemId item_id;
  double fit = 0.0;
  double preference = 0.0;
  double novelty = 0.0;
  double term = 0.0;  // 0.5 * fit + 0.3 * preference + 0.2 * novelty

  bool operator==(const ItemBreakdown&) const = default;
};

// Per-item components of the engagement estimate.
std::vector<ItemBreakdown> engagement_breakdown(const Pathway& pathway,
                                                const LearnerProfile& profile,
                                                const Catalog& catalog,
                                                const RewardConfig& cfg);

// Mean engagement term over the pathway. Throws DomainError when empty.
double estimate_engagement(const Pathway& pathway,
                           const LearnerProfile& profile,
                           const Catalog& catalog, const RewardConfig& cfg);

// prereq_ok_fraction * target_coverage; 0 for the empty pathway.
double pathway_quality(const Pathway& pathway, const LearnerContext& ctx,
                       const Catalog& catalog, const RewardConfig& cfg);

ScoredPathway reward(const Pathway& pathway, const LearnerContext& ctx,
                     const Catalog& catalog, const RewardConfig& cfg);

// Beam search over the curriculum's item pools. Items are only appended when
// their prerequisites hold under the mastery projected along the partial
// path. Every partial path kept at any depth is a candidate. Returns at most
// beam_width pathways, best first; empty when the curriculum is.
std::vector<Pathway> enumerate_candidates(const LearnerContext& ctx,
                                          const Catalog& catalog,
                                          const RewardConfig& cfg);

// Highest reward; ties go to the lexicographically smaller item sequence.
// Throws DomainError("no eligible content") on an empty candidate list.
ScoredPathway select_optimal(const std::vector<Pathway>& candidates,
                             const LearnerContext& ctx, const Catalog& catalog,
                             const RewardConfig& cfg);

// enumerate_candidates followed by select_optimal. Returns nullopt when
// there is nothing to choose from.
std::optional<ScoredPathway> recommend(const LearnerContext& ctx,
                                       const Catalog& catalog,
                                       const RewardConfig& cfg);

// True when every prerequisite of `item` is met by `profile`'s mastery.
bool prerequisites_met(const ContentItem& item, const LearnerProfile& profile);

}  // namespace adaptive
