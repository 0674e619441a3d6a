#include "adaptive/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "adaptive/errors.hpp"
#include "adaptive/provider.hpp"

namespace adaptive {

namespace {

constexpr std::uint64_t kSpawnStream = 0;
constexpr std::uint64_t kStudentStream = 1;
constexpr std::uint64_t kEngineStream = 2;

// Documented draw ranges for a spawned student.
constexpr double kAbilityMin = 0.0;
constexpr double kAbilityMax = 0.5;
constexpr double kLearnRateMin = 0.1;
constexpr double kLearnRateMax = 0.3;
constexpr double kResponseMedianS = 20.0;
constexpr double kResponseLogSd = 0.25;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Stats {
  double mean = 0.0;
  double sd = 0.0;
};

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

// The engine side of one simulated session: profile, curriculum, analytics
// and whatever plan the strategy is following.
class EngineSession {
 public:
  EngineSession(const Catalog& catalog, const SimConfig& cfg,
                const EngineConfig& engine, std::size_t index,
                const Provider* provider)
      : catalog_(catalog),
        cfg_(cfg),
        engine_(engine),
        reward_(engine.reward),
        provider_(provider),
        rng_(substream(cfg.seed, index, kEngineStream)),
        profile_(make_profile(fmt::format("student-{}", index))),
        analytics_(initial_analytics_state()) {
    if (cfg.strategy == AblationStrategy::kStaticResourceAllocation) {
      reward_.fixed_preference = 0.5;
    }
    if (cfg.objectives.empty()) {
      objectives_.insert(catalog.skills().begin(), catalog.skills().end());
    } else {
      objectives_ = cfg.objectives;
    }
    curriculum_ = build_curriculum(nullptr);
    if (cfg.formative_every > 0 && cfg.episodes >= cfg.formative_every) {
      last_formative_ =
          (cfg.episodes / cfg.formative_every) * cfg.formative_every - 1;
    }

    if (cfg.strategy == AblationStrategy::kFixedLearningPath) {
      plan_ = static_item_order(curriculum_);
      if (plan_.empty()) throw SetupError("no eligible starting items");
      plan_mode_ = true;
    } else if (cfg.reselection == Reselection::kSessionStart &&
               uses_argmax()) {
      start_plan();
    } else if (!any_eligible()) {
      throw SetupError("no eligible starting items");
    }
  }

  const LearnerProfile& profile() const { return profile_; }
  const AnalyticsState& analytics() const { return analytics_; }
  std::size_t explanations() const { return explanations_; }

  const ContentItem& next_item(std::size_t t) {
    const bool formative =
        cfg_.formative_every > 0 && (t + 1) % cfg_.formative_every == 0;
    if (plan_mode_) return from_plan(formative);
    if (cfg_.strategy == AblationStrategy::kNoPersonalizedRecommendations) {
      return random_item(formative);
    }
    return argmax_item(formative);
  }

  // Folds what happened at tick t into the engine state per strategy.
  SessionLogEntry record(std::size_t t, const ContentItem& item,
                         double engagement,
                         const std::optional<AssessmentResult>& result) {
    const Tick tick = static_cast<Tick>(t + 1);
    SessionLogEntry entry;
    entry.tick = tick;
    entry.item_id = item.id;
    entry.engagement_observed = engagement;
    if (result) entry.score = result->score;

    if (!frozen_) {
      Observation obs{engagement, item.modality};
      bool fused = false;
      if (result && fuses_now(t)) {
        if (last_signals_) {
          analytics_ = update_weights(analytics_, *last_signals_,
                                      result->score, engine_.trainer);
        }
        profile_ = fuse_assessment(profile_, *result, engine_.fusion, obs);
        curriculum_ = build_curriculum(&curriculum_);
        fused = true;
      } else {
        profile_ = observe_interaction(profile_, item.id, tick, obs,
                                       engine_.fusion);
      }
      signals_ = compute_signals(profile_, engine_.fusion);
      composite_ = composite_performance(analytics_, signals_);
      analytics_ = integrate_feedback(analytics_, composite_, engine_.trainer);
      if (fused) last_signals_ = signals_;

      const bool formative =
          cfg_.formative_every > 0 && (t + 1) % cfg_.formative_every == 0;
      if (cfg_.strategy == AblationStrategy::kNoRealTimeAdjustment && result &&
          formative) {
        frozen_ = true;
        start_plan();
      }
    }
    entry.signals = signals_;
    entry.composite = composite_;
    entry.performance = analytics_.performance;
    return entry;
  }

 private:
  bool uses_argmax() const {
    return cfg_.strategy != AblationStrategy::kNoPersonalizedRecommendations &&
           cfg_.strategy != AblationStrategy::kFixedLearningPath;
  }

  bool fuses_now(std::size_t t) const {
    if (cfg_.strategy != AblationStrategy::kBasicAssessmentOnly) return true;
    return last_formative_ && t == *last_formative_;
  }

  Curriculum build_curriculum(const Curriculum* current) const {
    Curriculum c = current ? refresh_curriculum(profile_, catalog_, *current,
                                                objectives_, engine_.curriculum)
                           : generate_curriculum(profile_, catalog_,
                                                 objectives_, engine_.curriculum);
    if (c.empty()) {
      // Everything is mastered: keep reviewing every objective.
      CurriculumConfig review{2.0};
      c = generate_curriculum(profile_, catalog_, objectives_, review);
    }
    return c;
  }

  LearnerContext context() const { return {profile_, curriculum_, objectives_}; }

  // Curriculum pool items (or, failing that, any catalog item) that the
  // profile can take right now.
  std::vector<std::size_t> eligible(bool quiz_only) const {
    std::vector<bool> in(catalog_.items().size(), false);
    for (const auto& u : curriculum_.units) {
      for (const auto& id : u.item_pool) in[*catalog_.index_of(id)] = true;
    }
    auto collect = [&](bool from_pool) {
      std::vector<std::size_t> out;
      for (std::size_t i = 0; i < in.size(); ++i) {
        const auto& it = catalog_.item(i);
        if (from_pool && !in[i]) continue;
        if (quiz_only && !it.assessable()) continue;
        if (prerequisites_met(it, profile_)) out.push_back(i);
      }
      return out;
    };
    auto out = collect(true);
    if (out.empty()) out = collect(false);
    return out;
  }

  bool any_eligible() const { return !eligible(false).empty(); }

  std::optional<ScoredPathway> best_pathway(bool formative) {
    auto ctx = context();
    std::vector<Pathway> candidates;
    if (formative) {
      for (auto i : eligible(true)) candidates.push_back({{catalog_.item(i).id}});
    }
    if (candidates.empty()) candidates = enumerate_candidates(ctx, catalog_, reward_);
    if (candidates.empty()) {
      for (auto i : eligible(false)) candidates.push_back({{catalog_.item(i).id}});
    }
    if (candidates.empty()) return std::nullopt;
    ScoredPathway best = select_optimal(candidates, ctx, catalog_, reward_);
    if (provider_ != nullptr && explanations_ == 0) {
      auto request = make_explanation_request(profile_, best, catalog_, reward_);
      explain_recommendation(request, *provider_);
      ++explanations_;
    }
    return best;
  }

  const ContentItem& argmax_item(bool formative) {
    auto best = best_pathway(formative);
    if (!best) throw SetupError("no eligible content");
    return *catalog_.find(best->pathway.items.front());
  }

  const ContentItem& random_item(bool formative) {
    auto pool = formative ? eligible(true) : std::vector<std::size_t>{};
    if (pool.empty()) pool = eligible(false);
    if (pool.empty()) throw SetupError("no eligible content");
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    return catalog_.item(pool[pick(rng_)]);
  }

  // Selected pathway first, then the static curriculum order.
  void start_plan() {
    plan_.clear();
    if (auto best = best_pathway(false)) plan_ = best->pathway.items;
    for (auto& id : static_item_order(curriculum_)) {
      if (std::find(plan_.begin(), plan_.end(), id) == plan_.end()) {
        plan_.push_back(std::move(id));
      }
    }
    if (plan_.empty()) throw SetupError("no eligible starting items");
    cursor_ = 0;
    plan_mode_ = true;
  }

  const ContentItem& from_plan(bool formative) {
    const std::size_t n = plan_.size();
    if (formative) {
      for (std::size_t k = 0; k < n; ++k) {
        std::size_t pos = (cursor_ + k) % n;
        const ContentItem* it = catalog_.find(plan_[pos]);
        if (it->assessable()) {
          cursor_ = pos + 1;
          return *it;
        }
      }
    }
    const ContentItem* it = catalog_.find(plan_[cursor_ % n]);
    cursor_ = cursor_ % n + 1;
    return *it;
  }

  const Catalog& catalog_;
  const SimConfig& cfg_;
  const EngineConfig& engine_;
  RewardConfig reward_;
  const Provider* provider_;
  Rng rng_;
  std::set<SkillId> objectives_;
  LearnerProfile profile_;
  Curriculum curriculum_;
  AnalyticsState analytics_;
  SignalVector signals_ = to_signals(RollingMetrics{});
  double composite_ = 0.0;
  std::optional<SignalVector> last_signals_;
  std::optional<std::size_t> last_formative_;
  bool frozen_ = false;
  bool plan_mode_ = false;
  std::vector<ItemId> plan_;
  std::size_t cursor_ = 0;
  std::size_t explanations_ = 0;
};

}  // namespace

std::string_view to_string(AblationStrategy s) {
  switch (s) {
    case AblationStrategy::kFullFramework: return "FullFramework";
    case AblationStrategy::kNoRealTimeAdjustment: return "NoRealTimeAdjustment";
    case AblationStrategy::kNoPersonalizedRecommendations:
      return "NoPersonalizedRecommendations";
    case AblationStrategy::kFixedLearningPath: return "FixedLearningPath";
    case AblationStrategy::kBasicAssessmentOnly: return "BasicAssessmentOnly";
    case AblationStrategy::kStaticResourceAllocation:
      return "StaticResourceAllocation";
  }
  return "FullFramework";
}

std::string_view strategy_label(AblationStrategy s) {
  switch (s) {
    case AblationStrategy::kFullFramework: return "Full Framework";
    case AblationStrategy::kNoRealTimeAdjustment: return "No Real-Time Adjustment";
    case AblationStrategy::kNoPersonalizedRecommendations:
      return "No Personalized Recommendations";
    case AblationStrategy::kFixedLearningPath: return "Fixed Learning Path";
    case AblationStrategy::kBasicAssessmentOnly: return "Basic Assessment Only";
    case AblationStrategy::kStaticResourceAllocation:
      return "Static Resource Allocation";
  }
  return "Full Framework";
}

AblationStrategy parse_strategy(std::string_view name) {
  for (auto s : kAllStrategies) {
    if (to_string(s) == name || strategy_label(s) == name) return s;
  }
  throw ValidationError(fmt::format("unknown strategy '{}'", name), "strategy");
}

void validate(const SimConfig& cfg) {
  if (cfg.formative_every == 0) {
    throw ValidationError("formative_every must be positive", "formative_every");
  }
  if (!(cfg.retention_delay >= 0.0)) {
    throw ValidationError("retention_delay must be non-negative", "retention_delay");
  }
}

Rng substream(std::uint64_t seed, std::uint64_t student, std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(student),
                    static_cast<std::uint32_t>(student >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return Rng(seq);
}

std::vector<SimStudent> spawn_cohort(const Catalog& catalog,
                                     const SimConfig& cfg) {
  std::vector<SimStudent> cohort;
  cohort.reserve(cfg.cohort_size);
  for (std::size_t i = 0; i < cfg.cohort_size; ++i) {
    Rng rng = substream(cfg.seed, i, kSpawnStream);
    std::uniform_real_distribution<double> ability(kAbilityMin, kAbilityMax);
    std::uniform_real_distribution<double> rate(kLearnRateMin, kLearnRateMax);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SimStudent s;
    for (const auto& skill : catalog.skills()) s.ability[skill] = ability(rng);
    s.learn_rate = rate(rng);
    for (Modality m : kAllModalities) s.modality_affinity[m] = unit(rng);
    cohort.push_back(std::move(s));
  }
  return cohort;
}

double latent_ability(const SimStudent& student, const ContentItem& item) {
  double wsum = 0.0, asum = 0.0;
  for (const auto& [skill, w] : item.skills) {
    auto it = student.ability.find(skill);
    wsum += w;
    asum += w * (it == student.ability.end() ? 0.0 : it->second);
  }
  return wsum > 0.0 ? asum / wsum : 0.0;
}

double student_fit(const SimStudent& student, const ContentItem& item) {
  return difficulty_fit(item.difficulty, latent_ability(student, item),
                        kStudentStretch, kStudentKernelWidth);
}

double correct_probability(const SimStudent& student, const ContentItem& item) {
  const double c = student.guess_floor;
  return c + (1.0 - c) * sigmoid(kResponseSlope *
                                 (latent_ability(student, item) - item.difficulty));
}

std::optional<AssessmentResult> respond(const SimStudent& student,
                                        const ContentItem& item, Tick tick,
                                        Rng& rng) {
  if (!item.assessable()) return std::nullopt;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::lognormal_distribution<double> time(
      std::log(kResponseMedianS * (1.0 + item.difficulty)), kResponseLogSd);
  AssessmentResult r;
  r.item_id = item.id;
  for (const auto& [skill, w] : item.skills) {
    if (w > 0.0) r.skills_assessed[skill] = w;
  }
  r.score = unit(rng) < correct_probability(student, item) ? 1.0 : 0.0;
  r.response_time_s = time(rng);
  r.timestamp = tick;
  return r;
}

SimStudent learn(const SimStudent& student, const ContentItem& item) {
  SimStudent next = student;
  const double fit = student_fit(student, item);
  for (const auto& [skill, w] : item.skills) {
    if (w <= 0.0) continue;
    double& a = next.ability[skill];
    a = std::clamp(a + student.learn_rate * fit * (1.0 - a), 0.0, 1.0);
  }
  return next;
}

double engagement_response(const SimStudent& student, const ContentItem& item,
                           double noise) {
  const double a = latent_ability(student, item);
  const double fit = difficulty_fit(item.difficulty, a, kStudentStretch,
                                    kStudentKernelWidth);
  const bool too_hard = item.difficulty > a + kStudentStretch;
  if (too_hard ? fit < student.frustration_threshold
               : fit < student.boredom_threshold) {
    return kDisengagedFloor;
  }
  auto it = student.modality_affinity.find(item.modality);
  double affinity = it == student.modality_affinity.end() ? 0.5 : it->second;
  return std::clamp(0.7 * fit + 0.3 * affinity + noise, 0.0, 1.0);
}

double engage(const SimStudent& student, const ContentItem& item, Rng& rng) {
  std::normal_distribution<double> noise(0.0, kEngagementNoiseSd);
  return engagement_response(student, item, noise(rng));
}

StudentOutcome simulate_student(const Catalog& catalog,
                                const SimStudent& student, std::size_t index,
                                const SimConfig& cfg,
                                const EngineConfig& engine,
                                const Provider* provider) {
  validate(cfg);
  EngineSession session(catalog, cfg, engine, index, provider);
  Rng rng = substream(cfg.seed, index, kStudentStream);
  StudentOutcome out;
  out.final_student = student;
  for (std::size_t t = 0; t < cfg.episodes; ++t) {
    const ContentItem& item = session.next_item(t);
    double e = engage(out.final_student, item, rng);
    auto result = respond(out.final_student, item, static_cast<Tick>(t + 1), rng);
    out.final_student = learn(out.final_student, item);
    for (const auto& [skill, w] : item.skills) {
      if (w > 0.0) out.exposures[skill] += 1.0;
    }
    out.log.entries.push_back(session.record(t, item, e, result));
  }
  out.les = les(out.log);

  std::map<SkillId, double> end_mastery;
  if (cfg.objectives.empty()) {
    end_mastery = out.final_student.ability;
  } else {
    for (const auto& s : cfg.objectives) {
      end_mastery[s] = out.final_student.ability[s];
    }
  }
  RetentionModel model{engine.base_stability, cfg.retention_delay};
  out.krr = krr(end_mastery, out.exposures, model);
  out.final_profile = session.profile();
  out.explanations = session.explanations();
  return out;
}

SessionReport run_session(const Catalog& catalog, const SimConfig& cfg,
                          const EngineConfig& engine,
                          const Provider* provider) {
  validate(cfg);
  validate(engine.reward);
  validate(engine.fusion);
  validate(engine.trainer);
  if (cfg.episodes == 0 || cfg.cohort_size == 0) {
    throw DomainError("no interactions to score engagement");
  }
  for (const auto& s : cfg.objectives) {
    if (!catalog.has_skill(s)) {
      throw ValidationError(fmt::format("unknown objective skill '{}'", s),
                            "objectives");
    }
  }
  auto cohort = spawn_cohort(catalog, cfg);
  SessionReport report;
  report.strategy = cfg.strategy;
  report.reselection = cfg.reselection;
  report.seed = cfg.seed;
  report.cohort_size = cfg.cohort_size;
  report.episodes = cfg.episodes;
  report.interactions = cfg.cohort_size * cfg.episodes;
  std::vector<double> les_values, krr_values;
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    auto outcome = simulate_student(catalog, cohort[i], i, cfg, engine, provider);
    report.students.push_back({i, outcome.les, outcome.krr});
    les_values.push_back(outcome.les);
    krr_values.push_back(outcome.krr);
    report.explanations += outcome.explanations;
  }
  auto ls = stats_of(les_values);
  auto ks = stats_of(krr_values);
  report.mean_les = ls.mean;
  report.sd_les = ls.sd;
  report.mean_krr = ks.mean;
  report.sd_krr = ks.sd;
  return report;
}

std::vector<SessionReport> run_ablation_matrix(
    const Catalog& catalog, const SimConfig& base,
    const std::vector<std::uint64_t>& seeds, const EngineConfig& engine,
    const Provider* provider) {
  if (seeds.empty()) throw ValidationError("at least one seed required", "seeds");
  std::vector<SessionReport> out;
  for (auto seed : seeds) {
    for (auto strategy : kAllStrategies) {
      SimConfig cfg = base;
      cfg.seed = seed;
      cfg.strategy = strategy;
      out.push_back(run_session(catalog, cfg, engine, provider));
    }
  }
  return out;
}

}  // namespace adaptive
