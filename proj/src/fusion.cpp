#include "adaptive/fusion.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "adaptive/errors.hpp"

namespace adaptive {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

constexpr double kCorrect = 0.5;

void check_order(const LearnerProfile& profile, Tick ts) {
  if (!profile.history.empty() && ts < profile.history.back().timestamp) {
    throw OrderingError(fmt::format(
        "timestamp {} precedes last history timestamp {}", ts,
        profile.history.back().timestamp));
  }
}

void apply_observation(LearnerProfile& p, const Observation& o,
                       const FusionConfig& cfg) {
  if (!in_unit(o.engagement)) {
    throw ValidationError("engagement_observed out of range", "engagement");
  }
  if (o.modality) {
    double prior = p.preference_of(*o.modality);
    p.preferences[*o.modality] =
        clamp01((1.0 - cfg.mu) * prior + cfg.mu * o.engagement);
  }
  p.engagement = clamp01((1.0 - cfg.mu) * p.engagement + cfg.mu * o.engagement);
}

}  // namespace

void validate(const FusionConfig& cfg) {
  if (!in_unit(cfg.lambda)) throw ValidationError("lambda out of [0,1]", "lambda");
  if (!in_unit(cfg.mu)) throw ValidationError("mu out of [0,1]", "mu");
  if (cfg.window == 0) throw ValidationError("window must be positive", "window");
}

LearnerProfile fuse_assessment(const LearnerProfile& profile,
                               const AssessmentResult& result,
                               const FusionConfig& cfg,
                               std::optional<Observation> observed,
                               bool planned) {
  validate(cfg);
  if (!in_unit(result.score)) {
    throw ValidationError("score out of range [0,1]", "score");
  }
  if (result.skills_assessed.empty()) {
    throw ValidationError("skills_assessed must be non-empty", "skills_assessed");
  }
  for (const auto& [skill, w] : result.skills_assessed) {
    if (!in_unit(w)) {
      throw ValidationError(
          fmt::format("skill weight out of range for '{}'", skill),
          "skills_assessed");
    }
  }
  if (!(result.response_time_s > 0.0)) {
    throw ValidationError("response_time_s must be positive", "response_time_s");
  }
  check_order(profile, result.timestamp);

  LearnerProfile next = profile;
  for (const auto& [skill, w] : result.skills_assessed) {
    double& m = next.mastery[skill];  // unseen skills start at 0
    double rate = cfg.lambda * w;
    // Incremental form: exact when the score equals the current mastery.
    m = clamp01(m + rate * (result.score - m));
  }
  InteractionRecord rec;
  rec.item_id = result.item_id;
  rec.timestamp = result.timestamp;
  rec.assessment = result;
  rec.planned = planned;
  if (observed) {
    apply_observation(next, *observed, cfg);
    rec.engagement_observed = observed->engagement;
  }
  next.history.push_back(std::move(rec));
  next.metrics = compute_metrics(next, cfg);
  return next;
}

LearnerProfile observe_interaction(const LearnerProfile& profile,
                                   const ItemId& item_id, Tick timestamp,
                                   const Observation& observed,
                                   const FusionConfig& cfg, bool planned) {
  validate(cfg);
  check_order(profile, timestamp);
  LearnerProfile next = profile;
  apply_observation(next, observed, cfg);
  InteractionRecord rec;
  rec.item_id = item_id;
  rec.timestamp = timestamp;
  rec.engagement_observed = observed.engagement;
  rec.planned = planned;
  next.history.push_back(std::move(rec));
  next.metrics = compute_metrics(next, cfg);
  return next;
}

RollingMetrics compute_metrics(const LearnerProfile& profile,
                               const FusionConfig& cfg) {
  const std::size_t w = std::max<std::size_t>(cfg.window, 1);
  RollingMetrics m;

  std::vector<double> scores;
  for (const auto& rec : profile.history) {
    if (rec.assessment) scores.push_back(rec.assessment->score);
  }
  auto mean = [](auto first, auto last) {
    double sum = 0.0;
    std::size_t n = 0;
    for (; first != last; ++first, ++n) sum += *first;
    return sum / static_cast<double>(n);
  };
  const std::size_t n = scores.size();
  if (n > 0) {
    std::size_t recent_begin = n > w ? n - w : 0;
    m.rolling_accuracy = mean(scores.begin() + recent_begin, scores.end());
    if (recent_begin > 0) {
      std::size_t prev_begin = recent_begin > w ? recent_begin - w : 0;
      double prev = mean(scores.begin() + prev_begin,
                         scores.begin() + recent_begin);
      m.accuracy_trend = std::clamp(m.rolling_accuracy - prev, -1.0, 1.0);
    }
    std::size_t run = 0;
    for (auto it = scores.rbegin(); it != scores.rend() && *it >= kCorrect; ++it) {
      ++run;
    }
    m.streak = std::min(1.0, static_cast<double>(run) / static_cast<double>(w));
  }

  std::size_t hn = profile.history.size();
  std::size_t begin = hn > w ? hn - w : 0;
  double eng_sum = 0.0;
  std::size_t eng_n = 0, planned = 0;
  for (std::size_t i = begin; i < hn; ++i) {
    const auto& rec = profile.history[i];
    if (rec.engagement_observed) {
      eng_sum += *rec.engagement_observed;
      ++eng_n;
    }
    planned += rec.planned ? 1 : 0;
  }
  if (eng_n > 0) m.mean_engagement = clamp01(eng_sum / static_cast<double>(eng_n));
  if (hn > begin) {
    m.pace = static_cast<double>(planned) / static_cast<double>(hn - begin);
  }
  return m;
}

SignalVector compute_signals(const LearnerProfile& profile,
                             const FusionConfig& cfg) {
  return to_signals(compute_metrics(profile, cfg));
}

std::vector<std::string> validate_profile(const LearnerProfile& profile) {
  std::vector<std::string> out;
  for (const auto& [skill, v] : profile.mastery) {
    if (!in_unit(v)) out.push_back(fmt::format("mastery out of range: {}", skill));
  }
  for (const auto& [m, v] : profile.preferences) {
    if (!in_unit(v)) {
      out.push_back(fmt::format("preference out of range: {}", to_string(m)));
    }
  }
  if (!in_unit(profile.engagement)) out.push_back("engagement out of range");
  for (std::size_t i = 1; i < profile.history.size(); ++i) {
    if (profile.history[i].timestamp < profile.history[i - 1].timestamp) {
      out.push_back(fmt::format("history not monotone at index {}", i));
      break;
    }
  }
  for (const auto& rec : profile.history) {
    if (rec.engagement_observed && !in_unit(*rec.engagement_observed)) {
      out.push_back(fmt::format("engagement_observed out of range: {}", rec.item_id));
    }
    if (rec.assessment && !in_unit(rec.assessment->score)) {
      out.push_back(fmt::format("assessment score out of range: {}", rec.item_id));
    }
  }
  const auto& mt = profile.metrics;
  if (!in_unit(mt.rolling_accuracy) || !in_unit(mt.mean_engagement) ||
      !in_unit(mt.pace) || !in_unit(mt.streak) ||
      !(mt.accuracy_trend >= -1.0 && mt.accuracy_trend <= 1.0)) {
    out.push_back("metrics out of range");
  }
  return out;
}

}  // namespace adaptive
