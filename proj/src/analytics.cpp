#include "adaptive/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "adaptive/errors.hpp"

namespace adaptive {

namespace {

void check_dim(std::span<const double> signals) {
  if (signals.size() != kSignalDim) {
    throw ValidationError(
        fmt::format("signal dimension {} != {}", signals.size(), kSignalDim),
        "signals");
  }
}

double dot(const WeightVector& w, std::span<const double> d) {
  double s = 0.0;
  for (std::size_t i = 0; i < kSignalDim; ++i) s += w[i] * d[i];
  return s;
}

}  // namespace

AnalyticsState initial_analytics_state() {
  AnalyticsState s;
  s.weights.fill(1.0 / static_cast<double>(kSignalDim));
  return s;
}

void validate(const TrainerConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0)) {
    throw ValidationError("learning_rate must be non-negative", "learning_rate");
  }
  if (cfg.epochs == 0) throw ValidationError("epochs must be positive", "epochs");
  if (cfg.batch_size == 0) {
    throw ValidationError("batch_size must be positive", "batch_size");
  }
  if (cfg.patience == 0) throw ValidationError("patience must be positive", "patience");
  if (!(cfg.validation_fraction >= 0.0 && cfg.validation_fraction < 1.0)) {
    throw ValidationError("validation_fraction must be in [0,1)",
                          "validation_fraction");
  }
  if (!(cfg.feedback_rate > 0.0 && cfg.feedback_rate <= 1.0)) {
    throw ValidationError("feedback_rate must be in (0,1]", "feedback_rate");
  }
}

double composite_performance(const AnalyticsState& state,
                             std::span<const double> signals) {
  check_dim(signals);
  return std::clamp(dot(state.weights, signals), 0.0, 1.0);
}

AnalyticsState update_weights(const AnalyticsState& state,
                              std::span<const double> signals, double outcome,
                              const TrainerConfig& cfg) {
  check_dim(signals);
  AnalyticsState next = state;
  double residual = outcome - dot(state.weights, signals);
  for (std::size_t i = 0; i < kSignalDim; ++i) {
    next.weights[i] += cfg.learning_rate * residual * signals[i];
  }
  return next;
}

AnalyticsState integrate_feedback(const AnalyticsState& state, double composite,
                                  const TrainerConfig& cfg) {
  AnalyticsState next = state;
  next.performance = std::clamp(
      state.performance + cfg.feedback_rate * (composite - state.performance),
      0.0, 1.0);
  next.tick = state.tick + 1;
  return next;
}

double mean_squared_error(const WeightVector& weights,
                          const std::vector<TrainingExample>& data) {
  if (data.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& ex : data) {
    double r = ex.outcome - dot(weights, ex.signals);
    sum += r * r;
  }
  return sum / static_cast<double>(data.size());
}

TrainingReport train_weights(const std::vector<TrainingExample>& dataset,
                             const TrainerConfig& cfg, std::uint64_t seed,
                             WeightVector initial) {
  validate(cfg);
  if (dataset.empty()) throw ValidationError("empty dataset", "dataset");

  std::mt19937_64 rng(seed);
  std::vector<TrainingExample> shuffled = dataset;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto n = shuffled.size();
  const auto n_val = static_cast<std::size_t>(
      std::ceil(cfg.validation_fraction * static_cast<double>(n)));
  if (n_val >= n || (cfg.validation_fraction > 0.0 && n < 2)) {
    throw ValidationError("dataset too small for the validation split",
                          "dataset");
  }
  std::vector<TrainingExample> train(shuffled.begin(),
                                     shuffled.end() - static_cast<long>(n_val));
  std::vector<TrainingExample> val(shuffled.end() - static_cast<long>(n_val),
                                   shuffled.end());
  const auto& monitor = val.empty() ? train : val;

  TrainingReport report;
  report.train_size = train.size();
  report.validation_size = val.size();
  AnalyticsState state;
  state.weights = initial;
  report.weights = initial;
  report.best_val_mse = mean_squared_error(initial, monitor);

  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    for (std::size_t start = 0; start < train.size(); start += cfg.batch_size) {
      std::size_t end = std::min(train.size(), start + cfg.batch_size);
      WeightVector step{};
      for (std::size_t i = start; i < end; ++i) {
        AnalyticsState moved =
            update_weights(state, train[i].signals, train[i].outcome, cfg);
        for (std::size_t d = 0; d < kSignalDim; ++d) {
          step[d] += moved.weights[d] - state.weights[d];
        }
      }
      for (std::size_t d = 0; d < kSignalDim; ++d) state.weights[d] += step[d];
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_mse = mean_squared_error(state.weights, train);
    rec.val_mse = mean_squared_error(state.weights, monitor);
    if (epoch == 1 || rec.val_mse < report.best_val_mse) {
      report.best_val_mse = rec.val_mse;
      report.best_epoch = epoch;
      report.weights = state.weights;
      stale = 0;
    } else {
      ++stale;
    }
    if (stale >= cfg.patience) {
      rec.stopped_early = true;
      report.epochs.push_back(rec);
      break;
    }
    report.epochs.push_back(rec);
  }
  return report;
}

void write_training_report(std::ostream& out, const TrainingReport& report) {
  out << "epoch\ttrain_mse\tval_mse\tstopped_early\n";
  for (const auto& e : report.epochs) {
    fmt::print(out, "{}\t{:.9g}\t{:.9g}\t{}\n", e.epoch, e.train_mse, e.val_mse,
               e.stopped_early ? "true" : "false");
  }
}

double les(const SessionLog& log) {
  if (log.entries.empty()) {
    throw DomainError("no interactions to score engagement");
  }
  double sum = 0.0;
  for (const auto& e : log.entries) sum += e.engagement_observed;
  return std::clamp(100.0 * sum / static_cast<double>(log.entries.size()), 0.0,
                    100.0);
}

double krr(const std::map<SkillId, double>& end_mastery,
           const std::map<SkillId, double>& exposures,
           const RetentionModel& model) {
  if (end_mastery.empty()) throw DomainError("retention of an empty mastery map");
  if (!(model.base_stability > 0.0) || !(model.delay >= 0.0)) {
    throw ValidationError("retention model needs S0 > 0 and delay >= 0",
                          "retention");
  }
  double total = 0.0, retained = 0.0;
  for (const auto& [skill, m] : end_mastery) {
    auto it = exposures.find(skill);
    double n = it == exposures.end() ? 0.0 : it->second;
    total += m;
    retained += m * std::exp(-model.delay / model.stability(n));
  }
  if (!(total > 0.0)) throw DomainError("retention undefined for zero mastery");
  if (model.delay == 0.0) return 100.0;
  return std::clamp(100.0 * retained / total, 0.0, 100.0);
}

}  // namespace adaptive
