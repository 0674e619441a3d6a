#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <ostream>
#include <utility>
#include <vector>

#include "adaptive/types.hpp"

namespace adaptive {

using WeightVector = std::array<double, kSignalDim>;

struct AnalyticsState {
  WeightVector weights{};     // alpha
  double performance = 0.5;   // P(t)
  Tick tick = 0;

  bool operator==(const AnalyticsState&) const = default;
};

// Uniform weights (1/5 each), P = 0.5, tick 0.
AnalyticsState initial_analytics_state();

struct TrainerConfig {
  double learning_rate = 3e-4;
  std::size_t epochs = 20;
  std::size_t batch_size = 16;
  std::size_t patience = 5;
  double validation_fraction = 0.15;
  double feedback_rate = 0.5;  // kappa

  bool operator==(const TrainerConfig&) const = default;
};

void validate(const TrainerConfig& cfg);

struct SessionLogEntry {
  Tick tick = 0;
  ItemId item_id;
  double engagement_observed = 0.0;
  std::optional<double> score;
  SignalVector signals{};
  double composite = 0.0;    // L(t)
  double performance = 0.0;  // P(t) after integration

  bool operator==(const SessionLogEntry&) const = default;
};

struct SessionLog {
  std::vector<SessionLogEntry> entries;

  bool operator==(const SessionLog&) const = default;
};

struct RetentionModel {
  double base_stability = 5.0;  // S0, in ticks
  double delay = 0.0;           // Delta, in ticks

  // S = S0 * (1 + exposures)
  double stability(double exposures) const {
    return base_stability * (1.0 + exposures);
  }
};

// clamp(alpha . d, 0, 1).
double composite_performance(const AnalyticsState& state,
                             std::span<const double> signals);

// One squared-error gradient step: alpha' = alpha + eta (y - alpha.d) d.
AnalyticsState update_weights(const AnalyticsState& state,
                              std::span<const double> signals, double outcome,
                              const TrainerConfig& cfg);

// P' = clamp(P + kappa (L - P), 0, 1); tick advances by one.
AnalyticsState integrate_feedback(const AnalyticsState& state, double composite,
                                  const TrainerConfig& cfg);

struct TrainingExample {
  SignalVector signals{};
  double outcome = 0.0;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_mse = 0.0;
  double val_mse = 0.0;
  bool stopped_early = false;
};

struct TrainingReport {
  WeightVector weights{};  // best-validation weights
  std::size_t best_epoch = 0;
  double best_val_mse = 0.0;
  std::vector<EpochRecord> epochs;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
};

// Mini-batch SGD with a seeded split and early stopping.
//
// One seeded shuffle picks the split: the last ceil(fraction * N) examples
// are held out. Each epoch reshuffles the training part and, per mini-batch,
// applies the summed update_weights step computed at the batch-start
// weights. Training stops once validation MSE has not improved for
// `patience` consecutive epochs, or after `epochs` epochs.
TrainingReport train_weights(const std::vector<TrainingExample>& dataset,
                             const TrainerConfig& cfg, std::uint64_t seed,
                             WeightVector initial = {});

// Columns: epoch, train_mse, val_mse, stopped_early (tab separated).
void write_training_report(std::ostream& out, const TrainingReport& report);

double mean_squared_error(const WeightVector& weights,
                          const std::vector<TrainingExample>& data);

// 100 * mean observed engagement. Throws DomainError on an empty log.
double les(const SessionLog& log);

// 100 * sum(m_s exp(-delay / S_s)) / sum(m_s). Throws DomainError when the
// mastery mass is zero.
double krr(const std::map<SkillId, double>& end_mastery,
           const std::map<SkillId, double>& exposures,
           const RetentionModel& model);

}  // namespace adaptive
