#include "adaptive/serialize.hpp"

#include <fmt/format.h>

#include "adaptive/errors.hpp"
#include "adaptive/simulator.hpp"

namespace adaptive {

void to_json(json& j, Modality m) { j = std::string(to_string(m)); }
void from_json(const json& j, Modality& m) { m = parse_modality(j.get<std::string>()); }

void to_json(json& j, const AssessmentResult& r) {
  j = {{"item_id", r.item_id},
       {"skills_assessed", r.skills_assessed},
       {"score", r.score},
       {"response_time_s", r.response_time_s},
       {"timestamp", r.timestamp}};
}

void from_json(const json& j, AssessmentResult& r) {
  j.at("item_id").get_to(r.item_id);
  j.at("skills_assessed").get_to(r.skills_assessed);
  j.at("score").get_to(r.score);
  j.at("response_time_s").get_to(r.response_time_s);
  j.at("timestamp").get_to(r.timestamp);
}

void to_json(json& j, const InteractionRecord& r) {
  j = {{"item_id", r.item_id}, {"timestamp", r.timestamp}, {"planned", r.planned}};
  if (r.engagement_observed) j["engagement_observed"] = *r.engagement_observed;
  if (r.assessment) j["assessment"] = *r.assessment;
}

void from_json(const json& j, InteractionRecord& r) {
  j.at("item_id").get_to(r.item_id);
  j.at("timestamp").get_to(r.timestamp);
  r.planned = j.value("planned", true);
  r.engagement_observed.reset();
  r.assessment.reset();
  if (j.contains("engagement_observed")) {
    r.engagement_observed = j.at("engagement_observed").get<double>();
  }
  if (j.contains("assessment")) r.assessment = j.at("assessment").get<AssessmentResult>();
}

void to_json(json& j, const RollingMetrics& m) {
  j = {{"rolling_accuracy", m.rolling_accuracy},
       {"accuracy_trend", m.accuracy_trend},
       {"mean_engagement", m.mean_engagement},
       {"pace", m.pace},
       {"streak", m.streak}};
}

void from_json(const json& j, RollingMetrics& m) {
  j.at("rolling_accuracy").get_to(m.rolling_accuracy);
  j.at("accuracy_trend").get_to(m.accuracy_trend);
  j.at("mean_engagement").get_to(m.mean_engagement);
  j.at("pace").get_to(m.pace);
  j.at("streak").get_to(m.streak);
}

void to_json(json& j, const LearnerProfile& p) {
  json prefs = json::object();
  for (const auto& [m, v] : p.preferences) prefs[std::string(to_string(m))] = v;
  j = {{"learner_id", p.learner_id},
       {"mastery", p.mastery},
       {"preferences", prefs},
       {"engagement", p.engagement},
       {"history", p.history},
       {"metrics", p.metrics}};
}

void from_json(const json& j, LearnerProfile& p) {
  j.at("learner_id").get_to(p.learner_id);
  j.at("mastery").get_to(p.mastery);
  p.preferences.clear();
  for (const auto& [k, v] : j.at("preferences").items()) {
    p.preferences[parse_modality(k)] = v.get<double>();
  }
  j.at("engagement").get_to(p.engagement);
  j.at("history").get_to(p.history);
  j.at("metrics").get_to(p.metrics);
}

void to_json(json& j, const CurriculumUnit& u) {
  j = {{"target_skill", u.target_skill},
       {"item_pool", u.item_pool},
       {"mastery_threshold", u.mastery_threshold}};
}

void from_json(const json& j, CurriculumUnit& u) {
  j.at("target_skill").get_to(u.target_skill);
  j.at("item_pool").get_to(u.item_pool);
  j.at("mastery_threshold").get_to(u.mastery_threshold);
}

void to_json(json& j, const Curriculum& c) {
  j = {{"units", c.units}, {"generated_at", c.generated_at}};
}

void from_json(const json& j, Curriculum& c) {
  j.at("units").get_to(c.units);
  j.at("generated_at").get_to(c.generated_at);
}

void to_json(json& j, const Pathway& p) { j = p.items; }
void from_json(const json& j, Pathway& p) { j.get_to(p.items); }

void to_json(json& j, const ScoredPathway& s) {
  j = {{"items", s.pathway.items},
       {"engagement", s.engagement},
       {"quality", s.quality},
       {"reward", s.reward}};
}

void from_json(const json& j, ScoredPathway& s) {
  j.at("items").get_to(s.pathway.items);
  j.at("engagement").get_to(s.engagement);
  j.at("quality").get_to(s.quality);
  j.at("reward").get_to(s.reward);
}

void to_json(json& j, const AnalyticsState& s) {
  j = {{"weights", s.weights}, {"performance", s.performance}, {"tick", s.tick}};
}

void from_json(const json& j, AnalyticsState& s) {
  j.at("weights").get_to(s.weights);
  j.at("performance").get_to(s.performance);
  j.at("tick").get_to(s.tick);
}

void to_json(json& j, const RewardConfig& c) {
  j = {{"beta", c.beta},
       {"gamma", c.gamma},
       {"horizon", c.horizon},
       {"beam_width", c.beam_width},
       {"stretch", c.stretch},
       {"kernel_width", c.kernel_width},
       {"projected_gain", c.projected_gain}};
  if (c.fixed_preference) j["fixed_preference"] = *c.fixed_preference;
}

void from_json(const json& j, RewardConfig& c) {
  c.beta = j.value("beta", c.beta);
  c.gamma = j.value("gamma", c.gamma);
  c.horizon = j.value("horizon", c.horizon);
  c.beam_width = j.value("beam_width", c.beam_width);
  c.stretch = j.value("stretch", c.stretch);
  c.kernel_width = j.value("kernel_width", c.kernel_width);
  c.projected_gain = j.value("projected_gain", c.projected_gain);
  if (j.contains("fixed_preference")) {
    c.fixed_preference = j.at("fixed_preference").get<double>();
  }
}

void to_json(json& j, const FusionConfig& c) {
  j = {{"lambda", c.lambda}, {"mu", c.mu}, {"window", c.window}};
}

void from_json(const json& j, FusionConfig& c) {
  c.lambda = j.value("lambda", c.lambda);
  c.mu = j.value("mu", c.mu);
  c.window = j.value("window", c.window);
}

void to_json(json& j, const CurriculumConfig& c) {
  j = {{"mastery_threshold", c.mastery_threshold}};
}

void from_json(const json& j, CurriculumConfig& c) {
  c.mastery_threshold = j.value("mastery_threshold", c.mastery_threshold);
}

void to_json(json& j, const Explanation& e) {
  json rationale = json::array();
  for (const auto& [item, text] : e.rationale) {
    rationale.push_back({{"item_id", item}, {"text", text}});
  }
  j = {{"summary", e.summary},
       {"rationale", rationale},
       {"provider_name", e.provider_name},
       {"deterministic", e.deterministic}};
}

void from_json(const json& j, Explanation& e) {
  j.at("summary").get_to(e.summary);
  e.rationale.clear();
  for (const auto& r : j.at("rationale")) {
    e.rationale.emplace_back(r.at("item_id").get<std::string>(),
                             r.at("text").get<std::string>());
  }
  j.at("provider_name").get_to(e.provider_name);
  e.deterministic = j.value("deterministic", true);
}

void to_json(json& j, const TrainerConfig& c) {
  j = {{"learning_rate", c.learning_rate},
       {"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"patience", c.patience},
       {"validation_fraction", c.validation_fraction},
       {"feedback_rate", c.feedback_rate}};
}

void from_json(const json& j, TrainerConfig& c) {
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.patience = j.value("patience", c.patience);
  c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
  c.feedback_rate = j.value("feedback_rate", c.feedback_rate);
}

nlohmann::json report_to_json(const SessionReport& report) {
  json students = json::array();
  for (const auto& s : report.students) {
    students.push_back({{"index", s.index}, {"les", s.les}, {"krr", s.krr}});
  }
  return {{"strategy", std::string(to_string(report.strategy))},
          {"label", std::string(strategy_label(report.strategy))},
          {"reselection", report.reselection == Reselection::kRealTime
                              ? "real_time"
                              : "session_start"},
          {"seed", report.seed},
          {"cohort_size", report.cohort_size},
          {"episodes", report.episodes},
          {"interactions", report.interactions},
          {"mean_les", report.mean_les},
          {"sd_les", report.sd_les},
          {"mean_krr", report.mean_krr},
          {"sd_krr", report.sd_krr},
          {"explanations", report.explanations},
          {"students", students}};
}

SessionReport report_from_json(const nlohmann::json& doc) {
  SessionReport r;
  r.strategy = parse_strategy(doc.at("strategy").get<std::string>());
  r.reselection = doc.value("reselection", std::string("real_time")) == "session_start"
                      ? Reselection::kSessionStart
                      : Reselection::kRealTime;
  doc.at("seed").get_to(r.seed);
  r.cohort_size = doc.value("cohort_size", std::size_t{0});
  r.episodes = doc.value("episodes", std::size_t{0});
  doc.at("interactions").get_to(r.interactions);
  doc.at("mean_les").get_to(r.mean_les);
  doc.at("sd_les").get_to(r.sd_les);
  doc.at("mean_krr").get_to(r.mean_krr);
  doc.at("sd_krr").get_to(r.sd_krr);
  r.explanations = doc.value("explanations", std::size_t{0});
  if (doc.contains("students")) {
    for (const auto& s : doc.at("students")) {
      r.students.push_back({s.at("index").get<std::size_t>(),
                            s.at("les").get<double>(), s.at("krr").get<double>()});
    }
  }
  return r;
}

SimConfig sim_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("body must be an object", "body");
  SimConfig cfg;
  auto read_size = [&](const char* key, std::size_t& out) {
    if (!doc.contains(key)) return;
    const auto& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ValidationError(fmt::format("{} must be a non-negative integer", key), key);
    }
    out = v.get<std::size_t>();
  };
  read_size("cohort_size", cfg.cohort_size);
  read_size("episodes", cfg.episodes);
  read_size("formative_every", cfg.formative_every);
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_integer()) {
      throw ValidationError("seed must be an integer", "seed");
    }
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("strategy")) {
    if (!doc.at("strategy").is_string()) {
      throw ValidationError("strategy must be a string", "strategy");
    }
    cfg.strategy = parse_strategy(doc.at("strategy").get<std::string>());
  }
  if (doc.contains("reselection")) {
    auto r = doc.at("reselection").get<std::string>();
    if (r == "real_time") {
      cfg.reselection = Reselection::kRealTime;
    } else if (r == "session_start") {
      cfg.reselection = Reselection::kSessionStart;
    } else {
      throw ValidationError("reselection must be real_time or session_start",
                            "reselection");
    }
  }
  if (doc.contains("retention_delay")) {
    if (!doc.at("retention_delay").is_number()) {
      throw ValidationError("retention_delay must be a number", "retention_delay");
    }
    cfg.retention_delay = doc.at("retention_delay").get<double>();
  }
  if (doc.contains("objectives")) {
    if (!doc.at("objectives").is_array()) {
      throw ValidationError("objectives must be an array", "objectives");
    }
    for (const auto& o : doc.at("objectives")) cfg.objectives.insert(o.get<std::string>());
  }
  validate(cfg);
  return cfg;
}

}  // namespace adaptive
