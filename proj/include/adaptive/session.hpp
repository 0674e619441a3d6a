#pragma once

// Live learner sessions, persisted as an append-only event log.
//
// Every mutation is expressed as events first and then applied through the
// same transition function replay uses, so a session's state is always the
// fold of its log. Replay re-derives curriculum refreshes and pathway
// selections and rejects a log whose recorded results disagree.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "adaptive/analytics.hpp"
#include "adaptive/catalog.hpp"
#include "adaptive/curriculum.hpp"
#include "adaptive/fusion.hpp"
#include "adaptive/pathway.hpp"
#include "adaptive/provider.hpp"
#include "adaptive/types.hpp"

namespace adaptive {

enum class SessionStatus { kActive, kCompleted };

std::string_view to_string(SessionStatus s);

enum class EventKind {
  kCreated,
  kItemServed,
  kAssessmentSubmitted,
  kPathwaySelected,
  kCurriculumRefreshed,
};

std::string_view to_string(EventKind k);
// Throws ValidationError for unknown names.
EventKind parse_event_kind(std::string_view name);

struct EventRecord {
  std::string session_id;
  std::uint64_t sequence = 0;  // 1-based, dense
  EventKind kind = EventKind::kCreated;
  nlohmann::json payload;
  Tick tick = 0;

  bool operator==(const EventRecord&) const = default;
};

nlohmann::json event_to_json(const EventRecord& e);
EventRecord event_from_json(const nlohmann::json& doc);

struct SessionConfig {
  RewardConfig reward;
  FusionConfig fusion;
  CurriculumConfig curriculum;
  TrainerConfig trainer;
  // Every n-th served item is a quiz when one is startable, so mastery keeps
  // moving for learners who mostly consume non-assessed content. 0 disables.
  std::size_t formative_every = 5;

  bool operator==(const SessionConfig&) const = default;
};

void to_json(nlohmann::json& j, const SessionConfig& c);

struct SessionState {
  std::string session_id;
  std::set<SkillId> objectives;
  SessionConfig config;
  LearnerProfile profile;
  Curriculum curriculum;
  AnalyticsState analytics;
  // Signals in force at the previous assessment; the next score trains the
  // analytics weights against them.
  std::optional<SignalVector> last_signals;
  ScoredPathway pathway;
  std::optional<ItemId> served_item;
  std::uint64_t served_sequence = 0;
  SessionStatus status = SessionStatus::kActive;
  std::uint64_t last_sequence = 0;

  bool operator==(const SessionState&) const = default;
};

nlohmann::json state_to_json(const SessionState& s);
SessionState state_from_json(const nlohmann::json& doc);

struct CreateRequest {
  std::optional<std::string> learner_id;
  std::set<SkillId> objectives;  // empty: every catalog skill
  std::map<SkillId, double> initial_mastery;
  SessionConfig config;
};

// Parses the POST /sessions body. Unknown override keys are rejected.
CreateRequest create_request_from_json(const nlohmann::json& body);

struct SubmitRequest {
  std::uint64_t sequence = 0;  // item_served sequence being answered
  ItemId item_id;
  std::optional<double> score;  // required for quiz items
  double response_time_s = 1.0;
  std::optional<double> engagement;
};

SubmitRequest submit_request_from_json(const nlohmann::json& body);

struct NextResult {
  ScoredPathway pathway;
  Explanation explanation;
  bool what_if = false;
};

// Folds `events` from scratch. Throws IntegrityError naming the first
// sequence number that is missing, malformed or inconsistent.
SessionState replay(const Catalog& catalog, const std::vector<EventRecord>& events);

// Continues from a snapshot with the events that follow it.
SessionState replay_from(const Catalog& catalog, SessionState snapshot,
                         const std::vector<EventRecord>& tail);

// Reads a newline-delimited event log. Malformed lines raise IntegrityError.
std::vector<EventRecord> read_event_log(const std::filesystem::path& path);

struct ServiceOptions {
  // Event logs and snapshots go here; empty keeps everything in memory.
  std::filesystem::path data_dir;
  std::size_t snapshot_every = 32;
  std::optional<std::uint64_t> id_seed;
};

class SessionService {
 public:
  SessionService(const Catalog& catalog, ServiceOptions options = {},
                 const Provider* provider = nullptr);

  const Catalog& catalog() const { return catalog_; }

  SessionState create(const CreateRequest& request);
  SessionState get(const std::string& id) const;
  // Read-only; beta/gamma recompute the selection without persisting it.
  NextResult next(const std::string& id, std::optional<double> beta = {},
                  std::optional<double> gamma = {}) const;
  // fuse -> analytics -> refresh -> re-select, as one atomic step.
  SessionState submit(const std::string& id, const SubmitRequest& request);
  // Persists the selection under the given weights and keeps them.
  SessionState adopt(const std::string& id, std::optional<double> beta,
                     std::optional<double> gamma);
  std::vector<EventRecord> events(const std::string& id) const;

 private:
  struct Entry {
    mutable std::shared_mutex mutex;
    SessionState state;
    std::vector<EventRecord> log;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  std::string new_id();
  // Persists `pending`, then installs `next` as the entry state.
  void commit(Entry& entry, std::vector<EventRecord> pending, SessionState next);
  void persist(const Entry& entry, const std::vector<EventRecord>& pending,
               const SessionState& next) const;

  const Catalog& catalog_;
  ServiceOptions options_;
  const Provider* provider_;
  StubProvider stub_;
  mutable std::mutex registry_mutex_;
  mutable std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mt19937_64 id_rng_;
};

}  // namespace adaptive
