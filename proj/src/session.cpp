#include "adaptive/session.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "adaptive/errors.hpp"
#include "adaptive/serialize.hpp"

namespace adaptive {

void to_json(json& j, const SessionConfig& c) {
  j = {{"reward", c.reward},
       {"fusion", c.fusion},
       {"curriculum", c.curriculum},
       {"trainer", c.trainer},
       {"formative_every", c.formative_every}};
}

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

SessionConfig config_from_json(const json& j) {
  SessionConfig c;
  j.at("reward").get_to(c.reward);
  j.at("fusion").get_to(c.fusion);
  j.at("curriculum").get_to(c.curriculum);
  j.at("trainer").get_to(c.trainer);
  c.formative_every = j.value("formative_every", c.formative_every);
  return c;
}

void validate(const SessionConfig& c) {
  validate(c.reward);
  validate(c.fusion);
  validate(c.trainer);
  if (!(c.curriculum.mastery_threshold > 0.0 &&
        c.curriculum.mastery_threshold <= 1.0)) {
    throw ValidationError("mastery_threshold must be in (0,1]",
                          "mastery_threshold");
  }
}

bool formative_turn(const SessionState& s) {
  const auto every = s.config.formative_every;
  return every > 0 && (s.profile.history.size() + 1) % every == 0;
}

// Highest-reward pathway for the state under `cfg`; the empty pathway when
// the curriculum is done. On formative turns the candidates are the
// startable pool quizzes. Falls back to any startable catalog item when the
// curriculum pools are blocked.
ScoredPathway select_pathway(const SessionState& s, const Catalog& catalog,
                             const RewardConfig& cfg) {
  if (s.curriculum.empty()) return {};
  LearnerContext ctx{s.profile, s.curriculum, s.objectives};
  std::vector<Pathway> candidates;
  if (formative_turn(s)) {
    std::set<ItemId> pool;
    for (const auto& u : s.curriculum.units) pool.insert(u.item_pool.begin(), u.item_pool.end());
    for (const auto& id : pool) {
      const ContentItem* item = catalog.find(id);
      if (item->assessable() && prerequisites_met(*item, s.profile)) {
        candidates.push_back({{id}});
      }
    }
  }
  if (candidates.empty()) candidates = enumerate_candidates(ctx, catalog, cfg);
  if (candidates.empty()) {
    for (const auto& item : catalog.items()) {
      if (prerequisites_met(item, s.profile)) candidates.push_back({{item.id}});
    }
  }
  if (candidates.empty()) throw DomainError("no eligible content");
  return select_optimal(candidates, ctx, catalog, cfg);
}

const ContentItem& item_or_throw(const Catalog& catalog, const ItemId& id) {
  const ContentItem* item = catalog.find(id);
  if (item == nullptr) throw ValidationError(fmt::format("unknown item '{}'", id), "item_id");
  return *item;
}

void apply_created(SessionState& s, const EventRecord& e, const Catalog& catalog) {
  const auto& p = e.payload;
  s = SessionState{};
  s.session_id = e.session_id;
  s.config = config_from_json(p.at("config"));
  p.at("objectives").get_to(s.objectives);
  s.profile = make_profile(p.at("learner_id").get<std::string>());
  p.at("initial_mastery").get_to(s.profile.mastery);
  s.analytics = initial_analytics_state();
  s.curriculum = generate_curriculum(s.profile, catalog, s.objectives,
                                     s.config.curriculum);
}

void apply_assessment(SessionState& s, const EventRecord& e, const Catalog& catalog) {
  const auto& p = e.payload;
  const auto id = p.at("item_id").get<ItemId>();
  if (!s.served_item || *s.served_item != id ||
      p.at("served_sequence").get<std::uint64_t>() != s.served_sequence) {
    throw IntegrityError("assessment does not answer the served item", e.sequence);
  }
  const ContentItem& item = item_or_throw(catalog, id);
  const Tick ts = p.at("timestamp").get<Tick>();
  const double rt = p.at("response_time_s").get<double>();
  std::optional<Observation> obs;
  if (p.contains("engagement")) {
    obs = Observation{p.at("engagement").get<double>(), item.modality};
  }
  const auto& fusion = s.config.fusion;
  bool fused = false;
  if (p.contains("score")) {
    if (!item.assessable()) {
      throw ValidationError(fmt::format("item '{}' is not assessed", id), "score");
    }
    AssessmentResult r{id, item.skills, p.at("score").get<double>(), rt, ts};
    if (s.last_signals) {
      s.analytics = update_weights(s.analytics, *s.last_signals, r.score,
                                   s.config.trainer);
    }
    s.profile = fuse_assessment(s.profile, r, fusion, obs);
    fused = true;
  } else {
    if (item.assessable()) {
      throw ValidationError(fmt::format("item '{}' needs a score", id), "score");
    }
    if (!obs) throw ValidationError("engagement is required", "engagement");
    s.profile = observe_interaction(s.profile, id, ts, *obs, fusion);
  }
  const SignalVector signals = compute_signals(s.profile, fusion);
  const double composite = composite_performance(s.analytics, signals);
  s.analytics = integrate_feedback(s.analytics, composite, s.config.trainer);
  if (fused) s.last_signals = signals;
  s.served_item.reset();
}

void apply_refresh(SessionState& s, const EventRecord& e, const Catalog& catalog) {
  auto recorded = e.payload.at("curriculum").get<Curriculum>();
  auto derived = refresh_curriculum(s.profile, catalog, s.curriculum,
                                    s.objectives, s.config.curriculum);
  if (recorded != derived) {
    throw IntegrityError("recorded curriculum does not match the profile", e.sequence);
  }
  s.curriculum = std::move(derived);
}

void apply_selected(SessionState& s, const EventRecord& e, const Catalog& catalog) {
  const auto cfg = e.payload.at("reward").get<RewardConfig>();
  const auto recorded = e.payload.at("scored").get<ScoredPathway>();
  validate(cfg);
  if (select_pathway(s, catalog, cfg) != recorded) {
    throw IntegrityError("recorded pathway does not match the selection", e.sequence);
  }
  s.config.reward = cfg;
  s.pathway = recorded;
  if (recorded.pathway.empty()) {
    s.status = SessionStatus::kCompleted;
    s.served_item.reset();
  }
}

void apply_served(SessionState& s, const EventRecord& e) {
  const auto id = e.payload.at("item_id").get<ItemId>();
  if (s.status != SessionStatus::kActive || s.pathway.pathway.empty() ||
      s.pathway.pathway.items.front() != id) {
    throw IntegrityError("served item is not the pathway head", e.sequence);
  }
  s.served_item = id;
  s.served_sequence = e.sequence;
}

// The single state transition. Live requests and replay both go through it.
void apply_event(SessionState& s, const EventRecord& e, const Catalog& catalog) {
  if (e.sequence != s.last_sequence + 1) {
    throw IntegrityError(fmt::format("expected sequence {}, found {}",
                                     s.last_sequence + 1, e.sequence),
                         s.last_sequence + 1);
  }
  if (e.kind != EventKind::kCreated && e.session_id != s.session_id) {
    throw IntegrityError("event belongs to another session", e.sequence);
  }
  if ((e.kind == EventKind::kCreated) != (e.sequence == 1)) {
    throw IntegrityError("created must be the first event and only the first",
                         e.sequence);
  }
  switch (e.kind) {
    case EventKind::kCreated: apply_created(s, e, catalog); break;
    case EventKind::kAssessmentSubmitted: apply_assessment(s, e, catalog); break;
    case EventKind::kCurriculumRefreshed: apply_refresh(s, e, catalog); break;
    case EventKind::kPathwaySelected: apply_selected(s, e, catalog); break;
    case EventKind::kItemServed: apply_served(s, e); break;
  }
  s.last_sequence = e.sequence;
}

// Replay-side wrapper: anything wrong with an event is an integrity failure
// at that event.
void replay_event(SessionState& s, const EventRecord& e, const Catalog& catalog) {
  try {
    apply_event(s, e, catalog);
  } catch (const IntegrityError&) {
    throw;
  } catch (const std::exception& ex) {
    throw IntegrityError(fmt::format("event {}: {}", e.sequence, ex.what()), e.sequence);
  }
  if (e.tick != s.profile.last_tick()) {
    throw IntegrityError("event tick disagrees with the profile clock", e.sequence);
  }
}

bool safe_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                  (c >= 'A' && c <= 'Z') || c == '-' || c == '_';
         });
}

double read_number(const json& obj, const char* key, const std::string& field) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(fmt::format("{} must be a number", field), field);
  return v.get<double>();
}

std::size_t read_count(const json& obj, const char* key, const std::string& field) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw ValidationError(fmt::format("{} must be a positive integer", field), field);
  }
  return v.get<std::size_t>();
}

}  // namespace

std::string_view to_string(SessionStatus s) {
  return s == SessionStatus::kActive ? "active" : "completed";
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kCreated: return "created";
    case EventKind::kItemServed: return "item_served";
    case EventKind::kAssessmentSubmitted: return "assessment_submitted";
    case EventKind::kPathwaySelected: return "pathway_selected";
    case EventKind::kCurriculumRefreshed: return "curriculum_refreshed";
  }
  return "unknown";
}

EventKind parse_event_kind(std::string_view name) {
  for (auto k : {EventKind::kCreated, EventKind::kItemServed,
                 EventKind::kAssessmentSubmitted, EventKind::kPathwaySelected,
                 EventKind::kCurriculumRefreshed}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError(fmt::format("unknown event kind '{}'", name), "kind");
}

nlohmann::json event_to_json(const EventRecord& e) {
  return {{"session_id", e.session_id},
          {"sequence", e.sequence},
          {"kind", std::string(to_string(e.kind))},
          {"tick", e.tick},
          {"payload", e.payload}};
}

EventRecord event_from_json(const nlohmann::json& doc) {
  EventRecord e;
  doc.at("session_id").get_to(e.session_id);
  doc.at("sequence").get_to(e.sequence);
  e.kind = parse_event_kind(doc.at("kind").get<std::string>());
  doc.at("tick").get_to(e.tick);
  e.payload = doc.at("payload");
  return e;
}

nlohmann::json state_to_json(const SessionState& s) {
  json j = {{"session_id", s.session_id},
            {"objectives", s.objectives},
            {"config", s.config},
            {"profile", s.profile},
            {"curriculum", s.curriculum},
            {"analytics", s.analytics},
            {"pathway", s.pathway},
            {"served_sequence", s.served_sequence},
            {"status", std::string(to_string(s.status))},
            {"last_sequence", s.last_sequence}};
  j["last_signals"] = s.last_signals ? json(*s.last_signals) : json(nullptr);
  j["served_item"] = s.served_item ? json(*s.served_item) : json(nullptr);
  return j;
}

SessionState state_from_json(const nlohmann::json& doc) {
  SessionState s;
  doc.at("session_id").get_to(s.session_id);
  doc.at("objectives").get_to(s.objectives);
  s.config = config_from_json(doc.at("config"));
  doc.at("profile").get_to(s.profile);
  doc.at("curriculum").get_to(s.curriculum);
  doc.at("analytics").get_to(s.analytics);
  doc.at("pathway").get_to(s.pathway);
  doc.at("served_sequence").get_to(s.served_sequence);
  s.status = doc.at("status").get<std::string>() == "active" ? SessionStatus::kActive
                                                              : SessionStatus::kCompleted;
  doc.at("last_sequence").get_to(s.last_sequence);
  if (!doc.at("last_signals").is_null()) s.last_signals = doc.at("last_signals").get<SignalVector>();
  if (!doc.at("served_item").is_null()) s.served_item = doc.at("served_item").get<ItemId>();
  return s;
}

CreateRequest create_request_from_json(const nlohmann::json& body) {
  if (!body.is_object()) throw ValidationError("body must be an object", "body");
  CreateRequest req;
  if (body.contains("learner_id")) {
    if (!body.at("learner_id").is_string()) {
      throw ValidationError("learner_id must be a string", "learner_id");
    }
    req.learner_id = body.at("learner_id").get<std::string>();
  }
  if (body.contains("objectives")) {
    const auto& o = body.at("objectives");
    if (!o.is_array()) throw ValidationError("objectives must be an array", "objectives");
    for (const auto& s : o) {
      if (!s.is_string()) throw ValidationError("objectives must be strings", "objectives");
      req.objectives.insert(s.get<std::string>());
    }
  }
  if (!body.contains("overrides")) return req;
  const auto& ov = body.at("overrides");
  if (!ov.is_object()) throw ValidationError("overrides must be an object", "overrides");
  auto& c = req.config;
  for (const auto& [key, value] : ov.items()) {
    const std::string field = "overrides." + key;
    if (key == "beta") c.reward.beta = read_number(ov, "beta", field);
    else if (key == "gamma") c.reward.gamma = read_number(ov, "gamma", field);
    else if (key == "horizon") c.reward.horizon = read_count(ov, "horizon", field);
    else if (key == "beam_width") c.reward.beam_width = read_count(ov, "beam_width", field);
    else if (key == "lambda") c.fusion.lambda = read_number(ov, "lambda", field);
    else if (key == "mu") c.fusion.mu = read_number(ov, "mu", field);
    else if (key == "window") c.fusion.window = read_count(ov, "window", field);
    else if (key == "formative_every") {
      if (!value.is_number_integer() || value.get<long long>() < 0) {
        throw ValidationError("formative_every must be a non-negative integer", field);
      }
      c.formative_every = value.get<std::size_t>();
    }
    else if (key == "mastery_threshold") {
      c.curriculum.mastery_threshold = read_number(ov, "mastery_threshold", field);
    } else if (key == "learning_rate") {
      c.trainer.learning_rate = read_number(ov, "learning_rate", field);
    } else if (key == "feedback_rate") {
      c.trainer.feedback_rate = read_number(ov, "feedback_rate", field);
    } else if (key == "initial_mastery") {
      if (!value.is_object()) throw ValidationError("initial_mastery must be an object", field);
      for (const auto& [skill, m] : value.items()) {
        if (!m.is_number() || !in_unit(m.get<double>())) {
          throw ValidationError(fmt::format("mastery of '{}' must be in [0,1]", skill),
                                field);
        }
        req.initial_mastery[skill] = m.get<double>();
      }
    } else {
      throw ValidationError(fmt::format("unknown override '{}'", key), field);
    }
  }
  validate(req.config);
  return req;
}

SubmitRequest submit_request_from_json(const nlohmann::json& body) {
  if (!body.is_object()) throw ValidationError("body must be an object", "body");
  SubmitRequest req;
  if (!body.contains("sequence") || !body.at("sequence").is_number_integer() ||
      body.at("sequence").get<std::int64_t>() < 0) {
    throw ValidationError("sequence must be a non-negative integer", "sequence");
  }
  req.sequence = body.at("sequence").get<std::uint64_t>();
  if (!body.contains("item_id") || !body.at("item_id").is_string()) {
    throw ValidationError("item_id must be a string", "item_id");
  }
  req.item_id = body.at("item_id").get<std::string>();
  if (body.contains("score")) {
    double v = read_number(body, "score", "score");
    if (!in_unit(v)) throw ValidationError("score out of range [0,1]", "score");
    req.score = v;
  }
  if (body.contains("engagement")) {
    double v = read_number(body, "engagement", "engagement");
    if (!in_unit(v)) throw ValidationError("engagement out of range [0,1]", "engagement");
    req.engagement = v;
  }
  if (body.contains("response_time_s")) {
    req.response_time_s = read_number(body, "response_time_s", "response_time_s");
    if (!(req.response_time_s > 0.0)) {
      throw ValidationError("response_time_s must be positive", "response_time_s");
    }
  }
  return req;
}

SessionState replay(const Catalog& catalog, const std::vector<EventRecord>& events) {
  if (events.empty()) throw IntegrityError("event log is empty", 1);
  return replay_from(catalog, SessionState{}, events);
}

SessionState replay_from(const Catalog& catalog, SessionState snapshot,
                         const std::vector<EventRecord>& tail) {
  for (const auto& e : tail) replay_event(snapshot, e, catalog);
  return snapshot;
}

std::vector<EventRecord> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError(fmt::format("cannot open event log {}", path.string()));
  std::vector<EventRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::uint64_t expected = out.empty() ? 1 : out.back().sequence + 1;
    try {
      out.push_back(event_from_json(json::parse(line)));
    } catch (const std::exception& ex) {
      throw IntegrityError(fmt::format("malformed event after sequence {}: {}",
                                       expected - 1, ex.what()),
                           expected);
    }
  }
  return out;
}

SessionService::SessionService(const Catalog& catalog, ServiceOptions options,
                               const Provider* provider)
    : catalog_(catalog),
      options_(std::move(options)),
      provider_(provider),
      id_rng_(options_.id_seed ? *options_.id_seed : std::random_device{}()) {
  if (options_.snapshot_every == 0) options_.snapshot_every = 1;
  if (!options_.data_dir.empty()) std::filesystem::create_directories(options_.data_dir);
}

std::string SessionService::new_id() {
  for (;;) {
    auto id = fmt::format("{:016x}", id_rng_());
    if (sessions_.count(id)) continue;
    if (!options_.data_dir.empty() &&
        std::filesystem::exists(options_.data_dir / (id + ".ndjson"))) {
      continue;
    }
    return id;
  }
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const {
  std::lock_guard lock(registry_mutex_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  const auto log_path = options_.data_dir / (id + ".ndjson");
  if (options_.data_dir.empty() || !safe_id(id) || !std::filesystem::exists(log_path)) {
    throw NotFoundError(fmt::format("unknown session '{}'", id));
  }
  // Restart path: latest snapshot plus the tail of the log.
  auto entry = std::make_shared<Entry>();
  entry->log = read_event_log(log_path);
  const auto snap_path = options_.data_dir / (id + ".snapshot.json");
  std::optional<SessionState> snap;
  if (std::filesystem::exists(snap_path)) {
    std::ifstream in(snap_path);
    snap = state_from_json(json::parse(in));
  }
  if (snap && snap->last_sequence <= entry->log.size()) {
    std::vector<EventRecord> tail(entry->log.begin() + static_cast<long>(snap->last_sequence),
                                  entry->log.end());
    entry->state = replay_from(catalog_, std::move(*snap), tail);
  } else {
    entry->state = replay(catalog_, entry->log);
  }
  sessions_[id] = entry;
  return entry;
}

void SessionService::persist(const Entry& entry, const std::vector<EventRecord>& pending,
                             const SessionState& next) const {
  if (options_.data_dir.empty()) return;
  const auto& id = next.session_id;
  const auto log_path = options_.data_dir / (id + ".ndjson");
  std::string buffer;
  for (const auto& e : pending) buffer += event_to_json(e).dump() + "\n";
  const auto before = std::filesystem::exists(log_path) ? std::filesystem::file_size(log_path) : 0;
  {
    std::ofstream out(log_path, std::ios::app | std::ios::binary);
    out << buffer;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::resize_file(log_path, before, ec);
      throw std::runtime_error(fmt::format("cannot append to {}", log_path.string()));
    }
  }
  const auto every = options_.snapshot_every;
  if (entry.log.size() / every != (entry.log.size() + pending.size()) / every) {
    // A failed snapshot only costs restart time; the log stays authoritative.
    try {
      const auto snap = options_.data_dir / (id + ".snapshot.json");
      const auto tmp = options_.data_dir / (id + ".snapshot.json.tmp");
      {
        std::ofstream out(tmp, std::ios::trunc);
        out << state_to_json(next).dump();
      }
      std::filesystem::rename(tmp, snap);
    } catch (const std::exception&) {
    }
  }
}

void SessionService::commit(Entry& entry, std::vector<EventRecord> pending,
                            SessionState next) {
  persist(entry, pending, next);
  for (auto& e : pending) entry.log.push_back(std::move(e));
  entry.state = std::move(next);
}

namespace {

// Builds events against a working copy; nothing touches the session until
// every event has applied cleanly.
struct Draft {
  SessionState work;
  const Catalog& catalog;
  std::vector<EventRecord> events;

  void emit(EventKind kind, json payload) {
    EventRecord e{work.session_id, work.last_sequence + 1, kind, std::move(payload), 0};
    apply_event(work, e, catalog);
    e.tick = work.profile.last_tick();
    events.push_back(std::move(e));
  }

  void select(const RewardConfig& cfg, bool adopted) {
    auto scored = select_pathway(work, catalog, cfg);
    emit(EventKind::kPathwaySelected,
         {{"reward", cfg}, {"scored", scored}, {"adopted", adopted}});
  }

  void serve_head() {
    if (work.status == SessionStatus::kActive) {
      emit(EventKind::kItemServed, {{"item_id", work.pathway.pathway.items.front()}});
    }
  }
};

}  // namespace

SessionState SessionService::create(const CreateRequest& request) {
  validate(request.config);
  for (const auto& o : request.objectives) {
    if (!catalog_.has_skill(o)) {
      throw ValidationError(fmt::format("unknown objective skill '{}'", o), "objectives");
    }
  }
  for (const auto& [skill, m] : request.initial_mastery) {
    if (!catalog_.has_skill(skill)) {
      throw ValidationError(fmt::format("unknown skill '{}'", skill),
                            "overrides.initial_mastery");
    }
  }
  std::set<SkillId> objectives = request.objectives;
  if (objectives.empty()) objectives.insert(catalog_.skills().begin(), catalog_.skills().end());

  auto entry = std::make_shared<Entry>();
  std::string id;
  {
    std::lock_guard lock(registry_mutex_);
    id = new_id();
  }
  Draft d{SessionState{}, catalog_, {}};
  d.work.session_id = id;
  d.emit(EventKind::kCreated,
         {{"learner_id", request.learner_id.value_or("learner-" + id)},
          {"objectives", objectives},
          {"initial_mastery", request.initial_mastery},
          {"config", request.config}});
  d.select(request.config.reward, false);
  d.serve_head();

  commit(*entry, std::move(d.events), std::move(d.work));
  std::lock_guard lock(registry_mutex_);
  sessions_[id] = entry;
  return entry->state;
}

SessionState SessionService::get(const std::string& id) const {
  auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  return entry->state;
}

NextResult SessionService::next(const std::string& id, std::optional<double> beta,
                                std::optional<double> gamma) const {
  auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  const auto& s = entry->state;
  if (s.status != SessionStatus::kActive) {
    throw GoneError(fmt::format("session '{}' is completed", id));
  }
  NextResult out;
  RewardConfig cfg = s.config.reward;
  if (beta || gamma) {
    if (beta) cfg.beta = *beta;
    if (gamma) cfg.gamma = *gamma;
    validate(cfg);
    out.pathway = select_pathway(s, catalog_, cfg);
    out.what_if = true;
  } else {
    out.pathway = s.pathway;
  }
  const Provider& provider = provider_ != nullptr ? *provider_ : stub_;
  out.explanation = explain_recommendation(
      make_explanation_request(s.profile, out.pathway, catalog_, cfg), provider);
  return out;
}

SessionState SessionService::submit(const std::string& id, const SubmitRequest& request) {
  auto entry = find(id);
  std::unique_lock lock(entry->mutex);
  const auto& s = entry->state;
  if (s.status != SessionStatus::kActive) {
    throw GoneError(fmt::format("session '{}' is completed", id));
  }
  if (!s.served_item || request.sequence != s.served_sequence) {
    throw ConflictError(fmt::format("sequence {} is stale; the served item has sequence {}",
                                    request.sequence, s.served_sequence));
  }
  if (request.item_id != *s.served_item) {
    throw ValidationError(fmt::format("item '{}' is not the served item '{}'",
                                      request.item_id, *s.served_item),
                          "item_id");
  }

  Draft d{s, catalog_, {}};
  json payload = {{"item_id", request.item_id},
                  {"served_sequence", request.sequence},
                  {"timestamp", s.profile.last_tick() + 1},
                  {"response_time_s", request.response_time_s}};
  if (request.score) payload["score"] = *request.score;
  if (request.engagement) payload["engagement"] = *request.engagement;
  d.emit(EventKind::kAssessmentSubmitted, std::move(payload));
  d.emit(EventKind::kCurriculumRefreshed,
         {{"curriculum", refresh_curriculum(d.work.profile, catalog_, d.work.curriculum,
                                            d.work.objectives, d.work.config.curriculum)}});
  d.select(d.work.config.reward, false);
  d.serve_head();

  commit(*entry, std::move(d.events), std::move(d.work));
  return entry->state;
}

SessionState SessionService::adopt(const std::string& id, std::optional<double> beta,
                                   std::optional<double> gamma) {
  auto entry = find(id);
  std::unique_lock lock(entry->mutex);
  const auto& s = entry->state;
  if (s.status != SessionStatus::kActive) {
    throw GoneError(fmt::format("session '{}' is completed", id));
  }
  RewardConfig cfg = s.config.reward;
  if (beta) cfg.beta = *beta;
  if (gamma) cfg.gamma = *gamma;
  validate(cfg);

  Draft d{s, catalog_, {}};
  d.select(cfg, true);
  if (d.work.status == SessionStatus::kActive &&
      d.work.pathway.pathway.items.front() != s.served_item) {
    d.serve_head();
  }
  commit(*entry, std::move(d.events), std::move(d.work));
  return entry->state;
}

std::vector<EventRecord> SessionService::events(const std::string& id) const {
  auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  return entry->log;
}

}  // namespace adaptive
