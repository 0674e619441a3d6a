#include <doctest.h>

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "adaptive/errors.hpp"
#include "adaptive/serialize.hpp"
#include "adaptive/session.hpp"
#include "../support/fixtures.hpp"

using namespace adaptive;
namespace fs = std::filesystem;

namespace {

SubmitRequest answer(const Catalog& c, const SessionState& s, double value) {
  SubmitRequest r;
  r.sequence = s.served_sequence;
  r.item_id = *s.served_item;
  if (c.find(r.item_id)->assessable()) {
    r.score = value;
  } else {
    r.engagement = value;
  }
  return r;
}

std::vector<EventKind> kinds(const std::vector<EventRecord>& events, std::size_t from = 0) {
  std::vector<EventKind> out;
  for (std::size_t i = from; i < events.size(); ++i) out.push_back(events[i].kind);
  return out;
}

// Drives a session for `steps` submissions with seeded answers.
SessionState drive(SessionService& svc, const std::string& id, std::size_t steps,
                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto s = svc.get(id);
  for (std::size_t i = 0; i < steps && s.status == SessionStatus::kActive; ++i) {
    double v = svc.catalog().find(*s.served_item)->assessable() ? (u(rng) < 0.6 ? 1.0 : 0.0) : u(rng);
    s = svc.submit(id, answer(svc.catalog(), s, v));
  }
  return s;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p, std::ios::trunc);
  for (const auto& l : lines) out << l << '\n';
}

ServiceOptions seeded(fs::path dir = {}) {
  ServiceOptions o;
  o.data_dir = std::move(dir);
  o.id_seed = 17;
  return o;
}

}  // namespace

TEST_SUITE("session") {

TEST_CASE("create serves the head of the selected pathway") {
  const auto& c = fixtures::reference_catalog();
  SessionService svc(c, seeded());
  CreateRequest req;
  req.learner_id = "ada";
  auto s = svc.create(req);
  CHECK(s.session_id.size() == 16);
  CHECK(s.status == SessionStatus::kActive);
  CHECK(s.profile.learner_id == "ada");
  CHECK(s.objectives.size() == c.skills().size());
  REQUIRE(s.served_item.has_value());
  CHECK(*s.served_item == s.pathway.pathway.items.front());
  CHECK(s.served_sequence == 3);
  CHECK(kinds(svc.events(s.session_id)) ==
        std::vector<EventKind>{EventKind::kCreated, EventKind::kPathwaySelected,
                               EventKind::kItemServed});
}

TEST_CASE("submit appends one atomic group") {
  const auto& c = fixtures::reference_catalog();
  SessionService svc(c, seeded());
  auto s = svc.create({});
  const auto id = s.session_id;
  auto next = svc.submit(id, answer(c, s, 1.0));
  CHECK(kinds(svc.events(id), 3) ==
        std::vector<EventKind>{EventKind::kAssessmentSubmitted, EventKind::kCurriculumRefreshed,
                               EventKind::kPathwaySelected, EventKind::kItemServed});
  CHECK(next.served_sequence == 7);
  CHECK(next.profile.history.size() == 1);
  CHECK(next.analytics.tick == 1);

  // Replaying the old sequence is a conflict and changes nothing.
  CHECK_THROWS_AS(svc.submit(id, answer(c, s, 1.0)), ConflictError);
  auto wrong = answer(c, next, 1.0);
  wrong.item_id = "arithmetic-l1-video" == wrong.item_id ? "arithmetic-l2-video" : "arithmetic-l1-video";
  CHECK_THROWS_AS(svc.submit(id, wrong), ValidationError);
  auto missing = answer(c, next, 1.0);
  missing.score.reset();
  missing.engagement.reset();
  CHECK_THROWS_AS(svc.submit(id, missing), ValidationError);
  CHECK(svc.get(id) == next);
  CHECK(svc.events(id).size() == 7);
}

TEST_CASE("unknown sessions") {
  SessionService svc(fixtures::reference_catalog(), seeded(fixtures::temp_dir("svc-404")));
  CHECK_THROWS_AS(svc.get("0000000000000000"), NotFoundError);
  CHECK_THROWS_AS(svc.get("../../etc/passwd"), NotFoundError);
  CHECK_THROWS_AS(svc.events(""), NotFoundError);
}

TEST_CASE("replay reproduces the live state") {
  const auto& c = fixtures::reference_catalog();
  auto dir = fixtures::temp_dir("svc-replay");
  SessionService svc(c, seeded(dir));
  const auto id = svc.create({}).session_id;
  auto live = drive(svc, id, 25, 3);
  CHECK(replay(c, svc.events(id)) == live);
  auto from_disk = read_event_log(dir / (id + ".ndjson"));
  CHECK(from_disk == svc.events(id));
  CHECK(replay(c, from_disk) == live);
  CHECK(state_from_json(state_to_json(live)) == live);
}

TEST_CASE("restart restores from snapshot and tail") {
  const auto& c = fixtures::reference_catalog();
  auto dir = fixtures::temp_dir("svc-restart");
  std::string id;
  SessionState before;
  {
    auto opts = seeded(dir);
    opts.snapshot_every = 8;
    SessionService svc(c, opts);
    id = svc.create({}).session_id;
    before = drive(svc, id, 10, 5);
  }
  CHECK(fs::exists(dir / (id + ".snapshot.json")));
  SessionService restarted(c, seeded(dir));
  CHECK(restarted.get(id) == before);
  // The restored session keeps accepting work.
  auto after = drive(restarted, id, 3, 6);
  CHECK(after.last_sequence > before.last_sequence);
  CHECK(replay(c, restarted.events(id)) == after);
}

TEST_CASE("corrupt logs name the first bad sequence") {
  const auto& c = fixtures::reference_catalog();
  auto dir = fixtures::temp_dir("svc-corrupt");
  std::string id;
  {
    SessionService svc(c, seeded(dir));
    id = svc.create({}).session_id;
    drive(svc, id, 3, 1);
  }
  const auto log = dir / (id + ".ndjson");
  const auto lines = read_lines(log);
  REQUIRE(lines.size() == 15);

  auto expect_integrity = [&](std::vector<std::string> edited, std::uint64_t seq) {
    write_lines(log, edited);
    try {
      replay(c, read_event_log(log));
      FAIL("expected IntegrityError");
    } catch (const IntegrityError& e) {
      CHECK(e.sequence() == seq);
    }
  };

  SUBCASE("malformed line") {
    auto edited = lines;
    edited[5] = "{not json";
    expect_integrity(edited, 6);
  }
  SUBCASE("gap") {
    auto edited = lines;
    edited.erase(edited.begin() + 8);
    expect_integrity(edited, 9);
  }
  SUBCASE("tampered selection") {
    auto edited = lines;
    auto doc = json::parse(edited[5]);
    REQUIRE(doc["kind"] == "pathway_selected");
    doc["payload"]["scored"]["reward"] = 0.123;
    edited[5] = doc.dump();
    expect_integrity(edited, 6);
  }
  SUBCASE("tampered score") {
    auto edited = lines;
    auto doc = json::parse(edited[3]);
    REQUIRE(doc["kind"] == "assessment_submitted");
    doc["payload"]["timestamp"] = 99;
    edited[3] = doc.dump();
    expect_integrity(edited, 4);
  }
  SUBCASE("restart surfaces the failure") {
    auto edited = lines;
    edited[10] = "garbage";
    write_lines(log, edited);
    SessionService restarted(c, seeded(dir));
    CHECK_THROWS_AS(restarted.get(id), IntegrityError);
  }
}

TEST_CASE("what-if queries do not mutate") {
  const auto& c = fixtures::reference_catalog();
  SessionService svc(c, seeded());
  const auto id = svc.create({}).session_id;
  drive(svc, id, 4, 2);
  const auto before = svc.get(id);
  const auto events = svc.events(id);
  auto plain = svc.next(id);
  CHECK_FALSE(plain.what_if);
  CHECK(plain.pathway == before.pathway);
  CHECK(plain.explanation.provider_name == "stub");
  auto alt = svc.next(id, 0.0, 1.0);
  CHECK(alt.what_if);
  CHECK(alt.pathway.reward == doctest::Approx(alt.pathway.quality));
  CHECK(svc.get(id) == before);
  CHECK(svc.events(id) == events);
  CHECK_THROWS_AS(svc.next(id, 0.0, 0.0), ValidationError);
}

TEST_CASE("adopting weights persists them") {
  const auto& c = fixtures::reference_catalog();
  SessionService svc(c, seeded());
  const auto id = svc.create({}).session_id;
  const auto alt = svc.next(id, 0.0, 1.0).pathway;
  auto s = svc.adopt(id, 0.0, 1.0);
  CHECK(s.config.reward.beta == 0.0);
  CHECK(s.config.reward.gamma == 1.0);
  CHECK(s.pathway == alt);
  CHECK(*s.served_item == alt.pathway.items.front());
  auto log = svc.events(id);
  auto sel = std::find_if(log.rbegin(), log.rend(),
                          [](const auto& e) { return e.kind == EventKind::kPathwaySelected; });
  CHECK(sel->payload["adopted"] == true);
  CHECK(replay(c, log) == s);
  // Later selections keep the adopted weights.
  auto after = svc.submit(id, answer(c, s, 1.0));
  CHECK(after.config.reward.beta == 0.0);
}

TEST_CASE("crossing the threshold completes a single-skill session") {
  auto c = fixtures::chain_catalog();
  SessionService svc(c, seeded());
  CreateRequest req;
  req.objectives = {"s3"};
  req.config.fusion.lambda = 1.0;
  auto s = svc.create(req);
  REQUIRE(s.curriculum.units.size() == 1);
  CHECK(*s.served_item == "c-quiz");
  s = svc.submit(s.session_id, answer(c, s, 1.0));
  CHECK(s.profile.mastery.at("s3") == 1.0);
  CHECK(s.curriculum.empty());
  CHECK(s.status == SessionStatus::kCompleted);
  CHECK_FALSE(s.served_item.has_value());
  CHECK(svc.events(s.session_id).back().kind == EventKind::kPathwaySelected);
  CHECK_THROWS_AS(svc.next(s.session_id), GoneError);
  CHECK_THROWS_AS(svc.adopt(s.session_id, 0.5, 0.5), GoneError);
  SubmitRequest late{s.served_sequence, "c-quiz", 1.0, 1.0, {}};
  CHECK_THROWS_AS(svc.submit(s.session_id, late), GoneError);
  CHECK(replay(c, svc.events(s.session_id)) == s);
}

TEST_CASE("mastered prerequisite drops its unit") {
  auto c = fixtures::chain_catalog();
  SessionService svc(c, seeded());
  CreateRequest req;
  req.objectives = {"s2"};
  req.config.fusion.lambda = 1.0;
  auto s = svc.create(req);
  REQUIRE(s.curriculum.units.front().target_skill == "s1");
  for (int i = 0; i < 50 && s.status == SessionStatus::kActive &&
                  s.curriculum.units.front().target_skill == "s1";
       ++i) {
    s = svc.submit(s.session_id, answer(c, s, 1.0));
  }
  CHECK(s.profile.mastery.at("s1") >= 0.8);
  REQUIRE_FALSE(s.curriculum.empty());
  CHECK(s.curriculum.units.front().target_skill == "s2");
}

TEST_CASE("every fifth served item is a startable quiz") {
  const auto& c = fixtures::reference_catalog();
  SessionService svc(c, seeded());
  auto s = svc.create({});
  for (int i = 0; i < 20 && s.status == SessionStatus::kActive; ++i) {
    if ((s.profile.history.size() + 1) % 5 == 0) {
      CHECK(c.find(*s.served_item)->assessable());
      CHECK(s.pathway.pathway.items.size() == 1);
    }
    s = svc.submit(s.session_id, answer(c, s, 0.7));
  }
  CHECK(replay(c, svc.events(s.session_id)) == s);
  CHECK(create_request_from_json({{"overrides", {{"formative_every", 0}}}}).config.formative_every == 0);
}

TEST_CASE("mastered objectives complete at creation") {
  auto c = fixtures::chain_catalog();
  SessionService svc(c, seeded());
  CreateRequest req;
  req.objectives = {"s3"};
  req.initial_mastery = {{"s3", 0.9}};
  auto s = svc.create(req);
  CHECK(s.status == SessionStatus::kCompleted);
  CHECK(s.pathway.pathway.empty());
  CHECK_FALSE(s.served_item.has_value());
  CHECK(svc.events(s.session_id).size() == 2);
}

TEST_CASE("a zero score never raises mastery") {
  const auto& c = fixtures::reference_catalog();
  SessionService svc(c, seeded());
  auto s = svc.create({});
  for (int i = 0; i < 30 && s.status == SessionStatus::kActive; ++i) {
    const auto before = s.profile.mastery;
    s = svc.submit(s.session_id, answer(c, s, 0.0));
    for (const auto& [skill, m] : s.profile.mastery) {
      auto it = before.find(skill);
      CHECK(m <= (it == before.end() ? 0.0 : it->second) + 1e-15);
    }
  }
}

TEST_CASE("request parsing") {
  auto req = create_request_from_json(
      {{"learner_id", "x"},
       {"objectives", {"algebra"}},
       {"overrides", {{"beta", 0.7}, {"horizon", 2}, {"initial_mastery", {{"algebra", 0.4}}}}}});
  CHECK(req.learner_id == "x");
  CHECK(req.objectives == std::set<SkillId>{"algebra"});
  CHECK(req.config.reward.beta == 0.7);
  CHECK(req.config.reward.horizon == 2);
  CHECK(req.initial_mastery.at("algebra") == 0.4);

  auto field_of = [](const json& body) {
    try {
      create_request_from_json(body);
    } catch (const ValidationError& e) {
      return e.field();
    }
    return std::string("none");
  };
  CHECK(field_of({{"overrides", {{"zeta", 1}}}}) == "overrides.zeta");
  CHECK(field_of({{"overrides", {{"initial_mastery", {{"a", 2.0}}}}}}) ==
        "overrides.initial_mastery");
  CHECK(field_of({{"objectives", "algebra"}}) == "objectives");
  CHECK(field_of(json::array()) == "body");

  auto sub = submit_request_from_json({{"sequence", 3}, {"item_id", "i"}, {"score", 1}});
  CHECK(sub.sequence == 3);
  CHECK(sub.score == 1.0);
  CHECK_THROWS_AS(submit_request_from_json({{"sequence", 3}, {"item_id", "i"}, {"score", 1.5}}),
                  ValidationError);
  CHECK_THROWS_AS(submit_request_from_json({{"item_id", "i"}}), ValidationError);

  SessionService svc(fixtures::reference_catalog(), seeded());
  CreateRequest bad;
  bad.objectives = {"nope"};
  CHECK_THROWS_AS(svc.create(bad), ValidationError);
}

TEST_CASE("concurrent submissions on one session admit exactly one") {
  const auto& c = fixtures::reference_catalog();
  SessionService svc(c, seeded(fixtures::temp_dir("svc-race")));
  auto s = svc.create({});
  const auto req = answer(c, s, 1.0);
  std::atomic<int> ok{0}, conflicts{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      try {
        svc.submit(s.session_id, req);
        ++ok;
      } catch (const ConflictError&) {
        ++conflicts;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 1);
  CHECK(conflicts == 7);
  CHECK(replay(c, svc.events(s.session_id)) == svc.get(s.session_id));
}

TEST_CASE("independent sessions progress in parallel") {
  const auto& c = fixtures::reference_catalog();
  SessionService svc(c, seeded());
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(svc.create({}).session_id);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    threads.emplace_back([&, i] { drive(svc, ids[i], 6, i); });
  }
  for (auto& t : threads) t.join();
  for (const auto& id : ids) {
    CHECK(svc.get(id).profile.history.size() == 6);
    CHECK(replay(c, svc.events(id)) == svc.get(id));
  }
}

}
