#include <doctest.h>

#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "adaptive/errors.hpp"
#include "adaptive/http_api.hpp"
#include "../support/fixtures.hpp"

using namespace adaptive;
using nlohmann::json;

namespace {

struct Server {
  SessionService service;
  httplib::Server http;
  std::thread thread;
  int port = 0;

  explicit Server(const Catalog& catalog, ApiOptions api = {})
      : service(catalog, [] {
          ServiceOptions o;
          o.id_seed = 3;
          return o;
        }()) {
    api.max_simulated_interactions = 100;
    register_routes(http, service, nullptr, api);
    port = http.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { http.listen_after_bind(); });
    http.wait_until_ready();
  }
  ~Server() {
    http.stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

json body_of(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

json submit_body(const json& view, double value) {
  json b = {{"sequence", view["sequence"]}, {"item_id", view["item"]["id"]}};
  if (view["item"]["assessable"].get<bool>()) {
    b["score"] = value;
  } else {
    b["engagement"] = value;
  }
  return b;
}

}  // namespace

TEST_SUITE("http") {

TEST_CASE("session lifecycle over HTTP") {
  Server srv(fixtures::reference_catalog());
  auto cli = srv.client();

  auto health = cli.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);

  auto created = cli.Post("/sessions", R"({"learner_id":"ada"})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  auto view = body_of(created);
  const std::string id = view["session_id"];
  CHECK(view["status"] == "active");
  CHECK(view["learner_id"] == "ada");
  CHECK(view["sequence"] == 3);
  CHECK(view["item"]["id"] == view["pathway"]["items"][0]);
  for (const char* k : {"engagement", "quality", "reward"}) CHECK(view["pathway"].contains(k));

  auto got = cli.Get("/sessions/" + id);
  CHECK(got->status == 200);
  CHECK(body_of(got) == view);

  auto next = cli.Get("/sessions/" + id + "/next");
  CHECK(next->status == 200);
  auto nj = body_of(next);
  CHECK(nj["item"]["id"] == view["item"]["id"]);
  CHECK(nj["what_if"] == false);
  CHECK(nj["explanation"]["provider_name"] == "stub");

  auto whatif = cli.Get("/sessions/" + id + "/next?beta=0&gamma=1");
  auto wj = body_of(whatif);
  CHECK(wj["what_if"] == true);
  CHECK(wj["beta"] == 0.0);
  CHECK(body_of(cli.Get("/sessions/" + id + "/events")).size() == 3);

  auto sub = cli.Post("/sessions/" + id + "/assessments", submit_body(view, 1.0).dump(),
                      "application/json");
  CHECK(sub->status == 200);
  auto after = body_of(sub);
  CHECK(after["sequence"] == 7);
  CHECK(after["last_sequence"] == 7);

  auto dup = cli.Post("/sessions/" + id + "/assessments", submit_body(view, 1.0).dump(),
                      "application/json");
  CHECK(dup->status == 409);
  CHECK(body_of(dup)["code"] == "conflict");
  CHECK(body_of(cli.Get("/sessions/" + id)) == after);

  auto adopt = cli.Post("/sessions/" + id + "/pathway", R"({"beta":0.2,"gamma":0.8})",
                        "application/json");
  CHECK(adopt->status == 200);
  CHECK(body_of(adopt)["beta"] == 0.2);

  auto profile = body_of(cli.Get("/sessions/" + id + "/profile"));
  CHECK(profile["profile"]["history"].size() == 1);
  CHECK(profile["analytics"]["tick"] == 1);

  auto events = body_of(cli.Get("/sessions/" + id + "/events"));
  CHECK(events.front()["kind"] == "created");
  CHECK(events.back()["sequence"] == events.size());
}

TEST_CASE("error responses carry code and field") {
  Server srv(fixtures::reference_catalog());
  auto cli = srv.client();

  auto bad_json = cli.Post("/sessions", "{oops", "application/json");
  CHECK(bad_json->status == 400);
  CHECK(body_of(bad_json)["field"] == "body");

  auto bad_override = cli.Post("/sessions", R"({"overrides":{"zeta":1}})", "application/json");
  CHECK(bad_override->status == 400);
  CHECK(body_of(bad_override)["field"] == "overrides.zeta");

  auto bad_objective = cli.Post("/sessions", R"({"objectives":["nope"]})", "application/json");
  CHECK(bad_objective->status == 400);
  CHECK(body_of(bad_objective)["field"] == "objectives");

  CHECK(cli.Get("/sessions/ffffffffffffffff")->status == 404);
  CHECK(body_of(cli.Get("/sessions/ffffffffffffffff/next"))["code"] == "not_found");

  auto view = body_of(cli.Post("/sessions", "{}", "application/json"));
  const std::string id = view["session_id"];
  CHECK(cli.Get("/sessions/" + id + "/next?beta=abc")->status == 400);
  auto score = submit_body(view, 1.0);
  score.erase("engagement");
  score["score"] = 2.0;
  auto out_of_range = cli.Post("/sessions/" + id + "/assessments", score.dump(), "application/json");
  CHECK(out_of_range->status == 400);
  CHECK(body_of(out_of_range)["field"] == "score");
  CHECK(cli.Post("/sessions/" + id + "/pathway", R"({"beta":"x"})", "application/json")->status ==
        400);
}

TEST_CASE("completed sessions are gone") {
  auto c = fixtures::chain_catalog();
  Server srv(c);
  auto cli = srv.client();
  auto view = body_of(cli.Post("/sessions", R"({"objectives":["s3"],"overrides":{"lambda":1.0}})",
                               "application/json"));
  const std::string id = view["session_id"];
  auto done = body_of(cli.Post("/sessions/" + id + "/assessments", submit_body(view, 1.0).dump(),
                               "application/json"));
  CHECK(done["status"] == "completed");
  CHECK(done["item"].is_null());
  auto next = cli.Get("/sessions/" + id + "/next");
  CHECK(next->status == 410);
  CHECK(body_of(next)["code"] == "gone");
  CHECK(cli.Post("/sessions/" + id + "/pathway", "{}", "application/json")->status == 410);
  CHECK(cli.Get("/sessions/" + id)->status == 200);
}

TEST_CASE("simulation jobs") {
  Server srv(fixtures::reference_catalog());
  auto cli = srv.client();
  const std::string req = R"({"cohort_size":3,"episodes":10,"seed":4})";
  auto a = cli.Post("/simulations", req, "application/json");
  REQUIRE(a);
  CHECK(a->status == 200);
  auto b = cli.Post("/simulations", req, "application/json");
  CHECK(a->body == b->body);
  auto doc = json::parse(a->body);
  CHECK(doc["interactions"] == 30);
  CHECK(doc["students"].size() == 3);

  auto big = cli.Post("/simulations", R"({"cohort_size":50,"episodes":50})", "application/json");
  CHECK(big->status == 400);
  CHECK(body_of(big)["field"] == "cohort_size");
  auto bad = cli.Post("/simulations", R"({"strategy":"Nope","cohort_size":1,"episodes":1})",
                      "application/json");
  CHECK(bad->status == 400);
  auto empty = cli.Post("/simulations", R"({"cohort_size":0,"episodes":5})", "application/json");
  CHECK(empty->status == 422);
}

TEST_CASE("static client directory") {
  auto dir = fixtures::temp_dir("http-static");
  std::ofstream(dir / "index.html") << "<html>client</html>";
  ApiOptions api;
  api.static_dir = dir;
  Server srv(fixtures::reference_catalog(), api);
  auto cli = srv.client();
  auto page = cli.Get("/index.html");
  REQUIRE(page);
  CHECK(page->status == 200);
  CHECK(page->body == "<html>client</html>");
  CHECK(cli.Get("/healthz")->status == 200);
}

TEST_CASE("error mapping") {
  CHECK(error_response(OrderingError("late")).first == 409);
  CHECK(error_response(DomainError("x")).first == 422);
  CHECK(error_response(SetupError("x")).first == 422);
  auto [status, body] = error_response(IntegrityError("bad", 12));
  CHECK(status == 500);
  CHECK(body["code"] == "integrity");
  CHECK(body["sequence"] == 12);
  CHECK(error_response(std::runtime_error("boom")).second["code"] == "internal");
}

}
