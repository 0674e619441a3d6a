#include "adaptive/http_api.hpp"

#include <charconv>

#include <fmt/format.h>

#include "adaptive/errors.hpp"
#include "adaptive/serialize.hpp"
#include "adaptive/simulator.hpp"

namespace adaptive {

namespace {

json item_view(const Catalog& catalog, const ItemId& id) {
  const ContentItem* item = catalog.find(id);
  if (item == nullptr) return nullptr;
  return {{"id", item->id},
          {"modality", std::string(to_string(item->modality))},
          {"difficulty", item->difficulty},
          {"skills", item->skills},
          {"duration_minutes", item->duration_minutes},
          {"assessable", item->assessable()}};
}

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error&) {
    throw ValidationError("body is not valid JSON", "body");
  }
}

std::optional<double> query_number(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  const auto text = req.get_param_value(key);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError(fmt::format("{} must be a number", key), key);
  }
  return v;
}

std::optional<double> body_number(const json& body, const char* key) {
  if (!body.contains(key)) return std::nullopt;
  if (!body.at(key).is_number()) {
    throw ValidationError(fmt::format("{} must be a number", key), key);
  }
  return body.at(key).get<double>();
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const std::exception& ex) {
      auto [status, body] = error_response(ex);
      send(res, status, body);
    }
  };
}

}  // namespace

std::pair<int, nlohmann::json> error_response(const std::exception& ex) {
  auto body = [&](const char* code) {
    return json{{"code", code}, {"message", ex.what()}};
  };
  if (const auto* v = dynamic_cast<const ValidationError*>(&ex)) {
    json b = body("validation");
    if (!v->field().empty()) b["field"] = v->field();
    return {400, b};
  }
  if (dynamic_cast<const NotFoundError*>(&ex)) return {404, body("not_found")};
  if (dynamic_cast<const ConflictError*>(&ex)) return {409, body("conflict")};
  if (dynamic_cast<const OrderingError*>(&ex)) return {409, body("ordering")};
  if (dynamic_cast<const GoneError*>(&ex)) return {410, body("gone")};
  if (dynamic_cast<const DomainError*>(&ex) || dynamic_cast<const SetupError*>(&ex)) {
    return {422, body("domain")};
  }
  if (const auto* i = dynamic_cast<const IntegrityError*>(&ex)) {
    json b = body("integrity");
    b["sequence"] = i->sequence();
    return {500, b};
  }
  return {500, body("internal")};
}

nlohmann::json session_view(const SessionState& s, const Catalog& catalog) {
  json units = json::array();
  for (const auto& u : s.curriculum.units) {
    units.push_back({{"target_skill", u.target_skill},
                     {"mastery_threshold", u.mastery_threshold},
                     {"pool_size", u.item_pool.size()}});
  }
  return {{"session_id", s.session_id},
          {"status", std::string(to_string(s.status))},
          {"learner_id", s.profile.learner_id},
          {"objectives", s.objectives},
          {"sequence", s.served_item ? json(s.served_sequence) : json(nullptr)},
          {"item", s.served_item ? item_view(catalog, *s.served_item) : json(nullptr)},
          {"pathway", s.pathway},
          {"mastery", s.profile.mastery},
          {"engagement", s.profile.engagement},
          {"performance", s.analytics.performance},
          {"curriculum", units},
          {"beta", s.config.reward.beta},
          {"gamma", s.config.reward.gamma},
          {"last_sequence", s.last_sequence}};
}

void register_routes(httplib::Server& server, SessionService& service,
                     const Provider* provider, ApiOptions options) {
  const Catalog& catalog = service.catalog();

  server.Get("/healthz", guarded([](const auto&, auto& res) {
    send(res, 200, {{"status", "ok"}});
  }));

  server.Post("/sessions", guarded([&service, &catalog](const auto& req, auto& res) {
    auto state = service.create(create_request_from_json(parse_body(req)));
    send(res, 201, session_view(state, catalog));
  }));

  server.Get(R"(/sessions/([^/]+))", guarded([&service, &catalog](const auto& req, auto& res) {
    send(res, 200, session_view(service.get(req.matches[1]), catalog));
  }));

  server.Get(R"(/sessions/([^/]+)/next)", guarded([&service, &catalog](const auto& req, auto& res) {
    const std::string id = req.matches[1];
    auto beta = query_number(req, "beta");
    auto gamma = query_number(req, "gamma");
    auto next = service.next(id, beta, gamma);
    const auto state = service.get(id);
    json head = next.pathway.pathway.empty()
                    ? json(nullptr)
                    : item_view(catalog, next.pathway.pathway.items.front());
    send(res, 200,
         {{"session_id", id},
          {"item", head},
          {"sequence", state.served_item ? json(state.served_sequence) : json(nullptr)},
          {"pathway", next.pathway},
          {"explanation", next.explanation},
          {"what_if", next.what_if},
          {"beta", beta.value_or(state.config.reward.beta)},
          {"gamma", gamma.value_or(state.config.reward.gamma)}});
  }));

  server.Post(R"(/sessions/([^/]+)/assessments)",
              guarded([&service, &catalog](const auto& req, auto& res) {
                auto state = service.submit(req.matches[1],
                                            submit_request_from_json(parse_body(req)));
                send(res, 200, session_view(state, catalog));
              }));

  server.Post(R"(/sessions/([^/]+)/pathway)",
              guarded([&service, &catalog](const auto& req, auto& res) {
                json body = req.body.empty() ? json::object() : parse_body(req);
                if (!body.is_object()) throw ValidationError("body must be an object", "body");
                auto state = service.adopt(req.matches[1], body_number(body, "beta"),
                                           body_number(body, "gamma"));
                send(res, 200, session_view(state, catalog));
              }));

  server.Get(R"(/sessions/([^/]+)/profile)", guarded([&service](const auto& req, auto& res) {
    const auto state = service.get(req.matches[1]);
    send(res, 200,
         {{"session_id", state.session_id},
          {"profile", state.profile},
          {"analytics", state.analytics}});
  }));

  server.Get(R"(/sessions/([^/]+)/events)", guarded([&service](const auto& req, auto& res) {
    json out = json::array();
    for (const auto& e : service.events(req.matches[1])) out.push_back(event_to_json(e));
    send(res, 200, out);
  }));

  server.Post("/simulations", guarded([&catalog, provider, options](const auto& req, auto& res) {
    SimConfig cfg = sim_config_from_json(parse_body(req));
    if (cfg.episodes != 0 &&
        cfg.cohort_size > options.max_simulated_interactions / cfg.episodes) {
      throw ValidationError(
          fmt::format("cohort_size * episodes exceeds {}", options.max_simulated_interactions),
          "cohort_size");
    }
    send(res, 200, report_to_json(run_session(catalog, cfg, {}, provider)));
  }));

  if (!options.static_dir.empty()) {
    if (!server.set_mount_point("/", options.static_dir.string())) {
      throw ConfigError(fmt::format("cannot serve {}", options.static_dir.string()));
    }
  }
}

}  // namespace adaptive
