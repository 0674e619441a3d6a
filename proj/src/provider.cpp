#include "adaptive/provider.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>

#include <fmt/format.h>
#include <httplib.h>

#include "adaptive/errors.hpp"

namespace adaptive {

namespace {

std::string item_line(const ItemBreakdown& b) {
  return fmt::format("{}: difficulty fit {:.2f}, modality preference {:.2f}, "
                     "novelty {:.2f}",
                     b.item_id, b.fit, b.preference, b.novelty);
}

std::vector<std::pair<ItemId, std::string>> stub_rationale(
    const ExplanationRequest& request) {
  std::vector<std::pair<ItemId, std::string>> out;
  for (const auto& b : request.items) out.emplace_back(b.item_id, item_line(b));
  return out;
}

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

ParsedUrl parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw ConfigError(fmt::format("invalid base_url '{}'", url));
  }
  ParsedUrl out{m[1].str(), m[2].matched ? m[2].str() : std::string()};
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

}  // namespace

ExplanationRequest make_explanation_request(const LearnerProfile& profile,
                                            const ScoredPathway& scored,
                                            const Catalog& catalog,
                                            const RewardConfig& cfg) {
  ExplanationRequest req;
  req.profile.learner_id = profile.learner_id;
  req.profile.engagement = profile.engagement;
  req.profile.mastery = profile.mastery;
  req.scored = scored;
  req.items = engagement_breakdown(scored.pathway, profile, catalog, cfg);
  return req;
}

void validate(const ProviderConfig& cfg) {
  if (cfg.kind == ProviderKind::kRemote &&
      (!cfg.base_url || cfg.base_url->empty() || !cfg.model_name ||
       cfg.model_name->empty())) {
    throw ConfigError("remote provider requires base_url and model_name");
  }
  if (!(cfg.timeout_s > 0.0)) throw ConfigError("timeout_s must be positive");
}

ProviderConfig provider_config_from_json(const nlohmann::json& doc) {
  ProviderConfig cfg;
  try {
    auto kind = doc.value("kind", std::string("stub"));
    if (kind == "stub") {
      cfg.kind = ProviderKind::kStub;
    } else if (kind == "remote") {
      cfg.kind = ProviderKind::kRemote;
    } else {
      throw ConfigError(fmt::format("unknown provider kind '{}'", kind));
    }
    if (doc.contains("base_url")) cfg.base_url = doc.at("base_url").get<std::string>();
    if (doc.contains("model_name")) {
      cfg.model_name = doc.at("model_name").get<std::string>();
    }
    cfg.api_key_env = doc.value("api_key_env", cfg.api_key_env);
    cfg.timeout_s = doc.value("timeout_s", cfg.timeout_s);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("provider config: {}", e.what()));
  }
  validate(cfg);
  return cfg;
}

ProviderConfig load_provider_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot open provider config '{}'", path.string()));
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("provider config: {}", e.what()));
  }
  return provider_config_from_json(doc);
}

Explanation StubProvider::explain(const ExplanationRequest& request) const {
  if (request.scored.pathway.empty()) {
    throw DomainError("explanation of an empty pathway");
  }
  Explanation out;
  const auto& s = request.scored;
  out.summary = fmt::format(
      "{} next item(s) for {}: reward {:.3f} (engagement {:.3f}, quality "
      "{:.3f}), starting with {}.",
      s.pathway.items.size(), request.profile.learner_id, s.reward,
      s.engagement, s.quality, s.pathway.items.front());
  out.rationale = stub_rationale(request);
  out.provider_name = "stub";
  out.deterministic = true;
  return out;
}

RemoteProvider::RemoteProvider(ProviderConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
}

std::string_view system_prompt() {
  return "You are a tutor's assistant inside an adaptive learning system. "
         "Given a learner summary and the next recommended learning items "
         "with their engagement components, explain in two or three short "
         "sentences why this sequence suits the learner. Do not invent items "
         "and do not change the order.";
}

std::string render_prompt(const ExplanationRequest& request) {
  std::string out = fmt::format("Learner: {}\nEngagement: {:.2f}\nMastery:\n",
                                request.profile.learner_id,
                                request.profile.engagement);
  for (const auto& [skill, m] : request.profile.mastery) {
    out += fmt::format("- {}: {:.2f}\n", skill, m);
  }
  out += fmt::format("Recommended sequence (reward {:.3f}, engagement {:.3f}, "
                     "quality {:.3f}):\n",
                     request.scored.reward, request.scored.engagement,
                     request.scored.quality);
  for (const auto& b : request.items) out += "- " + item_line(b) + "\n";
  return out;
}

nlohmann::json RemoteProvider::request_body(
    const ExplanationRequest& request) const {
  return {{"model", *cfg_.model_name},
          {"messages",
           nlohmann::json::array(
               {{{"role", "system"}, {"content", std::string(system_prompt())}},
                {{"role", "user"}, {"content", render_prompt(request)}}})}};
}

Explanation RemoteProvider::explain(const ExplanationRequest& request) const {
  if (request.scored.pathway.empty()) {
    throw DomainError("explanation of an empty pathway");
  }
  const char* key = std::getenv(cfg_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError(fmt::format("credential variable '{}' is not set",
                                  cfg_.api_key_env));
  }
  ParsedUrl url = parse_url(*cfg_.base_url);
  httplib::Client client(url.origin);
  auto secs = static_cast<time_t>(cfg_.timeout_s);
  auto usecs = static_cast<time_t>((cfg_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
  auto res = client.Post(url.path + "/chat/completions", headers,
                         request_body(request).dump(), "application/json");
  if (!res) {
    throw ProviderError(fmt::format("transport failure: {}",
                                    httplib::to_string(res.error())));
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProviderError(fmt::format("remote returned HTTP {}", res->status));
  }
  Explanation out;
  try {
    auto doc = nlohmann::json::parse(res->body);
    out.summary =
        doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(fmt::format("malformed completion: {}", e.what()));
  }
  out.rationale = stub_rationale(request);
  out.provider_name = "remote";
  out.deterministic = false;
  return out;
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& cfg) {
  validate(cfg);
  if (cfg.kind == ProviderKind::kRemote) return std::make_unique<RemoteProvider>(cfg);
  return std::make_unique<StubProvider>();
}

Explanation explain_recommendation(const ExplanationRequest& request,
                                   const Provider& provider) {
  try {
    return provider.explain(request);
  } catch (const ProviderError&) {
  } catch (const ConfigError&) {
  }
  return StubProvider().explain(request);
}

}  // namespace adaptive
