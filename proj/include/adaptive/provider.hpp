#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "adaptive/catalog.hpp"
#include "adaptive/pathway.hpp"
#include "adaptive/types.hpp"

namespace adaptive {

struct ProfileSummary {
  std::string learner_id;
  double engagement = 0.5;
  std::map<SkillId, double> mastery;

  bool operator==(const ProfileSummary&) const = default;
};

struct ExplanationRequest {
  ProfileSummary profile;
  ScoredPathway scored;
  std::vector<ItemBreakdown> items;  // one per pathway item, same order
};

struct Explanation {
  std::string summary;
  std::vector<std::pair<ItemId, std::string>> rationale;
  std::string provider_name;
  bool deterministic = true;

  bool operator==(const Explanation&) const = default;
};

ExplanationRequest make_explanation_request(const LearnerProfile& profile,
                                            const ScoredPathway& scored,
                                            const Catalog& catalog,
                                            const RewardConfig& cfg);

enum class ProviderKind { kStub, kRemote };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kStub;
  std::optional<std::string> base_url;
  std::optional<std::string> model_name;
  std::string api_key_env = "ADAPTIVE_PROVIDER_API_KEY";
  double timeout_s = 10.0;
};

// Throws ConfigError when a remote config lacks base_url or model_name.
void validate(const ProviderConfig& cfg);
ProviderConfig provider_config_from_json(const nlohmann::json& doc);
ProviderConfig load_provider_config(const std::filesystem::path& path);

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string_view name() const = 0;
  // Throws ProviderError / ConfigError on failure.
  virtual Explanation explain(const ExplanationRequest& request) const = 0;
};

// Fixed template over the engagement components. Pure, no I/O.
class StubProvider final : public Provider {
 public:
  std::string_view name() const override { return "stub"; }
  Explanation explain(const ExplanationRequest& request) const override;
};

// One POST per explanation to {base_url}/chat/completions.
class RemoteProvider final : public Provider {
 public:
  explicit RemoteProvider(ProviderConfig cfg);
  std::string_view name() const override { return "remote"; }
  Explanation explain(const ExplanationRequest& request) const override;

  // Request body sent for `request` (exposed for inspection and tests).
  nlohmann::json request_body(const ExplanationRequest& request) const;

 private:
  ProviderConfig cfg_;
};

std::unique_ptr<Provider> make_provider(const ProviderConfig& cfg);

// System prompt of the remote envelope.
std::string_view system_prompt();
// User message of the remote envelope.
std::string render_prompt(const ExplanationRequest& request);

// Asks `provider` and falls back to the stub on ProviderError or
// ConfigError. Explanations never feed back into engine numbers.
Explanation explain_recommendation(const ExplanationRequest& request,
                                   const Provider& provider);

}  // namespace adaptive
