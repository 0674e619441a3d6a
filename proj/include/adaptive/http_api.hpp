#pragma once

// JSON-over-HTTP front end for SessionService and simulation jobs.

#include <filesystem>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "adaptive/provider.hpp"
#include "adaptive/session.hpp"

namespace adaptive {

struct ApiOptions {
  // Served under "/" when set (the browser client).
  std::filesystem::path static_dir;
  // Upper bound on cohort_size * episodes for POST /simulations.
  std::size_t max_simulated_interactions = 1'000'000;
};

// Error body {code, message, field?} and status for an exception.
std::pair<int, nlohmann::json> error_response(const std::exception& ex);

// Summary returned by create, get, submit and adopt.
nlohmann::json session_view(const SessionState& state, const Catalog& catalog);

void register_routes(httplib::Server& server, SessionService& service,
                     const Provider* provider = nullptr, ApiOptions options = {});

}  // namespace adaptive
