// adaptive: simulate, ablate, serve, report.

#include <charconv>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "adaptive/catalog.hpp"
#include "adaptive/errors.hpp"
#include "adaptive/http_api.hpp"
#include "adaptive/provider.hpp"
#include "adaptive/report.hpp"
#include "adaptive/serialize.hpp"
#include "adaptive/session.hpp"
#include "adaptive/simulator.hpp"

namespace fs = std::filesystem;
using namespace adaptive;

namespace {

constexpr int kUsage = 2;
constexpr int kFailure = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string catalog = "reference";
  std::uint64_t seed = 42;
  std::string seeds = "1,2,3,4,5,6,7,8,9,10";
  std::size_t cohort = 200;
  std::size_t episodes = 50;
  std::optional<double> beta;
  std::optional<double> gamma;
  std::string strategy = "FullFramework";
  std::string reselection = "real_time";
  std::string out = ".";
  std::string format = "table";
  std::string provider_config;
};

// "reference" (or "demo") names the bundled catalog.
fs::path catalog_path(const std::string& name) {
  if (name == "reference" || name == "demo") {
    return fs::path(ADAPTIVE_DATA_DIR) / "reference_catalog.json";
  }
  return name;
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto end = list.find(',', start);
    if (end == std::string::npos) end = list.size();
    const std::string tok = list.substr(start, end - start);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw UsageError(fmt::format("--seeds: '{}' is not a seed", tok));
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

EngineConfig engine_config(const Common& c) {
  EngineConfig e;
  if (c.beta) e.reward.beta = *c.beta;
  if (c.gamma) e.reward.gamma = *c.gamma;
  try {
    validate(e.reward);
  } catch (const ValidationError& ex) {
    throw UsageError(ex.what());
  }
  return e;
}

SimConfig sim_config(const Common& c) {
  SimConfig cfg;
  cfg.cohort_size = c.cohort;
  cfg.episodes = c.episodes;
  cfg.seed = c.seed;
  try {
    cfg.strategy = parse_strategy(c.strategy);
  } catch (const ValidationError& ex) {
    throw UsageError(ex.what());
  }
  cfg.reselection = c.reselection == "session_start" ? Reselection::kSessionStart
                                                     : Reselection::kRealTime;
  return cfg;
}

std::unique_ptr<Provider> provider_from(const Common& c) {
  if (c.provider_config.empty()) return nullptr;
  return make_provider(load_provider_config(c.provider_config));
}

void write_outputs(const fs::path& dir, const std::string& stem,
                   const std::vector<ReportRow>& rows) {
  fs::create_directories(dir);
  write_file_atomic(dir / (stem + ".tsv"), to_tsv(rows));
  write_file_atomic(dir / (stem + ".md"), render(rows, ReportFormat::kDoc));
}

int cmd_simulate(const Common& c) {
  const auto cfg = sim_config(c);
  const auto engine = engine_config(c);
  const auto format = parse_report_format(c.format);
  const auto catalog = load_catalog(catalog_path(c.catalog));
  const auto provider = provider_from(c);
  const auto report = run_session(catalog, cfg, engine, provider.get());
  const std::vector<ReportRow> rows = {to_row(report)};
  write_outputs(c.out, "report", rows);
  std::cout << render(rows, format);
  std::cout << fmt::format("cohort means: LES {:.3f}  KRR {:.3f}  ({} interactions)\n",
                           report.mean_les, report.mean_krr, report.interactions);
  return 0;
}

int cmd_ablate(const Common& c) {
  auto base = sim_config(c);
  const auto engine = engine_config(c);
  const auto seeds = parse_seeds(c.seeds);
  const auto format = parse_report_format(c.format);
  const auto catalog = load_catalog(catalog_path(c.catalog));
  const auto provider = provider_from(c);
  std::vector<ReportRow> rows;
  for (const auto& r : run_ablation_matrix(catalog, base, seeds, engine, provider.get())) {
    rows.push_back(to_row(r));
  }
  write_outputs(c.out, "ablation", rows);
  std::cout << render(rows, format) << '\n' << render_ranking(rank_strategies(rows));
  return 0;
}

int cmd_serve(const Common& c, const std::string& listen, const std::string& data_dir,
              const std::string& static_dir) {
  const auto colon = listen.rfind(':');
  int port = 0;
  if (colon == std::string::npos ||
      std::from_chars(listen.data() + colon + 1, listen.data() + listen.size(), port).ec !=
          std::errc{} ||
      port <= 0 || port > 65535) {
    throw UsageError(fmt::format("--listen: expected HOST:PORT, got '{}'", listen));
  }
  const std::string host = listen.substr(0, colon);
  const auto catalog = load_catalog(catalog_path(c.catalog));
  const auto provider = provider_from(c);
  ServiceOptions opts;
  opts.data_dir = data_dir;
  SessionService service(catalog, opts, provider.get());
  httplib::Server server;
  ApiOptions api;
  api.static_dir = static_dir;
  register_routes(server, service, provider.get(), api);
  std::cerr << fmt::format("listening on {}:{}\n", host, port);
  if (!server.listen(host, port)) {
    throw std::runtime_error(fmt::format("cannot listen on {}", listen));
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& files, bool reference,
               const std::string& format_name) {
  const auto format = parse_report_format(format_name);
  std::vector<fs::path> paths(files.begin(), files.end());
  const auto rows = merge_reports(paths);
  std::cout << render(rows, format);
  if (reference) std::cout << '\n' << render_published(format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive curriculum engine"};
  app.require_subcommand(1);
  Common c;

  auto add_engine_flags = [&](CLI::App* sub) {
    sub->add_option("--catalog", c.catalog, "Catalog JSON path, or 'reference'");
    sub->add_option("--cohort", c.cohort, "Simulated students")->check(CLI::PositiveNumber);
    sub->add_option("--episodes", c.episodes, "Interactions per student")
        ->check(CLI::PositiveNumber);
    sub->add_option("--beta", c.beta, "Engagement weight")->check(CLI::NonNegativeNumber);
    sub->add_option("--gamma", c.gamma, "Quality weight")->check(CLI::NonNegativeNumber);
    sub->add_option("--reselection", c.reselection, "real_time or session_start")
        ->check(CLI::IsMember({"real_time", "session_start"}));
    sub->add_option("--out", c.out, "Output directory");
    sub->add_option("--format", c.format, "Stdout rendering")
        ->check(CLI::IsMember({"table", "doc"}));
    sub->add_option("--provider-config", c.provider_config, "Explanation provider JSON");
  };

  auto* simulate = app.add_subcommand("simulate", "Run one cohort");
  add_engine_flags(simulate);
  simulate->add_option("--seed", c.seed, "Cohort seed");
  simulate->add_option("--strategy", c.strategy, "Strategy enum name");

  auto* ablate = app.add_subcommand("ablate", "Run every strategy for every seed");
  add_engine_flags(ablate);
  ablate->add_option("--seeds", c.seeds, "Comma-separated seeds");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string listen = "127.0.0.1:8080";
  std::string data_dir;
  std::string static_dir;
  serve->add_option("--catalog", c.catalog, "Catalog JSON path, or 'reference'");
  serve->add_option("--listen", listen, "HOST:PORT");
  serve->add_option("--data-dir", data_dir, "Event log directory (default: memory only)");
  serve->add_option("--static-dir", static_dir, "Browser client directory");
  serve->add_option("--provider-config", c.provider_config, "Explanation provider JSON");

  auto* report = app.add_subcommand("report", "Merge report files into one table");
  std::vector<std::string> files;
  bool reference = false;
  report->add_option("files", files, "Report TSV files")->required();
  report->add_flag("--reference", reference, "Also print the published values");
  report->add_option("--format", c.format, "Rendering")->check(CLI::IsMember({"table", "doc"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(c);
    if (*ablate) return cmd_ablate(c);
    if (*serve) return cmd_serve(c, listen, data_dir, static_dir);
    if (*report) return cmd_report(files, reference, c.format);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
