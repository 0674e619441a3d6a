#include "adaptive/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "adaptive/errors.hpp"

namespace adaptive {

namespace {

constexpr std::string_view kPublishedLabel = "published (not reproducible)";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_field(const std::string& text, const std::filesystem::path& path,
              std::size_t line_no, std::string_view column) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError(fmt::format("{}:{}: bad {} '{}'", path.string(), line_no, column, text));
  }
  return v;
}

std::string join_header(std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < kReportColumns.size(); ++i) {
    if (i) out += sep;
    out += kReportColumns[i];
  }
  return out;
}

std::vector<std::string> cells(const ReportRow& r) {
  return {r.strategy,
          fmt::format("{}", r.seed),
          fmt::format("{:.6f}", r.mean_les),
          fmt::format("{:.6f}", r.sd_les),
          fmt::format("{:.6f}", r.mean_krr),
          fmt::format("{:.6f}", r.sd_krr),
          fmt::format("{}", r.interactions)};
}

bool numeric(const std::string& cell) {
  double v = 0.0;
  const char* b = cell.data() + (cell.starts_with('+') ? 1 : 0);
  auto [ptr, ec] = std::from_chars(b, cell.data() + cell.size(), v);
  return ec == std::errc{} && ptr == cell.data() + cell.size();
}

// Numeric columns right-aligned, text columns left-aligned.
std::string align(const std::vector<std::vector<std::string>>& grid) {
  const std::size_t cols = grid.front().size();
  std::vector<std::size_t> width(cols, 0);
  std::vector<bool> right(cols, grid.size() > 1);
  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      width[c] = std::max(width[c], grid[r][c].size());
      if (r > 0 && !numeric(grid[r][c])) right[c] = false;
    }
  }
  std::string out;
  for (const auto& row : grid) {
    std::string line;
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) line += "  ";
      line += right[c] ? fmt::format("{:>{}}", row[c], width[c])
                       : fmt::format("{:<{}}", row[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::string markdown(const std::vector<std::vector<std::string>>& grid) {
  std::string out;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    out += "|";
    for (const auto& cell : grid[r]) out += " " + cell + " |";
    out += "\n";
    if (r == 0) {
      out += "|";
      for (std::size_t c = 0; c < grid[r].size(); ++c) out += c == 0 ? "---|" : "---:|";
      out += "\n";
    }
  }
  return out;
}

}  // namespace

ReportRow to_row(const SessionReport& r) {
  return {std::string(to_string(r.strategy)), r.seed, r.mean_les, r.sd_les,
          r.mean_krr, r.sd_krr, r.interactions};
}

void write_tsv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << join_header("\t") << '\n';
  for (const auto& r : rows) {
    auto c = cells(r);
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "\t" : "") << c[i];
    out << '\n';
  }
}

std::string to_tsv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  write_tsv(out, rows);
  return out.str();
}

std::vector<ReportRow> read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError(fmt::format("cannot open report {}", path.string()));
  std::string line;
  if (!std::getline(in, line) || split_tabs(line).size() != kReportColumns.size()) {
    throw FormatError(fmt::format("{}: expected a {}-column header", path.string(),
                                  kReportColumns.size()));
  }
  if (line != join_header("\t")) {
    throw FormatError(fmt::format("{}: unexpected header '{}'", path.string(), line));
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != kReportColumns.size()) {
      throw FormatError(fmt::format("{}:{}: expected {} columns, found {}", path.string(),
                                    line_no, kReportColumns.size(), f.size()));
    }
    ReportRow r;
    r.strategy = f[0];
    r.seed = parse_field<std::uint64_t>(f[1], path, line_no, "seed");
    r.mean_les = parse_field<double>(f[2], path, line_no, "mean_les");
    r.sd_les = parse_field<double>(f[3], path, line_no, "sd_les");
    r.mean_krr = parse_field<double>(f[4], path, line_no, "mean_krr");
    r.sd_krr = parse_field<double>(f[5], path, line_no, "sd_krr");
    r.interactions = parse_field<std::size_t>(f[6], path, line_no, "interactions");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ReportRow> merge_reports(const std::vector<std::filesystem::path>& paths) {
  std::vector<ReportRow> out;
  for (const auto& p : paths) {
    auto rows = read_tsv(p);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "table") return ReportFormat::kTable;
  if (name == "doc") return ReportFormat::kDoc;
  throw ValidationError(fmt::format("unknown format '{}'", name), "format");
}

std::string render(const std::vector<ReportRow>& rows, ReportFormat format) {
  std::vector<std::vector<std::string>> grid;
  grid.emplace_back(kReportColumns.begin(), kReportColumns.end());
  for (const auto& r : rows) grid.push_back(cells(r));
  return format == ReportFormat::kTable ? align(grid) : markdown(grid);
}

std::vector<RankingEntry> rank_strategies(const std::vector<ReportRow>& rows) {
  std::map<std::string, RankingEntry> by;
  for (const auto& r : rows) {
    auto& e = by[r.strategy];
    e.strategy = r.strategy;
    ++e.seeds;
    e.mean_les += r.mean_les;
    e.mean_krr += r.mean_krr;
  }
  std::vector<RankingEntry> out;
  for (auto& [name, e] : by) {
    e.mean_les /= static_cast<double>(e.seeds);
    e.mean_krr /= static_cast<double>(e.seeds);
    out.push_back(e);
  }
  const std::string full(to_string(AblationStrategy::kFullFramework));
  if (auto it = by.find(full); it != by.end()) {
    for (auto& e : out) {
      e.les_vs_full = e.mean_les - it->second.mean_les;
      e.krr_vs_full = e.mean_krr - it->second.mean_krr;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.mean_les > b.mean_les;
  });
  return out;
}

std::string render_ranking(const std::vector<RankingEntry>& ranking) {
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"rank", "strategy", "seeds", "mean_les", "mean_krr", "les_vs_full",
                  "krr_vs_full"});
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const auto& e = ranking[i];
    grid.push_back({fmt::format("{}", i + 1), e.strategy, fmt::format("{}", e.seeds),
                    fmt::format("{:.3f}", e.mean_les), fmt::format("{:.3f}", e.mean_krr),
                    fmt::format("{:+.3f}", e.les_vs_full),
                    fmt::format("{:+.3f}", e.krr_vs_full)});
  }
  std::string out = align(grid);
  if (!ranking.empty()) {
    out += fmt::format("best mean LES: {}\n", ranking.front().strategy);
  }
  return out;
}

const std::vector<PublishedRow>& published_rows() {
  static const std::vector<PublishedRow> rows = {
      {"1", "Llama-3-7b", "AdaLED", "Low-Resource Language", 75.5, 80.2},
      {"1", "Llama-3-7b", "Dither-and-Learning", "MCScript", 78.0, 82.5},
      {"1", "Llama-3-7b", "ALPACA", "Families in Wild", 80.1, 85.0},
      {"1", "Llama-3-7b", "Retentive Decision Transformer", "ETHICS", 82.3, 83.8},
      {"1", "Llama-3-7b", "Adaptive Event-triggered RL", "Simulated Annotated", 79.5, 81.0},
      {"1", "GPT-4", "AdaLED", "Low-Resource Language", 80.5, 84.2},
      {"1", "GPT-4", "Dither-and-Learning", "MCScript", 82.0, 86.1},
      {"1", "GPT-4", "ALPACA", "Families in Wild", 84.3, 87.5},
      {"1", "GPT-4", "Retentive Decision Transformer", "ETHICS", 83.7, 85.5},
      {"1", "GPT-4", "Adaptive Event-triggered RL", "Simulated Annotated", 81.2, 82.7},
      {"2", "Llama-3-7b", "No Real-Time Adjustment", "Low-Resource Language", 70.2, 76.5},
      {"2", "Llama-3-7b", "No Personalized Recommendations", "MCScript", 76.4, 80.1},
      {"2", "Llama-3-7b", "Fixed Learning Path", "Families in Wild", 77.3, 81.8},
      {"2", "Llama-3-7b", "Basic Assessment Only", "ETHICS", 78.5, 82.3},
      {"2", "Llama-3-7b", "Static Resource Allocation", "Simulated Annotated", 75.0, 78.4},
      {"2", "GPT-4", "No Real-Time Adjustment", "Low-Resource Language", 74.5, 79.8},
      {"2", "GPT-4", "No Personalized Recommendations", "MCScript", 79.2, 83.9},
      {"2", "GPT-4", "Fixed Learning Path", "Families in Wild", 80.0, 85.0},
      {"2", "GPT-4", "Basic Assessment Only", "ETHICS", 81.0, 84.0},
      {"2", "GPT-4", "Static Resource Allocation", "Simulated Annotated", 76.8, 80.5},
  };
  return rows;
}

std::string render_published(ReportFormat format) {
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"source", "table", "model", "setting", "dataset", "les", "krr"});
  for (const auto& r : published_rows()) {
    grid.push_back({std::string(kPublishedLabel), r.table, r.model, r.setting, r.dataset,
                    fmt::format("{:.1f}", r.les), fmt::format("{:.1f}", r.krr)});
  }
  return format == ReportFormat::kTable ? align(grid) : markdown(grid);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out << content;
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace adaptive
