#pragma once

// Flat report rows: TSV on disk, aligned text or Markdown for people.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "adaptive/simulator.hpp"

namespace adaptive {

struct ReportRow {
  std::string strategy;  // enum name
  std::uint64_t seed = 0;
  double mean_les = 0.0;
  double sd_les = 0.0;
  double mean_krr = 0.0;
  double sd_krr = 0.0;
  std::size_t interactions = 0;

  bool operator==(const ReportRow&) const = default;
};

inline constexpr std::array<std::string_view, 7> kReportColumns = {
    "strategy", "seed", "mean_les", "sd_les", "mean_krr", "sd_krr", "interactions"};

ReportRow to_row(const SessionReport& report);

// Header plus one line per row; numbers with six decimals.
void write_tsv(std::ostream& out, const std::vector<ReportRow>& rows);
std::string to_tsv(const std::vector<ReportRow>& rows);

// Throws NotFoundError for a missing file and FormatError (naming the file)
// for a wrong header, a wrong column count or an unparsable number.
std::vector<ReportRow> read_tsv(const std::filesystem::path& path);

// Concatenation of every file, in argument order.
std::vector<ReportRow> merge_reports(const std::vector<std::filesystem::path>& paths);

enum class ReportFormat { kTable, kDoc };

// Throws ValidationError for anything but "table" or "doc".
ReportFormat parse_report_format(std::string_view name);

std::string render(const std::vector<ReportRow>& rows, ReportFormat format);

// Per-strategy means over seeds, best mean LES first.
struct RankingEntry {
  std::string strategy;
  std::size_t seeds = 0;
  double mean_les = 0.0;
  double mean_krr = 0.0;
  double les_vs_full = 0.0;  // mean_les minus FullFramework's
  double krr_vs_full = 0.0;
};

std::vector<RankingEntry> rank_strategies(const std::vector<ReportRow>& rows);
std::string render_ranking(const std::vector<RankingEntry>& ranking);

// Values printed in the published tables. They come from studies that cannot
// be rerun here and are shown for orientation only.
struct PublishedRow {
  std::string table;     // "1" or "2"
  std::string model;
  std::string setting;   // baseline or ablation strategy
  std::string dataset;
  double les = 0.0;
  double krr = 0.0;
};

const std::vector<PublishedRow>& published_rows();
std::string render_published(ReportFormat format);

// Writes through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace adaptive
