#include <doctest.h>

#include <fstream>

#include "adaptive/errors.hpp"
#include "adaptive/report.hpp"
#include "../support/fixtures.hpp"

using namespace adaptive;

namespace {

std::vector<ReportRow> sample_rows() {
  return {{"FullFramework", 1, 39.5, 2.25, 83.125, 1.5, 10000},
          {"StaticResourceAllocation", 1, 43.75, 2.0, 85.0, 1.25, 10000},
          {"FullFramework", 2, 40.5, 2.0, 84.875, 1.0, 10000}};
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("tsv round trip") {
  auto dir = fixtures::temp_dir("report-rt");
  auto rows = sample_rows();
  write_file_atomic(dir / "a.tsv", to_tsv(rows));
  CHECK(read_tsv(dir / "a.tsv") == rows);
  CHECK(to_tsv(rows).rfind("strategy\tseed\tmean_les\tsd_les\tmean_krr\tsd_krr\tinteractions\n", 0) == 0);
  CHECK(to_tsv(rows).find("39.500000") != std::string::npos);
}

TEST_CASE("merge concatenates in argument order") {
  auto dir = fixtures::temp_dir("report-merge");
  auto rows = sample_rows();
  write_file_atomic(dir / "a.tsv", to_tsv({rows[0]}));
  write_file_atomic(dir / "b.tsv", to_tsv({rows[1], rows[2]}));
  CHECK(merge_reports({dir / "a.tsv", dir / "b.tsv"}) == rows);
  CHECK(merge_reports({dir / "b.tsv"}) == read_tsv(dir / "b.tsv"));
}

TEST_CASE("malformed files name themselves") {
  auto dir = fixtures::temp_dir("report-bad");
  write(dir / "cols.tsv", to_tsv(sample_rows()) + "FullFramework\t3\t1.0\n");
  try {
    read_tsv(dir / "cols.tsv");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("cols.tsv") != std::string::npos);
  }
  write(dir / "header.tsv", "strategy\tseed\n");
  CHECK_THROWS_AS(read_tsv(dir / "header.tsv"), FormatError);
  write(dir / "number.tsv", "strategy\tseed\tmean_les\tsd_les\tmean_krr\tsd_krr\tinteractions\n"
                            "FullFramework\t1\tabc\t0\t0\t0\t1\n");
  CHECK_THROWS_AS(read_tsv(dir / "number.tsv"), FormatError);
  CHECK_THROWS_AS(read_tsv(dir / "missing.tsv"), NotFoundError);
}

TEST_CASE("table rendering aligns columns") {
  auto text = render(sample_rows(), ReportFormat::kTable);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  REQUIRE(lines.size() >= 4);
  for (const auto& l : lines) CHECK(l.size() == lines[0].size());
  auto doc = render(sample_rows(), ReportFormat::kDoc);
  CHECK(doc.find("| strategy") != std::string::npos);
  CHECK(parse_report_format("doc") == ReportFormat::kDoc);
  CHECK_THROWS_AS(parse_report_format("html"), ValidationError);
}

TEST_CASE("ranking averages over seeds") {
  auto ranking = rank_strategies(sample_rows());
  REQUIRE(ranking.size() == 2);
  CHECK(ranking[0].strategy == "StaticResourceAllocation");
  CHECK(ranking[1].strategy == "FullFramework");
  CHECK(ranking[1].seeds == 2);
  CHECK(ranking[1].mean_les == doctest::Approx(40.0));
  CHECK(ranking[1].mean_krr == doctest::Approx(84.0));
  CHECK(ranking[0].les_vs_full == doctest::Approx(3.75));
  CHECK(ranking[0].krr_vs_full == doctest::Approx(1.0));
  CHECK(render_ranking(ranking).find("best mean LES: StaticResourceAllocation") != std::string::npos);
}

TEST_CASE("published reference values") {
  const auto& rows = published_rows();
  CHECK(rows.size() == 20);
  bool found = false;
  for (const auto& r : rows) {
    if (r.table == "1" && r.model == "Llama-3-7b" && r.setting == "AdaLED") {
      CHECK(r.les == 75.5);
      CHECK(r.krr == 80.2);
      found = true;
    }
    if (r.table == "2" && r.model == "GPT-4" && r.setting == "Static Resource Allocation") {
      CHECK(r.les == 76.8);
      CHECK(r.krr == 80.5);
    }
  }
  CHECK(found);
  CHECK(render_published(ReportFormat::kTable).find("not reproducible") != std::string::npos);
}

}
