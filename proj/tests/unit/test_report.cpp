#include <doctest.h>

#include "diarkit/error.hpp"
#include "diarkit/report.hpp"

using namespace diarkit;

TEST_CASE("aggregate DER") {
  auto one = DerReport::from_components(1, 2, 3, 10);
  std::vector<DerReport> v{one};
  CHECK(aggregate(v).der == one.der);
  v = {DerReport::from_components(0, 1, 0, 10), DerReport::from_components(0, 3, 0, 10)};
  CHECK(format_percent(aggregate(v).der) == "20.00");
  v = {DerReport::from_components(0, 5, 0, 10), DerReport::from_components(0, 9, 0, 90)};
  CHECK(format_percent(aggregate(v).der) == "14.00");
  CHECK(format_percent((v[0].der + v[1].der) / 2) == "30.00");
  CHECK_THROWS_AS(aggregate(std::vector<DerReport>{}), Error);
}

TEST_CASE("aggregate detection") {
  std::vector<DetectionReport> v{DetectionReport::from_counts(1, 1, 0, 8, 0.01),
                                 DetectionReport::from_counts(3, 0, 1, 6, 0.01)};
  auto a = aggregate(v);
  CHECK(a.tp_frames == 4);
  CHECK(a.precision == doctest::Approx(0.8));
  CHECK(a.recall == doctest::Approx(0.8));
  v.push_back(DetectionReport::from_counts(1, 0, 0, 0, 0.02));
  CHECK_THROWS_AS(aggregate(v), Error);
}

TEST_CASE("format_percent") {
  CHECK(format_percent(0.681818) == "68.18");
  CHECK(format_percent(0.6818) == "68.18");
  CHECK(format_percent(0.00005) == "0.01");
  CHECK(format_percent(0.123449) == "12.34");
  CHECK(format_percent(1.0) == "100.00");
  CHECK(format_percent(0.0) == "0.00");
  CHECK(format_percent(-0.00005) == "-0.01");
}

TEST_CASE("render formats") {
  std::vector<SystemMetrics> s{{"A", 0.5, 0.25, 1.0 / 3.0, 0.1, std::nullopt},
                               {"B, two", 1.0, 1.0, 1.0, 0.0, DerComponents{1, 2, 3, 60}}};
  const auto table = render_comparison(s, ReportFormat::Table);
  CHECK(table ==
        "| Metric    | A      | B, two  |\n"
        "|-----------|--------|---------|\n"
        "| Precision | 50.00% | 100.00% |\n"
        "| Recall    | 25.00% | 100.00% |\n"
        "| F1-Score  | 33.33% | 100.00% |\n"
        "| DER       | 10.00% | 0.00%   |\n");
  CHECK(render_comparison(s, ReportFormat::Csv) ==
        "metric,A,\"B, two\"\nPrecision,50.00,100.00\nRecall,25.00,100.00\nF1-Score,33.33,100.00\nDER,10.00,0.00\n");
  CHECK(parse_comparison_json(render_comparison(s, ReportFormat::Json)) == s);
  CHECK(render_comparison(s, ReportFormat::Json) == render_comparison(s, ReportFormat::Json));
  CHECK(parse_report_format("csv") == ReportFormat::Csv);
  CHECK_THROWS_AS(parse_report_format("xml"), Error);
}

TEST_CASE("summarize") {
  SystemResult r{"sys", DerReport::from_components(1, 1, 1, 10), DetectionReport::from_counts(1, 1, 1, 1, 0.01)};
  auto m = summarize(r);
  CHECK(m.name == "sys");
  CHECK(m.der == doctest::Approx(0.3));
  CHECK(m.f1 == doctest::Approx(0.5));
  REQUIRE(m.components.has_value());
  CHECK(m.components->total == 10.0);
}
