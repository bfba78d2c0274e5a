#pragma once

// Corpus-level aggregation and Table-style rendering of system comparisons.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diarkit/der.hpp"
#include "diarkit/detection.hpp"

namespace diarkit {

// Micro-average: components are summed, then the ratio is recomputed.
// Throws Error(EmptyInput).
DerReport aggregate(std::span<const DerReport> reports);
DetectionReport aggregate(std::span<const DetectionReport> reports);

struct SystemResult {
  std::string system_name;
  DerReport der_report;
  DetectionReport detection_report;
};

struct DerComponents {
  double false_alarm = 0.0;
  double miss = 0.0;
  double confusion = 0.0;
  double total = 0.0;

  bool operator==(const DerComponents&) const = default;
};

// What a comparison table shows for one system. Components are present when
// the metrics were computed here rather than quoted.
struct SystemMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double der = 0.0;
  std::optional<DerComponents> components;

  bool operator==(const SystemMetrics&) const = default;
};

SystemMetrics summarize(const SystemResult& result);

enum class ReportFormat { Table, Csv, Json };

ReportFormat parse_report_format(std::string_view name);

// Ratio as a percentage with exactly two decimals, rounded half away from
// zero: 0.681818 -> "68.18".
std::string format_percent(double ratio);

// Rows Precision, Recall, F1-Score, DER; one column per system in input order.
std::string render_comparison(std::span<const SystemMetrics> systems, ReportFormat format);
std::string render_comparison(std::span<const SystemResult> results, ReportFormat format);

// Inverse of the JSON rendering.
std::vector<SystemMetrics> parse_comparison_json(std::string_view text);

}  // namespace diarkit
