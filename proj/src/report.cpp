#include "diarkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "diarkit/error.hpp"

namespace diarkit {

using nlohmann::json;

DerReport aggregate(std::span<const DerReport> reports) {
  if (reports.empty()) throw Error(Errc::EmptyInput, "no DER reports to aggregate");
  double fa = 0.0, miss = 0.0, conf = 0.0, total = 0.0;
  for (const auto& r : reports) {
    fa += r.false_alarm;
    miss += r.miss;
    conf += r.confusion;
    total += r.total;
  }
  return DerReport::from_components(fa, miss, conf, total);
}

DetectionReport aggregate(std::span<const DetectionReport> reports) {
  if (reports.empty()) throw Error(Errc::EmptyInput, "no detection reports to aggregate");
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& r : reports) {
    if (r.frame_size != reports.front().frame_size) {
      throw Error(Errc::InvalidArgument, "cannot pool detection reports with different frame sizes");
    }
    tp += r.tp_frames;
    fp += r.fp_frames;
    fn += r.fn_frames;
    tn += r.tn_frames;
  }
  return DetectionReport::from_counts(tp, fp, fn, tn, reports.front().frame_size);
}

SystemMetrics summarize(const SystemResult& result) {
  SystemMetrics m;
  m.name = result.system_name;
  m.precision = result.detection_report.precision;
  m.recall = result.detection_report.recall;
  m.f1 = result.detection_report.f1;
  m.der = result.der_report.der;
  m.components = DerComponents{result.der_report.false_alarm, result.der_report.miss,
                               result.der_report.confusion, result.der_report.total};
  return m;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "table") return ReportFormat::Table;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw Error(Errc::InvalidArgument, "unknown report format '" + std::string(name) + "'");
}

std::string format_percent(double ratio) {
  if (!std::isfinite(ratio)) return "nan";
  const double scaled = std::abs(ratio) * 10000.0;
  double units = std::floor(scaled);
  // Fractions within 1e-7 of one half round up.
  if (scaled - units >= 0.5 - 1e-7) units += 1.0;
  const auto n = static_cast<long long>(units);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", (ratio < 0.0 && n != 0) ? "-" : "", n / 100, n % 100);
  return buf;
}

namespace {

struct Row {
  const char* label;
  double SystemMetrics::*field;
};

constexpr Row kRows[] = {
    {"Precision", &SystemMetrics::precision},
    {"Recall", &SystemMetrics::recall},
    {"F1-Score", &SystemMetrics::f1},
    {"DER", &SystemMetrics::der},
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string pad(const std::string& s, std::size_t width) {
  return s + std::string(width > s.size() ? width - s.size() : 0, ' ');
}

std::string render_table(std::span<const SystemMetrics> systems) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Metric"});
  for (const auto& s : systems) cells.front().push_back(s.name);
  for (const auto& row : kRows) {
    std::vector<std::string> line{row.label};
    for (const auto& s : systems) line.push_back(format_percent(s.*row.field) + "%");
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  auto emit = [&](const std::vector<std::string>& line) {
    std::string out = "|";
    for (std::size_t c = 0; c < line.size(); ++c) out += " " + pad(line[c], width[c]) + " |";
    return out + "\n";
  };
  std::string out = emit(cells.front());
  out += "|";
  for (auto w : width) out += std::string(w + 2, '-') + "|";
  out += "\n";
  for (std::size_t r = 1; r < cells.size(); ++r) out += emit(cells[r]);
  return out;
}

std::string render_csv(std::span<const SystemMetrics> systems) {
  std::string out = "metric";
  for (const auto& s : systems) out += "," + csv_field(s.name);
  out += "\n";
  for (const auto& row : kRows) {
    out += row.label;
    for (const auto& s : systems) out += "," + format_percent(s.*row.field);
    out += "\n";
  }
  return out;
}

std::string render_json(std::span<const SystemMetrics> systems) {
  json arr = json::array();
  for (const auto& s : systems) {
    json j = {{"name", s.name},
              {"precision", s.precision},
              {"recall", s.recall},
              {"f1", s.f1},
              {"der", s.der}};
    if (s.components) {
      j["components"] = {{"fa", s.components->false_alarm},
                         {"miss", s.components->miss},
                         {"conf", s.components->confusion},
                         {"total", s.components->total}};
    }
    arr.push_back(std::move(j));
  }
  return json{{"systems", std::move(arr)}}.dump(2) + "\n";
}

}  // namespace

std::string render_comparison(std::span<const SystemMetrics> systems, ReportFormat format) {
  switch (format) {
    case ReportFormat::Table: return render_table(systems);
    case ReportFormat::Csv: return render_csv(systems);
    case ReportFormat::Json: return render_json(systems);
  }
  return {};
}

std::string render_comparison(std::span<const SystemResult> results, ReportFormat format) {
  std::vector<SystemMetrics> metrics;
  metrics.reserve(results.size());
  for (const auto& r : results) metrics.push_back(summarize(r));
  return render_comparison(std::span<const SystemMetrics>(metrics), format);
}

std::vector<SystemMetrics> parse_comparison_json(std::string_view text) {
  std::vector<SystemMetrics> out;
  try {
    const json j = json::parse(text);
    for (const auto& s : j.at("systems")) {
      SystemMetrics m;
      s.at("name").get_to(m.name);
      s.at("precision").get_to(m.precision);
      s.at("recall").get_to(m.recall);
      s.at("f1").get_to(m.f1);
      s.at("der").get_to(m.der);
      if (s.contains("components")) {
        const auto& c = s.at("components");
        m.components = DerComponents{c.at("fa").get<double>(), c.at("miss").get<double>(),
                                     c.at("conf").get<double>(), c.at("total").get<double>()};
      }
      out.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("comparison json: ") + e.what());
  }
  return out;
}

}  // namespace diarkit
