#include "diarkit/rttm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "diarkit/error.hpp"

namespace diarkit {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

// Values within a nanosecond of the millisecond grid are snapped onto it so
// that parse(write(x)) reproduces millisecond-aligned inputs exactly.
double snap_ms(double seconds) {
  const double ms = std::round(seconds * 1000.0);
  return std::abs(seconds * 1000.0 - ms) < 1e-6 ? ms / 1000.0 : seconds;
}

long long to_ms(double seconds) { return std::llround(seconds * 1000.0); }

std::string format_ms(long long ms) {
  const bool negative = ms < 0;
  const long long a = negative ? -ms : ms;
  std::string frac = std::to_string(a % 1000);
  frac.insert(0, 3 - frac.size(), '0');
  return (negative ? "-" : "") + std::to_string(a / 1000) + "." + frac;
}

}  // namespace

std::string format_seconds(double seconds) { return format_ms(to_ms(seconds)); }

RttmDocument parse_rttm(std::string_view text) {
  RttmDocument doc;
  std::map<std::string, std::vector<Segment>> segments;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    const auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == ';') continue;
    if (fields.size() != 10) {
      throw ParseError(Errc::MalformedLine, line_no,
                       "expected 10 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0] != "SPEAKER") {
      ++doc.skipped_records;
      continue;
    }
    int channel = 0;
    {
      auto [p, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), channel);
      if (ec != std::errc() || p != fields[2].data() + fields[2].size()) {
        throw ParseError(Errc::MalformedLine, line_no, "non-integer channel '" + std::string(fields[2]) + "'");
      }
    }
    double onset = 0.0, duration = 0.0;
    if (!parse_double(fields[3], onset)) {
      throw ParseError(Errc::MalformedLine, line_no, "non-numeric onset '" + std::string(fields[3]) + "'");
    }
    if (!parse_double(fields[4], duration)) {
      throw ParseError(Errc::MalformedLine, line_no, "non-numeric duration '" + std::string(fields[4]) + "'");
    }
    if (onset < 0.0) {
      throw ParseError(Errc::NegativeOnset, line_no, "onset " + std::string(fields[3]));
    }
    if (duration < 0.0) {
      throw ParseError(Errc::NegativeDuration, line_no, "duration " + std::string(fields[4]));
    }
    const double start = snap_ms(onset);
    const double end = snap_ms(snap_ms(onset) + snap_ms(duration));
    if (!(end - start > kTimeEpsilon)) {
      ++doc.skipped_records;
      continue;
    }
    try {
      segments[std::string(fields[1])].emplace_back(TimeSpan(start, end), std::string(fields[7]));
    } catch (const Error& e) {
      throw ParseError(Errc::MalformedLine, line_no, e.what());
    }
  }
  for (auto& [file, segs] : segments) {
    doc.files.emplace(file, Annotation(file, std::move(segs)));
  }
  return doc;
}

RttmDocument read_rttm(const std::filesystem::path& path) {
  return parse_rttm(read_text_file(path));
}

std::string write_rttm(const std::map<std::string, Annotation>& annotations) {
  struct Line {
    std::string_view file;
    long long onset_ms;
    std::string_view speaker;
    long long end_ms;
  };
  std::vector<Line> lines;
  for (const auto& [file, annotation] : annotations) {
    for (const auto& seg : annotation.segments()) {
      const long long on = to_ms(seg.span.start());
      const long long off = to_ms(seg.span.end());
      // Sub-millisecond segments have no representation on the output grid.
      if (off <= on) continue;
      lines.push_back({file, on, seg.speaker, off});
    }
  }
  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return std::tie(a.file, a.onset_ms, a.speaker, a.end_ms) <
           std::tie(b.file, b.onset_ms, b.speaker, b.end_ms);
  });
  std::string out;
  for (const auto& l : lines) {
    out += "SPEAKER ";
    out += l.file;
    out += " 1 ";
    out += format_ms(l.onset_ms);
    out += ' ';
    out += format_ms(l.end_ms - l.onset_ms);
    out += " <NA> <NA> ";
    out += l.speaker;
    out += " <NA> <NA>\n";
  }
  return out;
}

std::string write_rttm(const Annotation& annotation) {
  return write_rttm(std::map<std::string, Annotation>{{annotation.recording_id(), annotation}});
}

std::vector<std::string> read_uri_list(std::string_view text) {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
      line.remove_prefix(1);
    }
    if (line.empty()) continue;
    if (!seen.emplace(line).second) {
      throw ParseError(Errc::DuplicateUri, line_no, "duplicate uri '" + std::string(line) + "'");
    }
    out.emplace_back(line);
  }
  return out;
}

std::string write_uri_list(std::vector<std::string> uris) {
  std::stable_sort(uris.begin(), uris.end());
  if (auto it = std::adjacent_find(uris.begin(), uris.end()); it != uris.end()) {
    throw Error(Errc::DuplicateUri, "duplicate uri '" + *it + "'");
  }
  std::string out;
  for (const auto& u : uris) {
    out += u;
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoFailure, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(Errc::IoFailure, "cannot write " + path.string());
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw Error(Errc::IoFailure, "short write to " + path.string());
  }
}

}  // namespace diarkit
