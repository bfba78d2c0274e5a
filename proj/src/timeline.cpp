#include "diarkit/timeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <utility>

#include "diarkit/error.hpp"

namespace diarkit {

TimeSpan::TimeSpan(double start, double end) : start_(start), end_(end) {
  if (!std::isfinite(start) || !std::isfinite(end)) {
    throw Error(Errc::InvalidSpan, "non-finite span bound");
  }
  if (start < 0.0) {
    throw Error(Errc::InvalidSpan, "negative span start " + std::to_string(start));
  }
  if (!(end - start > kTimeEpsilon)) {
    throw Error(Errc::InvalidSpan, "span [" + std::to_string(start) + ", " +
                                       std::to_string(end) + ") has no extent");
  }
}

std::optional<TimeSpan> TimeSpan::intersect(const TimeSpan& other) const {
  const double lo = std::max(start_, other.start_);
  const double hi = std::min(end_, other.end_);
  if (hi - lo > kTimeEpsilon) {
    return TimeSpan(lo, hi);
  }
  return std::nullopt;
}

Segment::Segment(TimeSpan span_, SpeakerId speaker_)
    : span(span_), speaker(std::move(speaker_)) {
  if (speaker.empty()) {
    throw Error(Errc::InvalidSpeaker, "empty speaker label");
  }
  for (unsigned char c : speaker) {
    if (std::isspace(c)) {
      throw Error(Errc::InvalidSpeaker, "speaker label '" + speaker + "' contains whitespace");
    }
  }
}

// ---------------------------------------------------------------------------
// Timeline

Timeline Timeline::from_spans(std::vector<TimeSpan> spans) {
  std::sort(spans.begin(), spans.end());
  Timeline out;
  for (const auto& s : spans) {
    if (!out.spans_.empty() && s.start() <= out.spans_.back().end()) {
      auto& last = out.spans_.back();
      if (s.end() > last.end()) {
        last = TimeSpan(last.start(), s.end());
      }
    } else {
      out.spans_.push_back(s);
    }
  }
  return out;
}

double Timeline::duration() const noexcept {
  double total = 0.0;
  for (const auto& s : spans_) {
    total += s.duration();
  }
  return total;
}

bool Timeline::contains(double t) const noexcept {
  auto it = std::upper_bound(spans_.begin(), spans_.end(), t,
                             [](double v, const TimeSpan& s) { return v < s.start(); });
  if (it == spans_.begin()) {
    return false;
  }
  return std::prev(it)->contains(t);
}

Timeline Timeline::unite(const Timeline& other) const {
  std::vector<TimeSpan> all = spans_;
  all.insert(all.end(), other.spans_.begin(), other.spans_.end());
  return from_spans(std::move(all));
}

Timeline Timeline::intersect(const Timeline& other) const {
  Timeline out;
  std::size_t i = 0, j = 0;
  while (i < spans_.size() && j < other.spans_.size()) {
    if (auto piece = spans_[i].intersect(other.spans_[j])) {
      out.spans_.push_back(*piece);
    }
    if (spans_[i].end() < other.spans_[j].end()) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

Timeline Timeline::subtract(const Timeline& other) const {
  Timeline out;
  std::size_t j = 0;
  for (const auto& s : spans_) {
    double cursor = s.start();
    while (j < other.spans_.size() && other.spans_[j].end() <= cursor) {
      ++j;
    }
    std::size_t k = j;
    while (k < other.spans_.size() && other.spans_[k].start() < s.end()) {
      const auto& cut = other.spans_[k];
      if (cut.start() - cursor > kTimeEpsilon) {
        out.spans_.emplace_back(cursor, cut.start());
      }
      cursor = std::max(cursor, cut.end());
      ++k;
    }
    if (s.end() - cursor > kTimeEpsilon) {
      out.spans_.emplace_back(cursor, s.end());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotation

Annotation::Annotation(std::string recording_id, std::vector<Segment> segments)
    : recording_id_(std::move(recording_id)), segments_(std::move(segments)) {
  normalize();
}

void Annotation::add(Segment segment) {
  segments_.push_back(std::move(segment));
  normalize();
}

void Annotation::normalize() {
  // Group by speaker so same-speaker overlaps can be merged in one pass.
  std::sort(segments_.begin(), segments_.end(), [](const Segment& a, const Segment& b) {
    if (a.speaker != b.speaker) return a.speaker < b.speaker;
    return a.span < b.span;
  });
  std::vector<Segment> merged;
  merged.reserve(segments_.size());
  for (auto& seg : segments_) {
    if (!merged.empty() && merged.back().speaker == seg.speaker &&
        seg.span.start() < merged.back().span.end()) {
      auto& last = merged.back();
      if (seg.span.end() > last.span.end()) {
        last.span = TimeSpan(last.span.start(), seg.span.end());
      }
      continue;
    }
    merged.push_back(std::move(seg));
  }
  std::sort(merged.begin(), merged.end());
  segments_ = std::move(merged);
}

std::vector<SpeakerId> Annotation::speakers() const {
  std::vector<SpeakerId> out;
  for (const auto& s : segments_) {
    out.push_back(s.speaker);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Timeline Annotation::speaker_timeline(const SpeakerId& speaker) const {
  std::vector<TimeSpan> spans;
  for (const auto& s : segments_) {
    if (s.speaker == speaker) {
      spans.push_back(s.span);
    }
  }
  return Timeline::from_spans(std::move(spans));
}

double Annotation::end_time() const noexcept {
  double end = 0.0;
  for (const auto& s : segments_) {
    end = std::max(end, s.span.end());
  }
  return end;
}

double Annotation::total_segment_duration() const noexcept {
  double total = 0.0;
  for (const auto& s : segments_) {
    total += s.span.duration();
  }
  return total;
}

Annotation Annotation::relabeled(const std::map<SpeakerId, SpeakerId>& mapping) const {
  std::vector<Segment> out;
  out.reserve(segments_.size());
  for (const auto& s : segments_) {
    auto it = mapping.find(s.speaker);
    out.emplace_back(s.span, it == mapping.end() ? s.speaker : it->second);
  }
  return Annotation(recording_id_, std::move(out));
}

// ---------------------------------------------------------------------------
// Free functions

Timeline support(const Annotation& annotation) {
  std::vector<TimeSpan> spans;
  spans.reserve(annotation.size());
  for (const auto& s : annotation.segments()) {
    spans.push_back(s.span);
  }
  return Timeline::from_spans(std::move(spans));
}

Timeline overlap_regions(const Annotation& annotation) {
  // Open-segment count equals the number of distinct active speakers.
  struct Event {
    double t;
    int delta;
  };
  std::vector<Event> events;
  events.reserve(annotation.size() * 2);
  for (const auto& s : annotation.segments()) {
    events.push_back({s.span.start(), +1});
    events.push_back({s.span.end(), -1});
  }
  // Ends before starts at equal times: half-open spans.
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.delta < b.delta;
  });

  std::vector<TimeSpan> regions;
  int active = 0;
  double open_at = 0.0;
  for (const auto& e : events) {
    const int before = active;
    active += e.delta;
    if (before < 2 && active >= 2) {
      open_at = e.t;
    } else if (before >= 2 && active < 2 && e.t - open_at > kTimeEpsilon) {
      regions.emplace_back(open_at, e.t);
    }
  }
  return Timeline::from_spans(std::move(regions));
}

Annotation crop(const Annotation& annotation, const Timeline& window) {
  std::vector<Segment> out;
  const auto& spans = window.spans();
  for (const auto& seg : annotation.segments()) {
    auto it = std::lower_bound(spans.begin(), spans.end(), seg.span.start(),
                               [](const TimeSpan& w, double t) { return w.end() <= t; });
    for (; it != spans.end() && it->start() < seg.span.end(); ++it) {
      if (auto piece = seg.span.intersect(*it)) {
        out.emplace_back(*piece, seg.speaker);
      }
    }
  }
  return Annotation(annotation.recording_id(), std::move(out));
}

double intersection_duration(const Timeline& a, const Timeline& b) {
  double total = 0.0;
  std::size_t i = 0, j = 0;
  const auto& x = a.spans();
  const auto& y = b.spans();
  while (i < x.size() && j < y.size()) {
    const double lo = std::max(x[i].start(), y[j].start());
    const double hi = std::min(x[i].end(), y[j].end());
    if (hi > lo) {
      total += hi - lo;
    }
    if (x[i].end() < y[j].end()) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

double intersection_duration(const Annotation& a, const Annotation& b) {
  return intersection_duration(support(a), support(b));
}

}  // namespace diarkit
