#pragma once

// Time-interval and annotation algebra. All intervals are half-open
// [start, end) in seconds.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace diarkit {

// Tolerance used for span validity and comparisons.
inline constexpr double kTimeEpsilon = 1e-9;

using SpeakerId = std::string;

class TimeSpan {
 public:
  // Throws Error(InvalidSpan) unless 0 <= start and end - start > kTimeEpsilon.
  TimeSpan(double start, double end);

  double start() const noexcept { return start_; }
  double end() const noexcept { return end_; }
  double duration() const noexcept { return end_ - start_; }

  bool contains(double t) const noexcept { return t >= start_ && t < end_; }
  bool overlaps(const TimeSpan& other) const noexcept {
    return start_ < other.end_ && other.start_ < end_;
  }
  std::optional<TimeSpan> intersect(const TimeSpan& other) const;

  auto operator<=>(const TimeSpan&) const = default;

 private:
  double start_;
  double end_;
};

struct Segment {
  // Throws Error(InvalidSpeaker) on an empty label or one containing whitespace.
  Segment(TimeSpan span, SpeakerId speaker);

  TimeSpan span;
  SpeakerId speaker;

  auto operator<=>(const Segment&) const = default;
};

// Sorted, pairwise-disjoint, non-adjacent spans.
class Timeline {
 public:
  Timeline() = default;

  // Union of arbitrary spans; overlapping and touching spans are merged.
  static Timeline from_spans(std::vector<TimeSpan> spans);

  const std::vector<TimeSpan>& spans() const noexcept { return spans_; }
  bool empty() const noexcept { return spans_.empty(); }
  std::size_t size() const noexcept { return spans_.size(); }
  double duration() const noexcept;
  bool contains(double t) const noexcept;

  Timeline unite(const Timeline& other) const;
  Timeline intersect(const Timeline& other) const;
  Timeline subtract(const Timeline& other) const;

  bool operator==(const Timeline&) const = default;

 private:
  std::vector<TimeSpan> spans_;
};

// Speaker-labelled segments of one recording. Segments stay sorted by
// (start, end, speaker); overlapping segments of the same speaker are merged.
// Different speakers may overlap.
class Annotation {
 public:
  Annotation() = default;
  explicit Annotation(std::string recording_id, std::vector<Segment> segments = {});

  const std::string& recording_id() const noexcept { return recording_id_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  bool empty() const noexcept { return segments_.empty(); }
  std::size_t size() const noexcept { return segments_.size(); }

  void add(Segment segment);

  // Distinct speaker labels in lexicographic order.
  std::vector<SpeakerId> speakers() const;
  Timeline speaker_timeline(const SpeakerId& speaker) const;
  double end_time() const noexcept;
  double total_segment_duration() const noexcept;

  // Applies a label mapping; labels absent from the map are kept.
  Annotation relabeled(const std::map<SpeakerId, SpeakerId>& mapping) const;

  bool operator==(const Annotation&) const = default;

 private:
  void normalize();

  std::string recording_id_;
  std::vector<Segment> segments_;
};

Timeline support(const Annotation& annotation);

// Spans where at least two distinct speakers are active.
Timeline overlap_regions(const Annotation& annotation);

// Intersects every segment with the window; empty pieces are dropped.
Annotation crop(const Annotation& annotation, const Timeline& window);

double intersection_duration(const Timeline& a, const Timeline& b);
double intersection_duration(const Annotation& a, const Annotation& b);

}  // namespace diarkit
