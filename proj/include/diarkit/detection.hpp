#pragma once

// Frame-level overlapped-speech detection scoring.

#include <cstdint>
#include <vector>

#include "diarkit/timeline.hpp"

namespace diarkit {

inline constexpr double kDefaultFrameSize = 0.01;

struct DetectionReport {
  std::int64_t tp_frames = 0;
  std::int64_t fp_frames = 0;
  std::int64_t fn_frames = 0;
  std::int64_t tn_frames = 0;
  double frame_size = kDefaultFrameSize;

  // A ratio whose denominator is zero is reported as 1 (nothing to detect,
  // or nothing wrongly detected). f1 is 0 when precision + recall is 0.
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  double miss_rate = 0.0;              // 1 - recall
  double false_discovery_rate = 0.0;   // 1 - precision

  std::int64_t total_frames() const noexcept {
    return tp_frames + fp_frames + fn_frames + tn_frames;
  }

  static DetectionReport from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn,
                                     std::int64_t tn, double frame_size);
};

// Frame i is true iff the midpoint of [i*fs, (i+1)*fs) lies in an overlap
// region. Length is ceil(horizon / frame_size).
std::vector<bool> frame_labels(const Annotation& annotation, double horizon,
                               double frame_size);

DetectionReport score_detection(const Annotation& reference, const Annotation& hypothesis,
                                double frame_size = kDefaultFrameSize);

// Harmonic mean; throws Error(BothZero) if precision and recall are both 0.
double f1_from_pr(double precision, double recall);

struct ConfusionRates {
  double miss_rate;
  double false_discovery_rate;
};

// Throws Error(NoReferenceOverlap) when tp + fn = 0 and Error(NoDetections)
// when tp + fp = 0.
ConfusionRates confusion_rates(const DetectionReport& report);

}  // namespace diarkit
