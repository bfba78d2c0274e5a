#include "diarkit/detection.hpp"

#include <algorithm>
#include <cmath>

#include "diarkit/error.hpp"

namespace diarkit {

DetectionReport DetectionReport::from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn,
                                             std::int64_t tn, double frame_size) {
  if (tp < 0 || fp < 0 || fn < 0 || tn < 0) {
    throw Error(Errc::InvalidArgument, "negative frame count");
  }
  DetectionReport r;
  r.tp_frames = tp;
  r.fp_frames = fp;
  r.fn_frames = fn;
  r.tn_frames = tn;
  r.frame_size = frame_size;
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
  r.f1 = r.precision + r.recall > 0.0 ? f1_from_pr(r.precision, r.recall) : 0.0;
  r.miss_rate = 1.0 - r.recall;
  r.false_discovery_rate = 1.0 - r.precision;
  return r;
}

std::vector<bool> frame_labels(const Annotation& annotation, double horizon,
                               double frame_size) {
  if (!(frame_size > 0.0)) {
    throw Error(Errc::InvalidArgument, "frame size must be positive");
  }
  if (horizon < 0.0) {
    throw Error(Errc::InvalidArgument, "horizon must be non-negative");
  }
  const auto count = static_cast<std::size_t>(std::ceil(horizon / frame_size - 1e-9));
  std::vector<bool> labels(count, false);
  const Timeline overlap = overlap_regions(annotation);
  const auto& regions = overlap.spans();
  std::size_t k = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double mid = (static_cast<double>(i) + 0.5) * frame_size;
    while (k < regions.size() && regions[k].end() <= mid) ++k;
    if (k == regions.size()) break;
    labels[i] = regions[k].contains(mid);
  }
  return labels;
}

DetectionReport score_detection(const Annotation& reference, const Annotation& hypothesis,
                                double frame_size) {
  const double horizon = std::max(reference.end_time(), hypothesis.end_time());
  const auto ref = frame_labels(reference, horizon, frame_size);
  const auto hyp = frame_labels(hypothesis, horizon, frame_size);
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (ref[i] && hyp[i]) ++tp;
    else if (!ref[i] && hyp[i]) ++fp;
    else if (ref[i] && !hyp[i]) ++fn;
    else ++tn;
  }
  return DetectionReport::from_counts(tp, fp, fn, tn, frame_size);
}

double f1_from_pr(double precision, double recall) {
  if (precision < 0.0 || precision > 1.0 || recall < 0.0 || recall > 1.0) {
    throw Error(Errc::InvalidArgument, "precision and recall must lie in [0, 1]");
  }
  if (precision == 0.0 && recall == 0.0) {
    throw Error(Errc::BothZero, "F1 undefined when precision and recall are both zero");
  }
  return 2.0 * precision * recall / (precision + recall);
}

ConfusionRates confusion_rates(const DetectionReport& report) {
  if (report.tp_frames + report.fn_frames == 0) {
    throw Error(Errc::NoReferenceOverlap, "reference contains no overlap frames");
  }
  if (report.tp_frames + report.fp_frames == 0) {
    throw Error(Errc::NoDetections, "hypothesis detects no overlap frames");
  }
  return {report.miss_rate, report.false_discovery_rate};
}

}  // namespace diarkit
