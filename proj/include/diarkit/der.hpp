#pragma once

// Diarization error rate:
//
//   DER = (false alarm + missed speech + speaker confusion) / reference speech
//
// with an optimal one-to-one mapping between reference and hypothesis
// speakers.

#include <optional>
#include <utility>
#include <vector>

#include "diarkit/assignment.hpp"
#include "diarkit/timeline.hpp"

namespace diarkit {

struct DerReport {
  double false_alarm = 0.0;
  double miss = 0.0;
  double confusion = 0.0;
  double total = 0.0;
  double der = 0.0;

  double error() const noexcept { return false_alarm + miss + confusion; }

  // Builds a report from raw components; throws Error(EmptyReference) when
  // total is not positive.
  static DerReport from_components(double false_alarm, double miss, double confusion,
                                   double total);
};

// Rows are reference speakers, columns hypothesis speakers, both sorted.
struct CostMatrix {
  std::vector<SpeakerId> reference;
  std::vector<SpeakerId> hypothesis;
  WeightMatrix overlap;
};

// Injective reference -> hypothesis label pairs, sorted by reference label.
class SpeakerMapping {
 public:
  SpeakerMapping() = default;
  explicit SpeakerMapping(std::vector<std::pair<SpeakerId, SpeakerId>> pairs);

  const std::vector<std::pair<SpeakerId, SpeakerId>>& pairs() const noexcept { return pairs_; }
  std::optional<SpeakerId> hypothesis_for(const SpeakerId& reference) const;
  std::size_t size() const noexcept { return pairs_.size(); }

  bool operator==(const SpeakerMapping&) const = default;

 private:
  std::vector<std::pair<SpeakerId, SpeakerId>> pairs_;
};

struct DerOptions {
  // Seconds excluded on each side of every reference boundary.
  double collar = 0.0;
  bool skip_overlap = false;
};

CostMatrix overlap_cost_matrix(const Annotation& reference, const Annotation& hypothesis);

// Maximum matched-overlap mapping; zero-overlap pairs are left out and ties
// resolve to the lexicographically smallest (reference, hypothesis) sequence.
SpeakerMapping optimal_mapping(const CostMatrix& cost);

// Time actually scored: everything up to the latest segment end, minus the
// collar zones and (optionally) reference overlap.
Timeline scoring_region(const Annotation& reference, const Annotation& hypothesis,
                        const DerOptions& options);

// Throws Error(EmptyReference) when no reference speech remains to be scored.
DerReport compute_der(const Annotation& reference, const Annotation& hypothesis,
                      const DerOptions& options = {});

// Components for an explicitly given mapping (no optimisation).
DerReport compute_der_with_mapping(const Annotation& reference, const Annotation& hypothesis,
                                   const SpeakerMapping& mapping);

}  // namespace diarkit
