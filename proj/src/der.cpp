#include "diarkit/der.hpp"

#include <algorithm>
#include <map>

#include "diarkit/error.hpp"

namespace diarkit {

DerReport DerReport::from_components(double false_alarm, double miss, double confusion,
                                     double total) {
  if (!(total > kTimeEpsilon)) {
    throw Error(Errc::EmptyReference, "no reference speech to score");
  }
  DerReport r;
  r.false_alarm = false_alarm;
  r.miss = miss;
  r.confusion = confusion;
  r.total = total;
  r.der = (false_alarm + miss + confusion) / total;
  return r;
}

SpeakerMapping::SpeakerMapping(std::vector<std::pair<SpeakerId, SpeakerId>> pairs)
    : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
  for (std::size_t i = 1; i < pairs_.size(); ++i) {
    if (pairs_[i].first == pairs_[i - 1].first) {
      throw Error(Errc::InvalidArgument, "reference speaker mapped twice: " + pairs_[i].first);
    }
  }
  std::vector<SpeakerId> hyps;
  for (const auto& p : pairs_) hyps.push_back(p.second);
  std::sort(hyps.begin(), hyps.end());
  if (auto it = std::adjacent_find(hyps.begin(), hyps.end()); it != hyps.end()) {
    throw Error(Errc::InvalidArgument, "hypothesis speaker mapped twice: " + *it);
  }
}

std::optional<SpeakerId> SpeakerMapping::hypothesis_for(const SpeakerId& reference) const {
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), reference,
                             [](const auto& p, const SpeakerId& r) { return p.first < r; });
  if (it != pairs_.end() && it->first == reference) return it->second;
  return std::nullopt;
}

CostMatrix overlap_cost_matrix(const Annotation& reference, const Annotation& hypothesis) {
  CostMatrix m;
  m.reference = reference.speakers();
  m.hypothesis = hypothesis.speakers();
  m.overlap = WeightMatrix(m.reference.size(), m.hypothesis.size());
  std::vector<Timeline> hyp_tl;
  for (const auto& h : m.hypothesis) hyp_tl.push_back(hypothesis.speaker_timeline(h));
  for (std::size_t r = 0; r < m.reference.size(); ++r) {
    const Timeline ref_tl = reference.speaker_timeline(m.reference[r]);
    for (std::size_t h = 0; h < m.hypothesis.size(); ++h) {
      m.overlap.at(r, h) = intersection_duration(ref_tl, hyp_tl[h]);
    }
  }
  return m;
}

SpeakerMapping optimal_mapping(const CostMatrix& cost) {
  const auto assignment = max_weight_assignment(cost.overlap);
  std::vector<std::pair<SpeakerId, SpeakerId>> pairs;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    if (assignment[r] != kUnassigned) {
      pairs.emplace_back(cost.reference[r], cost.hypothesis[static_cast<std::size_t>(assignment[r])]);
    }
  }
  return SpeakerMapping(std::move(pairs));
}

Timeline scoring_region(const Annotation& reference, const Annotation& hypothesis,
                        const DerOptions& options) {
  if (options.collar < 0.0) {
    throw Error(Errc::InvalidArgument, "collar must be non-negative");
  }
  const double horizon = std::max(reference.end_time(), hypothesis.end_time());
  if (!(horizon > kTimeEpsilon)) return {};
  Timeline region = Timeline::from_spans({TimeSpan(0.0, horizon)});
  if (options.collar > 0.0) {
    std::vector<TimeSpan> zones;
    for (const auto& seg : reference.segments()) {
      for (double b : {seg.span.start(), seg.span.end()}) {
        const double lo = std::max(0.0, b - options.collar);
        const double hi = b + options.collar;
        if (hi - lo > kTimeEpsilon) zones.emplace_back(lo, hi);
      }
    }
    region = region.subtract(Timeline::from_spans(std::move(zones)));
  }
  if (options.skip_overlap) {
    region = region.subtract(overlap_regions(reference));
  }
  return region;
}

DerReport compute_der_with_mapping(const Annotation& reference, const Annotation& hypothesis,
                                   const SpeakerMapping& mapping) {
  const auto ref_speakers = reference.speakers();
  const auto hyp_speakers = hypothesis.speakers();
  auto index_of = [](const std::vector<SpeakerId>& v, const SpeakerId& s) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), s) - v.begin());
  };

  // For each reference speaker, the index of its mapped hypothesis speaker.
  std::vector<long> mapped(ref_speakers.size(), -1);
  for (const auto& [r, h] : mapping.pairs()) {
    if (!std::binary_search(ref_speakers.begin(), ref_speakers.end(), r)) continue;
    if (!std::binary_search(hyp_speakers.begin(), hyp_speakers.end(), h)) continue;
    mapped[index_of(ref_speakers, r)] = static_cast<long>(index_of(hyp_speakers, h));
  }

  struct Event {
    double t;
    bool ref;
    std::size_t speaker;
    int delta;
  };
  std::vector<Event> events;
  for (const auto& s : reference.segments()) {
    const auto k = index_of(ref_speakers, s.speaker);
    events.push_back({s.span.start(), true, k, +1});
    events.push_back({s.span.end(), true, k, -1});
  }
  for (const auto& s : hypothesis.segments()) {
    const auto k = index_of(hyp_speakers, s.speaker);
    events.push_back({s.span.start(), false, k, +1});
    events.push_back({s.span.end(), false, k, -1});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });

  std::vector<int> ref_active(ref_speakers.size(), 0);
  std::vector<int> hyp_active(hyp_speakers.size(), 0);
  double fa = 0.0, miss = 0.0, conf = 0.0, total = 0.0;

  std::size_t i = 0;
  while (i < events.size()) {
    const double t = events[i].t;
    for (; i < events.size() && events[i].t == t; ++i) {
      auto& counts = events[i].ref ? ref_active : hyp_active;
      counts[events[i].speaker] += events[i].delta;
    }
    if (i == events.size()) break;
    const double d = events[i].t - t;
    if (d <= 0.0) continue;

    long n_ref = 0, n_hyp = 0, n_correct = 0;
    for (std::size_t r = 0; r < ref_active.size(); ++r) {
      if (ref_active[r] > 0) {
        ++n_ref;
        if (mapped[r] >= 0 && hyp_active[static_cast<std::size_t>(mapped[r])] > 0) ++n_correct;
      }
    }
    for (int c : hyp_active) n_hyp += c > 0 ? 1 : 0;

    miss += d * static_cast<double>(std::max(0L, n_ref - n_hyp));
    fa += d * static_cast<double>(std::max(0L, n_hyp - n_ref));
    conf += d * static_cast<double>(std::min(n_ref, n_hyp) - n_correct);
    total += d * static_cast<double>(n_ref);
  }
  return DerReport::from_components(fa, miss, conf, total);
}

DerReport compute_der(const Annotation& reference, const Annotation& hypothesis,
                      const DerOptions& options) {
  const Timeline region = scoring_region(reference, hypothesis, options);
  const Annotation ref = crop(reference, region);
  const Annotation hyp = crop(hypothesis, region);
  const SpeakerMapping mapping = optimal_mapping(overlap_cost_matrix(ref, hyp));
  return compute_der_with_mapping(ref, hyp, mapping);
}

}  // namespace diarkit
