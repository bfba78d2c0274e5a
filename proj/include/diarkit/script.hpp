#pragma once

// Seeded conversation plans and their resolution into timed annotations.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "diarkit/timeline.hpp"

namespace diarkit {

struct VoiceSpec {
  SpeakerId speaker;
  std::string voice_name;
  double rate = 0.0;   // signed percent
  double pitch = 0.0;  // backend-defined units

  bool operator==(const VoiceSpec&) const = default;
};

// Silence after the previous utterance ends.
struct Gap {
  double seconds = 0.0;
  bool operator==(const Gap&) const = default;
};

// Early start before the previous utterance ends.
struct Overlap {
  double seconds = 0.0;
  bool operator==(const Overlap&) const = default;
};

using Join = std::variant<Gap, Overlap>;

struct UtteranceSpec {
  std::size_t index = 0;
  SpeakerId speaker;
  std::string text;
  Join join = Gap{};

  bool operator==(const UtteranceSpec&) const = default;
};

struct Range {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const Range&) const = default;
};

struct ScriptConfig {
  std::vector<VoiceSpec> speakers;
  std::size_t num_utterances = 20;
  std::vector<std::string> text_source;
  Range gap_range{0.2, 1.0};
  double overlap_probability = 0.3;
  Range overlap_range{0.3, 1.0};
  std::uint64_t seed = 0;

  // Two Indonesian voices, the built-in Indonesian sentence pool and the
  // default timing distributions.
  static ScriptConfig defaults();

  // Throws InsufficientSpeakers, EmptyTextSource or InvalidConfig.
  void validate() const;

  bool operator==(const ScriptConfig&) const = default;
};

struct ConversationScript {
  std::string conversation_id;
  ScriptConfig config;
  std::vector<UtteranceSpec> utterances;

  const VoiceSpec& voice_for(const SpeakerId& speaker) const;

  bool operator==(const ConversationScript&) const = default;
};

const std::vector<std::string>& default_indonesian_texts();

// Gap and overlap lengths are drawn on the millisecond grid. Each draw is keyed
// by (seed, utterance index, draw kind), so growing num_utterances keeps the
// earlier utterances unchanged.
ConversationScript generate_script(const ScriptConfig& config,
                                   std::string conversation_id = "conv");

// Per-utterance spans in script order. Throws Error(DurationMismatch) unless
// there is one positive duration per utterance.
std::vector<TimeSpan> utterance_spans(const ConversationScript& script,
                                      std::span<const double> durations);

Annotation resolve_timeline(const ConversationScript& script, std::span<const double> durations);

// JSON documents; see docs/formats.md.
std::string serialize_script(const ConversationScript& script);
ConversationScript parse_script(std::string_view text);

}  // namespace diarkit
