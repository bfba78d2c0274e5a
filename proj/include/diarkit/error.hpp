#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace diarkit {

enum class Errc {
  InvalidArgument,
  InvalidSpan,
  InvalidSpeaker,
  // rttm / uri lists
  MalformedLine,
  NegativeDuration,
  NegativeOnset,
  DuplicateUri,
  // scoring
  EmptyReference,
  BothZero,
  NoReferenceOverlap,
  NoDetections,
  EmptyInput,
  // scripts
  InvalidConfig,
  InsufficientSpeakers,
  EmptyTextSource,
  DurationMismatch,
  // synthesis
  EmptyText,
  UnknownVoice,
  RateLimited,
  BackendUnavailable,
  MalformedAudioResponse,
  // audio
  SampleRateMismatch,
  UnsupportedWavLayout,
  IoFailure,
  // corpus
  EmptyManifest,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Parse failures carry the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(Errc code, std::size_t line, const std::string& message)
      : Error(code, "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace diarkit
