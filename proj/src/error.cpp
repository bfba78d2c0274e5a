#include "diarkit/error.hpp"

namespace diarkit {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidSpan: return "InvalidSpan";
    case Errc::InvalidSpeaker: return "InvalidSpeaker";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::NegativeDuration: return "NegativeDuration";
    case Errc::NegativeOnset: return "NegativeOnset";
    case Errc::DuplicateUri: return "DuplicateUri";
    case Errc::EmptyReference: return "EmptyReference";
    case Errc::BothZero: return "BothZero";
    case Errc::NoReferenceOverlap: return "NoReferenceOverlap";
    case Errc::NoDetections: return "NoDetections";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InsufficientSpeakers: return "InsufficientSpeakers";
    case Errc::EmptyTextSource: return "EmptyTextSource";
    case Errc::DurationMismatch: return "DurationMismatch";
    case Errc::EmptyText: return "EmptyText";
    case Errc::UnknownVoice: return "UnknownVoice";
    case Errc::RateLimited: return "RateLimited";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::MalformedAudioResponse: return "MalformedAudioResponse";
    case Errc::SampleRateMismatch: return "SampleRateMismatch";
    case Errc::UnsupportedWavLayout: return "UnsupportedWavLayout";
    case Errc::IoFailure: return "IoFailure";
    case Errc::EmptyManifest: return "EmptyManifest";
  }
  return "Unknown";
}

}  // namespace diarkit
