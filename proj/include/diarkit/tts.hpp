#pragma once

// Text-to-speech backends: a deterministic offline stub and an HTTP client
// for an external synthesis service.

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>

#include "diarkit/audio.hpp"
#include "diarkit/script.hpp"

namespace diarkit {

struct TtsRequest {
  std::string text;
  VoiceSpec voice;
  int target_sample_rate = kDefaultSampleRate;
};

// Throws Error(EmptyText) for blank text and Error(InvalidArgument) for a bad
// rate or voice.
void validate_request(const TtsRequest& request);

class TtsBackend {
 public:
  virtual ~TtsBackend() = default;

  // Mono waveform at request.target_sample_rate with positive duration. Must
  // be safe to call concurrently.
  virtual Waveform synthesize(const TtsRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Stub speech length: max(0.2, 0.06 * characters) seconds, where characters
// counts UTF-8 code points.
double stub_duration(std::string_view text);

// Per-speaker fundamental 110 * (1 + k / 8) Hz, k = stable_hash(speaker) % 8.
double stub_fundamental(std::string_view speaker);

// Three harmonics of the speaker's fundamental, 10 ms raised-cosine fades,
// normalised to a 0.3 peak.
Waveform stub_waveform(std::string_view text, const VoiceSpec& voice,
                       int sample_rate = kDefaultSampleRate);

class StubBackend final : public TtsBackend {
 public:
  Waveform synthesize(const TtsRequest& request) override;
  std::string name() const override { return "stub"; }
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{5000};

  std::chrono::milliseconds backoff_for(int attempt) const;
};

struct HttpBackendConfig {
  // e.g. "http://127.0.0.1:8080/synthesize"
  std::string endpoint;
  // Sent as "Authorization: Bearer <token>" when non-empty.
  std::string auth_token;
  RetryPolicy retry;
  int max_in_flight = 4;
  std::chrono::seconds timeout{30};

  // Reads the token from DIARKIT_TTS_TOKEN when auth_token is empty.
  static HttpBackendConfig from_environment(std::string endpoint);
};

// Request body: {"text", "voice_name", "rate", "pitch", "sample_rate"} as JSON.
// Response: audio/wav (PCM16 mono) or audio/L16[;rate=N] raw samples.
// 429 and 5xx responses and connection failures are retried per the policy;
// 422 means the voice is unknown and is not retried.
class HttpBackend final : public TtsBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  Waveform synthesize(const TtsRequest& request) override;
  std::string name() const override { return "http"; }

 private:
  HttpBackendConfig config_;
  std::string host_;
  std::string path_;
  std::counting_semaphore<1024> slots_;
};

// One-shot client call with the same semantics as HttpBackend::synthesize.
Waveform http_synthesize(const HttpBackendConfig& config, const TtsRequest& request);

std::unique_ptr<TtsBackend> make_backend(std::string_view kind, const std::string& endpoint);

}  // namespace diarkit
