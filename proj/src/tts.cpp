#include "diarkit/tts.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <thread>

#include "diarkit/error.hpp"
#include "diarkit/random.hpp"

namespace diarkit {

void validate_request(const TtsRequest& request) {
  if (request.text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(Errc::EmptyText, "nothing to synthesize");
  }
  if (request.target_sample_rate <= 0) {
    throw Error(Errc::InvalidArgument, "target sample rate must be positive");
  }
  if (request.voice.voice_name.empty()) {
    throw Error(Errc::UnknownVoice, "empty voice name");
  }
}

// ---------------------------------------------------------------------------
// Stub

namespace {

std::size_t count_code_points(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

constexpr double kStubPeak = 0.3;

}  // namespace

double stub_duration(std::string_view text) {
  const auto ms = std::max<std::size_t>(200, 60 * count_code_points(text));
  return static_cast<double>(ms) / 1000.0;
}

double stub_fundamental(std::string_view speaker) {
  const auto k = static_cast<double>(stable_hash(speaker) % 8);
  return 110.0 * (1.0 + k / 8.0);
}

Waveform stub_waveform(std::string_view text, const VoiceSpec& voice, int sample_rate) {
  if (sample_rate <= 0) {
    throw Error(Errc::InvalidArgument, "sample rate must be positive");
  }
  const auto ms = std::max<std::size_t>(200, 60 * count_code_points(text));
  const auto n = static_cast<std::size_t>(
      (static_cast<std::uint64_t>(ms) * static_cast<std::uint64_t>(sample_rate) + 500) / 1000);
  const double f0 = stub_fundamental(voice.speaker);
  const double rate = sample_rate;
  const auto fade = std::max<std::size_t>(1, static_cast<std::size_t>(sample_rate / 100));
  constexpr double kHarmonicGain[3] = {1.0, 0.5, 0.25};

  std::vector<double> raw(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = 0.0;
    for (int h = 0; h < 3; ++h) {
      const double cycles = std::fmod((h + 1) * f0 * static_cast<double>(i), rate) / rate;
      x += kHarmonicGain[h] * std::sin(2.0 * std::numbers::pi * cycles);
    }
    const std::size_t edge = std::min(i, n - 1 - i);
    if (edge < fade) {
      x *= 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(edge) / static_cast<double>(fade)));
    }
    raw[i] = x;
    peak = std::max(peak, std::abs(x));
  }

  Waveform out;
  out.sample_rate = sample_rate;
  out.samples.resize(n);
  const double scale = peak > 0.0 ? kStubPeak / peak : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = static_cast<float>(raw[i] * scale);
  }
  return out;
}

Waveform StubBackend::synthesize(const TtsRequest& request) {
  validate_request(request);
  return stub_waveform(request.text, request.voice, request.target_sample_rate);
}

// ---------------------------------------------------------------------------
// HTTP client

std::chrono::milliseconds RetryPolicy::backoff_for(int attempt) const {
  double ms = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, attempt);
  ms = std::min(ms, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

HttpBackendConfig HttpBackendConfig::from_environment(std::string endpoint) {
  HttpBackendConfig c;
  c.endpoint = std::move(endpoint);
  if (const char* token = std::getenv("DIARKIT_TTS_TOKEN")) {
    c.auth_token = token;
  }
  return c;
}

namespace {

struct EndpointParts {
  std::string host;  // scheme://host[:port]
  std::string path;
};

EndpointParts split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw Error(Errc::InvalidArgument, "endpoint needs a scheme: '" + endpoint + "'");
  }
  const auto slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

std::optional<int> content_type_rate(const std::string& content_type) {
  const auto at = content_type.find("rate=");
  if (at == std::string::npos) return std::nullopt;
  try {
    return std::stoi(content_type.substr(at + 5));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

Waveform decode_response(const httplib::Result& res, int requested_rate) {
  std::string type = res->get_header_value("Content-Type");
  std::transform(type.begin(), type.end(), type.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const auto* data = reinterpret_cast<const std::uint8_t*>(res->body.data());
  std::span<const std::uint8_t> bytes(data, res->body.size());
  Waveform w;
  try {
    if (type.starts_with("audio/wav") || type.starts_with("audio/x-wav") ||
        type.starts_with("audio/wave")) {
      w = decode_wav(bytes);
    } else if (type.starts_with("audio/l16") || type.starts_with("application/octet-stream")) {
      if (bytes.size() % 2 != 0) {
        throw Error(Errc::MalformedAudioResponse, "odd byte count in raw PCM16 body");
      }
      w.sample_rate = content_type_rate(type).value_or(requested_rate);
      w.samples.resize(bytes.size() / 2);
      for (std::size_t i = 0; i < w.samples.size(); ++i) {
        const auto q = static_cast<std::int16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
        w.samples[i] = std::max(-1.0f, static_cast<float>(q / 32767.0));
      }
    } else {
      throw Error(Errc::MalformedAudioResponse, "unexpected content type '" + type + "'");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::MalformedAudioResponse) throw;
    throw Error(Errc::MalformedAudioResponse, e.what());
  }
  if (w.samples.empty()) {
    throw Error(Errc::MalformedAudioResponse, "empty audio body");
  }
  if (w.sample_rate <= 0) {
    throw Error(Errc::MalformedAudioResponse, "invalid sample rate");
  }
  if (w.sample_rate != requested_rate) {
    w = resample_linear(w, requested_rate);
  }
  try {
    validate_waveform(w);
  } catch (const Error& e) {
    throw Error(Errc::MalformedAudioResponse, e.what());
  }
  return w;
}

Waveform perform_request(const HttpBackendConfig& config, const EndpointParts& parts,
                         const TtsRequest& request) {
  validate_request(request);
  const nlohmann::json body = {{"text", request.text},
                               {"voice_name", request.voice.voice_name},
                               {"rate", request.voice.rate},
                               {"pitch", request.voice.pitch},
                               {"sample_rate", request.target_sample_rate}};
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config.auth_token.empty()) {
    headers.emplace("Authorization", "Bearer " + config.auth_token);
  }

  std::string last_error = "no attempt made";
  bool rate_limited = false;
  for (int attempt = 0; attempt <= config.retry.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(config.retry.backoff_for(attempt - 1));
    }
    httplib::Client client(parts.host);
    client.set_connection_timeout(config.timeout);
    client.set_read_timeout(config.timeout);
    client.set_write_timeout(config.timeout);
    auto res = client.Post(parts.path, headers, payload, "application/json");
    rate_limited = false;
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    const int status = res->status;
    if (status == 200) {
      return decode_response(res, request.target_sample_rate);
    }
    if (status == 422) {
      throw Error(Errc::UnknownVoice, "service rejected voice '" + request.voice.voice_name + "'");
    }
    if (status == 429) {
      last_error = "rate limited (429)";
      rate_limited = true;
      continue;
    }
    if (status >= 500) {
      last_error = "server error " + std::to_string(status);
      continue;
    }
    throw Error(Errc::BackendUnavailable, "service answered HTTP " + std::to_string(status));
  }
  throw Error(rate_limited ? Errc::RateLimited : Errc::BackendUnavailable,
              "giving up after " + std::to_string(config.retry.max_retries + 1) +
                  " attempt(s): " + last_error);
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)), slots_(std::clamp(config_.max_in_flight, 1, 1024)) {
  const auto parts = split_endpoint(config_.endpoint);
  host_ = parts.host;
  path_ = parts.path;
}

Waveform HttpBackend::synthesize(const TtsRequest& request) {
  slots_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{slots_};
  return perform_request(config_, {host_, path_}, request);
}

Waveform http_synthesize(const HttpBackendConfig& config, const TtsRequest& request) {
  return perform_request(config, split_endpoint(config.endpoint), request);
}

std::unique_ptr<TtsBackend> make_backend(std::string_view kind, const std::string& endpoint) {
  if (kind == "stub") return std::make_unique<StubBackend>();
  if (kind == "http") {
    if (endpoint.empty()) {
      throw Error(Errc::InvalidConfig, "http backend needs an endpoint");
    }
    return std::make_unique<HttpBackend>(HttpBackendConfig::from_environment(endpoint));
  }
  throw Error(Errc::InvalidConfig, "unknown backend '" + std::string(kind) + "'");
}

}  // namespace diarkit
