#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <json.hpp>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "diarkit/error.hpp"
#include "diarkit/tts.hpp"

using namespace diarkit;

namespace {

std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    i += c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    ++n;
  }
  return n;
}

class MockServer {
 public:
  MockServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/synthesize"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpBackendConfig fast_config(std::string endpoint) {
  HttpBackendConfig c;
  c.endpoint = std::move(endpoint);
  c.retry.initial_backoff = std::chrono::milliseconds(1);
  c.retry.max_backoff = std::chrono::milliseconds(5);
  c.timeout = std::chrono::seconds(5);
  return c;
}

TtsRequest request(std::string text = "halo semua") {
  return {std::move(text), {"spk0", "id-ID-ArdiNeural", 0.0, 0.0}, 16000};
}

std::string wav_body(std::size_t samples, int rate) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.assign(samples, 0.1f);
  const auto bytes = encode_wav(w);
  return {bytes.begin(), bytes.end()};
}

}  // namespace

TEST_CASE("stub duration law") {
  for (std::string text : {"a", "halo", "apa kabar semuanya hari ini", "ÿé", "selamat pagi, 世界"}) {
    const double want = std::max(0.2, 0.06 * static_cast<double>(utf8_length(text)));
    CHECK(stub_duration(text) == doctest::Approx(want).epsilon(1e-12));
    auto w = stub_waveform(text, {"spk0", "v", 0, 0});
    CHECK(w.samples.size() == static_cast<std::size_t>(std::llround(want * 16000)));
  }
}

TEST_CASE("stub waveform properties") {
  StubBackend stub;
  auto a = stub.synthesize(request());
  CHECK(a == stub.synthesize(request()));
  CHECK(a.samples.front() == 0.0f);
  CHECK(a.peak() <= 0.3f + 1e-6f);
  CHECK(a.peak() > 0.29f);
  CHECK(stub_fundamental("spk0") >= 110.0);
  CHECK(stub_fundamental("spk0") < 220.0);
  CHECK(stub_fundamental("spk0") != stub_fundamental("spk1"));
  CHECK_THROWS_AS(stub.synthesize(request("")), Error);
  try {
    stub.synthesize(request("   "));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyText);
  }
  auto low = stub_waveform("halo", {"spk0", "v", 0, 0}, 8000);
  CHECK(low.sample_rate == 8000);
  CHECK(low.samples.size() == 1920);
}

TEST_CASE("retry policy backoff") {
  RetryPolicy p;
  CHECK(p.backoff_for(0).count() == 200);
  CHECK(p.backoff_for(1).count() == 400);
  CHECK(p.backoff_for(10).count() == 5000);
}

TEST_CASE("http backend decodes a 16 kHz WAV response and sends the request fields") {
  MockServer mock;
  nlohmann::json seen;
  std::string auth;
  mock.server().Post("/synthesize", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(wav_body(8000, 16000), "audio/wav");
  });
  auto cfg = fast_config(mock.endpoint());
  cfg.auth_token = "secret";
  HttpBackend backend(cfg);
  auto w = backend.synthesize(request());
  CHECK(w.sample_rate == 16000);
  CHECK(w.samples.size() == 8000);
  CHECK(seen["text"] == "halo semua");
  CHECK(seen["voice_name"] == "id-ID-ArdiNeural");
  CHECK(seen["sample_rate"] == 16000);
  CHECK(auth == "Bearer secret");
}

TEST_CASE("http backend resamples raw L16 at another rate") {
  MockServer mock;
  mock.server().Post("/synthesize", [&](const httplib::Request&, httplib::Response& res) {
    std::string body(2 * 24000, '\0');
    res.set_content(body, "audio/L16;rate=24000");
  });
  auto w = http_synthesize(fast_config(mock.endpoint()), request());
  CHECK(w.sample_rate == 16000);
  CHECK(w.samples.size() == 16000);
}

TEST_CASE("http backend retries after 429") {
  MockServer mock;
  std::atomic<int> calls{0};
  mock.server().Post("/synthesize", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 429;
      return;
    }
    res.set_content(wav_body(1600, 16000), "audio/wav");
  });
  auto w = http_synthesize(fast_config(mock.endpoint()), request());
  CHECK(calls == 2);
  CHECK(w.samples.size() == 1600);
}

TEST_CASE("http backend error mapping") {
  MockServer mock;
  std::atomic<int> calls{0};
  mock.server().Post("/synthesize", [&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    const auto voice = nlohmann::json::parse(req.body)["voice_name"].get<std::string>();
    if (voice == "nope") {
      res.status = 422;
    } else if (voice == "busy") {
      res.status = 429;
    } else if (voice == "broken") {
      res.status = 503;
    } else {
      res.set_content("not audio", "text/plain");
    }
  });
  auto cfg = fast_config(mock.endpoint());
  auto req = request();

  req.voice.voice_name = "nope";
  try {
    http_synthesize(cfg, req);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownVoice);
  }
  CHECK(calls == 1);

  calls = 0;
  req.voice.voice_name = "broken";
  try {
    http_synthesize(cfg, req);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BackendUnavailable);
  }
  CHECK(calls == cfg.retry.max_retries + 1);

  req.voice.voice_name = "busy";
  try {
    http_synthesize(cfg, req);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RateLimited);
  }

  req.voice.voice_name = "garbled";
  try {
    http_synthesize(cfg, req);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedAudioResponse);
  }
}

TEST_CASE("connection refused exhausts retries") {
  // Reserve an ephemeral port, then release it without ever listening.
  int port = 0;
  {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    port = ntohs(addr.sin_port);
    ::close(fd);
  }
  auto cfg = fast_config("http://127.0.0.1:" + std::to_string(port) + "/synthesize");
  try {
    http_synthesize(cfg, request());
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BackendUnavailable);
  }
}

TEST_CASE("make_backend") {
  CHECK(make_backend("stub", "")->name() == "stub");
  CHECK(make_backend("http", "http://localhost:1/x")->name() == "http");
  CHECK_THROWS_AS(make_backend("http", ""), Error);
  CHECK_THROWS_AS(make_backend("edge", ""), Error);
}
