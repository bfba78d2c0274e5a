#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <algorithm>
#include <set>
#include <sstream>

#include "diarkit/corpus.hpp"
#include "diarkit/der.hpp"
#include "diarkit/detection.hpp"
#include "diarkit/error.hpp"
#include "diarkit/rttm.hpp"

using namespace diarkit;
namespace fs = std::filesystem;

namespace {

CorpusManifest fake_manifest(std::size_t n, double duration = 10.0) {
  CorpusManifest m;
  m.name = "Fake";
  for (std::size_t i = 0; i < n; ++i) {
    ConversationRecord r;
    r.conversation_id = conversation_id(i);
    r.wav_path = "wav/" + r.conversation_id + ".wav";
    r.rttm_path = "rttm/" + r.conversation_id + ".rttm";
    r.duration = duration + static_cast<double>(i) * 0.001;
    r.num_speakers = 2;
    m.records.push_back(r);
  }
  return m;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("diarkit_corpus_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

CorpusConfig small_config(const fs::path& root, std::size_t n) {
  CorpusConfig c;
  c.name = "Tiny";
  c.num_conversations = n;
  c.script.num_utterances = 6;
  c.master_seed = 17;
  c.output_root = root;
  return c;
}

}  // namespace

TEST_CASE("ids and seeds") {
  CHECK(conversation_id(0) == "conv_00000");
  CHECK(conversation_id(171) == "conv_00171");
  CHECK(conversation_seed(1, 2) == conversation_seed(1, 2));
  CHECK(conversation_seed(1, 2) != conversation_seed(1, 3));
}

TEST_CASE("ratio validation") {
  CHECK_NOTHROW(validate_ratios({0.8, 0.1, 0.1}));
  CHECK_NOTHROW(validate_ratios({1, 0, 0}));
  CHECK_THROWS_AS(validate_ratios({0.8, 0.1, 0.2}), Error);
  CHECK_THROWS_AS(validate_ratios({1.1, -0.1, 0.0}), Error);
}

TEST_CASE("partition sizes, disjointness and determinism") {
  auto m = fake_manifest(171);
  auto s = partition(m, {0.8, 0.1, 0.1}, 7);
  CHECK(s.train.size() == 136);
  CHECK(s.development.size() == 17);
  CHECK(s.test.size() == 18);
  std::set<std::string> all;
  for (auto name : kSubsets) {
    const auto& sub = s.subset(name);
    CHECK(std::is_sorted(sub.begin(), sub.end()));
    all.insert(sub.begin(), sub.end());
  }
  CHECK(all.size() == 171);
  auto again = partition(m, {0.8, 0.1, 0.1}, 7);
  CHECK(again.test == s.test);
  CHECK(partition(m, {0.8, 0.1, 0.1}, 8).test != s.test);

  auto trainonly = partition(m, {1, 0, 0}, 7);
  CHECK(trainonly.train.size() == 171);
  CHECK(trainonly.development.empty());
  CHECK(trainonly.test.empty());
  CHECK_THROWS_AS(partition(CorpusManifest{}, {0.8, 0.1, 0.1}, 1), Error);
  CHECK(partition(fake_manifest(10), {0.7, 0.2, 0.1}, 1).train.size() == 7);
  CHECK(partition(fake_manifest(10), {0.7, 0.2, 0.1}, 1).development.size() == 2);
}

TEST_CASE("enumerate_chunks") {
  auto m = fake_manifest(1, 10.0);
  m.records[0].duration = 10.0;
  CHECK(enumerate_chunks(m, {}, 2.0, 2.0).size() == 5);
  m.records[0].duration = 1.9;
  CHECK(enumerate_chunks(m, {}).empty());
  m.records[0].duration = 5.0;
  auto c = enumerate_chunks(m, {}, 2.0, 1.0);
  REQUIRE(c.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(c[k].start == doctest::Approx(static_cast<double>(k)));
  CHECK(write_chunk_manifest(c).starts_with("conversation_id,chunk_start,chunk_duration\nconv_00000,0.000,2.000\n"));
  m = fake_manifest(3, 4.0);
  std::vector<std::string> only{"conv_00001"};
  for (const auto& e : enumerate_chunks(m, only)) CHECK(e.conversation_id == "conv_00001");
}

TEST_CASE("config and manifest documents round-trip") {
  auto c = small_config("out", 3);
  c.partition_ratios = {0.5, 0.25, 0.25};
  c.on_backend_error = FailurePolicy::Skip;
  auto back = parse_corpus_config(serialize_corpus_config(c));
  CHECK(back.name == c.name);
  CHECK(back.num_conversations == 3);
  CHECK(back.script == c.script);
  CHECK(back.partition_ratios == c.partition_ratios);
  CHECK(back.on_backend_error == FailurePolicy::Skip);
  auto partial = parse_corpus_config(R"({"name": "X", "script": {"num_utterances": 4}})");
  CHECK(partial.name == "X");
  CHECK(partial.script.num_utterances == 4);
  CHECK(partial.script.speakers.size() == 2);
  CHECK_THROWS_AS(parse_corpus_config(R"({"name": "bad name"})"), Error);
  CHECK_THROWS_AS(parse_corpus_config("[1,2"), Error);

  auto m = fake_manifest(3);
  m.skipped = {"conv_00009"};
  CHECK(parse_manifest(serialize_manifest(m)) == m);
}

TEST_CASE("generate_corpus end to end") {
  const auto root = scratch("e2e");
  StubBackend stub;
  auto cfg = small_config(root, 3);
  auto m = generate_corpus(cfg, stub);
  REQUIRE(m.count() == 3);
  CHECK(read_manifest(root / "manifest.json") == m);
  for (const auto& r : m.records) {
    const auto ann = read_rttm(root / r.rttm_path).files.at(r.conversation_id);
    const auto wav = read_wav(root / r.wav_path);
    CHECK(std::abs(static_cast<double>(wav.samples.size()) - ann.end_time() * wav.sample_rate) <= 1.0);
    CHECK(compute_der(ann, ann).der == 0.0);
    CHECK(score_detection(ann, ann).recall == 1.0);
    CHECK(r.duration == doctest::Approx(wav.duration()).epsilon(1e-9));
    CHECK(fs::exists(root / "scripts" / (r.conversation_id + ".json")));
  }

  const auto root2 = scratch("e2e_jobs");
  cfg.output_root = root2;
  auto m2 = generate_corpus(cfg, stub, {4, std::nullopt, {}});
  CHECK(m2.records == m.records);
  for (const auto& r : m.records) {
    CHECK(slurp(root / r.wav_path) == slurp(root2 / r.wav_path));
    CHECK(slurp(root / r.rttm_path) == slurp(root2 / r.rttm_path));
  }
  fs::remove_all(root);
  fs::remove_all(root2);
}

TEST_CASE("generate_corpus with zero conversations writes nothing") {
  const auto root = scratch("empty");
  StubBackend stub;
  auto m = generate_corpus(small_config(root, 0), stub);
  CHECK(m.count() == 0);
  CHECK_FALSE(fs::exists(root));
}

TEST_CASE("generate_corpus hours target") {
  const auto root = scratch("hours");
  StubBackend stub;
  auto cfg = small_config(root, 1);
  GenerateOptions opts;
  opts.target_hours = 60.0 / 3600.0;
  opts.jobs = 2;
  auto m = generate_corpus(cfg, stub, opts);
  CHECK(m.total_seconds() >= 60.0);
  double before_last = m.total_seconds() - m.records.back().duration;
  CHECK(before_last < 60.0);
  fs::remove_all(root);
}

namespace {

class FlakyBackend final : public TtsBackend {
 public:
  Waveform synthesize(const TtsRequest& r) override {
    if (r.text.find('a') != std::string::npos && r.voice.speaker == "spk1") {
      throw Error(Errc::BackendUnavailable, "down");
    }
    return stub.synthesize(r);
  }
  std::string name() const override { return "flaky"; }
  StubBackend stub;
};

class DeadBackend final : public TtsBackend {
 public:
  Waveform synthesize(const TtsRequest&) override { throw Error(Errc::BackendUnavailable, "down"); }
  std::string name() const override { return "dead"; }
};

}  // namespace

TEST_CASE("backend failure policies") {
  const auto root = scratch("fail");
  DeadBackend dead;
  auto cfg = small_config(root, 2);
  try {
    generate_corpus(cfg, dead);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BackendUnavailable);
  }
  cfg.on_backend_error = FailurePolicy::Skip;
  auto m = generate_corpus(cfg, dead);
  CHECK(m.count() == 0);
  CHECK(m.skipped == std::vector<std::string>{"conv_00000", "conv_00001"});
  fs::remove_all(root);
}

TEST_CASE("emit_protocol and registry round-trip") {
  const auto root = scratch("protocol");
  StubBackend stub;
  auto cfg = small_config(root, 10);
  auto m = generate_corpus(cfg, stub, {2, std::nullopt, {}});
  auto split = partition(m, {0.8, 0.1, 0.1}, cfg.master_seed);
  auto files = emit_protocol(split, m, "Tiny", root);
  auto reg = load_registry(files.registry);
  CHECK(reg.version == 1);
  CHECK(reg.database == "Tiny");
  CHECK(reg.protocol == "Tiny");
  CHECK(reg.chunk_duration == 2.0);
  std::map<std::string, int> seen;
  for (auto name : kSubsets) {
    const auto& sub = reg.subsets.at(std::string(name));
    for (const auto* p : {&sub.uri, &sub.annotation, &sub.annotated, &sub.chunks}) {
      CHECK(p->is_absolute());
      CHECK(fs::exists(*p));
    }
    const auto ids = read_uri_list(read_text_file(sub.uri));
    CHECK(ids == split.subset(name));
    const auto rttm = read_rttm(sub.annotation);
    std::istringstream uem(read_text_file(sub.annotated));
    std::string uri, chan, start, end;
    while (uem >> uri >> chan >> start >> end) {
      CHECK(start == "0.000");
      CHECK(end == format_seconds(m.find(uri)->duration));
      CHECK(rttm.files.contains(uri));
      ++seen[uri];
    }
    for (const auto& id : ids) {
      std::string wav = reg.wav_template.string();
      wav.replace(wav.find("{uri}"), 5, id);
      CHECK(fs::exists(wav));
    }
  }
  CHECK(seen.size() == 10);
  for (const auto& [uri, n] : seen) CHECK(n == 1);
  fs::remove_all(root);
}
