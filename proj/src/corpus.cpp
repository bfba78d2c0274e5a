#include "diarkit/corpus.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <json.hpp>
#include <thread>

#include "diarkit/error.hpp"
#include "diarkit/random.hpp"
#include "diarkit/rttm.hpp"
#include "diarkit/serialization.hpp"

namespace diarkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kPartitionStream = 0x7061727469ULL;
constexpr int kMaxConsecutiveSkips = 100;

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

}  // namespace

void validate_ratios(const PartitionRatios& ratios) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw Error(Errc::InvalidConfig, "partition ratios must be non-negative");
    }
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(Errc::InvalidConfig, "partition ratios must sum to 1");
  }
}

void CorpusConfig::validate() const {
  if (!is_identifier(name)) {
    throw Error(Errc::InvalidConfig, "corpus name '" + name + "' is not an identifier");
  }
  validate_ratios(partition_ratios);
  if (sample_rate <= 0) {
    throw Error(Errc::InvalidConfig, "sample rate must be positive");
  }
  script.validate();
}

// ---------------------------------------------------------------------------
// Config and manifest documents

CorpusConfig parse_corpus_config(std::string_view text) {
  CorpusConfig c;
  try {
    const json j = json::parse(text);
    c.name = j.value("name", c.name);
    c.num_conversations = j.value("num_conversations", c.num_conversations);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.sample_rate = j.value("sample_rate", c.sample_rate);
    if (j.contains("partition_ratios")) j.at("partition_ratios").get_to(c.partition_ratios);
    if (j.contains("output_root")) c.output_root = j.at("output_root").get<std::string>();
    if (j.contains("on_backend_error")) {
      const auto policy = j.at("on_backend_error").get<std::string>();
      if (policy == "fail") {
        c.on_backend_error = FailurePolicy::Fail;
      } else if (policy == "skip") {
        c.on_backend_error = FailurePolicy::Skip;
      } else {
        throw Error(Errc::InvalidConfig, "on_backend_error must be 'fail' or 'skip'");
      }
    }
    if (j.contains("script")) j.at("script").get_to(c.script);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("corpus config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string serialize_corpus_config(const CorpusConfig& c) {
  const json j = {{"name", c.name},
                  {"num_conversations", c.num_conversations},
                  {"master_seed", c.master_seed},
                  {"sample_rate", c.sample_rate},
                  {"partition_ratios", c.partition_ratios},
                  {"output_root", c.output_root.generic_string()},
                  {"on_backend_error", c.on_backend_error == FailurePolicy::Fail ? "fail" : "skip"},
                  {"script", c.script}};
  return j.dump(2) + "\n";
}

double CorpusManifest::total_seconds() const noexcept {
  double total = 0.0;
  for (const auto& r : records) total += r.duration;
  return total;
}

double CorpusManifest::total_overlap_hours() const noexcept {
  double total = 0.0;
  for (const auto& r : records) total += r.overlap_seconds;
  return total / 3600.0;
}

const ConversationRecord* CorpusManifest::find(std::string_view id) const {
  auto it = std::lower_bound(records.begin(), records.end(), id,
                             [](const ConversationRecord& r, std::string_view k) {
                               return r.conversation_id < k;
                             });
  return it != records.end() && it->conversation_id == id ? &*it : nullptr;
}

std::string serialize_manifest(const CorpusManifest& m) {
  json records = json::array();
  for (const auto& r : m.records) {
    records.push_back({{"conversation_id", r.conversation_id},
                       {"wav", r.wav_path},
                       {"rttm", r.rttm_path},
                       {"duration", r.duration},
                       {"num_speakers", r.num_speakers},
                       {"overlap_seconds", r.overlap_seconds}});
  }
  const json j = {{"format", "diarkit-manifest/1"},
                  {"name", m.name},
                  {"master_seed", m.master_seed},
                  {"sample_rate", m.sample_rate},
                  {"records", std::move(records)},
                  {"skipped", m.skipped},
                  {"totals",
                   {{"count", m.count()},
                    {"total_audio_hours", m.total_audio_hours()},
                    {"total_overlap_hours", m.total_overlap_hours()}}}};
  return j.dump(2) + "\n";
}

CorpusManifest parse_manifest(std::string_view text) {
  CorpusManifest m;
  try {
    const json j = json::parse(text);
    j.at("name").get_to(m.name);
    j.at("master_seed").get_to(m.master_seed);
    j.at("sample_rate").get_to(m.sample_rate);
    for (const auto& r : j.at("records")) {
      ConversationRecord rec;
      r.at("conversation_id").get_to(rec.conversation_id);
      r.at("wav").get_to(rec.wav_path);
      r.at("rttm").get_to(rec.rttm_path);
      r.at("duration").get_to(rec.duration);
      r.at("num_speakers").get_to(rec.num_speakers);
      r.at("overlap_seconds").get_to(rec.overlap_seconds);
      m.records.push_back(std::move(rec));
    }
    if (j.contains("skipped")) j.at("skipped").get_to(m.skipped);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("manifest: ") + e.what());
  }
  std::sort(m.records.begin(), m.records.end(),
            [](const auto& a, const auto& b) { return a.conversation_id < b.conversation_id; });
  for (std::size_t i = 1; i < m.records.size(); ++i) {
    if (m.records[i].conversation_id == m.records[i - 1].conversation_id) {
      throw Error(Errc::DuplicateUri, "manifest lists '" + m.records[i].conversation_id + "' twice");
    }
  }
  return m;
}

CorpusManifest read_manifest(const fs::path& path) { return parse_manifest(read_text_file(path)); }

// ---------------------------------------------------------------------------
// Generation

std::string conversation_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "conv_%05zu", index);
  return buf;
}

std::uint64_t conversation_seed(std::uint64_t master_seed, std::size_t index) {
  return derive_seed(master_seed, index, 0xc0117e5a7ULL);
}

RenderedConversation render_conversation(const CorpusConfig& config, std::size_t index,
                                         TtsBackend& backend) {
  ScriptConfig sc = config.script;
  sc.seed = conversation_seed(config.master_seed, index);
  RenderedConversation out;
  out.script = generate_script(sc, conversation_id(index));

  std::vector<Waveform> waves;
  std::vector<double> durations;
  waves.reserve(out.script.utterances.size());
  for (const auto& u : out.script.utterances) {
    TtsRequest req{u.text, out.script.voice_for(u.speaker), config.sample_rate};
    Waveform w = backend.synthesize(req);
    validate_waveform(w);
    if (w.sample_rate != config.sample_rate) w = resample_linear(w, config.sample_rate);
    if (w.samples.empty()) {
      throw Error(Errc::MalformedAudioResponse, "backend returned no samples");
    }
    durations.push_back(w.duration());
    waves.push_back(std::move(w));
  }

  const auto spans = utterance_spans(out.script, durations);
  out.annotation = resolve_timeline(out.script, durations);

  std::vector<PlacedWaveform> placed;
  placed.reserve(waves.size());
  for (std::size_t i = 0; i < waves.size(); ++i) {
    placed.push_back({std::move(waves[i]), spans[i].start()});
  }
  out.audio = mix(placed, config.sample_rate);
  return out;
}

namespace {

struct Slot {
  std::optional<RenderedConversation> result;
  std::exception_ptr error;
};

void render_batch(const CorpusConfig& config, TtsBackend& backend, std::size_t first,
                  std::vector<Slot>& slots, unsigned jobs) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < slots.size(); k = next++) {
      try {
        slots[k].result = render_conversation(config, first + k, backend);
      } catch (...) {
        slots[k].error = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::min<unsigned>(jobs, static_cast<unsigned>(slots.size()));
  if (n_threads <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> threads;
  for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
}

}  // namespace

CorpusManifest generate_corpus(const CorpusConfig& config, TtsBackend& backend,
                               const GenerateOptions& opts) {
  config.validate();
  if (opts.target_hours && !(*opts.target_hours >= 0.0)) {
    throw Error(Errc::InvalidConfig, "target hours must be non-negative");
  }
  CorpusManifest manifest;
  manifest.name = config.name;
  manifest.master_seed = config.master_seed;
  manifest.sample_rate = config.sample_rate;

  const double target_seconds = opts.target_hours.value_or(0.0) * 3600.0;
  const bool by_hours = opts.target_hours.has_value();
  if (!by_hours && config.num_conversations == 0) return manifest;
  if (by_hours && target_seconds <= 0.0) return manifest;

  const unsigned jobs = std::max(1u, opts.jobs);
  const std::size_t batch = std::max<std::size_t>(jobs, 4);
  double total = 0.0;
  int consecutive_skips = 0;
  bool done = false;

  for (std::size_t first = 0; !done; first += batch) {
    std::size_t count = batch;
    if (!by_hours) count = std::min(batch, config.num_conversations - first);
    std::vector<Slot> slots(count);
    render_batch(config, backend, first, slots, jobs);

    // Commit in index order; anything rendered past the stopping point is
    // discarded.
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const std::size_t index = first + k;
      auto& slot = slots[k];
      if (slot.error) {
        if (config.on_backend_error == FailurePolicy::Fail) std::rethrow_exception(slot.error);
        manifest.skipped.push_back(conversation_id(index));
        if (++consecutive_skips >= kMaxConsecutiveSkips) {
          std::rethrow_exception(slot.error);
        }
        continue;
      }
      consecutive_skips = 0;
      const auto& conv = *slot.result;
      const std::string id = conv.script.conversation_id;
      ConversationRecord rec;
      rec.conversation_id = id;
      rec.wav_path = "wav/" + id + ".wav";
      rec.rttm_path = "rttm/" + id + ".rttm";
      rec.duration = conv.audio.duration();
      rec.num_speakers = conv.annotation.speakers().size();
      rec.overlap_seconds = overlap_regions(conv.annotation).duration();

      write_wav(conv.audio, config.output_root / rec.wav_path);
      write_text_file(config.output_root / rec.rttm_path, write_rttm(conv.annotation));
      write_text_file(config.output_root / "scripts" / (id + ".json"), serialize_script(conv.script));

      total += rec.duration;
      if (opts.on_record) opts.on_record(rec);
      manifest.records.push_back(std::move(rec));
      if (by_hours && total >= target_seconds) {
        done = true;
        break;
      }
    }
    if (!by_hours && first + count >= config.num_conversations) done = true;
  }

  write_text_file(config.output_root / "manifest.json", serialize_manifest(manifest));
  return manifest;
}

// ---------------------------------------------------------------------------
// Protocol

const std::vector<std::string>& ProtocolSplit::subset(std::string_view name) const {
  if (name == "train") return train;
  if (name == "development" || name == "dev") return development;
  if (name == "test") return test;
  throw Error(Errc::InvalidArgument, "unknown subset '" + std::string(name) + "'");
}

ProtocolSplit partition(const CorpusManifest& manifest, const PartitionRatios& ratios,
                        std::uint64_t seed) {
  validate_ratios(ratios);
  if (manifest.records.empty()) {
    throw Error(Errc::EmptyManifest, "nothing to partition");
  }
  std::vector<std::string> ids;
  for (const auto& r : manifest.records) ids.push_back(r.conversation_id);
  std::sort(ids.begin(), ids.end());

  const std::size_t n = ids.size();
  // floor(n * r) with a 1e-9 tolerance.
  auto floor_count = [n](double r) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * r + 1e-9));
  };
  const std::size_t n_train = std::min(n, floor_count(ratios[0]));
  const std::size_t n_dev = std::min(n - n_train, floor_count(ratios[1]));

  const auto perm = keyed_permutation(n, seed, kPartitionStream);
  ProtocolSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& id = ids[perm[i]];
    if (i < n_train) {
      split.train.push_back(id);
    } else if (i < n_train + n_dev) {
      split.development.push_back(id);
    } else {
      split.test.push_back(id);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.development.begin(), split.development.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<ChunkEntry> enumerate_chunks(const CorpusManifest& manifest,
                                         std::span<const std::string> subset,
                                         double chunk_duration, std::optional<double> step) {
  const double hop = step.value_or(chunk_duration);
  if (!(chunk_duration > 0.0) || !(hop > 0.0)) {
    throw Error(Errc::InvalidArgument, "chunk duration and step must be positive");
  }
  std::vector<std::string> ids(subset.begin(), subset.end());
  if (ids.empty()) {
    for (const auto& r : manifest.records) ids.push_back(r.conversation_id);
  }
  std::sort(ids.begin(), ids.end());

  std::vector<ChunkEntry> out;
  for (const auto& id : ids) {
    const auto* rec = manifest.find(id);
    if (!rec) {
      throw Error(Errc::InvalidArgument, "conversation '" + id + "' is not in the manifest");
    }
    for (std::size_t k = 0;; ++k) {
      const double start = static_cast<double>(k) * hop;
      if (start + chunk_duration > rec->duration + kTimeEpsilon) break;
      out.push_back({id, start, chunk_duration});
    }
  }
  return out;
}

std::string write_chunk_manifest(std::span<const ChunkEntry> chunks) {
  std::string out = "conversation_id,chunk_start,chunk_duration\n";
  for (const auto& c : chunks) {
    out += c.conversation_id;
    out += ',';
    out += format_seconds(c.start);
    out += ',';
    out += format_seconds(c.duration);
    out += '\n';
  }
  return out;
}

ProtocolFiles emit_protocol(const ProtocolSplit& split, const CorpusManifest& manifest,
                            const std::string& name, const fs::path& output_root,
                            double chunk_duration) {
  if (!is_identifier(name)) {
    throw Error(Errc::InvalidConfig, "protocol name '" + name + "' is not an identifier");
  }
  std::vector<std::string> all;
  for (auto subset : kSubsets) {
    const auto& ids = split.subset(subset);
    all.insert(all.end(), ids.begin(), ids.end());
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw Error(Errc::InvalidArgument, "protocol subsets overlap");
  }

  ProtocolFiles files;
  files.registry = output_root / "registry" / "database.yml";

  std::string yaml;
  yaml += "# diarkit protocol registry; paths are relative to this file\n";
  yaml += "version: 1\n";
  yaml += "Databases:\n";
  yaml += "  " + name + ": ../wav/{uri}.wav\n";
  yaml += "Protocols:\n";
  yaml += "  " + name + ":\n";
  yaml += "    SpeakerDiarization:\n";
  yaml += "      " + name + ":\n";

  for (auto subset_view : kSubsets) {
    const std::string subset(subset_view);
    const auto& ids = split.subset(subset);
    const std::string stem = name + "." + subset;
    SubsetFiles sf{output_root / "lists" / (stem + ".lst"), output_root / "lists" / (stem + ".rttm"),
                   output_root / "lists" / (stem + ".uem"),
                   output_root / "lists" / (stem + ".chunks.csv")};

    std::map<std::string, Annotation> annotations;
    std::string uem;
    for (const auto& id : ids) {
      const auto* rec = manifest.find(id);
      if (!rec) {
        throw Error(Errc::InvalidArgument, "conversation '" + id + "' is not in the manifest");
      }
      auto doc = read_rttm(output_root / rec->rttm_path);
      auto it = doc.files.find(id);
      annotations.emplace(id, it != doc.files.end() ? std::move(it->second) : Annotation(id));
      uem += id + " 1 0.000 " + format_seconds(rec->duration) + "\n";
    }
    write_text_file(sf.uri, write_uri_list(ids));
    write_text_file(sf.annotation, write_rttm(annotations));
    write_text_file(sf.annotated, uem);
    write_text_file(sf.chunks, write_chunk_manifest(enumerate_chunks(manifest, ids, chunk_duration)));

    yaml += "        " + subset + ":\n";
    yaml += "          uri: ../lists/" + stem + ".lst\n";
    yaml += "          annotation: ../lists/" + stem + ".rttm\n";
    yaml += "          annotated: ../lists/" + stem + ".uem\n";
    files.subsets.emplace(subset, std::move(sf));
  }
  yaml += "Chunks:\n";
  yaml += "  duration: " + format_seconds(chunk_duration) + "\n";
  for (auto subset : kSubsets) {
    yaml += "  " + std::string(subset) + ": ../lists/" + name + "." + std::string(subset) +
            ".chunks.csv\n";
  }
  write_text_file(files.registry, yaml);
  return files;
}

Registry load_registry(const fs::path& path) {
  Registry reg;
  const fs::path base = fs::absolute(path).parent_path();
  auto resolve = [&](const std::string& rel) { return (base / rel).lexically_normal(); };
  try {
    const YAML::Node root = YAML::LoadFile(path.string());
    reg.version = root["version"].as<int>();
    const auto dbs = root["Databases"];
    if (!dbs || !dbs.IsMap() || dbs.size() != 1) {
      throw Error(Errc::InvalidConfig, "registry must declare exactly one database");
    }
    reg.database = dbs.begin()->first.as<std::string>();
    reg.wav_template = resolve(dbs.begin()->second.as<std::string>());

    const auto tasks = root["Protocols"][reg.database]["SpeakerDiarization"];
    if (!tasks || !tasks.IsMap() || tasks.size() != 1) {
      throw Error(Errc::InvalidConfig, "registry must declare exactly one protocol");
    }
    reg.protocol = tasks.begin()->first.as<std::string>();
    const auto subsets = tasks.begin()->second;
    const auto chunks = root["Chunks"];
    if (chunks && chunks["duration"]) reg.chunk_duration = chunks["duration"].as<double>();
    for (auto subset : kSubsets) {
      const auto node = subsets[std::string(subset)];
      if (!node) continue;
      SubsetFiles sf;
      sf.uri = resolve(node["uri"].as<std::string>());
      sf.annotation = resolve(node["annotation"].as<std::string>());
      sf.annotated = resolve(node["annotated"].as<std::string>());
      if (chunks && chunks[std::string(subset)]) {
        sf.chunks = resolve(chunks[std::string(subset)].as<std::string>());
      }
      reg.subsets.emplace(std::string(subset), std::move(sf));
    }
  } catch (const YAML::Exception& e) {
    throw Error(Errc::InvalidConfig, "registry " + path.string() + ": " + e.what());
  }
  return reg;
}

}  // namespace diarkit
