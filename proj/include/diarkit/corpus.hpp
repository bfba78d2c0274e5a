#pragma once

// Corpus generation and experiment protocol emission.
//
// Layout under output_root:
//
//   wav/<id>.wav          rendered conversation (PCM16 mono)
//   rttm/<id>.rttm        ground truth
//   scripts/<id>.json     conversation plan, for audit
//   manifest.json         per-conversation records and totals
//   lists/<name>.<subset>.{lst,rttm,uem,chunks.csv}
//   registry/database.yml protocol registry

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diarkit/audio.hpp"
#include "diarkit/script.hpp"
#include "diarkit/tts.hpp"

namespace diarkit {

inline constexpr double kDefaultChunkDuration = 2.0;
inline constexpr std::array<std::string_view, 3> kSubsets = {"train", "development", "test"};

enum class FailurePolicy { Fail, Skip };

using PartitionRatios = std::array<double, 3>;

// Throws Error(InvalidConfig) unless each ratio is >= 0 and they sum to 1
// within 1e-9.
void validate_ratios(const PartitionRatios& ratios);

struct CorpusConfig {
  std::string name = "DebateIndonesianLarge";
  std::size_t num_conversations = 10;
  ScriptConfig script = ScriptConfig::defaults();
  std::uint64_t master_seed = 0;
  PartitionRatios partition_ratios{0.8, 0.1, 0.1};
  std::filesystem::path output_root = "corpus";
  int sample_rate = kDefaultSampleRate;
  FailurePolicy on_backend_error = FailurePolicy::Fail;

  void validate() const;
};

// JSON config document; unspecified keys keep their defaults. The result is
// validated.
CorpusConfig parse_corpus_config(std::string_view text);
std::string serialize_corpus_config(const CorpusConfig& config);

struct ConversationRecord {
  std::string conversation_id;
  std::string wav_path;   // relative to output_root
  std::string rttm_path;  // relative to output_root
  double duration = 0.0;
  std::size_t num_speakers = 0;
  double overlap_seconds = 0.0;

  bool operator==(const ConversationRecord&) const = default;
};

struct CorpusManifest {
  std::string name;
  std::uint64_t master_seed = 0;
  int sample_rate = kDefaultSampleRate;
  std::vector<ConversationRecord> records;  // sorted by conversation_id
  std::vector<std::string> skipped;

  std::size_t count() const noexcept { return records.size(); }
  double total_seconds() const noexcept;
  double total_audio_hours() const noexcept { return total_seconds() / 3600.0; }
  double total_overlap_hours() const noexcept;
  const ConversationRecord* find(std::string_view id) const;

  bool operator==(const CorpusManifest&) const = default;
};

std::string serialize_manifest(const CorpusManifest& manifest);
CorpusManifest parse_manifest(std::string_view text);
CorpusManifest read_manifest(const std::filesystem::path& path);

std::string conversation_id(std::size_t index);
std::uint64_t conversation_seed(std::uint64_t master_seed, std::size_t index);

struct RenderedConversation {
  ConversationScript script;
  Annotation annotation;
  Waveform audio;
};

// Script -> per-utterance synthesis -> timeline -> mix, for conversation
// `index`. Backend output is validated and resampled to config.sample_rate.
RenderedConversation render_conversation(const CorpusConfig& config, std::size_t index,
                                         TtsBackend& backend);

struct GenerateOptions {
  unsigned jobs = 1;
  // When set, conversations are generated until the total duration reaches
  // this many hours; num_conversations is ignored.
  std::optional<double> target_hours;
  std::function<void(const ConversationRecord&)> on_record;
};

// Writes wav/, rttm/, scripts/ and manifest.json. Output bytes do not depend
// on opts.jobs. Nothing is written when no conversation is requested.
CorpusManifest generate_corpus(const CorpusConfig& config, TtsBackend& backend,
                               const GenerateOptions& opts = {});

struct ProtocolSplit {
  std::vector<std::string> train;
  std::vector<std::string> development;
  std::vector<std::string> test;

  const std::vector<std::string>& subset(std::string_view name) const;
};

// Conversation-level split after a seeded shuffle: n_train = floor(N r_train),
// n_dev = floor(N r_dev), n_test = the rest. Each subset is sorted.
// Throws Error(EmptyManifest).
ProtocolSplit partition(const CorpusManifest& manifest, const PartitionRatios& ratios,
                        std::uint64_t seed);

struct ChunkEntry {
  std::string conversation_id;
  double start = 0.0;
  double duration = 0.0;
};

// Chunks start at 0, step, 2 step, ... while start + chunk_duration <= D.
// An empty subset means every conversation in the manifest.
std::vector<ChunkEntry> enumerate_chunks(const CorpusManifest& manifest,
                                         std::span<const std::string> subset,
                                         double chunk_duration = kDefaultChunkDuration,
                                         std::optional<double> step = std::nullopt);

// CSV with header "conversation_id,chunk_start,chunk_duration".
std::string write_chunk_manifest(std::span<const ChunkEntry> chunks);

struct SubsetFiles {
  std::filesystem::path uri;
  std::filesystem::path annotation;
  std::filesystem::path annotated;
  std::filesystem::path chunks;
};

struct ProtocolFiles {
  std::filesystem::path registry;
  std::map<std::string, SubsetFiles> subsets;
};

// Writes the per-subset lists, RTTM, UEM and chunk manifests plus the
// registry document.
ProtocolFiles emit_protocol(const ProtocolSplit& split, const CorpusManifest& manifest,
                            const std::string& name, const std::filesystem::path& output_root,
                            double chunk_duration = kDefaultChunkDuration);

struct Registry {
  int version = 0;
  std::string database;
  std::string protocol;
  std::filesystem::path wav_template;  // contains "{uri}"
  double chunk_duration = kDefaultChunkDuration;
  std::map<std::string, SubsetFiles> subsets;  // absolute paths
};

Registry load_registry(const std::filesystem::path& path);

}  // namespace diarkit
