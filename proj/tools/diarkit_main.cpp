// diarkit: synthetic diarization corpora and DER / overlap-detection scoring.
//
//   diarkit synth    --config corpus.json --output-root out/ [--hours 25]
//   diarkit protocol --manifest out/manifest.json --name X --ratios 0.8,0.1,0.1
//   diarkit score    --reference ref.rttm --hypothesis hyp.rttm [--format json]
//   diarkit chunks   --manifest out/manifest.json --name X --subset train
//
// Exit codes: 0 ok, 1 other failure, 2 configuration error, 3 synthesis
// backend failure, 4 hypothesis file missing from the reference, 5 reference
// without scorable speech.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "diarkit/corpus.hpp"
#include "diarkit/der.hpp"
#include "diarkit/detection.hpp"
#include "diarkit/error.hpp"
#include "diarkit/report.hpp"
#include "diarkit/rttm.hpp"
#include "diarkit/tts.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kBackendError = 3,
  kFileIdMismatch = 4,
  kEmptyReference = 5,
};

enum class LogLevel { Debug, Info, Warn, Error };
LogLevel g_level = LogLevel::Info;

template <typename... Args>
void log(LogLevel level, const char* fmt, Args... args) {
  if (level < g_level) return;
  static const char* names[] = {"debug", "info", "warn", "error"};
  std::fprintf(stderr, "[%s] ", names[static_cast<int>(level)]);
  if constexpr (sizeof...(Args) == 0) {
    std::fputs(fmt, stderr);
  } else {
    std::fprintf(stderr, fmt, args...);
  }
  std::fputc('\n', stderr);
}

// Thrown for conditions that map directly onto an exit code.
struct ExitError {
  int code;
  std::string message;
};

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ExitError{kConfigError, std::string("invalid number in ") + what + ": '" + item + "'"};
    }
  }
  if (out.size() != expected) {
    throw ExitError{kConfigError, std::string(what) + " needs " + std::to_string(expected) + " values"};
  }
  return out;
}

int exit_code_for(diarkit::Errc code) {
  using diarkit::Errc;
  switch (code) {
    case Errc::BackendUnavailable:
    case Errc::UnknownVoice:
    case Errc::RateLimited:
    case Errc::MalformedAudioResponse:
    case Errc::EmptyText:
      return kBackendError;
    case Errc::EmptyReference:
      return kEmptyReference;
    case Errc::IoFailure:
      return kFailure;
    default:
      return kConfigError;
  }
}

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string output_root;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string log_level = "info";
};

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
  std::string config_path;
  std::string name;
  std::optional<std::size_t> conversations;
  std::optional<std::size_t> speakers;
  std::optional<std::size_t> utterances;
  std::optional<double> overlap_probability;
  std::string gap_range;
  std::string overlap_range;
  std::string ratios;
  std::string backend = "stub";
  std::string endpoint;
  std::optional<double> hours;
  std::string on_error;
};

int run_synth(const GlobalOptions& g, const SynthOptions& o) {
  diarkit::CorpusConfig config;
  if (!o.config_path.empty()) {
    config = diarkit::parse_corpus_config(diarkit::read_text_file(o.config_path));
  }
  if (!o.name.empty()) config.name = o.name;
  if (o.conversations) config.num_conversations = *o.conversations;
  if (o.utterances) config.script.num_utterances = *o.utterances;
  if (o.overlap_probability) config.script.overlap_probability = *o.overlap_probability;
  if (o.speakers) {
    static const char* voices[] = {"id-ID-ArdiNeural", "id-ID-GadisNeural"};
    config.script.speakers.clear();
    for (std::size_t k = 0; k < *o.speakers; ++k) {
      // Two stock voices; further speakers reuse them at shifted pitch.
      config.script.speakers.push_back({"spk" + std::to_string(k), voices[k % 2], 0.0,
                                        static_cast<double>(k / 2) * 10.0});
    }
  }
  if (!o.gap_range.empty()) {
    const auto r = parse_list(o.gap_range, 2, "--gap-range");
    config.script.gap_range = {r[0], r[1]};
  }
  if (!o.overlap_range.empty()) {
    const auto r = parse_list(o.overlap_range, 2, "--overlap-range");
    config.script.overlap_range = {r[0], r[1]};
  }
  if (!o.ratios.empty()) {
    const auto r = parse_list(o.ratios, 3, "--ratios");
    config.partition_ratios = {r[0], r[1], r[2]};
  }
  if (g.seed) config.master_seed = *g.seed;
  if (!g.output_root.empty()) config.output_root = g.output_root;
  if (o.on_error == "skip") {
    config.on_backend_error = diarkit::FailurePolicy::Skip;
  } else if (o.on_error == "fail") {
    config.on_backend_error = diarkit::FailurePolicy::Fail;
  }
  if (o.hours && !(*o.hours >= 0.0)) {
    throw ExitError{kConfigError, "--hours must be non-negative"};
  }
  config.validate();
  auto backend = diarkit::make_backend(o.backend, o.endpoint);

  diarkit::GenerateOptions opts;
  opts.jobs = g.jobs;
  opts.target_hours = o.hours;
  opts.on_record = [](const diarkit::ConversationRecord& r) {
    log(LogLevel::Debug, "rendered %s (%.3f s)", r.conversation_id.c_str(), r.duration);
  };
  log(LogLevel::Info, "generating corpus '%s' into %s with %s backend", config.name.c_str(),
      config.output_root.string().c_str(), backend->name().c_str());
  const auto manifest = diarkit::generate_corpus(config, *backend, opts);
  log(LogLevel::Info, "%zu conversations, %.4f h audio, %.4f h overlap", manifest.count(),
      manifest.total_audio_hours(), manifest.total_overlap_hours());
  for (const auto& id : manifest.skipped) {
    log(LogLevel::Warn, "skipped %s after backend failure", id.c_str());
  }

  json summary = {{"conversations", manifest.count()},
                  {"total_audio_hours", manifest.total_audio_hours()},
                  {"skipped", manifest.skipped}};
  if (manifest.count() > 0) {
    const auto split = diarkit::partition(manifest, config.partition_ratios, config.master_seed);
    const auto files = diarkit::emit_protocol(split, manifest, config.name, config.output_root);
    summary["manifest"] = (config.output_root / "manifest.json").string();
    summary["registry"] = files.registry.string();
  }
  std::cout << summary.dump() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// protocol

struct ProtocolOptions {
  std::string manifest;
  std::string name;
  std::string ratios = "0.8,0.1,0.1";
  double chunk_duration = diarkit::kDefaultChunkDuration;
};

int run_protocol(const GlobalOptions& g, const ProtocolOptions& o) {
  const auto r = parse_list(o.ratios, 3, "--ratios");
  const diarkit::PartitionRatios ratios{r[0], r[1], r[2]};
  diarkit::validate_ratios(ratios);
  if (!(o.chunk_duration > 0.0)) throw ExitError{kConfigError, "--chunk-duration must be positive"};
  const auto manifest = diarkit::read_manifest(o.manifest);
  const std::string name = o.name.empty() ? manifest.name : o.name;
  const fs::path root = g.output_root.empty() ? fs::path(o.manifest).parent_path() : fs::path(g.output_root);
  const std::uint64_t seed = g.seed.value_or(manifest.master_seed);

  const auto split = diarkit::partition(manifest, ratios, seed);
  const auto files = diarkit::emit_protocol(split, manifest, name, root, o.chunk_duration);
  log(LogLevel::Info, "protocol %s: %zu train / %zu development / %zu test", name.c_str(),
      split.train.size(), split.development.size(), split.test.size());
  const json summary = {{"name", name},
                        {"train", split.train.size()},
                        {"development", split.development.size()},
                        {"test", split.test.size()},
                        {"registry", files.registry.string()}};
  std::cout << summary.dump() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// score

struct ScoreOptions {
  std::string reference;
  std::string hypothesis;
  double collar = 0.0;
  bool skip_overlap = false;
  double frame = diarkit::kDefaultFrameSize;
  std::string format = "table";
};

json der_json(const diarkit::DerReport& r) {
  return {{"false_alarm", r.false_alarm}, {"miss", r.miss}, {"confusion", r.confusion},
          {"total", r.total}, {"der", r.der}};
}

json detection_json(const diarkit::DetectionReport& r) {
  return {{"tp", r.tp_frames}, {"fp", r.fp_frames}, {"fn", r.fn_frames}, {"tn", r.tn_frames},
          {"frame_size", r.frame_size}, {"precision", r.precision}, {"recall", r.recall},
          {"f1", r.f1}, {"miss_rate", r.miss_rate},
          {"false_discovery_rate", r.false_discovery_rate}};
}

int run_score(const ScoreOptions& o) {
  if (o.collar < 0.0) throw ExitError{kConfigError, "--collar must be non-negative"};
  if (!(o.frame > 0.0)) throw ExitError{kConfigError, "--frame must be positive"};
  const auto format = diarkit::parse_report_format(o.format);

  const auto ref = diarkit::read_rttm(o.reference);
  const auto hyp = diarkit::read_rttm(o.hypothesis);
  if (ref.skipped_records + hyp.skipped_records > 0) {
    log(LogLevel::Warn, "skipped %zu non-SPEAKER or zero-length record(s)",
        ref.skipped_records + hyp.skipped_records);
  }
  for (const auto& [file, _] : hyp.files) {
    if (!ref.files.contains(file)) {
      throw ExitError{kFileIdMismatch, "hypothesis file '" + file + "' is not in the reference"};
    }
  }

  const diarkit::DerOptions der_opts{o.collar, o.skip_overlap};
  std::vector<diarkit::DerReport> ders;
  std::vector<diarkit::DetectionReport> dets;
  json files = json::array();
  std::string table;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %8s %9s %9s %9s %9s %8s %8s %8s\n", "uri", "DER%",
                "fa", "miss", "conf", "total", "P%", "R%", "F1%");
  table += line;

  auto table_row = [&](const std::string& uri, const diarkit::DerReport& d,
                       const diarkit::DetectionReport& t) {
    std::snprintf(line, sizeof line, "%-24s %8s %9.3f %9.3f %9.3f %9.3f %8s %8s %8s\n", uri.c_str(),
                  diarkit::format_percent(d.der).c_str(), d.false_alarm, d.miss, d.confusion,
                  d.total, diarkit::format_percent(t.precision).c_str(),
                  diarkit::format_percent(t.recall).c_str(), diarkit::format_percent(t.f1).c_str());
    table += line;
  };

  for (const auto& [file, reference] : ref.files) {
    auto it = hyp.files.find(file);
    const diarkit::Annotation empty(file);
    const auto& hypothesis = it == hyp.files.end() ? empty : it->second;
    diarkit::DerReport d;
    try {
      d = diarkit::compute_der(reference, hypothesis, der_opts);
    } catch (const diarkit::Error& e) {
      if (e.code() == diarkit::Errc::EmptyReference) {
        throw ExitError{kEmptyReference, "file '" + file + "': " + e.what()};
      }
      throw;
    }
    const auto t = diarkit::score_detection(reference, hypothesis, o.frame);
    ders.push_back(d);
    dets.push_back(t);
    files.push_back({{"uri", file}, {"der", der_json(d)}, {"detection", detection_json(t)}});
    table_row(file, d, t);
  }
  if (ders.empty()) throw ExitError{kEmptyReference, "reference contains no files"};

  const auto total_der = diarkit::aggregate(ders);
  const auto total_det = diarkit::aggregate(dets);
  table_row("TOTAL", total_der, total_det);

  switch (format) {
    case diarkit::ReportFormat::Json:
      std::cout << json{{"files", files},
                        {"total", {{"der", der_json(total_der)}, {"detection", detection_json(total_det)}}}}
                       .dump(2)
                << "\n";
      break;
    case diarkit::ReportFormat::Table:
      std::cout << table;
      break;
    case diarkit::ReportFormat::Csv: {
      std::cout << "uri,der,false_alarm,miss,confusion,total,precision,recall,f1\n";
      auto csv = [](const std::string& uri, const diarkit::DerReport& d, const diarkit::DetectionReport& t) {
        std::cout << uri << "," << diarkit::format_percent(d.der) << ","
                  << diarkit::format_seconds(d.false_alarm) << "," << diarkit::format_seconds(d.miss) << ","
                  << diarkit::format_seconds(d.confusion) << "," << diarkit::format_seconds(d.total) << ","
                  << diarkit::format_percent(t.precision) << "," << diarkit::format_percent(t.recall) << ","
                  << diarkit::format_percent(t.f1) << "\n";
      };
      std::size_t k = 0;
      for (const auto& [file, _] : ref.files) {
        csv(file, ders[k], dets[k]);
        ++k;
      }
      csv("TOTAL", total_der, total_det);
      break;
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// chunks

struct ChunkOptions {
  std::string manifest;
  std::string name;
  std::string subset;
  double duration = diarkit::kDefaultChunkDuration;
  std::optional<double> step;
  std::string output;
};

int run_chunks(const GlobalOptions& g, const ChunkOptions& o) {
  if (!(o.duration > 0.0)) throw ExitError{kConfigError, "--duration must be positive"};
  if (o.step && !(*o.step > 0.0)) throw ExitError{kConfigError, "--step must be positive"};
  const auto manifest = diarkit::read_manifest(o.manifest);
  const fs::path root = g.output_root.empty() ? fs::path(o.manifest).parent_path() : fs::path(g.output_root);
  std::vector<std::string> ids;
  std::string stem = "all";
  if (!o.subset.empty()) {
    const std::string name = o.name.empty() ? manifest.name : o.name;
    const fs::path list = root / "lists" / (name + "." + o.subset + ".lst");
    ids = diarkit::read_uri_list(diarkit::read_text_file(list));
    stem = name + "." + o.subset;
    if (ids.empty()) log(LogLevel::Warn, "subset list %s is empty", list.string().c_str());
  }
  if (!o.subset.empty() && ids.empty()) {
    // An empty subset yields an empty chunk manifest, not the whole corpus.
    const std::vector<diarkit::ChunkEntry> none;
    const fs::path out = o.output.empty() ? root / "lists" / (stem + ".chunks.csv") : fs::path(o.output);
    diarkit::write_text_file(out, diarkit::write_chunk_manifest(none));
    std::cout << json{{"chunks", 0}, {"output", out.string()}}.dump() << "\n";
    return kOk;
  }
  const auto chunks = diarkit::enumerate_chunks(manifest, ids, o.duration, o.step);
  const fs::path out = o.output.empty() ? root / "lists" / (stem + ".chunks.csv") : fs::path(o.output);
  diarkit::write_text_file(out, diarkit::write_chunk_manifest(chunks));
  std::cout << json{{"chunks", chunks.size()}, {"output", out.string()}}.dump() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diarkit: synthetic diarization corpora and DER scoring"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Master / partition seed");
  app.add_option("--output-root", g.output_root, "Corpus output directory");
  app.add_option("--jobs", g.jobs, "Maximum parallel workers")->check(CLI::PositiveNumber);
  app.add_option("--log-level", g.log_level, "debug|info|warn|error")
      ->check(CLI::IsMember({"debug", "info", "warn", "error"}));

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic conversation corpus");
  synth_cmd->add_option("--config", synth.config_path, "Corpus config (JSON)")->check(CLI::ExistingFile);
  synth_cmd->add_option("--name", synth.name, "Corpus / protocol name");
  synth_cmd->add_option("--conversations", synth.conversations, "Number of conversations");
  synth_cmd->add_option("--speakers", synth.speakers, "Speakers per conversation");
  synth_cmd->add_option("--utterances", synth.utterances, "Utterances per conversation");
  synth_cmd->add_option("--overlap-prob", synth.overlap_probability, "Probability of an overlapping turn");
  synth_cmd->add_option("--gap-range", synth.gap_range, "min,max gap seconds");
  synth_cmd->add_option("--overlap-range", synth.overlap_range, "min,max overlap seconds");
  synth_cmd->add_option("--ratios", synth.ratios, "train,dev,test ratios");
  synth_cmd->add_option("--backend", synth.backend, "stub|http")->check(CLI::IsMember({"stub", "http"}));
  synth_cmd->add_option("--endpoint", synth.endpoint, "TTS service URL (http backend)");
  synth_cmd->add_option("--hours", synth.hours, "Generate until this much audio exists");
  synth_cmd->add_option("--on-error", synth.on_error, "fail|skip")->check(CLI::IsMember({"fail", "skip"}));

  ProtocolOptions protocol;
  auto* protocol_cmd = app.add_subcommand("protocol", "Partition a corpus and emit protocol files");
  protocol_cmd->add_option("--manifest", protocol.manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  protocol_cmd->add_option("--name", protocol.name, "Protocol name (default: corpus name)");
  protocol_cmd->add_option("--ratios", protocol.ratios, "train,dev,test ratios");
  protocol_cmd->add_option("--chunk-duration", protocol.chunk_duration, "Chunk length in seconds");

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score a hypothesis RTTM against a reference");
  score_cmd->add_option("--reference", score.reference, "Reference RTTM")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--hypothesis", score.hypothesis, "Hypothesis RTTM")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--collar", score.collar, "Collar in seconds around reference boundaries");
  score_cmd->add_flag("--skip-overlap", score.skip_overlap, "Exclude reference overlap from DER");
  score_cmd->add_option("--frame", score.frame, "Frame size for overlap detection (s)");
  score_cmd->add_option("--format", score.format, "table|json|csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));

  ChunkOptions chunks;
  auto* chunks_cmd = app.add_subcommand("chunks", "Enumerate fixed-length training chunks");
  chunks_cmd->add_option("--manifest", chunks.manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  chunks_cmd->add_option("--name", chunks.name, "Protocol name (default: corpus name)");
  chunks_cmd->add_option("--subset", chunks.subset, "train|development|test")
      ->check(CLI::IsMember({"train", "development", "test"}));
  chunks_cmd->add_option("--duration", chunks.duration, "Chunk duration in seconds");
  chunks_cmd->add_option("--step", chunks.step, "Step between chunk starts (default: duration)");
  chunks_cmd->add_option("--output", chunks.output, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  if (*seed_opt) g.seed = seed_value;
  g_level = g.log_level == "debug"  ? LogLevel::Debug
            : g.log_level == "warn" ? LogLevel::Warn
            : g.log_level == "error" ? LogLevel::Error
                                     : LogLevel::Info;

  try {
    if (*synth_cmd) return run_synth(g, synth);
    if (*protocol_cmd) return run_protocol(g, protocol);
    if (*score_cmd) return run_score(score);
    if (*chunks_cmd) return run_chunks(g, chunks);
  } catch (const ExitError& e) {
    log(LogLevel::Error, "%s", e.message.c_str());
    return e.code;
  } catch (const diarkit::Error& e) {
    log(LogLevel::Error, "%s", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    log(LogLevel::Error, "%s", e.what());
    return kFailure;
  }
  return kFailure;
}
