#include "diarkit/script.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "diarkit/error.hpp"
#include "diarkit/random.hpp"
#include "diarkit/serialization.hpp"

namespace diarkit {

namespace {

enum DrawKind : std::uint64_t {
  kSpeakerDraw = 1,
  kJoinCoin = 2,
  kGapDraw = 3,
  kOverlapDraw = 4,
  kTextEpoch = 5,
};

double draw_ms(std::uint64_t seed, std::size_t index, DrawKind kind, const Range& range) {
  const double u = unit_draw(seed, index, kind);
  const double value = range.min + (range.max - range.min) * u;
  return static_cast<double>(std::llround(value * 1000.0)) / 1000.0;
}

}  // namespace

const std::vector<std::string>& default_indonesian_texts() {
  static const std::vector<std::string> texts = {
      "Saya tidak setuju dengan pendapat itu.",
      "Menurut saya, pendidikan adalah kunci kemajuan bangsa.",
      "Coba Anda jelaskan dasar argumen tersebut.",
      "Data yang Anda sampaikan tidak lengkap.",
      "Kita harus melihat masalah ini dari sudut pandang masyarakat.",
      "Pemerintah sudah berupaya keras, tetapi hasilnya belum maksimal.",
      "Bagaimana dengan dampak lingkungannya?",
      "Itu pertanyaan yang sangat bagus.",
      "Izinkan saya menyelesaikan pendapat saya terlebih dahulu.",
      "Faktanya, angka pengangguran terus menurun.",
      "Namun biaya hidup justru semakin tinggi.",
      "Saya rasa kita sepakat dalam hal ini.",
      "Kebijakan tersebut perlu dievaluasi kembali.",
      "Anggaran daerah harus digunakan secara transparan.",
      "Masyarakat desa juga berhak mendapatkan akses internet.",
      "Tolong berikan contoh yang konkret.",
      "Jangan memotong pembicaraan saya.",
      "Argumen Anda tidak konsisten dengan data.",
      "Kita perlu solusi jangka panjang, bukan janji sesaat.",
      "Transportasi umum di kota besar masih sangat terbatas.",
      "Saya menghargai pendapat Anda, tetapi saya punya pandangan berbeda.",
      "Investasi di bidang kesehatan harus menjadi prioritas.",
      "Apakah Anda punya bukti untuk klaim itu?",
      "Generasi muda harus dilibatkan dalam pengambilan keputusan.",
      "Harga bahan pokok harus tetap terjangkau.",
      "Sektor pertanian membutuhkan teknologi yang lebih modern.",
      "Korupsi adalah musuh utama pembangunan.",
      "Mari kita kembali ke pokok permasalahan.",
      "Waktu Anda sudah habis.",
      "Terima kasih atas kesempatan yang diberikan.",
      "Program ini sudah berjalan selama tiga tahun.",
      "Hasil survei menunjukkan tingkat kepuasan yang rendah.",
  };
  return texts;
}

ScriptConfig ScriptConfig::defaults() {
  ScriptConfig c;
  c.speakers = {
      {"spk0", "id-ID-ArdiNeural", 0.0, 0.0},
      {"spk1", "id-ID-GadisNeural", 0.0, 0.0},
  };
  c.text_source = default_indonesian_texts();
  return c;
}

void ScriptConfig::validate() const {
  if (speakers.size() < 2) {
    throw Error(Errc::InsufficientSpeakers,
                "need at least 2 speakers, got " + std::to_string(speakers.size()));
  }
  if (text_source.empty()) {
    throw Error(Errc::EmptyTextSource, "text source has no sentences");
  }
  for (const auto& t : text_source) {
    if (t.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw Error(Errc::EmptyTextSource, "text source contains an empty sentence");
    }
  }
  std::set<SpeakerId> seen;
  for (const auto& v : speakers) {
    if (v.voice_name.empty()) {
      throw Error(Errc::InvalidConfig, "speaker '" + v.speaker + "' has no voice");
    }
    // Validates the label.
    Segment probe(TimeSpan(0.0, 1.0), v.speaker);
    if (!seen.insert(v.speaker).second) {
      throw Error(Errc::InvalidConfig, "speaker '" + v.speaker + "' listed twice");
    }
  }
  if (num_utterances == 0) {
    throw Error(Errc::InvalidConfig, "num_utterances must be positive");
  }
  auto check_range = [](const Range& r, const char* what) {
    if (!(r.min >= 0.0) || !(r.max >= r.min) || !std::isfinite(r.max)) {
      throw Error(Errc::InvalidConfig, std::string(what) + " must satisfy 0 <= min <= max");
    }
  };
  check_range(gap_range, "gap_range");
  check_range(overlap_range, "overlap_range");
  if (!(overlap_probability >= 0.0 && overlap_probability <= 1.0)) {
    throw Error(Errc::InvalidConfig, "overlap_probability must lie in [0, 1]");
  }
}

const VoiceSpec& ConversationScript::voice_for(const SpeakerId& speaker) const {
  for (const auto& v : config.speakers) {
    if (v.speaker == speaker) return v;
  }
  throw Error(Errc::InvalidArgument, "no voice for speaker '" + speaker + "'");
}

ConversationScript generate_script(const ScriptConfig& config, std::string conversation_id) {
  config.validate();
  ConversationScript script;
  script.conversation_id = std::move(conversation_id);
  script.config = config;

  const std::uint64_t seed = config.seed;
  const std::size_t n_speakers = config.speakers.size();
  const std::size_t n_texts = config.text_source.size();

  std::vector<std::size_t> text_order;
  std::size_t text_epoch = static_cast<std::size_t>(-1);
  std::size_t prev_speaker = 0;

  for (std::size_t i = 0; i < config.num_utterances; ++i) {
    UtteranceSpec u;
    u.index = i;

    std::size_t speaker = 0;
    if (i > 0) {
      // Uniform over the speakers other than the previous one.
      speaker = static_cast<std::size_t>(bounded_draw(seed, i, kSpeakerDraw, n_speakers - 1));
      if (speaker >= prev_speaker) ++speaker;
    }
    u.speaker = config.speakers[speaker].speaker;
    prev_speaker = speaker;

    // Round-robin over the text pool, reshuffled every pass.
    const std::size_t epoch = i / n_texts;
    if (epoch != text_epoch) {
      text_order = keyed_permutation(n_texts, seed, kTextEpoch * 0x100000000ULL + epoch);
      text_epoch = epoch;
    }
    u.text = config.text_source[text_order[i % n_texts]];

    if (i == 0) {
      u.join = Gap{0.0};
    } else if (unit_draw(seed, i, kJoinCoin) < config.overlap_probability) {
      u.join = Overlap{std::max(0.001, draw_ms(seed, i, kOverlapDraw, config.overlap_range))};
    } else {
      u.join = Gap{draw_ms(seed, i, kGapDraw, config.gap_range)};
    }
    script.utterances.push_back(std::move(u));
  }
  return script;
}

std::vector<TimeSpan> utterance_spans(const ConversationScript& script,
                                      std::span<const double> durations) {
  if (durations.size() != script.utterances.size()) {
    throw Error(Errc::DurationMismatch, std::to_string(durations.size()) + " durations for " +
                                            std::to_string(script.utterances.size()) +
                                            " utterances");
  }
  std::vector<TimeSpan> spans;
  spans.reserve(durations.size());
  double prev_start = 0.0;
  double prev_end = 0.0;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    if (!(durations[i] > 0.0)) {
      throw Error(Errc::DurationMismatch, "utterance " + std::to_string(i) + " has no duration");
    }
    const auto& u = script.utterances[i];
    double start = 0.0;
    if (i > 0) {
      if (const auto* gap = std::get_if<Gap>(&u.join)) {
        start = prev_end + gap->seconds;
      } else {
        // An overlap never reaches back past the previous utterance's start.
        start = std::max(prev_end - std::get<Overlap>(u.join).seconds, prev_start);
      }
    }
    const double end = start + durations[i];
    spans.emplace_back(start, end);
    prev_start = start;
    prev_end = end;
  }
  return spans;
}

Annotation resolve_timeline(const ConversationScript& script, std::span<const double> durations) {
  const auto spans = utterance_spans(script, durations);
  std::vector<Segment> segments;
  segments.reserve(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    segments.emplace_back(spans[i], script.utterances[i].speaker);
  }
  return Annotation(script.conversation_id, std::move(segments));
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const VoiceSpec& v) {
  j = nlohmann::json{{"speaker", v.speaker}, {"voice_name", v.voice_name},
                     {"rate", v.rate}, {"pitch", v.pitch}};
}

void from_json(const nlohmann::json& j, VoiceSpec& v) {
  j.at("speaker").get_to(v.speaker);
  j.at("voice_name").get_to(v.voice_name);
  v.rate = j.value("rate", 0.0);
  v.pitch = j.value("pitch", 0.0);
}

void to_json(nlohmann::json& j, const Range& r) { j = nlohmann::json::array({r.min, r.max}); }

void from_json(const nlohmann::json& j, Range& r) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(Errc::InvalidConfig, "range must be a two-element array");
  }
  j[0].get_to(r.min);
  j[1].get_to(r.max);
}

void to_json(nlohmann::json& j, const ScriptConfig& c) {
  j = nlohmann::json{{"speakers", c.speakers},
                     {"num_utterances", c.num_utterances},
                     {"text_source", c.text_source},
                     {"gap_range", c.gap_range},
                     {"overlap_probability", c.overlap_probability},
                     {"overlap_range", c.overlap_range},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, ScriptConfig& c) {
  if (j.contains("speakers")) j.at("speakers").get_to(c.speakers);
  if (j.contains("num_utterances")) j.at("num_utterances").get_to(c.num_utterances);
  if (j.contains("text_source")) j.at("text_source").get_to(c.text_source);
  if (j.contains("gap_range")) j.at("gap_range").get_to(c.gap_range);
  if (j.contains("overlap_probability")) j.at("overlap_probability").get_to(c.overlap_probability);
  if (j.contains("overlap_range")) j.at("overlap_range").get_to(c.overlap_range);
  if (j.contains("seed")) j.at("seed").get_to(c.seed);
}

void to_json(nlohmann::json& j, const ConversationScript& s) {
  nlohmann::json utterances = nlohmann::json::array();
  for (const auto& u : s.utterances) {
    const bool overlap = std::holds_alternative<Overlap>(u.join);
    const double seconds = overlap ? std::get<Overlap>(u.join).seconds : std::get<Gap>(u.join).seconds;
    utterances.push_back({{"index", u.index},
                          {"speaker", u.speaker},
                          {"text", u.text},
                          {"join", overlap ? "overlap" : "gap"},
                          {"seconds", seconds}});
  }
  j = nlohmann::json{{"format", "diarkit-script/1"},
                     {"conversation_id", s.conversation_id},
                     {"config", s.config},
                     {"utterances", std::move(utterances)}};
}

void from_json(const nlohmann::json& j, ConversationScript& s) {
  j.at("conversation_id").get_to(s.conversation_id);
  s.config = ScriptConfig{};
  j.at("config").get_to(s.config);
  s.utterances.clear();
  for (const auto& u : j.at("utterances")) {
    UtteranceSpec spec;
    u.at("index").get_to(spec.index);
    u.at("speaker").get_to(spec.speaker);
    u.at("text").get_to(spec.text);
    const auto kind = u.at("join").get<std::string>();
    const double seconds = u.at("seconds").get<double>();
    if (kind == "overlap") {
      spec.join = Overlap{seconds};
    } else if (kind == "gap") {
      spec.join = Gap{seconds};
    } else {
      throw Error(Errc::InvalidConfig, "unknown join kind '" + kind + "'");
    }
    s.utterances.push_back(std::move(spec));
  }
}

std::string serialize_script(const ConversationScript& script) {
  return nlohmann::json(script).dump(2) + "\n";
}

ConversationScript parse_script(std::string_view text) {
  try {
    return nlohmann::json::parse(text).get<ConversationScript>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("script document: ") + e.what());
  }
}

}  // namespace diarkit
