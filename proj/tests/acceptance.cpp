// One PASS/FAIL line per acceptance criterion; exits 1 if any line fails.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "diarkit/corpus.hpp"
#include "diarkit/der.hpp"
#include "diarkit/detection.hpp"
#include "diarkit/error.hpp"
#include "diarkit/report.hpp"
#include "diarkit/rttm.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace diarkit;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome criterion_f1() {
  struct Row {
    const char* name;
    double p, r, f1;
  };
  const Row rows[] = {{"AMI Baseline", 0.6818, 0.8723, 0.7654},
                      {"Indo Adapted (2h)", 0.7418, 1.0000, 0.8517},
                      {"Indo Adapted (25h)", 0.7778, 0.9906, 0.8714}};
  bool ok = true;
  std::string detail;
  char buf[160];
  for (const auto& row : rows) {
    const double got = 100.0 * f1_from_pr(row.p, row.r);
    const double diff = std::abs(got - 100.0 * row.f1);
    const bool row_ok = diff <= 0.005 + 1e-12;
    ok = ok && row_ok;
    std::snprintf(buf, sizeof buf, "%s%s %.4f vs %.2f (|d|=%.4f pp)%s", detail.empty() ? "" : "; ", row.name,
                  got, 100.0 * row.f1, diff, row_ok ? "" : " OUT OF TOLERANCE");
    detail += buf;
  }
  return {ok, detail};
}

Outcome criterion_confusion_rates() {
  auto recall_only = [](double recall) {
    // 10000 reference-overlap frames, recall given to 4 decimals.
    const auto tp = static_cast<std::int64_t>(std::llround(recall * 10000));
    return DetectionReport::from_counts(tp, 0, 10000 - tp, 0, 0.01);
  };
  auto precision_only = [](double precision) {
    const auto tp = static_cast<std::int64_t>(std::llround(precision * 10000));
    return DetectionReport::from_counts(tp, 10000 - tp, 0, 0, 0.01);
  };
  const auto fig2 = confusion_rates(recall_only(0.8723));
  const auto fig4 = confusion_rates(recall_only(0.9906));
  const auto fdr = confusion_rates(precision_only(0.7778));
  const bool ok = format_percent(fig2.miss_rate) == "12.77" && format_percent(fig4.miss_rate) == "0.94" &&
                  format_percent(fdr.false_discovery_rate) == "22.22" &&
                  std::abs(fig2.miss_rate - (1.0 - 0.8723)) < 1e-12 &&
                  std::abs(fig4.miss_rate - (1.0 - 0.9906)) < 1e-12 &&
                  std::abs(fdr.false_discovery_rate - (1.0 - 0.7778)) < 1e-12;
  return {ok, "miss " + format_percent(fig2.miss_rate) + "%, miss " + format_percent(fig4.miss_rate) +
                  "%, false positives " + format_percent(fdr.false_discovery_rate) + "%"};
}

Outcome criterion_oracle() {
  std::mt19937_64 rng(500);
  int compared = 0;
  double worst = 0.0;
  while (compared < 500) {
    const auto ref_raw = oracle::random_segments(rng, 4, 12, 30.0, "r");
    const auto hyp_raw = oracle::random_segments(rng, 4, 12, 30.0, "h");
    if (ref_raw.empty()) continue;
    const auto ref = oracle::to_annotation("f", ref_raw);
    const auto hyp = oracle::to_annotation("f", hyp_raw);
    const auto got = compute_der(ref, hyp);
    const auto want = oracle::brute_force_der(ref_raw, hyp_raw);
    for (double d : {got.false_alarm - want.false_alarm, got.miss - want.miss,
                     got.confusion - want.confusion, got.total - want.total}) {
      worst = std::max(worst, std::abs(d));
    }
    ++compared;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d pairs, max component difference %.3g s", compared, worst);
  return {worst <= 1e-9, buf};
}

Outcome criterion_properties() {
  std::mt19937_64 rng(4);
  int checked = 0;
  std::string failure;
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9; };
  for (int trial = 0; trial < 300 && failure.empty(); ++trial) {
    const auto ref = oracle::to_annotation("f", oracle::random_segments(rng, 4, 12, 30.0, "r"));
    const auto hyp = oracle::to_annotation("f", oracle::random_segments(rng, 4, 12, 30.0, "h"));
    if (ref.empty() || hyp.empty()) continue;
    ++checked;
    const auto self = compute_der(ref, ref);
    if (self.false_alarm != 0.0 || self.miss != 0.0 || self.confusion != 0.0) failure = "identity";
    if (format_percent(compute_der(ref, Annotation("f")).der) != "100.00") failure = "empty hypothesis";
    std::map<SpeakerId, SpeakerId> perm;
    const auto labels = hyp.speakers();
    for (std::size_t i = 0; i < labels.size(); ++i) perm[labels[i]] = "q" + labels[(i + 1) % labels.size()];
    const auto a = compute_der(ref, hyp);
    const auto b = compute_der(ref, hyp.relabeled(perm));
    if (!close(a.false_alarm, b.false_alarm) || !close(a.miss, b.miss) || !close(a.confusion, b.confusion)) {
      failure = "permutation invariance";
    }
    if (!close(a.der * a.total, a.false_alarm + a.miss + a.confusion)) failure = "decomposition";
    const auto s = compute_der(hyp, ref);
    if (!close(s.miss, a.false_alarm) || !close(s.false_alarm, a.miss)) failure = "swap symmetry";
  }
  if (!failure.empty()) return {false, "violated: " + failure};
  return {true, std::to_string(checked) + " random pairs: identity, empty hypothesis, permutation, decomposition, swap"};
}

Outcome criterion_pipeline(const fs::path& work) {
  const auto root = work / "pipeline";
  fs::remove_all(root);
  CorpusConfig cfg;
  cfg.name = "Acceptance";
  cfg.num_conversations = 10;
  cfg.master_seed = 2024;
  cfg.script.overlap_probability = 0.3;
  cfg.output_root = root;
  StubBackend stub;
  const auto m = generate_corpus(cfg, stub, {4, std::nullopt, {}});
  if (m.count() < 10 || m.total_seconds() < 180.0) return {false, "corpus too small"};
  for (const auto& r : m.records) {
    const auto ann = read_rttm(root / r.rttm_path).files.at(r.conversation_id);
    const auto wav = read_wav(root / r.wav_path);
    if (compute_der(ann, ann).der != 0.0) return {false, r.conversation_id + ": self DER not 0"};
    if (score_detection(ann, ann).recall != 1.0) return {false, r.conversation_id + ": self recall not 1"};
    const double expected = ann.end_time() * wav.sample_rate;
    if (std::abs(static_cast<double>(wav.samples.size()) - expected) > 1.0) {
      return {false, r.conversation_id + ": wav length differs from annotation end"};
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu conversations, %.1f s audio, %.1f s overlap", m.count(), m.total_seconds(),
                m.total_overlap_hours() * 3600.0);
  return {true, buf};
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return out;
}

Outcome criterion_determinism(const fs::path& work) {
  const auto a = work / "jobs1", b = work / "jobs8";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string common = " synth --name Determinism --conversations 10 --backend stub";
  const std::string cli = DIARKIT_CLI;
  if (run(cli + " --seed 99 --jobs 1 --output-root " + a.string() + common) != 0 ||
      run(cli + " --seed 99 --jobs 8 --output-root " + b.string() + common) != 0) {
    return {false, "synth failed"};
  }
  const auto ta = tree(a), tb = tree(b);
  if (ta.size() != tb.size()) return {false, "different file sets"};
  std::size_t wav = 0, rttm = 0;
  for (const auto& [path, bytes] : ta) {
    const auto it = tb.find(path);
    if (it == tb.end() || it->second != bytes) return {false, "differs: " + path};
    wav += path.ends_with(".wav");
    rttm += path.ends_with(".rttm");
  }
  if (!ta.contains("manifest.json") || !ta.contains("registry/database.yml")) return {false, "missing outputs"};
  return {true, std::to_string(ta.size()) + " files identical (" + std::to_string(wav) + " wav, " +
                    std::to_string(rttm) + " rttm, manifest, lists, registry), --jobs 1 vs --jobs 8"};
}

Outcome criterion_partition() {
  CorpusManifest m;
  m.name = "Leakage";
  for (std::size_t i = 0; i < 171; ++i) m.records.push_back({conversation_id(i), "", "", 60.0, 2, 0.0});
  const auto s = partition(m, {0.8, 0.1, 0.1}, 1);
  std::set<std::string> all;
  std::size_t total = 0;
  for (auto name : kSubsets) {
    all.insert(s.subset(name).begin(), s.subset(name).end());
    total += s.subset(name).size();
  }
  const bool ok = s.train.size() == 136 && s.development.size() == 17 && s.test.size() == 18 && all.size() == 171 &&
                  total == 171;
  return {ok, std::to_string(s.train.size()) + "/" + std::to_string(s.development.size()) + "/" +
                  std::to_string(s.test.size()) + ", disjoint and covering: " + (all.size() == total ? "yes" : "no")};
}

Outcome criterion_chunks() {
  CorpusManifest m;
  m.records.push_back({"conv_00000", "", "", 10.0, 2, 0.0});
  const auto c = enumerate_chunks(m, {}, 2.0, 2.0);
  return {c.size() == 5, std::to_string(c.size()) + " chunks"};
}

Outcome criterion_table() {
  const std::vector<SystemMetrics> systems{
      {"AMI Baseline", 0.6818, 0.8723, f1_from_pr(0.6818, 0.8723), 0.5347, std::nullopt},
      {"Indo Adapted (2h)", 0.7418, 1.0, f1_from_pr(0.7418, 1.0), 0.3481, std::nullopt},
      {"Indo Adapted (25h)", 0.7778, 0.9906, f1_from_pr(0.7778, 0.9906), 0.2924, std::nullopt}};
  const std::string golden =
      "| Metric    | AMI Baseline | Indo Adapted (2h) | Indo Adapted (25h) |\n"
      "|-----------|--------------|-------------------|--------------------|\n"
      "| Precision | 68.18%       | 74.18%            | 77.78%             |\n"
      "| Recall    | 87.23%       | 100.00%           | 99.06%             |\n"
      "| F1-Score  | 76.54%       | 85.17%            | 87.14%             |\n"
      "| DER       | 53.47%       | 34.81%            | 29.24%             |\n";
  const auto got = render_comparison(systems, ReportFormat::Table);
  if (got == golden) return {true, "table matches Table 1 byte-for-byte"};
  std::istringstream g(golden), o(got);
  std::string gl, ol, diff;
  while (std::getline(g, gl) && std::getline(o, ol)) {
    if (gl != ol) diff += (diff.empty() ? "" : " / ") + std::string("expected '") + gl + "' got '" + ol + "'";
  }
  return {false, diff};
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "diarkit_acceptance";
  fs::create_directories(work);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Table-1 F1 consistency", criterion_f1},
      {"confusion-rate identities", criterion_confusion_rates},
      {"DER oracle equivalence", criterion_oracle},
      {"DER property suite", criterion_properties},
      {"end-to-end pipeline identity", [&] { return criterion_pipeline(work); }},
      {"determinism across --jobs", [&] { return criterion_determinism(work); }},
      {"protocol leakage check", criterion_partition},
      {"chunk manifest", criterion_chunks},
      {"Table 1 golden render", criterion_table},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work);
  return failed == 0 ? 0 : 1;
}
