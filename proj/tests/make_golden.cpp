// Regenerates tests/data/golden_{ref,hyp}.rttm and golden_expected.json.
// Expected components come from the brute-force oracle, evaluated on the
// annotations as read back from the written RTTM text.
//
//   diarkit_make_golden <output-dir>

#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <random>

#include "diarkit/rttm.hpp"
#include "oracle.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <output-dir>\n", argv[0]);
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::mt19937_64 rng(20240917);
  std::uniform_int_distribution<int> start_ms(0, 30000);
  std::uniform_int_distribution<int> len_ms(300, 6000);
  std::uniform_int_distribution<int> speaker(0, 3);

  std::map<std::string, diarkit::Annotation> ref, hyp;
  for (int f = 0; f < 3; ++f) {
    const std::string uri = "golden_" + std::to_string(f);
    for (auto* side : {&ref, &hyp}) {
      const std::string prefix = side == &ref ? "spk" : "sys";
      std::vector<oracle::RawSegment> segs;
      for (int k = 0; k < 12; ++k) {
        const int s = start_ms(rng);
        segs.push_back({s / 1000.0, (s + len_ms(rng)) / 1000.0, prefix + std::to_string(speaker(rng))});
      }
      side->emplace(uri, oracle::to_annotation(uri, segs));
    }
  }
  const auto ref_text = diarkit::write_rttm(ref);
  const auto hyp_text = diarkit::write_rttm(hyp);
  const auto ref_back = diarkit::parse_rttm(ref_text).files;
  const auto hyp_back = diarkit::parse_rttm(hyp_text).files;

  nlohmann::json files = nlohmann::json::object();
  oracle::Components sum;
  for (const auto& [uri, r] : ref_back) {
    const auto c = oracle::brute_force_der(oracle::raw(r), oracle::raw(hyp_back.at(uri)));
    files[uri] = {{"false_alarm", c.false_alarm}, {"miss", c.miss}, {"confusion", c.confusion}, {"total", c.total}};
    sum.false_alarm += c.false_alarm;
    sum.miss += c.miss;
    sum.confusion += c.confusion;
    sum.total += c.total;
  }
  const nlohmann::json expected = {
      {"files", files},
      {"total",
       {{"false_alarm", sum.false_alarm}, {"miss", sum.miss}, {"confusion", sum.confusion}, {"total", sum.total}}}};

  diarkit::write_text_file(dir / "golden_ref.rttm", ref_text);
  diarkit::write_text_file(dir / "golden_hyp.rttm", hyp_text);
  diarkit::write_text_file(dir / "golden_expected.json", expected.dump(2) + "\n");
  return 0;
}
