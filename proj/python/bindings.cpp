#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "diarkit/corpus.hpp"
#include "diarkit/der.hpp"
#include "diarkit/detection.hpp"
#include "diarkit/error.hpp"
#include "diarkit/report.hpp"
#include "diarkit/rttm.hpp"
#include "diarkit/script.hpp"
#include "diarkit/tts.hpp"

namespace py = pybind11;
using namespace diarkit;

namespace {

using SegmentTuple = std::tuple<double, double, std::string>;

Annotation to_annotation(const std::string& uri, const std::vector<SegmentTuple>& segments) {
  Annotation a(uri);
  for (const auto& [start, end, speaker] : segments) a.add(Segment(TimeSpan(start, end), speaker));
  return a;
}

std::vector<SegmentTuple> from_annotation(const Annotation& a) {
  std::vector<SegmentTuple> out;
  for (const auto& s : a.segments()) out.emplace_back(s.span.start(), s.span.end(), s.speaker);
  return out;
}

std::vector<std::pair<double, double>> spans(const Timeline& t) {
  std::vector<std::pair<double, double>> out;
  for (const auto& s : t.spans()) out.emplace_back(s.start(), s.end());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Diarization scoring and synthetic corpus generation";

  py::register_exception<Error>(m, "DiarkitError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::module_::import("diarkit._core").attr("DiarkitError")(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(py::type::handle_of(exc).ptr(), exc.ptr());
    }
  });

  py::class_<DerReport>(m, "DerReport")
      .def_readonly("false_alarm", &DerReport::false_alarm)
      .def_readonly("miss", &DerReport::miss)
      .def_readonly("confusion", &DerReport::confusion)
      .def_readonly("total", &DerReport::total)
      .def_readonly("der", &DerReport::der)
      .def_static("from_components", &DerReport::from_components, py::arg("false_alarm"), py::arg("miss"),
                  py::arg("confusion"), py::arg("total"))
      .def("__repr__", [](const DerReport& r) {
        return "DerReport(der=" + format_percent(r.der) + "%, fa=" + format_seconds(r.false_alarm) +
               ", miss=" + format_seconds(r.miss) + ", conf=" + format_seconds(r.confusion) +
               ", total=" + format_seconds(r.total) + ")";
      });

  py::class_<DetectionReport>(m, "DetectionReport")
      .def_readonly("tp_frames", &DetectionReport::tp_frames)
      .def_readonly("fp_frames", &DetectionReport::fp_frames)
      .def_readonly("fn_frames", &DetectionReport::fn_frames)
      .def_readonly("tn_frames", &DetectionReport::tn_frames)
      .def_readonly("frame_size", &DetectionReport::frame_size)
      .def_readonly("precision", &DetectionReport::precision)
      .def_readonly("recall", &DetectionReport::recall)
      .def_readonly("f1", &DetectionReport::f1)
      .def_readonly("miss_rate", &DetectionReport::miss_rate)
      .def_readonly("false_discovery_rate", &DetectionReport::false_discovery_rate)
      .def_static("from_counts", &DetectionReport::from_counts, py::arg("tp"), py::arg("fp"), py::arg("fn"),
                  py::arg("tn"), py::arg("frame_size") = kDefaultFrameSize);

  m.def(
      "parse_rttm",
      [](std::string_view text) {
        std::map<std::string, std::vector<SegmentTuple>> out;
        for (const auto& [uri, a] : parse_rttm(text).files) out[uri] = from_annotation(a);
        return out;
      },
      py::arg("text"), "RTTM text -> {uri: [(start, end, speaker), ...]}");
  m.def(
      "write_rttm",
      [](const std::map<std::string, std::vector<SegmentTuple>>& files) {
        std::map<std::string, Annotation> annotations;
        for (const auto& [uri, segs] : files) annotations.emplace(uri, to_annotation(uri, segs));
        return write_rttm(annotations);
      },
      py::arg("files"));

  m.def(
      "overlap_regions", [](const std::vector<SegmentTuple>& segs) { return spans(overlap_regions(to_annotation("", segs))); },
      py::arg("segments"));

  m.def(
      "compute_der",
      [](const std::vector<SegmentTuple>& ref, const std::vector<SegmentTuple>& hyp, double collar, bool skip_overlap) {
        return compute_der(to_annotation("", ref), to_annotation("", hyp), {collar, skip_overlap});
      },
      py::arg("reference"), py::arg("hypothesis"), py::arg("collar") = 0.0, py::arg("skip_overlap") = false);

  m.def(
      "optimal_mapping",
      [](const std::vector<SegmentTuple>& ref, const std::vector<SegmentTuple>& hyp) {
        std::map<std::string, std::string> out;
        const auto mapping = optimal_mapping(overlap_cost_matrix(to_annotation("", ref), to_annotation("", hyp)));
        for (const auto& [r, h] : mapping.pairs()) out[r] = h;
        return out;
      },
      py::arg("reference"), py::arg("hypothesis"));

  m.def(
      "score_detection",
      [](const std::vector<SegmentTuple>& ref, const std::vector<SegmentTuple>& hyp, double frame_size) {
        return score_detection(to_annotation("", ref), to_annotation("", hyp), frame_size);
      },
      py::arg("reference"), py::arg("hypothesis"), py::arg("frame_size") = kDefaultFrameSize);

  m.def("f1_from_pr", &f1_from_pr, py::arg("precision"), py::arg("recall"));
  m.def("format_percent", &format_percent, py::arg("ratio"));

  m.def(
      "aggregate_der", [](const std::vector<DerReport>& v) { return aggregate(v); }, py::arg("reports"));

  m.def(
      "render_comparison",
      [](const std::vector<py::dict>& systems, const std::string& format) {
        std::vector<SystemMetrics> metrics;
        for (const auto& s : systems) {
          SystemMetrics x;
          x.name = s["name"].cast<std::string>();
          x.precision = s["precision"].cast<double>();
          x.recall = s["recall"].cast<double>();
          x.f1 = s.contains("f1") ? s["f1"].cast<double>() : f1_from_pr(x.precision, x.recall);
          x.der = s["der"].cast<double>();
          metrics.push_back(std::move(x));
        }
        return render_comparison(metrics, parse_report_format(format));
      },
      py::arg("systems"), py::arg("format") = "table",
      "systems: dicts with name, precision, recall, der and optionally f1 (computed when absent)");

  m.def(
      "generate_script",
      [](std::uint64_t seed, std::size_t num_utterances, double overlap_probability, const std::string& id) {
        auto config = ScriptConfig::defaults();
        config.seed = seed;
        config.num_utterances = num_utterances;
        config.overlap_probability = overlap_probability;
        config.validate();
        return serialize_script(generate_script(config, id));
      },
      py::arg("seed") = 0, py::arg("num_utterances") = 20, py::arg("overlap_probability") = 0.3,
      py::arg("conversation_id") = "conv", "Returns the script as a JSON document");

  m.def(
      "generate_corpus",
      [](const std::string& config_json, const std::filesystem::path& output_root, unsigned jobs) {
        auto config = parse_corpus_config(config_json.empty() ? "{}" : config_json);
        config.output_root = output_root;
        StubBackend stub;
        GenerateOptions opts;
        opts.jobs = jobs;
        py::gil_scoped_release release;
        return serialize_manifest(generate_corpus(config, stub, opts));
      },
      py::arg("config_json"), py::arg("output_root"), py::arg("jobs") = 1,
      "Stub-backend corpus generation; returns the manifest JSON");

  m.def(
      "partition",
      [](const std::string& manifest_json, std::array<double, 3> ratios, std::uint64_t seed) {
        const auto split = partition(parse_manifest(manifest_json), ratios, seed);
        return std::map<std::string, std::vector<std::string>>{
            {"train", split.train}, {"development", split.development}, {"test", split.test}};
      },
      py::arg("manifest_json"), py::arg("ratios") = std::array<double, 3>{0.8, 0.1, 0.1}, py::arg("seed") = 0);

  m.def(
      "enumerate_chunks",
      [](const std::vector<std::pair<std::string, double>>& durations, double chunk, std::optional<double> step) {
        CorpusManifest manifest;
        for (const auto& [id, d] : durations) manifest.records.push_back({id, "", "", d, 0, 0.0});
        std::vector<std::tuple<std::string, double, double>> out;
        for (const auto& c : enumerate_chunks(manifest, {}, chunk, step)) {
          out.emplace_back(c.conversation_id, c.start, c.duration);
        }
        return out;
      },
      py::arg("durations"), py::arg("chunk_duration") = kDefaultChunkDuration, py::arg("step") = py::none());
}
