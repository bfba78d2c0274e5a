import json

import pytest

import diarkit


def test_der_example():
    r = diarkit.compute_der([(0, 10, "A")], [(0, 8, "X"), (8, 10, "Y")])
    assert r.confusion == pytest.approx(2.0)
    assert r.total == pytest.approx(10.0)
    assert diarkit.format_percent(r.der) == "20.00"


def test_der_collar_and_mapping():
    ref = [(0, 5, "A"), (5, 10, "B")]
    assert diarkit.optimal_mapping(ref, [(0, 10, "X")]) == {"A": "X"}
    r = diarkit.compute_der(ref, [(0.1, 5, "X"), (5, 10, "Y")], collar=0.25)
    assert r.der == 0.0


def test_errors_carry_codes():
    with pytest.raises(diarkit.DiarkitError) as info:
        diarkit.compute_der([], [(0, 1, "x")])
    assert info.value.code == "EmptyReference"
    with pytest.raises(ValueError):
        diarkit.f1_from_pr(0.0, 0.0)


def test_rttm_round_trip():
    text = "SPEAKER fileA 1 0.000 2.500 <NA> <NA> spk0 <NA> <NA>\n"
    files = diarkit.parse_rttm(text)
    assert files == {"fileA": [(0.0, 2.5, "spk0")]}
    assert diarkit.write_rttm(files) == text


def test_detection():
    ref = [(0, 10, "A"), (3, 5, "B")]
    hyp = [(0, 10, "A"), (4, 6, "B")]
    r = diarkit.score_detection(ref, hyp)
    assert (r.tp_frames, r.fp_frames, r.fn_frames) == (100, 100, 100)
    assert r.f1 == pytest.approx(0.5)
    assert diarkit.overlap_regions(ref) == [(3.0, 5.0)]


def test_render_and_aggregate():
    out = diarkit.render_comparison(
        [{"name": "AMI Baseline", "precision": 0.6818, "recall": 0.8723, "der": 0.5347}], "csv"
    )
    assert out.splitlines()[3] == "F1-Score,76.54"
    pooled = diarkit.aggregate_der(
        [diarkit.DerReport.from_components(0, 5, 0, 10), diarkit.DerReport.from_components(0, 9, 0, 90)]
    )
    assert diarkit.format_percent(pooled.der) == "14.00"


def test_script_is_deterministic():
    a = diarkit.generate_script(seed=42, num_utterances=10)
    assert a == diarkit.generate_script(seed=42, num_utterances=10)
    doc = json.loads(a)
    assert len(doc["utterances"]) == 10


def test_corpus_partition_chunks(tmp_path):
    cfg = json.dumps({"name": "Py", "num_conversations": 4, "master_seed": 3, "script": {"num_utterances": 4}})
    manifest = diarkit.generate_corpus(cfg, str(tmp_path), jobs=2)
    m = json.loads(manifest)
    assert len(m["records"]) == 4
    assert (tmp_path / "manifest.json").read_text() == manifest
    split = diarkit.partition(manifest, (0.5, 0.25, 0.25), seed=1)
    assert sorted(sum(split.values(), [])) == [r["conversation_id"] for r in m["records"]]
    assert len(diarkit.enumerate_chunks([("c", 10.0)])) == 5
    assert [c[1] for c in diarkit.enumerate_chunks([("c", 5.0)], 2.0, 1.0)] == [0.0, 1.0, 2.0, 3.0]
