"""Diarization error rate scoring, overlapped-speech detection metrics and
seeded synthetic conversation corpora.

Segments are ``(start, end, speaker)`` tuples in seconds.

>>> import diarkit
>>> r = diarkit.compute_der([(0, 10, "A")], [(0, 8, "X"), (8, 10, "Y")])
>>> diarkit.format_percent(r.der)
'20.00'
"""

from ._core import (
    DerReport,
    DetectionReport,
    DiarkitError,
    aggregate_der,
    compute_der,
    enumerate_chunks,
    f1_from_pr,
    format_percent,
    generate_corpus,
    generate_script,
    optimal_mapping,
    overlap_regions,
    parse_rttm,
    partition,
    render_comparison,
    score_detection,
    write_rttm,
)

__all__ = [
    "DerReport",
    "DetectionReport",
    "DiarkitError",
    "aggregate_der",
    "compute_der",
    "enumerate_chunks",
    "f1_from_pr",
    "format_percent",
    "generate_corpus",
    "generate_script",
    "optimal_mapping",
    "overlap_regions",
    "parse_rttm",
    "partition",
    "render_comparison",
    "score_detection",
    "write_rttm",
]

__version__ = "0.1.0"
