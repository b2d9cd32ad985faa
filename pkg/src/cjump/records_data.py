"""Embedded glide-record dataset.

The ten largest known glide records (Eric Roosendaal's published list of
3x+1 glide records), with their bit lengths and the slow-map glide,
together with stopping time, falling time and Syracuse falling time as
recomputed and frozen here.  ``cjump verify glide-records`` recomputes
every column from scratch and diffs against this table; no network access
is ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class GlideRecord:
    name: str
    n: int
    bit_length: int
    glide: int
    stopping_time: int
    falling_time: int
    syr_falling_time: int


GLIDE_RECORDS: tuple[GlideRecord, ...] = (
    GlideRecord("g25", 2081751768559, 41, 988, 606, 12, 9),
    GlideRecord("g26", 13179928405231, 44, 1122, 688, 14, 8),
    GlideRecord("g27", 31835572457967, 45, 1161, 712, 13, 8),
    GlideRecord("g28", 70665924117439, 47, 1177, 722, 13, 8),
    GlideRecord("g29", 739448869367967, 50, 1187, 728, 12, 8),
    GlideRecord("g30", 1008932249296231, 50, 1445, 886, 15, 10),
    GlideRecord("g31", 118303688851791519, 57, 1471, 902, 12, 8),
    GlideRecord("g32", 180352746940718527, 58, 1575, 966, 15, 10),
    GlideRecord("g33", 1236472189813512351, 61, 1614, 990, 14, 9),
    GlideRecord("g34", 2602714556700227743, 62, 1639, 1005, 13, 8),
)

# every record falls below itself after one 18-fold jump and one 12-fold
# Syracuse jump; the verifier asserts both
FLAT_JUMP_H = 18
FLAT_SYR_JUMP_H = 12


def by_name(name: str) -> GlideRecord:
    for rec in GLIDE_RECORDS:
        if rec.name == name:
            return rec
    raise KeyError(name)
