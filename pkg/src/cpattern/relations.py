"""Pairwise building relations at one level of detail.

Interval relations compare the target's bounding rectangle, projected onto the
referent's short and long axes, with the referent's own extent on those axes.
The pair of Allen relations (i on the short axis, j on the long axis) is packed
into a single code ``(i - 1) * 13 + j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import TYPE_CHECKING

from .errors import InvalidArgumentError
from .geometry import Interval, Sbr, project_onto_axis

if TYPE_CHECKING:
    from .scene import Building


class Allen(IntEnum):
    BEFORE = 1
    MEETS = 2
    OVERLAPS = 3
    STARTS = 4
    DURING = 5
    FINISHES = 6
    EQUALS = 7
    FINISHED_BY = 8
    CONTAINS = 9
    STARTED_BY = 10
    OVERLAPPED_BY = 11
    MET_BY = 12
    AFTER = 13

    @property
    def converse(self) -> "Allen":
        return Allen(14 - self.value)


DISJOINT = frozenset({1, 2, 12, 13})
PARTIAL_OVERLAP = frozenset({3, 11})
FACING = frozenset(range(3, 12))
PART_PER_CODES = frozenset({3, 16, 11, 24, 146, 159, 154, 167})


@dataclass(frozen=True)
class Thresholds:
    delta1: float = 0.4   # facing degree
    delta2: float = 2.0   # area similarity
    delta3: float = 15.0  # angular tolerance, degrees
    srec_min: float = 0.6
    overlap_min: float = 0.3

    def __post_init__(self) -> None:
        checks = [
            ("delta1", 0 < self.delta1 <= 1),
            ("delta2", self.delta2 > 0),
            ("delta3", 0 < self.delta3 < 45),
            ("srec_min", 0 < self.srec_min <= 1),
            ("overlap_min", 0 < self.overlap_min <= 1),
        ]
        for name, ok in checks:
            if not ok:
                raise InvalidArgumentError(f"threshold {name}={getattr(self, name)} out of range")


def allen_classify(a: Interval, b: Interval, eps: float = 0.0) -> Allen:
    """Allen relation ``r`` such that ``a r b``.

    Endpoints closer than ``eps`` count as equal.  Shared-endpoint relations
    win over meets/met-by, which win over the strict ones, so the result is
    unique even for intervals shorter than ``eps``.
    """

    def cmp(x: float, y: float) -> int:
        d = x - y
        if abs(d) <= eps:
            return 0
        return 1 if d > 0 else -1

    lo = cmp(a.lo, b.lo)
    hi = cmp(a.hi, b.hi)
    if lo == 0:
        if hi == 0:
            return Allen.EQUALS
        return Allen.STARTS if hi < 0 else Allen.STARTED_BY
    if hi == 0:
        return Allen.FINISHES if lo > 0 else Allen.FINISHED_BY
    ahi_blo = cmp(a.hi, b.lo)
    if ahi_blo <= 0:
        return Allen.MEETS if ahi_blo == 0 else Allen.BEFORE
    alo_bhi = cmp(a.lo, b.hi)
    if alo_bhi >= 0:
        return Allen.MET_BY if alo_bhi == 0 else Allen.AFTER
    if lo < 0:
        return Allen.OVERLAPS if hi < 0 else Allen.CONTAINS
    return Allen.DURING if hi < 0 else Allen.OVERLAPPED_BY


def encode_inter_t(i: int, j: int) -> int:
    if not (1 <= i <= 13 and 1 <= j <= 13):
        raise InvalidArgumentError(f"Allen codes must be in 1..13, got ({i}, {j})")
    return (i - 1) * 13 + j


def decode_inter_t(inter_t: int) -> tuple[int, int]:
    if not 1 <= inter_t <= 169:
        raise InvalidArgumentError(f"Inter_T must be in 1..169, got {inter_t}")
    return (inter_t - 1) // 13 + 1, (inter_t - 1) % 13 + 1


@dataclass(frozen=True)
class IntervalRelation:
    referent: str
    target: str
    i: int
    j: int
    face_r: float

    @property
    def inter_t(self) -> int:
        return encode_inter_t(self.i, self.j)


def face_r(ref: Sbr, tar: Sbr) -> float:
    """Overlap of both rectangles' long-axis projections over the shorter one."""
    axis = ref.long_axis
    a = project_onto_axis(ref, ref.center, axis)
    b = project_onto_axis(tar, ref.center, axis)
    inter = min(a.hi, b.hi) - max(a.lo, b.lo)
    if inter <= 0:
        return 0.0
    return min(1.0, inter / min(a.length, b.length))


def interval_relation(ref: "Building", tar: "Building", thresholds: Thresholds) -> IntervalRelation | None:
    """Directional relation of ``tar`` seen from ``ref``; None if either is not rectangular enough."""
    if ref.srec < thresholds.srec_min or tar.srec < thresholds.srec_min:
        return None
    s = ref.sbr
    eps = 0.01 * 2 * s.long_half
    own_short = Interval(-s.short_half, s.short_half)
    own_long = Interval(-s.long_half, s.long_half)
    i = allen_classify(own_short, project_onto_axis(tar.sbr, s.center, s.short_axis), eps)
    j = allen_classify(own_long, project_onto_axis(tar.sbr, s.center, s.long_axis), eps)
    return IntervalRelation(ref.id, tar.id, int(i), int(j), face_r(s, tar.sbr))


def _angle_diff(oa: float, ob: float) -> float:
    return abs(oa - ob)


def sim_a(area_a: float, area_b: float, delta2: float) -> bool:
    return max(area_a, area_b) / min(area_a, area_b) - 1 <= delta2


def para_o(ori_a: float, ori_b: float, delta3: float) -> bool:
    d = _angle_diff(ori_a, ori_b)
    return d <= delta3 or 180 - d <= delta3


def per_o(ori_a: float, ori_b: float, delta3: float) -> bool:
    return abs(90 - _angle_diff(ori_a, ori_b)) <= delta3


def full_para(ref: "Building", tar: "Building", rel: IntervalRelation | None, thresholds: Thresholds) -> bool:
    if rel is None:
        return False
    return (sim_a(ref.area, tar.area, thresholds.delta2)
            and para_o(ref.orientation, tar.orientation, thresholds.delta3)
            and rel.face_r >= thresholds.delta1
            and rel.i in DISJOINT and rel.j in FACING)


def part_per(ref: "Building", tar: "Building", rel: IntervalRelation | None, thresholds: Thresholds) -> bool:
    if rel is None:
        return False
    return per_o(ref.orientation, tar.orientation, thresholds.delta3) and rel.inter_t in PART_PER_CODES
