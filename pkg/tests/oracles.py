"""Independent reference implementations used as test oracles.

Nothing here imports the package's geometry or relation code: rectangles come
from shapely, projections from numpy, and Allen relations from a literal
decision table.
"""

from __future__ import annotations

import math
from itertools import permutations

import numpy as np
import shapely
from shapely.geometry import Polygon as SPolygon

# Allen relation codes, "a r b".
BEFORE, MEETS, OVERLAPS, STARTS, DURING, FINISHES, EQUALS = 1, 2, 3, 4, 5, 6, 7
FINISHED_BY, CONTAINS, STARTED_BY, OVERLAPPED_BY, MET_BY, AFTER = 8, 9, 10, 11, 12, 13

# Decision table over the signs of (a.lo-b.lo, a.hi-b.hi, a.hi-b.lo, a.lo-b.hi).
# Each row lists required signs (None: don't care); the first matching row wins,
# which fixes the answer when eps makes several endpoint pairs coincide.
ALLEN_TABLE = [
    (EQUALS, (0, 0, None, None)),
    (STARTS, (0, -1, None, None)),
    (STARTED_BY, (0, 1, None, None)),
    (FINISHES, (1, 0, None, None)),
    (FINISHED_BY, (-1, 0, None, None)),
    (MEETS, (None, None, 0, None)),
    (BEFORE, (None, None, -1, None)),
    (MET_BY, (None, None, None, 0)),
    (AFTER, (None, None, None, 1)),
    (OVERLAPS, (-1, -1, None, None)),
    (CONTAINS, (-1, 1, None, None)),
    (DURING, (1, -1, None, None)),
    (OVERLAPPED_BY, (1, 1, None, None)),
]


def sign(x: float, y: float, eps: float) -> int:
    if abs(x - y) <= eps:
        return 0
    return 1 if x > y else -1


def allen_table(a: tuple[float, float], b: tuple[float, float], eps: float = 0.0) -> int:
    key = (sign(a[0], b[0], eps), sign(a[1], b[1], eps), sign(a[1], b[0], eps), sign(a[0], b[1], eps))
    for code, req in ALLEN_TABLE:
        if all(r is None or r == k for r, k in zip(req, key)):
            return code
    raise AssertionError(f"decision table has no row for {key}")


def allen_textbook(a: tuple[float, float], b: tuple[float, float]) -> list[int]:
    """All strict textbook relations that hold (exactly one for proper intervals)."""
    (a1, a2), (b1, b2) = a, b
    defs = {
        BEFORE: a2 < b1, MEETS: a2 == b1, OVERLAPS: a1 < b1 < a2 < b2, STARTS: a1 == b1 and a2 < b2,
        DURING: b1 < a1 and a2 < b2, FINISHES: b1 < a1 and a2 == b2, EQUALS: a1 == b1 and a2 == b2,
        FINISHED_BY: a1 < b1 and a2 == b2, CONTAINS: a1 < b1 and b2 < a2, STARTED_BY: a1 == b1 and b2 < a2,
        OVERLAPPED_BY: b1 < a1 < b2 < a2, MET_BY: a1 == b2, AFTER: b2 < a1,
    }
    return [c for c, ok in defs.items() if ok]


# -- rectangles ---------------------------------------------------------------

def sweep_min_rect_area(points: np.ndarray, step_deg: float = 0.1) -> float:
    angles = np.deg2rad(np.arange(0.0, 90.0, step_deg))
    c, s = np.cos(angles), np.sin(angles)
    x = np.outer(c, points[:, 0]) + np.outer(s, points[:, 1])
    y = np.outer(-s, points[:, 0]) + np.outer(c, points[:, 1])
    areas = (x.max(axis=1) - x.min(axis=1)) * (y.max(axis=1) - y.min(axis=1))
    return float(areas.min())


class RefShape:
    """Area, rectangle frame and rectangularity of one footprint via shapely."""

    def __init__(self, coords):
        poly = SPolygon(coords)
        self.area = poly.area
        rect = shapely.minimum_rotated_rectangle(poly)
        pts = np.asarray(rect.exterior.coords)[:4]
        e1, e2 = pts[1] - pts[0], pts[2] - pts[1]
        long_e, short_e = (e1, e2) if np.linalg.norm(e1) >= np.linalg.norm(e2) else (e2, e1)
        self.L = float(np.linalg.norm(long_e))
        self.S = float(np.linalg.norm(short_e))
        self.u = long_e / self.L
        self.v = np.array([-self.u[1], self.u[0]])
        self.center = pts.mean(axis=0)
        self.corners = pts
        self.ori = math.degrees(math.atan2(self.u[1], self.u[0])) % 180.0
        if self.ori > 180.0 - 1e-6:
            self.ori = 0.0
        self.srec = min(1.0, self.area / (self.L * self.S))


def ref_interval_code(ref: RefShape, tar: RefShape) -> tuple[int, int, float]:
    eps = 0.01 * ref.L
    d = tar.corners - ref.center
    pu, pv = d @ ref.u, d @ ref.v
    i = allen_table((-ref.S / 2, ref.S / 2), (pv.min(), pv.max()), eps)
    j = allen_table((-ref.L / 2, ref.L / 2), (pu.min(), pu.max()), eps)
    inter = min(ref.L / 2, pu.max()) - max(-ref.L / 2, pu.min())
    fr = 0.0 if inter <= 0 else min(1.0, inter / min(ref.L, pu.max() - pu.min()))
    return i, j, fr


def ref_angle_gap(a: float, b: float) -> float:
    return abs(a - b)


def ref_full_para(a: RefShape, b: RefShape, th) -> bool:
    if a.srec < th.srec_min or b.srec < th.srec_min:
        return False
    if max(a.area, b.area) / min(a.area, b.area) - 1 > th.delta2:
        return False
    d = ref_angle_gap(a.ori, b.ori)
    if not (d <= th.delta3 or 180 - d <= th.delta3):
        return False
    i, j, fr = ref_interval_code(a, b)
    return fr >= th.delta1 and i in (1, 2, 12, 13) and 3 <= j <= 11


def ref_part_per(a: RefShape, b: RefShape, th) -> bool:
    if a.srec < th.srec_min or b.srec < th.srec_min:
        return False
    if abs(90 - ref_angle_gap(a.ori, b.ori)) > th.delta3:
        return False
    i, j, _ = ref_interval_code(a, b)
    # short-axis relation disjoint, long-axis relation partial overlap
    return i in (1, 13) and j in (3, 11) or i in (2, 12) and j in (3, 11)


def brute_force_c_groups(buildings, proximate, th) -> set[tuple[str, ...]]:
    """Every ordered (middle, wing, wing) triple, checked from scratch."""
    shapes = {b.id: RefShape(b.polygon.exterior) for b in buildings}
    ids = sorted(shapes)
    fp = {(a, b): ref_full_para(shapes[a], shapes[b], th) for a, b in permutations(ids, 2)}
    pp = {(a, b): ref_part_per(shapes[a], shapes[b], th) for a, b in permutations(ids, 2)}
    found = set()
    for m, w1, w2 in permutations(ids, 3):
        if (proximate(m, w1) and proximate(m, w2) and proximate(w1, w2)
                and fp[(w1, w2)] and pp[(m, w1)] and pp[(m, w2)]):
            found.add(tuple(sorted((m, w1, w2))))
    return found
