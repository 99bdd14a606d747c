"""Building adjacency from a constrained Delaunay triangulation.

Building rings and road polylines are densified and inserted as constraint
segments.  A triangle that bridges two buildings makes them proximate unless
one of its corners lies on a road.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import triangle

from .errors import InputValidationError
from .geometry import EPS_GEOM, Point, bbox_pairs, overlap_area
from .scene import Building, Road

DEFAULT_DENSIFY_STEP = 5.0

_ROAD = -1


@dataclass(frozen=True)
class ProximityGraph:
    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]  # (a, b) with a < b

    def neighbors(self, node: str) -> list[str]:
        return sorted({b for a, b in self.edges if a == node} | {a for a, b in self.edges if b == node})

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def has_edge(self, a: str, b: str) -> bool:
        return (min(a, b), max(a, b)) in self.edges


def densify(points: Sequence[Point], step: float, closed: bool) -> list[Point]:
    """Insert vertices so that no segment is longer than ``step``."""
    out: list[Point] = []
    n = len(points)
    last = n if closed else n - 1
    for k in range(last):
        (x1, y1), (x2, y2) = points[k], points[(k + 1) % n]
        pieces = max(1, math.ceil(math.hypot(x2 - x1, y2 - y1) / step))
        for t in range(pieces):
            out.append((x1 + (x2 - x1) * t / pieces, y1 + (y2 - y1) * t / pieces))
    if not closed:
        out.append(points[-1])
    return out


def check_no_overlaps(buildings: Sequence[Building]) -> None:
    boxes = [b.polygon.bbox() for b in buildings]
    for i, j in bbox_pairs(boxes):
        a, b = buildings[i], buildings[j]
        ov = overlap_area(a.polygon, b.polygon)
        if ov > max(EPS_GEOM, 1e-9 * min(a.area, b.area)):
            raise InputValidationError(
                f"buildings {a.id!r} and {b.id!r} overlap ({ov:.3f} m^2) at LOD {a.lod}")


class _VertexTable:
    def __init__(self) -> None:
        self.index: dict[tuple[float, float], int] = {}
        self.coords: list[Point] = []
        self.owners: list[set[int]] = []

    def add(self, p: Point, owner: int) -> int:
        key = (round(p[0], 6), round(p[1], 6))
        k = self.index.get(key)
        if k is None:
            k = len(self.coords)
            self.index[key] = k
            self.coords.append(key)
            self.owners.append(set())
        self.owners[k].add(owner)
        return k


def build_proximity_graph(buildings: Sequence[Building], roads: Sequence[Road] = (),
                          densify_step: float = DEFAULT_DENSIFY_STEP,
                          max_gap: float | None = None) -> ProximityGraph:
    if densify_step <= 0:
        raise InputValidationError("densify_step must be positive")
    if len({b.lod for b in buildings}) > 1:
        raise InputValidationError("proximity graph needs buildings from a single LOD")
    bs = sorted(buildings, key=lambda b: b.id)
    if len({b.id for b in bs}) != len(bs):
        raise InputValidationError("duplicate building ids")
    nodes = tuple(b.id for b in bs)
    if len(bs) < 2:
        return ProximityGraph(nodes, frozenset())
    check_no_overlaps(bs)

    table = _VertexTable()
    segments: set[tuple[int, int]] = set()

    def add_chain(pts: list[Point], owner: int, closed: bool) -> None:
        ids = [table.add(p, owner) for p in pts]
        m = len(ids) if closed else len(ids) - 1
        for k in range(m):
            a, b = ids[k], ids[(k + 1) % len(ids)]
            if a != b:
                segments.add((min(a, b), max(a, b)))

    for bi, b in enumerate(bs):
        for ring in b.polygon.rings():
            add_chain(densify(ring, densify_step, closed=True), bi, closed=True)
    for r in roads:
        add_chain(densify(r.points, densify_step, closed=False), _ROAD, closed=False)

    n_in = len(table.coords)
    tri = triangle.triangulate(
        {"vertices": np.asarray(table.coords, dtype=float),
         "segments": np.asarray(sorted(segments), dtype=np.int32)},
        "pcQ")
    verts = tri["vertices"]
    owners = table.owners

    def blocked(v: int) -> bool:
        # vertices created at segment crossings have no owner and are treated as road points
        return v >= n_in or _ROAD in owners[v]

    edges: set[tuple[int, int]] = set()
    for t in tri["triangles"]:
        t = [int(v) for v in t]
        if any(blocked(v) for v in t):
            continue
        own = [owners[v] for v in t]
        involved = own[0] | own[1] | own[2]
        if len(involved) < 2:
            continue
        common = own[0] & own[1] & own[2]
        if common:
            cx = float(verts[t[0]][0] + verts[t[1]][0] + verts[t[2]][0]) / 3
            cy = float(verts[t[0]][1] + verts[t[1]][1] + verts[t[2]][1]) / 3
            if any(bs[c].polygon.contains((cx, cy)) for c in common):
                continue
        for a in involved:
            for b in involved:
                if a < b and (a, b) not in edges:
                    if max_gap is None or _gap_ok(t, owners, verts, a, b, max_gap):
                        edges.add((a, b))
    return ProximityGraph(nodes, frozenset((bs[a].id, bs[b].id) if bs[a].id < bs[b].id
                                           else (bs[b].id, bs[a].id) for a, b in edges))


def _gap_ok(t: list[int], owners: list[set[int]], verts: np.ndarray, a: int, b: int, max_gap: float) -> bool:
    for u in t:
        if a not in owners[u]:
            continue
        for v in t:
            if b in owners[v]:
                if u == v or math.dist(verts[u], verts[v]) <= max_gap:
                    return True
    return False
