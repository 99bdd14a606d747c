"""Parametric scenes for tests, benchmarks and the ``gen-fixture`` command.

All coordinates are metres in an arbitrary projected frame.
"""

from __future__ import annotations

import math
import random
from typing import Iterable

from .geometry import Point, Polygon, rectangle
from .scene import Building, Road, Scene


def _shift(pts: Iterable[Point], dx: float, dy: float) -> list[Point]:
    return [(x + dx, y + dy) for x, y in pts]


def _rot(pts: Iterable[Point], angle_deg: float, about: Point) -> list[Point]:
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    ox, oy = about
    return [(ox + (x - ox) * c - (y - oy) * s, oy + (x - ox) * s + (y - oy) * c) for x, y in pts]


def _box(x0: float, y0: float, x1: float, y1: float) -> list[Point]:
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def c_fixture_polygons(dx: float = 0.0, dy: float = 0.0, angle: float = 0.0,
                       wing_angle: float = 0.0) -> dict[str, Polygon]:
    """Middle 20x4 centred on the origin, 12x4 wings standing on its ends with 6 m gaps.

    ``wing_angle`` rotates the second wing about its own centre.
    """
    parts = {
        "M": _box(-10, -2, 10, 2),
        "W1": _box(-12, 8, -8, 20),
        "W2": _rot(_box(8, 8, 12, 20), wing_angle, (10, 14)),
    }
    return {k: Polygon(tuple(_shift(_rot(v, angle, (0, 0)), dx, dy))) for k, v in parts.items()}


def c_fixture(lod: int = 1, prefix: str = "", **kw) -> list[Building]:
    return [Building(prefix + k, lod, p) for k, p in c_fixture_polygons(**kw).items()]


def c_outline(dx: float = 0.0, dy: float = 0.0) -> Polygon:
    """One C-shaped footprint covering the canonical fixture."""
    pts = [(-12, -2), (12, -2), (12, 20), (8, 20), (8, 2), (-8, 2), (-8, 20), (-12, 20)]
    return Polygon(tuple(_shift(pts, dx, dy)))


def three_lod_scene() -> tuple[Scene, dict[int, set[frozenset[str]]]]:
    """Three LODs where most patterns are reachable only through enrichment.

    Area A: a direct C triple at LOD2, aggregated into one C footprint at LOD3
    and with its middle split in two at LOD1.
    Area B: a C building labelled at LOD3, split into two halves at LOD2 and
    into three parts at LOD1.
    Area C: a direct C triple at LOD1 whose coarse version merges the middle
    with one wing.

    Returns the scene and the expected member sets per LOD after the fixpoint.
    """
    b: dict[int, list[Building]] = {1: [], 2: [], 3: []}

    # area A
    b[3].append(Building("A3", 3, c_outline()))
    for k, p in c_fixture_polygons().items():
        b[2].append(Building("A2" + k, 2, p))
    b[1] += [
        Building("A1Ma", 1, Polygon(tuple(_box(-10, -2, -0.5, 2)))),
        Building("A1Mb", 1, Polygon(tuple(_box(0.5, -2, 10, 2)))),
        Building("A1W1", 1, Polygon(tuple(_box(-12, 8, -8, 20)))),
        Building("A1W2", 1, Polygon(tuple(_box(8, 8, 12, 20)))),
    ]

    # area B
    ox = 100.0
    b[3].append(Building("B3", 3, c_outline(ox), shape_c=True))
    half = [(-12, -2), (-0.5, -2), (-0.5, 2), (-8, 2), (-8, 20), (-12, 20)]
    b[2].append(Building("B2P", 2, Polygon(tuple(_shift(half, ox, 0)))))
    b[2].append(Building("B2Q", 2, Polygon(tuple(_shift([(-x, y) for x, y in half], ox, 0)))))
    b[1] += [
        Building("B1P1", 1, Polygon(tuple(_shift(_box(-12, -2, -0.5, 2), ox, 0)))),
        Building("B1P2", 1, Polygon(tuple(_shift(_box(-12, 2.5, -8, 20), ox, 0)))),
        Building("B1Q1", 1, Polygon(tuple(_shift([(-x, y) for x, y in half], ox, 0)))),
    ]

    # area C
    ox = 200.0
    for k, p in c_fixture_polygons(ox).items():
        b[1].append(Building("C1" + k, 1, p))
    b[2].append(Building("C2W1", 2, Polygon(tuple(_shift(_box(-12, 8, -8, 20), ox, 0)))))
    ell = [(-10, -2), (12, -2), (12, 20), (8, 20), (8, 2), (-10, 2)]
    b[2].append(Building("C2MW", 2, Polygon(tuple(_shift(ell, ox, 0)))))

    expected = {
        1: {frozenset({"A1Ma", "A1Mb", "A1W1", "A1W2"}), frozenset({"B1P1", "B1P2", "B1Q1"}),
            frozenset({"C1M", "C1W1", "C1W2"})},
        2: {frozenset({"A2M", "A2W1", "A2W2"}), frozenset({"B2P", "B2Q"}), frozenset({"C2W1", "C2MW"})},
        3: {frozenset({"A3"}), frozenset({"B3"})},
    }
    return Scene(b), expected


# -- random scenes -------------------------------------------------------------

CELL = 40.0


def _random_rect(rng: random.Random, cx: float, cy: float) -> list[Point]:
    length = rng.uniform(8, 22)
    width = length / rng.uniform(1.5, 4)
    ang = rng.choice([0, 90, rng.uniform(0, 180)])
    return list(rectangle(cx, cy, length, width, ang).exterior)


def _cell_content(rng: random.Random, cx: float, cy: float) -> list[list[Point]]:
    """Building rings confined to the CELL-sized square centred on (cx, cy)."""
    kind = rng.random()
    if kind < 0.35:
        # planted C, jittered; may be spoiled by the noise
        ang = rng.uniform(0, 360)
        out = []
        for k, p in c_fixture_polygons().items():
            pts = list(p.exterior)
            if k != "M" and rng.random() < 0.25:
                pts = _rot(pts, rng.uniform(-25, 25), (-10 if k == "W1" else 10, 14))
            if rng.random() < 0.2:
                pts = _shift(pts, rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
            out.append(_shift(_rot(_shift(pts, 0, -9), ang, (0, 0)), cx, cy))
        return out
    if kind < 0.7:
        # two or three parallel bars
        n = rng.choice([2, 3])
        ang = rng.uniform(0, 180)
        length = rng.uniform(10, 26)
        out = []
        for k in range(n):
            off = (k - (n - 1) / 2) * 10
            out.append(_shift(_rot(_box(-length / 2, off - 2, length / 2, off + 2), ang, (0, 0)), cx, cy))
        return out
    return [_random_rect(rng, cx, cy)]


def random_scene(rng: random.Random, n: int, lod: int = 1, cols: int | None = None) -> list[Building]:
    """About ``n`` buildings laid out in cells so that none overlap."""
    bs: list[Building] = []
    cols = cols or max(1, int(math.ceil(math.sqrt(max(n, 1) / 2.5))))
    k = 0
    while len(bs) < n:
        cx, cy = (k % cols) * CELL, (k // cols) * CELL
        for ring in _cell_content(rng, cx, cy):
            if len(bs) >= n:
                break
            bs.append(Building(f"b{len(bs):05d}", lod, Polygon(tuple(ring))))
        k += 1
    return bs


def _bbox_ring(rings: list[list[Point]]) -> list[Point]:
    xs = [x for r in rings for x, _ in r]
    ys = [y for r in rings for _, y in r]
    return _box(min(xs), min(ys), max(xs), max(ys))


def random_multilod_scene(rng: random.Random, n_cells: int, n_lods: int = 3) -> Scene:
    """Cells generalized independently per LOD: kept, merged into their bbox, or split."""
    cols = max(1, int(math.ceil(math.sqrt(n_cells))))
    bs: dict[int, list[Building]] = {lod: [] for lod in range(1, n_lods + 1)}
    for k in range(n_cells):
        cx, cy = (k % cols) * CELL, (k // cols) * CELL
        rings = _cell_content(rng, cx, cy)
        for lod in range(1, n_lods + 1):
            if lod > 1:
                op = rng.random()
                if op < 0.3 and len(rings) > 1:
                    rings = [_bbox_ring(rings)]
                elif op < 0.45 and len(rings) > 1:
                    i = rng.randrange(len(rings) - 1)
                    rings = rings[:i] + [_bbox_ring(rings[i:i + 2])] + rings[i + 2:]
                    if _rings_overlap(rings):
                        rings = [_bbox_ring(rings)]
            elif rng.random() < 0.2:
                rings = _split_longest(rings, rng)
            for r_i, ring in enumerate(rings):
                bs[lod].append(Building(f"L{lod}c{k:03d}r{r_i}", lod, Polygon(tuple(ring))))
    return Scene(bs)


def _rings_overlap(rings: list[list[Point]]) -> bool:
    from .geometry import overlap_area
    polys = [Polygon(tuple(r)) for r in rings]
    return any(overlap_area(polys[i], polys[j]) > 1e-6
               for i in range(len(polys)) for j in range(i + 1, len(polys)))


def _split_longest(rings: list[list[Point]], rng: random.Random) -> list[list[Point]]:
    """Cut one quadrilateral across its long side, leaving a 1 m gap."""
    idx = rng.randrange(len(rings))
    r = rings[idx]
    if len(r) != 4:
        return rings
    a, b, c, d = r
    if math.dist(a, b) < math.dist(b, c):
        a, b, c, d = b, c, d, a
    t0, t1 = 0.5 - 0.5 / math.dist(a, b), 0.5 + 0.5 / math.dist(a, b)

    def lerp(p: Point, q: Point, t: float) -> Point:
        return (p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t)

    left = [a, lerp(a, b, t0), lerp(d, c, t0), d]
    right = [lerp(a, b, t1), b, c, lerp(d, c, t1)]
    return rings[:idx] + [left, right] + rings[idx + 1:]


def synthetic_scene(n: int, seed: int = 0, block: int = 4) -> Scene:
    """Single-LOD city of ``n`` buildings with a road after every ``block`` cells."""
    rng = random.Random(seed)
    cols = max(1, int(math.ceil(math.sqrt(n / 2.5))))
    bs = random_scene(rng, n, lod=1, cols=cols)
    rows = int(math.ceil(n / 2.5 / cols)) + 2
    roads = []
    span_x, span_y = cols * CELL, rows * CELL
    for k in range(block, cols, block):
        x = k * CELL - CELL / 2
        roads.append(Road(((x, -CELL), (x, span_y))))
    for k in range(block, rows, block):
        y = k * CELL - CELL / 2
        roads.append(Road(((-CELL, y), (span_x, y))))
    return Scene({1: bs}, roads)
