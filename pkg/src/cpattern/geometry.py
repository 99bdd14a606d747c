"""Planar polygon primitives.

Coordinates are metres in a projected CRS.  Polygons are normalised on
construction: the closing vertex is dropped, the exterior is counter-clockwise
and holes are clockwise.

The minimum-area bounding rectangle ("SBR") is found with rotating calipers
over the convex hull.  Intersection areas are computed by ear-clipping each
ring into triangles and clipping triangle pairs (Sutherland-Hodgman), which is
enough because callers only ever need the area of the intersection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidGeometryError

Point = tuple[float, float]
Ring = tuple[Point, ...]

EPS_GEOM = 1e-6
EPS_ANG = 1e-6


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def signed_area(ring: Sequence[Point]) -> float:
    """Shoelace area; positive for counter-clockwise rings."""
    s = 0.0
    n = len(ring)
    for k in range(n):
        x1, y1 = ring[k]
        x2, y2 = ring[(k + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def _clean_ring(coords: Iterable[Sequence[float]]) -> list[Point]:
    pts = [(float(c[0]), float(c[1])) for c in coords]
    if not all(math.isfinite(x) and math.isfinite(y) for x, y in pts):
        raise InvalidGeometryError("ring has a non-finite coordinate")
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    out: list[Point] = []
    for p in pts:
        if not out or p != out[-1]:
            out.append(p)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True

    def on_seg(a: Point, b: Point, c: Point, d: float) -> bool:
        return d == 0 and min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return on_seg(q1, q2, p1, d1) or on_seg(q1, q2, p2, d2) or on_seg(p1, p2, q1, d3) or on_seg(p1, p2, q2, d4)


def ring_is_simple(ring: Sequence[Point]) -> bool:
    n = len(ring)
    edges = [(ring[k], ring[(k + 1) % n]) for k in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if b == a + 1 or (a == 0 and b == n - 1):
                continue
            if _segments_intersect(*edges[a], *edges[b]):
                return False
    return True


def point_in_ring(pt: Point, ring: Sequence[Point]) -> bool:
    """Even-odd crossing test (boundary points may go either way)."""
    x, y = pt
    inside = False
    n = len(ring)
    j = n - 1
    for i in range(n):
        xi, yi = ring[i]
        xj, yj = ring[j]
        if (yi > y) != (yj > y):
            if x < (xj - xi) * (y - yi) / (yj - yi) + xi:
                inside = not inside
        j = i
    return inside


@dataclass(frozen=True)
class Polygon:
    exterior: Ring
    holes: tuple[Ring, ...] = ()

    def __post_init__(self) -> None:
        ext = _clean_ring(self.exterior)
        if len(set(ext)) < 3:
            raise InvalidGeometryError(f"ring has fewer than 3 distinct vertices: {ext!r}")
        a = signed_area(ext)
        if abs(a) <= EPS_GEOM * EPS_GEOM:
            raise InvalidGeometryError("exterior ring has zero area")
        if a < 0:
            ext.reverse()
        if not ring_is_simple(ext):
            raise InvalidGeometryError("exterior ring self-intersects")
        holes = []
        for h in self.holes:
            hr = _clean_ring(h)
            if len(set(hr)) < 3 or abs(signed_area(hr)) <= EPS_GEOM * EPS_GEOM:
                raise InvalidGeometryError("degenerate hole ring")
            if signed_area(hr) > 0:
                hr.reverse()
            if not ring_is_simple(hr):
                raise InvalidGeometryError("hole ring self-intersects")
            if not all(point_in_ring(p, ext) or _on_ring(p, ext) for p in hr):
                raise InvalidGeometryError("hole lies outside the exterior ring")
            holes.append(tuple(hr))
        object.__setattr__(self, "exterior", tuple(ext))
        object.__setattr__(self, "holes", tuple(holes))

    @property
    def vertices(self) -> Ring:
        return self.exterior

    def contains(self, pt: Point) -> bool:
        if not point_in_ring(pt, self.exterior):
            return False
        return not any(point_in_ring(pt, h) for h in self.holes)

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [p[0] for p in self.exterior]
        ys = [p[1] for p in self.exterior]
        return min(xs), min(ys), max(xs), max(ys)

    def rings(self) -> tuple[Ring, ...]:
        return (self.exterior, *self.holes)

    def to_coords(self, closed: bool = True) -> list[list[list[float]]]:
        """GeoJSON-style ring list."""
        out = []
        for r in self.rings():
            pts = [[x, y] for x, y in r]
            if closed:
                pts.append(pts[0])
            out.append(pts)
        return out

    def transformed(self, angle_deg: float = 0.0, dx: float = 0.0, dy: float = 0.0,
                    about: Point = (0.0, 0.0)) -> "Polygon":
        """Rotate counter-clockwise about ``about`` then translate."""
        c, s = math.cos(math.radians(angle_deg)), math.sin(math.radians(angle_deg))
        ox, oy = about

        def f(p: Point) -> Point:
            x, y = p[0] - ox, p[1] - oy
            return (ox + c * x - s * y + dx, oy + s * x + c * y + dy)

        return Polygon(tuple(map(f, self.exterior)), tuple(tuple(map(f, h)) for h in self.holes))


def _on_ring(pt: Point, ring: Sequence[Point], tol: float = EPS_GEOM) -> bool:
    n = len(ring)
    for k in range(n):
        if _point_segment_distance(pt, ring[k], ring[(k + 1) % n]) <= tol:
            return True
    return False


def _point_segment_distance(p: Point, a: Point, b: Point) -> float:
    vx, vy = b[0] - a[0], b[1] - a[1]
    wx, wy = p[0] - a[0], p[1] - a[1]
    vv = vx * vx + vy * vy
    t = 0.0 if vv == 0 else max(0.0, min(1.0, (wx * vx + wy * vy) / vv))
    return math.hypot(wx - t * vx, wy - t * vy)


def rectangle(cx: float, cy: float, length: float, width: float, angle_deg: float = 0.0) -> Polygon:
    """Rectangle centred on (cx, cy) with its ``length`` side at ``angle_deg``."""
    hl, hw = length / 2.0, width / 2.0
    base = Polygon(((-hl, -hw), (hl, -hw), (hl, hw), (-hl, hw)))
    return base.transformed(angle_deg, cx, cy)


def polygon_area(p: Polygon) -> float:
    return signed_area(p.exterior) + sum(signed_area(h) for h in p.holes)


def convex_hull(points: Iterable[Point]) -> list[Point]:
    """Andrew's monotone chain; counter-clockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise InvalidGeometryError(f"interval lo {self.lo} > hi {self.hi}")

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class Sbr:
    center: Point
    long_half: float
    short_half: float
    orientation_deg: float

    def __post_init__(self) -> None:
        if not (self.long_half >= self.short_half > 0):
            raise InvalidGeometryError(
                f"SBR halves must satisfy long >= short > 0, got {self.long_half}, {self.short_half}")

    @property
    def area(self) -> float:
        return 4.0 * self.long_half * self.short_half

    @property
    def long_axis(self) -> Point:
        t = math.radians(self.orientation_deg)
        return (math.cos(t), math.sin(t))

    @property
    def short_axis(self) -> Point:
        t = math.radians(self.orientation_deg)
        return (-math.sin(t), math.cos(t))

    def corners(self) -> list[Point]:
        (ux, uy), (vx, vy) = self.long_axis, self.short_axis
        cx, cy = self.center
        L, S = self.long_half, self.short_half
        return [(cx + a * L * ux + b * S * vx, cy + a * L * uy + b * S * vy)
                for a, b in ((-1, -1), (1, -1), (1, 1), (-1, 1))]


def _fold_orientation(deg: float) -> float:
    d = deg % 180.0
    if d >= 180.0 - EPS_ANG:
        d = 0.0
    return d


def compute_sbr(p: Polygon) -> Sbr:
    """Minimum-area enclosing rectangle by rotating calipers."""
    hull = convex_hull(p.exterior)
    if len(hull) < 3:
        raise InvalidGeometryError("collinear vertex set has no bounding rectangle")
    n = len(hull)

    def dot(q: Point, d: Point) -> float:
        return q[0] * d[0] + q[1] * d[1]

    best = None
    # r: max along edge, k: max height, l: min along edge
    r = k = l = None
    for i in range(n):
        a, b = hull[i], hull[(i + 1) % n]
        ex, ey = b[0] - a[0], b[1] - a[1]
        norm = math.hypot(ex, ey)
        u = (ex / norm, ey / norm)
        nrm = (-u[1], u[0])
        if r is None:
            r = (i + 1) % n
        while dot(hull[(r + 1) % n], u) >= dot(hull[r], u) and (r + 1) % n != i:
            r = (r + 1) % n
        if k is None:
            k = r
        while dot(hull[(k + 1) % n], nrm) >= dot(hull[k], nrm) and (k + 1) % n != i:
            k = (k + 1) % n
        if l is None:
            l = k
        while dot(hull[(l + 1) % n], u) <= dot(hull[l], u) and (l + 1) % n != (i + 1) % n:
            l = (l + 1) % n
        umin, umax = dot(hull[l], u), dot(hull[r], u)
        nmin, nmax = dot(a, nrm), dot(hull[k], nrm)
        area = (umax - umin) * (nmax - nmin)
        if best is None or area < best[0] * (1 - 1e-12):
            best = (area, u, nrm, umin, umax, nmin, nmax)

    _, u, nrm, umin, umax, nmin, nmax = best
    w, h = umax - umin, nmax - nmin
    cu, cn = (umin + umax) / 2, (nmin + nmax) / 2
    center = (u[0] * cu + nrm[0] * cn, u[1] * cu + nrm[1] * cn)
    ang_u = _fold_orientation(math.degrees(math.atan2(u[1], u[0])))
    ang_n = _fold_orientation(math.degrees(math.atan2(nrm[1], nrm[0])))
    if abs(w - h) <= EPS_GEOM:
        orientation = min(ang_u, ang_n)
    elif w > h:
        orientation = ang_u
    else:
        orientation = ang_n
    long_half, short_half = max(w, h) / 2, min(w, h) / 2
    if short_half <= 0:
        raise InvalidGeometryError("zero-width bounding rectangle")
    return Sbr(center, long_half, short_half, orientation)


def rectangularity(p: Polygon) -> float:
    return min(1.0, polygon_area(p) / compute_sbr(p).area)


def project_onto_axis(s: Sbr, origin: Point, direction: Point) -> Interval:
    """Interval spanned by the rectangle's corners on the line through ``origin``."""
    dx, dy = direction
    ox, oy = origin
    vals = [(x - ox) * dx + (y - oy) * dy for x, y in s.corners()]
    return Interval(min(vals), max(vals))


def triangulate_ring(ring: Sequence[Point]) -> list[tuple[Point, Point, Point]]:
    """Ear-clipping triangulation of a simple ring (either orientation)."""
    pts = list(ring)
    if signed_area(pts) < 0:
        pts.reverse()
    idx = list(range(len(pts)))
    tris: list[tuple[Point, Point, Point]] = []
    scale = max(max(abs(x), abs(y)) for x, y in pts) or 1.0
    tiny = 1e-14 * scale * scale

    def strictly_inside(q: Point, a: Point, b: Point, c: Point) -> bool:
        return _cross(a, b, q) > tiny and _cross(b, c, q) > tiny and _cross(c, a, q) > tiny

    def touches(q: Point, a: Point, b: Point, c: Point) -> bool:
        return _cross(a, b, q) >= -tiny and _cross(b, c, q) >= -tiny and _cross(c, a, q) >= -tiny

    while len(idx) > 3:
        m = len(idx)
        clipped = False
        for strict in (False, True):
            for t in range(m):
                ip, ic, inx = idx[t - 1], idx[t], idx[(t + 1) % m]
                a, b, c = pts[ip], pts[ic], pts[inx]
                cr = _cross(a, b, c)
                if abs(cr) <= tiny:
                    # straight-through vertex contributes no area
                    idx.pop(t)
                    clipped = True
                    break
                if cr < 0:
                    continue
                test = strictly_inside if strict else touches
                blocked = False
                for j in idx:
                    if j in (ip, ic, inx):
                        continue
                    q = pts[j]
                    if q in (a, b, c):
                        continue
                    if test(q, a, b, c):
                        blocked = True
                        break
                if blocked:
                    continue
                tris.append((a, b, c))
                idx.pop(t)
                clipped = True
                break
            if clipped:
                break
        if not clipped:
            raise InvalidGeometryError("ear clipping failed; ring is not simple")
    if len(idx) == 3:
        a, b, c = (pts[j] for j in idx)
        if abs(_cross(a, b, c)) > tiny:
            tris.append((a, b, c))
    return tris


def _clip_convex(subject: list[Point], clip: Sequence[Point]) -> list[Point]:
    """Sutherland-Hodgman; ``clip`` must be convex and counter-clockwise."""
    out = subject
    n = len(clip)
    for k in range(n):
        if not out:
            break
        a, b = clip[k], clip[(k + 1) % n]
        inp = out
        out = []
        m = len(inp)
        for t in range(m):
            cur, prev = inp[t], inp[t - 1]
            cin = _cross(a, b, cur) >= 0
            pin = _cross(a, b, prev) >= 0
            if cin:
                if not pin:
                    out.append(_line_hit(prev, cur, a, b))
                out.append(cur)
            elif pin:
                out.append(_line_hit(prev, cur, a, b))
    return out


def _line_hit(p: Point, q: Point, a: Point, b: Point) -> Point:
    dp = _cross(a, b, p)
    dq = _cross(a, b, q)
    t = dp / (dp - dq)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def _tri_bbox(t: Sequence[Point]) -> tuple[float, float, float, float]:
    xs = (t[0][0], t[1][0], t[2][0])
    ys = (t[0][1], t[1][1], t[2][1])
    return min(xs), min(ys), max(xs), max(ys)


def _boxes_overlap(a: tuple[float, ...], b: tuple[float, ...]) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


def _ring_overlap(r1: Sequence[Point], r2: Sequence[Point]) -> float:
    t1 = triangulate_ring(r1)
    t2 = triangulate_ring(r2)
    b2 = [_tri_bbox(t) for t in t2]
    total = 0.0
    for ta in t1:
        ba = _tri_bbox(ta)
        for tb, bb in zip(t2, b2):
            if not _boxes_overlap(ba, bb):
                continue
            piece = _clip_convex(list(ta), tb)
            if len(piece) >= 3:
                total += signed_area(piece)
    return total


def overlap_area(a: Polygon, b: Polygon) -> float:
    """Area of the intersection of two polygons (holes honoured)."""
    if not _boxes_overlap(a.bbox(), b.bbox()):
        return 0.0
    total = _ring_overlap(a.exterior, b.exterior)
    for h in a.holes:
        total -= _ring_overlap(h, b.exterior)
    for h in b.holes:
        total -= _ring_overlap(a.exterior, h)
    for ha in a.holes:
        for hb in b.holes:
            total += _ring_overlap(ha, hb)
    return max(0.0, min(total, polygon_area(a), polygon_area(b)))


def bbox_pairs(boxes_a: Sequence[tuple[float, float, float, float]],
               boxes_b: Sequence[tuple[float, float, float, float]] | None = None,
               pad: float = 0.0) -> list[tuple[int, int]]:
    """Index pairs whose (padded) boxes intersect, bucketed on a uniform grid.

    With ``boxes_b`` omitted the pairs are within ``boxes_a`` and satisfy i < j.
    """
    same = boxes_b is None
    if same:
        boxes_b = boxes_a
    if not boxes_a or not boxes_b:
        return []
    sizes = sorted(max(b[2] - b[0], b[3] - b[1]) for b in boxes_b)
    cell = max(sizes[len(sizes) // 2] + 2 * pad, 1e-9)

    def cells(b: tuple[float, float, float, float]):
        x0, y0 = math.floor((b[0] - pad) / cell), math.floor((b[1] - pad) / cell)
        x1, y1 = math.floor((b[2] + pad) / cell), math.floor((b[3] + pad) / cell)
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                yield cx, cy

    grid: dict[tuple[int, int], list[int]] = {}
    for j, b in enumerate(boxes_b):
        for c in cells(b):
            grid.setdefault(c, []).append(j)
    out: set[tuple[int, int]] = set()
    for i, ba in enumerate(boxes_a):
        for c in cells(ba):
            for j in grid.get(c, ()):
                if same and j <= i:
                    continue
                bb = boxes_b[j]
                if (ba[0] - pad <= bb[2] + pad and bb[0] - pad <= ba[2] + pad
                        and ba[1] - pad <= bb[3] + pad and bb[1] - pad <= ba[3] + pad):
                    out.add((i, j))
    return sorted(out)
