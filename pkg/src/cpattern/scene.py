"""In-memory scene model: buildings with derived geometry, grouped by LOD.

Smaller LOD numbers are more detailed (LOD1 is the finest representation).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import Point, Polygon, Sbr, compute_sbr, polygon_area


@dataclass(frozen=True)
class Building:
    id: str
    lod: int
    polygon: Polygon
    shape_c: bool = False
    area: float = field(init=False, repr=False, compare=False)
    sbr: Sbr = field(init=False, repr=False, compare=False)
    srec: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        area = polygon_area(self.polygon)
        sbr = compute_sbr(self.polygon)
        object.__setattr__(self, "area", area)
        object.__setattr__(self, "sbr", sbr)
        object.__setattr__(self, "srec", min(1.0, area / sbr.area))

    @property
    def orientation(self) -> float:
        return self.sbr.orientation_deg

    @property
    def edge_count(self) -> int:
        return len(self.polygon.exterior)


@dataclass(frozen=True)
class Road:
    points: tuple[Point, ...]
    lod: int | None = None  # None: applies to every LOD

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise ValueError("road polyline needs at least two points")


@dataclass(frozen=True)
class MatchOverride:
    coarse_id: str
    detailed_id: str
    action: str  # "add" | "remove"


@dataclass
class Scene:
    buildings: dict[int, list[Building]]
    roads: list[Road] = field(default_factory=list)
    overrides: list[MatchOverride] = field(default_factory=list)
    crs: str | None = None

    def __post_init__(self) -> None:
        self.buildings = {lod: sorted(bs, key=lambda b: b.id) for lod, bs in sorted(self.buildings.items())}

    @property
    def lods(self) -> list[int]:
        return sorted(self.buildings)

    def at(self, lod: int) -> list[Building]:
        return self.buildings.get(lod, [])

    def roads_at(self, lod: int) -> list[Road]:
        return [r for r in self.roads if r.lod is None or r.lod == lod]

    def by_id(self) -> dict[str, Building]:
        return {b.id: b for bs in self.buildings.values() for b in bs}

    def __len__(self) -> int:
        return sum(len(bs) for bs in self.buildings.values())
