"""Correspondence between buildings at two adjacent LODs.

Pairs whose min-normalised overlap ratio clears the threshold become edges of
a bipartite graph; each connected component is labelled by its cardinalities,
read coarse side first (a coarse building split into three detailed ones is
``one-to-many``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import LoadError
from .geometry import Polygon, bbox_pairs, overlap_area, polygon_area
from .scene import Building, MatchOverride


class MatchType(str, Enum):
    ONE_TO_ONE = "one-to-one"
    ONE_TO_MANY = "one-to-many"
    MANY_TO_ONE = "many-to-one"
    MANY_TO_MANY = "many-to-many"
    ONE_TO_NONE = "one-to-none"
    NONE_TO_ONE = "none-to-one"


def classify_component(n_coarse: int, n_detailed: int) -> MatchType:
    if n_coarse == 0 and n_detailed == 1:
        return MatchType.NONE_TO_ONE
    if n_coarse == 1 and n_detailed == 0:
        return MatchType.ONE_TO_NONE
    if n_coarse == 1:
        return MatchType.ONE_TO_ONE if n_detailed == 1 else MatchType.ONE_TO_MANY
    if n_coarse > 1 and n_detailed == 1:
        return MatchType.MANY_TO_ONE
    if n_coarse > 1 and n_detailed > 1:
        return MatchType.MANY_TO_MANY
    raise ValueError(f"no match type for component of size ({n_coarse}, {n_detailed})")


@dataclass(frozen=True)
class MatchComponent:
    coarse_ids: frozenset[str]
    detailed_ids: frozenset[str]
    match_t: MatchType
    pairs: frozenset[tuple[str, str]] = frozenset()  # (coarse, detailed) edges inside the component

    def sort_key(self) -> tuple:
        return (sorted(self.coarse_ids), sorted(self.detailed_ids))


def overlap_ratio(ref: Polygon, tar: Polygon) -> float:
    inter = overlap_area(ref, tar)
    if inter <= 0:
        return 0.0
    return min(1.0, inter / min(polygon_area(ref), polygon_area(tar)))


class UnionFind:
    def __init__(self) -> None:
        self.parent: dict[str, str] = {}

    def add(self, x: str) -> None:
        self.parent.setdefault(x, x)

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller key becomes the root so the structure is order independent
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def candidate_pairs(coarse: Sequence[Building], detailed: Sequence[Building],
                    overlap_min: float) -> set[tuple[str, str]]:
    boxes_c = [b.polygon.bbox() for b in coarse]
    boxes_d = [b.polygon.bbox() for b in detailed]
    out = set()
    for i, j in bbox_pairs(boxes_c, boxes_d):
        if overlap_ratio(coarse[i].polygon, detailed[j].polygon) >= overlap_min:
            out.add((coarse[i].id, detailed[j].id))
    return out


def match_buildings(coarse: Sequence[Building], detailed: Sequence[Building], overlap_min: float = 0.3,
                    overrides: Iterable[MatchOverride] = ()) -> list[MatchComponent]:
    coarse = sorted(coarse, key=lambda b: b.id)
    detailed = sorted(detailed, key=lambda b: b.id)
    pairs = candidate_pairs(coarse, detailed, overlap_min)
    c_ids = {b.id for b in coarse}
    d_ids = {b.id for b in detailed}
    for ov in overrides:
        if ov.coarse_id not in c_ids or ov.detailed_id not in d_ids:
            continue
        if ov.action == "add":
            pairs.add((ov.coarse_id, ov.detailed_id))
        else:
            pairs.discard((ov.coarse_id, ov.detailed_id))

    # coarse and detailed ids may collide, so tag the side
    uf = UnionFind()
    for b in coarse:
        uf.add("c:" + b.id)
    for b in detailed:
        uf.add("d:" + b.id)
    for c, d in pairs:
        uf.union("c:" + c, "d:" + d)
    groups: dict[str, tuple[set[str], set[str]]] = {}
    for key in uf.parent:
        root = uf.find(key)
        cs, ds = groups.setdefault(root, (set(), set()))
        (cs if key.startswith("c:") else ds).add(key[2:])
    inner: dict[str, set[tuple[str, str]]] = {}
    for c, d in pairs:
        inner.setdefault(uf.find("c:" + c), set()).add((c, d))
    comps = []
    for root, (cs, ds) in groups.items():
        comps.append(MatchComponent(frozenset(cs), frozenset(ds), classify_component(len(cs), len(ds)),
                                    frozenset(inner.get(root, ()))))
    return sorted(comps, key=MatchComponent.sort_key)


def load_overrides(path: str | Path) -> list[MatchOverride]:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LoadError(f"cannot read match overrides {path}: {exc}") from exc
    out = []
    for k, rec in enumerate(raw):
        try:
            action = rec["action"]
            if action not in ("add", "remove"):
                raise ValueError(action)
            out.append(MatchOverride(str(rec["coarse_id"]), str(rec["detailed_id"]), action))
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError(f"match override #{k} is malformed: {rec!r}") from exc
    return out
