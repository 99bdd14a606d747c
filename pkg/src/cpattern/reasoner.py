"""Rule-based recognition of C-shaped arrangements on the property graph.

The pipeline has three rule steps, each expressed as a graph template:

1. pairwise predicates (SimA, ParaO, PerO) on proximate buildings;
2. structural relations (Full_Para, Part_Per) from step 1 plus Has_Inter;
3. the C template: a middle building partly perpendicular to two wings that
   are fully parallel to each other, all three mutually proximate.

Recognized patterns are then propagated across LODs through Has_Match edges,
bottom-up (detailed -> coarse) and up-bottom (coarse -> detailed), until no
new pattern appears.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Iterable, Mapping, Sequence

from . import relations as rel
from .crossscale import MatchType
from .kgraph import (BELONG_TO, FULL_PARA, GROUP, HAS_INTER, HAS_MATCH, HAS_PROXI, PARA_O, PART_PER, PER_O,
                     SIM_A, SINGLE, Edge, Node, Pattern, PropertyGraph, Relation)
from .proximity import ProximityGraph
from .relations import Thresholds
from .scene import Building

DIRECT = "direct"
BOTTOM_UP = "bottom_up"
UP_BOTTOM = "up_bottom"
SHAPE = "shape"  # C-shaped single building supplied as an input label

# both directions only follow components with a single coarse building
SPLIT_MATCHES = frozenset({MatchType.ONE_TO_ONE.value, MatchType.ONE_TO_MANY.value})


@dataclass(frozen=True)
class PatternGroup:
    group_vid: str
    lod: int
    members: tuple[str, ...]
    provenance: str
    source: str | None = None

    @property
    def member_set(self) -> frozenset[str]:
        return frozenset(self.members)

    def key(self) -> tuple[int, tuple[str, ...]]:
        return (self.lod, self.members)

    def to_dict(self) -> dict:
        return {"id": self.group_vid, "lod": self.lod, "members": list(self.members),
                "provenance": self.provenance, "source": self.source}


def group_vid(lod: int, members: Iterable[str]) -> str:
    return f"G{lod}:" + "|".join(sorted(members))


def _created(g: PropertyGraph, types: Sequence[str], before: Mapping[str, int]) -> dict[str, int]:
    return {t: g.count(rtype=t) - before[t] for t in types}


# -- step 1 ------------------------------------------------------------------

def derive_pairwise(g: PropertyGraph, th: Thresholds) -> dict[str, int]:
    """MATCH (a)-[:Has_Proxi]-(b) and write the pairwise predicates that hold."""
    types = (SIM_A, PARA_O, PER_O)
    before = {t: g.count(rtype=t) for t in types}
    for r in g.relations_of(HAS_PROXI):
        a, c = r.src, r.dst
        pa, pc = g.entities[a].props, g.entities[c].props
        if rel.sim_a(pa["Area"], pc["Area"], th.delta2):
            g.upsert_relation(SIM_A, a, c)
        if rel.para_o(pa["Ori"], pc["Ori"], th.delta3):
            g.upsert_relation(PARA_O, a, c)
        if rel.per_o(pa["Ori"], pc["Ori"], th.delta3):
            g.upsert_relation(PER_O, a, c)
    return _created(g, types, before)


# -- step 2 ------------------------------------------------------------------

def _full_para_interval(props: Mapping) -> bool:
    i, j = rel.decode_inter_t(props["Inter_T"])
    return i in rel.DISJOINT and j in rel.FACING


def _is_full_para(g: PropertyGraph, r: Relation, th: Thresholds) -> bool:
    p = r.props
    return (p["Face_R"] >= th.delta1 and _full_para_interval(p)
            and g.relation_between(SIM_A, r.src, r.dst) is not None
            and g.relation_between(PARA_O, r.src, r.dst) is not None)


def _is_part_per(g: PropertyGraph, r: Relation) -> bool:
    return r.props["Inter_T"] in rel.PART_PER_CODES and g.relation_between(PER_O, r.src, r.dst) is not None


def derive_structural(g: PropertyGraph, th: Thresholds) -> dict[str, int]:
    """MATCH (a)-[r:Has_Inter]->(b) and write Full_Para / Part_Per in r's direction."""
    types = (FULL_PARA, PART_PER)
    before = {t: g.count(rtype=t) for t in types}
    for r in g.relations_of(HAS_INTER):
        if _is_full_para(g, r, th):
            g.upsert_relation(FULL_PARA, r.src, r.dst)
        if _is_part_per(g, r):
            g.upsert_relation(PART_PER, r.src, r.dst)
    return _created(g, types, before)


# -- step 3 ------------------------------------------------------------------

def c_pattern(lod: int) -> Pattern:
    scale = {"Scale": lod}
    return Pattern(
        nodes=(Node("w1", SINGLE, scale), Node("w2", SINGLE, scale), Node("m", SINGLE, scale)),
        edges=(Edge("w1", FULL_PARA, "w2"),
               Edge("m", PART_PER, "w1"),
               Edge("m", PART_PER, "w2"),
               Edge("m", HAS_PROXI, "w1"),
               Edge("m", HAS_PROXI, "w2"),
               Edge("w1", HAS_PROXI, "w2")),
    )


def _add_group(g: PropertyGraph, lod: int, members: Iterable[str], provenance: str,
               source: str | None) -> PatternGroup | None:
    """Create a ShapeT group unless one with the same members already exists."""
    members = tuple(sorted(members))
    vid = group_vid(lod, members)
    existing = g.entities.get(vid)
    if existing is not None and existing.props.get("ShapeT"):
        return None
    props = {"Scale": lod, "ShapeT": True, "Provenance": provenance}
    if source is not None:
        props["Source"] = source
    g.upsert_entity(GROUP, vid, props)
    for m in members:
        g.upsert_relation(BELONG_TO, m, vid)
    return PatternGroup(vid, lod, members, provenance, source)


def recognize_c_patterns(g: PropertyGraph, lod: int) -> list[PatternGroup]:
    seen: set[tuple[str, ...]] = set()
    out = []
    for b in g.match_pattern(c_pattern(lod)):
        members = tuple(sorted((b["m"], b["w1"], b["w2"])))
        if members in seen:
            continue
        seen.add(members)
        grp = _add_group(g, lod, members, DIRECT, None)
        if grp is not None:
            out.append(grp)
    return sorted(out, key=PatternGroup.key)


# -- enrichment ----------------------------------------------------------------

def _shape_sources(g: PropertyGraph, lod: int) -> list[tuple[str, tuple[str, ...]]]:
    """(entity vid, member building vids) for every ShapeT entity at ``lod``."""
    out = []
    for ent in g.with_label(GROUP):
        if ent.props.get("Scale") == lod and ent.props.get("ShapeT"):
            members = tuple(sorted(r.src for r, _ in g.neighbors(ent.vid, BELONG_TO, "in")))
            out.append((ent.vid, members))
    for ent in g.with_label(SINGLE):
        if ent.props.get("Scale") == lod and ent.props.get("ShapeT"):
            out.append((ent.vid, (ent.vid,)))
    return sorted(out)


def _matched(g: PropertyGraph, vid: str, direction: str, scale: int) -> set[str]:
    return {other.vid for r, other in g.neighbors(vid, HAS_MATCH, direction)
            if r.props.get("Match_T") in SPLIT_MATCHES and other.props.get("Scale") == scale}


def _target_vid(lod: int, targets: Sequence[str]) -> str:
    return targets[0] if len(targets) == 1 else group_vid(lod, targets)


def _promote(g: PropertyGraph, lod: int, targets: tuple[str, ...], provenance: str, source: str,
             verify: Callable[[tuple[str, ...]], bool] | None) -> PatternGroup | None:
    if not targets:
        return None
    if g.entities[source].props.get("Source") == _target_vid(lod, targets):
        return None  # never re-create the coverage a pattern came from
    if verify is not None and len(targets) == 3 and not verify(targets):
        return None
    if len(targets) == 1:
        (vid,) = targets
        ent = g.entities[vid]
        if ent.props.get("ShapeT"):
            return None
        g.upsert_entity(SINGLE, vid, {"ShapeT": True, "Provenance": provenance, "Source": source})
        return PatternGroup(vid, lod, targets, provenance, source)
    return _add_group(g, lod, targets, provenance, source)


def enrich_bottom_up(g: PropertyGraph, detailed: int, coarse: int,
                     verify: Callable[[tuple[str, ...]], bool] | None = None) -> list[PatternGroup]:
    """Lift patterns at ``detailed`` to the coarse buildings that contain all of their members."""
    out = []
    for src, members in _shape_sources(g, detailed):
        targets: set[str] = set()
        for m in members:
            hit = _matched(g, m, "in", coarse)
            if not hit:
                break
            targets |= hit
        else:
            grp = _promote(g, coarse, tuple(sorted(targets)), BOTTOM_UP, src, verify)
            if grp is not None:
                out.append(grp)
    return sorted(out, key=PatternGroup.key)


def enrich_up_bottom(g: PropertyGraph, coarse: int, detailed: int,
                     verify: Callable[[tuple[str, ...]], bool] | None = None) -> list[PatternGroup]:
    """Push patterns at ``coarse`` down to the detailed buildings they split into."""
    out = []
    for src, members in _shape_sources(g, coarse):
        targets: set[str] = set()
        for m in members:
            hit = _matched(g, m, "out", detailed)
            if not hit:
                break
            targets |= hit
        else:
            grp = _promote(g, detailed, tuple(sorted(targets)), UP_BOTTOM, src, verify)
            if grp is not None:
                out.append(grp)
    return sorted(out, key=PatternGroup.key)


def enrich_fixpoint(g: PropertyGraph, lod_chain: Sequence[int], passes: int | None = None,
                    verify: Callable[[int, tuple[str, ...]], bool] | None = None) -> list[PatternGroup]:
    """Alternate bottom-up and up-bottom sweeps until nothing new appears.

    ``lod_chain`` runs from most detailed to coarsest.  ``passes`` caps the
    number of sweeps (None: run to the fixpoint).  Returns every pattern in the
    graph afterwards.
    """
    chain = list(lod_chain)
    done = 0
    while passes is None or done < passes:
        new = []
        for fine, coarse in zip(chain, chain[1:]):
            v = None if verify is None else (lambda t, lod=coarse: verify(lod, t))
            new += enrich_bottom_up(g, fine, coarse, v)
        for fine, coarse in reversed(list(zip(chain, chain[1:]))):
            v = None if verify is None else (lambda t, lod=fine: verify(lod, t))
            new += enrich_up_bottom(g, coarse, fine, v)
        done += 1
        if not new:
            break
    return collect_patterns(g)


def collect_patterns(g: PropertyGraph, lod: int | None = None) -> list[PatternGroup]:
    out = []
    for ent in g.with_label(GROUP):
        if ent.props.get("ShapeT") and (lod is None or ent.props["Scale"] == lod):
            members = tuple(sorted(r.src for r, _ in g.neighbors(ent.vid, BELONG_TO, "in")))
            out.append(PatternGroup(ent.vid, ent.props["Scale"], members, ent.props.get("Provenance", DIRECT),
                                    ent.props.get("Source")))
    for ent in g.with_label(SINGLE):
        if ent.props.get("ShapeT") and (lod is None or ent.props["Scale"] == lod):
            out.append(PatternGroup(ent.vid, ent.props["Scale"], (ent.vid,), ent.props.get("Provenance", SHAPE),
                                    ent.props.get("Source")))
    return sorted(out, key=PatternGroup.key)


# -- geometry checks ----------------------------------------------------------

def is_c_triple(m: Building, w1: Building, w2: Building, th: Thresholds,
                proximate: Callable[[str, str], bool]) -> bool:
    """Eq.-5-style test with ``m`` as middle, recomputing every predicate."""
    if not (proximate(m.id, w1.id) and proximate(m.id, w2.id) and proximate(w1.id, w2.id)):
        return False
    if not rel.full_para(w1, w2, rel.interval_relation(w1, w2, th), th):
        return False
    return (rel.part_per(m, w1, rel.interval_relation(m, w1, th), th)
            and rel.part_per(m, w2, rel.interval_relation(m, w2, th), th))


def make_verifier(buildings: Mapping[str, Building], g: PropertyGraph,
                  th: Thresholds) -> Callable[[int, tuple[str, ...]], bool]:
    """Geometry re-check for enriched three-member groups (any role assignment)."""

    def proximate(a: str, b: str) -> bool:
        return g.relation_between(HAS_PROXI, a, b) is not None

    def check(lod: int, members: tuple[str, ...]) -> bool:
        bs = [buildings[m] for m in members]
        return any(is_c_triple(m, w1, w2, th, proximate) for m, w1, w2 in permutations(bs, 3))

    return check


def baseline_recognize(buildings: Sequence[Building], proximity: ProximityGraph,
                       th: Thresholds) -> list[PatternGroup]:
    """Recognition straight off the proximity graph, recomputing predicates per triple."""
    by_id = {b.id: b for b in buildings}
    adj = proximity.adjacency()
    found: set[tuple[str, ...]] = set()
    for m_id in sorted(adj):
        nbrs = sorted(adj[m_id])
        for w1_id, w2_id in permutations(nbrs, 2):
            if w2_id not in adj[w1_id]:
                continue
            if is_c_triple(by_id[m_id], by_id[w1_id], by_id[w2_id], th, proximity.has_edge):
                found.add(tuple(sorted((m_id, w1_id, w2_id))))
    return [PatternGroup(group_vid(by_id[ms[0]].lod, ms), by_id[ms[0]].lod, ms, DIRECT)
            for ms in sorted(found)]
