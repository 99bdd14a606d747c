"""Scene -> knowledge graph -> recognized patterns."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import relations as rel
from . import reasoner
from .crossscale import MatchComponent, match_buildings
from .errors import InvalidArgumentError
from .kgraph import FULL_PARA, HAS_INTER, HAS_MATCH, HAS_PROXI, PART_PER, SINGLE, PropertyGraph
from .proximity import DEFAULT_DENSIFY_STEP, ProximityGraph, build_proximity_graph
from .reasoner import PatternGroup
from .relations import Thresholds
from .scene import Scene

SCHEMAS = ("three-step", "precomputed")


@dataclass
class Model:
    scene: Scene
    graph: PropertyGraph
    thresholds: Thresholds
    schema: str
    proximity: dict[int, ProximityGraph] = field(default_factory=dict)
    matches: dict[tuple[int, int], list[MatchComponent]] = field(default_factory=dict)


def build_graph(scene: Scene, thresholds: Thresholds | None = None, schema: str = "three-step",
                densify_step: float = DEFAULT_DENSIFY_STEP, max_gap: float | None = None) -> Model:
    """Materialize entities, proximity, interval and match relations.

    In ``precomputed`` mode the structural relations are written straight
    from geometry and the intermediate Has_Inter/SimA/ParaO/PerO layer is
    skipped, so the graph carries only what the C template queries.
    """
    if schema not in SCHEMAS:
        raise InvalidArgumentError(f"unknown schema {schema!r}; expected one of {SCHEMAS}")
    th = thresholds or Thresholds()
    g = PropertyGraph()
    model = Model(scene, g, th, schema)
    for lod in scene.lods:
        for b in scene.at(lod):
            props = {"Scale": lod, "ShapeT": bool(b.shape_c)}
            if b.shape_c:
                props["Provenance"] = reasoner.SHAPE
            if schema == "three-step":
                props["Area"] = b.area
                props["Ori"] = b.orientation
            g.upsert_entity(SINGLE, b.id, props)

    for lod in scene.lods:
        bs = scene.at(lod)
        pg = build_proximity_graph(bs, scene.roads_at(lod), densify_step, max_gap)
        model.proximity[lod] = pg
        by_id = {b.id: b for b in bs}
        for a, c in sorted(pg.edges):
            g.upsert_relation(HAS_PROXI, a, c)
            for ref, tar in ((by_id[a], by_id[c]), (by_id[c], by_id[a])):
                r = rel.interval_relation(ref, tar, th)
                if r is None:
                    continue
                if schema == "three-step":
                    g.upsert_relation(HAS_INTER, ref.id, tar.id, {"Inter_T": r.inter_t, "Face_R": r.face_r})
                else:
                    if rel.full_para(ref, tar, r, th):
                        g.upsert_relation(FULL_PARA, ref.id, tar.id)
                    if rel.part_per(ref, tar, r, th):
                        g.upsert_relation(PART_PER, ref.id, tar.id)

    lods = scene.lods
    for fine, coarse in zip(lods, lods[1:]):
        comps = match_buildings(scene.at(coarse), scene.at(fine), th.overlap_min, scene.overrides)
        model.matches[(coarse, fine)] = comps
        for comp in comps:
            for c, d in sorted(comp.pairs):
                g.upsert_relation(HAS_MATCH, c, d, {"Match_T": comp.match_t.value})
    return model


def recognize(model: Model, passes: int | None = None, verify: bool = False,
              lods: Sequence[int] | None = None) -> list[PatternGroup]:
    """Run the rule steps on ``model.graph`` and return every pattern.

    ``passes`` is the number of enrichment sweeps; 0 disables enrichment and
    None iterates to the fixpoint.
    """
    if passes is not None and passes < 0:
        raise InvalidArgumentError("passes must be >= 0")
    g, th = model.graph, model.thresholds
    if model.schema == "three-step":
        reasoner.derive_pairwise(g, th)
        reasoner.derive_structural(g, th)
    chain = model.scene.lods
    for lod in chain:
        reasoner.recognize_c_patterns(g, lod)
    if passes != 0 and len(chain) > 1:
        check = reasoner.make_verifier(model.scene.by_id(), g, th) if verify else None
        reasoner.enrich_fixpoint(g, chain, passes, check)
    out = reasoner.collect_patterns(g)
    if lods is not None:
        keep = set(lods)
        out = [p for p in out if p.lod in keep]
    return out


def run(scene: Scene, thresholds: Thresholds | None = None, schema: str = "three-step",
        passes: int | None = None, verify: bool = False, **kw) -> tuple[Model, list[PatternGroup]]:
    model = build_graph(scene, thresholds, schema, **kw)
    return model, recognize(model, passes, verify)
