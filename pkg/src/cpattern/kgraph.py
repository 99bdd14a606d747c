"""A small embedded property graph.

Entities carry exactly one label (``SingleB`` or ``GroupB``) and a property
map; relations are typed, directed (symmetric types are stored once with
sorted endpoints) and may carry properties.  Adjacency is indexed per
(entity, relation type) so neighbourhood lookups cost O(result).

``match_pattern`` evaluates small graph templates with distinct-entity
semantics: two template variables never bind the same entity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterator, Mapping

from .errors import InvalidPatternError, NotFoundError, SchemaError

SINGLE = "SingleB"
GROUP = "GroupB"
LABELS = (SINGLE, GROUP)

HAS_PROXI = "Has_Proxi"
HAS_INTER = "Has_Inter"
HAS_MATCH = "Has_Match"
BELONG_TO = "Belong_To"
SIM_A = "SimA"
PARA_O = "ParaO"
PER_O = "PerO"
FULL_PARA = "Full_Para"
PART_PER = "Part_Per"

RELATION_TYPES = (HAS_PROXI, HAS_INTER, HAS_MATCH, BELONG_TO, SIM_A, PARA_O, PER_O, FULL_PARA, PART_PER)
SYMMETRIC = frozenset({HAS_PROXI, SIM_A, PARA_O, PER_O})
RELATION_PROPS = {HAS_INTER: frozenset({"Inter_T", "Face_R"}), HAS_MATCH: frozenset({"Match_T"})}
SINGLE_ONLY_PROPS = frozenset({"Area", "Ori"})

MAX_PATTERN_NODES = 6


@dataclass(slots=True)
class Entity:
    vid: str
    label: str
    props: dict[str, Any] = field(default_factory=dict)

    @property
    def labels(self) -> frozenset[str]:
        return frozenset({self.label})


@dataclass(slots=True)
class Relation:
    eid: str
    type: str
    src: str
    dst: str
    props: dict[str, Any] = field(default_factory=dict)

    def other(self, vid: str) -> str:
        return self.dst if vid == self.src else self.src


class PropertyGraph:
    """Single-writer, multi-reader in-memory graph."""

    def __init__(self) -> None:
        self.entities: dict[str, Entity] = {}
        self.relations: dict[str, Relation] = {}
        self._by_label: dict[str, dict[str, None]] = {lab: {} for lab in LABELS}
        self._out: dict[tuple[str, str], dict[str, None]] = {}
        self._in: dict[tuple[str, str], dict[str, None]] = {}
        self._pair: dict[tuple[str, str, str], str] = {}
        self._by_type: dict[str, dict[str, None]] = {t: {} for t in RELATION_TYPES}

    # -- mutation ---------------------------------------------------------

    def upsert_entity(self, label: str, vid: str, props: Mapping[str, Any] | None = None) -> str:
        """Create or update the entity ``vid``; properties are merged."""
        if label not in LABELS:
            raise SchemaError(f"unknown entity label {label!r}")
        props = dict(props or {})
        if label == GROUP and SINGLE_ONLY_PROPS & props.keys():
            raise SchemaError(f"GroupB entity {vid!r} cannot carry {sorted(SINGLE_ONLY_PROPS & props.keys())}")
        ent = self.entities.get(vid)
        if ent is None:
            if "Scale" not in props:
                raise SchemaError(f"entity {vid!r} needs a Scale property")
            self.entities[vid] = Entity(vid, label, props)
            self._by_label[label][vid] = None
        else:
            if ent.label != label:
                raise SchemaError(f"entity {vid!r} is {ent.label}, not {label}")
            ent.props.update(props)
        return vid

    def upsert_relation(self, rtype: str, src: str, dst: str, props: Mapping[str, Any] | None = None) -> str:
        """Create or update the relation keyed by (type, src, dst)."""
        if rtype not in RELATION_TYPES:
            raise SchemaError(f"unknown relation type {rtype!r}")
        for v in (src, dst):
            if v not in self.entities:
                raise NotFoundError(f"no entity {v!r}")
        props = dict(props or {})
        bad = props.keys() - RELATION_PROPS.get(rtype, frozenset())
        if bad:
            raise SchemaError(f"{rtype} cannot carry properties {sorted(bad)}")
        if rtype == BELONG_TO:
            if self.entities[src].label != SINGLE or self.entities[dst].label != GROUP:
                raise SchemaError("Belong_To must point from a SingleB to a GroupB")
        elif self.entities[src].label != SINGLE or self.entities[dst].label != SINGLE:
            raise SchemaError(f"{rtype} connects SingleB entities only")
        if src == dst:
            raise SchemaError(f"self-relation on {src!r}")
        if rtype in SYMMETRIC and dst < src:
            src, dst = dst, src
        key = (rtype, src, dst)
        eid = self._pair.get(key)
        if eid is not None:
            self.relations[eid].props.update(props)
            return eid
        eid = f"{rtype}:{src}->{dst}"
        self.relations[eid] = Relation(eid, rtype, src, dst, props)
        self._pair[key] = eid
        self._out.setdefault((src, rtype), {})[eid] = None
        self._in.setdefault((dst, rtype), {})[eid] = None
        self._by_type[rtype][eid] = None
        return eid

    # -- queries ----------------------------------------------------------

    def entity(self, vid: str) -> Entity:
        try:
            return self.entities[vid]
        except KeyError:
            raise NotFoundError(f"no entity {vid!r}") from None

    def relation_between(self, rtype: str, src: str, dst: str) -> Relation | None:
        if rtype in SYMMETRIC and dst < src:
            src, dst = dst, src
        eid = self._pair.get((rtype, src, dst))
        return None if eid is None else self.relations[eid]

    def neighbors(self, vid: str, rtype: str, direction: str = "out") -> list[tuple[Relation, Entity]]:
        if vid not in self.entities:
            raise NotFoundError(f"no entity {vid!r}")
        if rtype in SYMMETRIC or direction == "both":
            eids = list(self._out.get((vid, rtype), ())) + list(self._in.get((vid, rtype), ()))
        elif direction == "out":
            eids = self._out.get((vid, rtype), ())
        elif direction == "in":
            eids = self._in.get((vid, rtype), ())
        else:
            raise ValueError(f"direction must be out, in or both, not {direction!r}")
        out = []
        for eid in eids:
            rel = self.relations[eid]
            out.append((rel, self.entities[rel.other(vid)]))
        return out

    def with_label(self, label: str) -> Iterator[Entity]:
        for vid in self._by_label.get(label, ()):
            yield self.entities[vid]

    def relations_of(self, rtype: str) -> Iterator[Relation]:
        for eid in list(self._by_type.get(rtype, ())):
            yield self.relations[eid]

    def count(self, rtype: str | None = None, label: str | None = None) -> int:
        if label is not None:
            return len(self._by_label.get(label, ()))
        if rtype is not None:
            return len(self._by_type.get(rtype, ()))
        return len(self.entities)

    def audit(self) -> list[str]:
        """Full scan of index consistency; returns a list of problems (empty when sound)."""
        problems = []
        for eid, rel in self.relations.items():
            if rel.src not in self.entities or rel.dst not in self.entities:
                problems.append(f"{eid}: dangling endpoint")
            if eid not in self._out.get((rel.src, rel.type), {}):
                problems.append(f"{eid}: missing from out-index of {rel.src}")
            if eid not in self._in.get((rel.dst, rel.type), {}):
                problems.append(f"{eid}: missing from in-index of {rel.dst}")
            if self._pair.get((rel.type, rel.src, rel.dst)) != eid:
                problems.append(f"{eid}: pair index mismatch")
            if eid not in self._by_type.get(rel.type, {}):
                problems.append(f"{eid}: missing from type index")
        indexed = sum(len(v) for v in self._out.values())
        if indexed != len(self.relations) or sum(len(v) for v in self._in.values()) != len(self.relations):
            problems.append("adjacency index holds stale relations")
        for label, vids in self._by_label.items():
            for vid in vids:
                if vid not in self.entities or self.entities[vid].label != label:
                    problems.append(f"label index {label}: stale {vid}")
        if sum(len(v) for v in self._by_label.values()) != len(self.entities):
            problems.append("label index size mismatch")
        return problems

    def copy(self) -> "PropertyGraph":
        g = PropertyGraph()
        for e in self.entities.values():
            g.entities[e.vid] = Entity(e.vid, e.label, dict(e.props))
        for r in self.relations.values():
            g.relations[r.eid] = Relation(r.eid, r.type, r.src, r.dst, dict(r.props))
        g._by_label = {k: dict(v) for k, v in self._by_label.items()}
        g._out = {k: dict(v) for k, v in self._out.items()}
        g._in = {k: dict(v) for k, v in self._in.items()}
        g._pair = dict(self._pair)
        g._by_type = {k: dict(v) for k, v in self._by_type.items()}
        return g

    # -- snapshots --------------------------------------------------------

    def dumps(self) -> str:
        lines = []
        for e in self.entities.values():
            lines.append(json.dumps({"v": e.vid, "labels": [e.label], "props": e.props},
                                    sort_keys=True, separators=(",", ":")))
        for r in self.relations.values():
            lines.append(json.dumps({"e": r.eid, "t": r.type, "from": r.src, "to": r.dst, "props": r.props},
                                    sort_keys=True, separators=(",", ":")))
        return "".join(line + "\n" for line in lines)

    @classmethod
    def loads(cls, text: str) -> "PropertyGraph":
        g = cls()
        for n, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            if "v" in rec:
                (label,) = rec["labels"]
                g.upsert_entity(label, rec["v"], rec["props"])
            elif "e" in rec:
                eid = g.upsert_relation(rec["t"], rec["from"], rec["to"], rec["props"])
                if eid != rec["e"]:
                    raise SchemaError(f"snapshot line {n}: relation id {rec['e']!r} does not match its key")
            else:
                raise SchemaError(f"snapshot line {n}: neither entity nor relation")
        return g

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: str | Path) -> "PropertyGraph":
        return cls.loads(Path(path).read_text())

    # -- pattern matching -------------------------------------------------

    def match_pattern(self, pattern: "Pattern") -> list[dict[str, str]]:
        return match_pattern(self, pattern)


@dataclass(frozen=True)
class Node:
    var: str
    label: str | None = None
    props: Mapping[str, Any] = field(default_factory=dict)
    where: Callable[[Mapping[str, Any]], bool] | None = None

    def accepts(self, ent: Entity) -> bool:
        if self.label is not None and ent.label != self.label:
            return False
        for k, v in self.props.items():
            if ent.props.get(k) != v:
                return False
        return self.where is None or bool(self.where(ent.props))


@dataclass(frozen=True)
class Edge:
    src: str
    type: str
    dst: str
    props: Mapping[str, Any] = field(default_factory=dict)
    where: Callable[[Mapping[str, Any]], bool] | None = None

    def accepts(self, rel: Relation) -> bool:
        for k, v in self.props.items():
            if rel.props.get(k) != v:
                return False
        return self.where is None or bool(self.where(rel.props))


@dataclass(frozen=True)
class Pattern:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...] = ()


def _plan(pattern: Pattern) -> list[tuple[Node, Edge | None, list[Edge]]]:
    """Order variables so each one after the first is reached through an edge.

    Returns (node, anchor edge, extra edges checked once the node is bound).
    """
    nodes = {n.var: n for n in pattern.nodes}
    if not nodes:
        raise InvalidPatternError("pattern has no nodes")
    if len(nodes) != len(pattern.nodes):
        raise InvalidPatternError("duplicate pattern variable")
    if len(nodes) > MAX_PATTERN_NODES:
        raise InvalidPatternError(f"pattern has more than {MAX_PATTERN_NODES} nodes")
    for e in pattern.edges:
        if e.src not in nodes or e.dst not in nodes:
            raise InvalidPatternError(f"edge {e.src}-{e.type}-{e.dst} uses an undeclared variable")
        if e.src == e.dst:
            raise InvalidPatternError("self-loop edges cannot bind under distinct semantics")
    order = [pattern.nodes[0].var]
    bound = {order[0]}
    plan: list[tuple[Node, Edge | None, list[Edge]]] = [(nodes[order[0]], None, [])]
    used: set[int] = set()
    while len(order) < len(nodes):
        best = None
        for n in pattern.nodes:
            if n.var in bound:
                continue
            links = [k for k, e in enumerate(pattern.edges)
                     if k not in used and ((e.src == n.var and e.dst in bound) or (e.dst == n.var and e.src in bound))]
            if links and (best is None or len(links) > len(best[1])):
                best = (n, links)
        if best is None:
            raise InvalidPatternError("pattern is not connected")
        n, links = best
        anchor, *rest = links
        used.update(links)
        plan.append((n, pattern.edges[anchor], [pattern.edges[k] for k in rest]))
        order.append(n.var)
        bound.add(n.var)
    return plan


def _edge_holds(g: PropertyGraph, e: Edge, binding: Mapping[str, str]) -> bool:
    rel = g.relation_between(e.type, binding[e.src], binding[e.dst])
    return rel is not None and e.accepts(rel)


def match_pattern(g: PropertyGraph, pattern: Pattern) -> list[dict[str, str]]:
    """All distinct-entity bindings of ``pattern``, sorted by bound vIDs."""
    plan = _plan(pattern)
    var_order = [n.var for n in pattern.nodes]
    results: list[dict[str, str]] = []
    binding: dict[str, str] = {}
    taken: set[str] = set()

    def extend(level: int) -> None:
        if level == len(plan):
            results.append(dict(binding))
            return
        node, anchor, extra = plan[level]
        if anchor is None:
            candidates = g.with_label(node.label) if node.label else iter(g.entities.values())
            pairs = ((None, e) for e in candidates)
        else:
            if anchor.src in binding and anchor.src != node.var:
                pivot, direction = binding[anchor.src], "out"
            else:
                pivot, direction = binding[anchor.dst], "in"
            pairs = iter(g.neighbors(pivot, anchor.type, direction))
        for rel, ent in pairs:
            if ent.vid in taken or not node.accepts(ent):
                continue
            if rel is not None and not anchor.accepts(rel):
                continue
            binding[node.var] = ent.vid
            if all(_edge_holds(g, e, binding) for e in extra):
                taken.add(ent.vid)
                extend(level + 1)
                taken.discard(ent.vid)
            del binding[node.var]

    extend(0)
    results.sort(key=lambda b: tuple(b[v] for v in var_order))
    return results
