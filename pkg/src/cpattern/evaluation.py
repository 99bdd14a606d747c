"""Precision/recall scoring, dataset statistics and the timing benchmark."""

from __future__ import annotations

import gc
import json
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .errors import ConsistencyError, InputValidationError, InvalidArgumentError
from .pipeline import Model, build_graph
from .reasoner import PatternGroup, baseline_recognize, collect_patterns, derive_pairwise, derive_structural, \
    recognize_c_patterns
from .relations import Thresholds
from .scene import Building, Scene

ENGINES = ("kgraph", "baseline")


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


@dataclass
class Score:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float | None:
        return _ratio(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> float | None:
        return _ratio(self.tp, self.tp + self.fn)

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "precision": self.precision, "recall": self.recall}


@dataclass
class EvalReport:
    # variant -> lod -> score
    rows: dict[str, dict[int, Score]] = field(default_factory=dict)

    def add(self, variant: str, lod: int, s: Score) -> None:
        self.rows.setdefault(variant, {})[lod] = s

    def to_json(self) -> str:
        data = {v: {str(lod): s.to_dict() for lod, s in sorted(per.items())} for v, per in self.rows.items()}
        return json.dumps(data, indent=2, sort_keys=True)

    def to_text(self) -> str:
        def pct(x: float | None) -> str:
            return "n/a" if x is None else f"{100 * x:.1f}%"

        lines = [f"{'variant':<12}{'lod':>4}{'tp':>6}{'fp':>6}{'fn':>6}{'precision':>11}{'recall':>9}"]
        for v, per in self.rows.items():
            for lod, s in sorted(per.items()):
                lines.append(f"{v:<12}{lod:>4}{s.tp:>6}{s.fp:>6}{s.fn:>6}{pct(s.precision):>11}{pct(s.recall):>9}")
        return "\n".join(lines)


def score(recognized: Iterable[PatternGroup | Iterable[str]], truth: Iterable[Iterable[str]]) -> Score:
    """Exact member-set matching; each truth set can be claimed once."""
    truth_sets = [frozenset(t) for t in truth]
    if len(set(truth_sets)) != len(truth_sets):
        raise InputValidationError("ground truth contains duplicate member sets")
    rec = {frozenset(g.members if isinstance(g, PatternGroup) else g) for g in recognized}
    tset = set(truth_sets)
    tp = len(rec & tset)
    return Score(tp, len(rec) - tp, len(tset) - tp)


def score_by_lod(recognized: Sequence[PatternGroup], truth: Sequence[tuple[int, frozenset[str]]],
                 lods: Iterable[int] | None = None) -> dict[int, Score]:
    lod_set = set(lods) if lods is not None else {g.lod for g in recognized} | {lod for lod, _ in truth}
    return {lod: score([g for g in recognized if g.lod == lod], [m for l_, m in truth if l_ == lod])
            for lod in sorted(lod_set)}


def load_truth(path: str) -> list[tuple[int, frozenset[str]]]:
    from .io import read_json
    raw = read_json(path)
    out = []
    try:
        for rec in raw:
            out.append((int(rec["lod"]), frozenset(str(m) for m in rec["members"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputValidationError(f"malformed truth file {path}: {exc}") from exc
    return out


@dataclass(frozen=True)
class DatasetStats:
    b_c: int
    ave_area: float
    ave_ed: float
    r_ed_le8: float
    ave_srec: float
    r_srec_ge06: float


def dataset_stats(buildings: Sequence[Building], srec_min: float = 0.6) -> DatasetStats:
    n = len(buildings)
    if n == 0:
        return DatasetStats(0, 0.0, 0.0, 0.0, 0.0, 0.0)
    return DatasetStats(
        b_c=n,
        ave_area=statistics.fmean(b.area for b in buildings),
        ave_ed=statistics.fmean(b.edge_count for b in buildings),
        r_ed_le8=sum(b.edge_count <= 8 for b in buildings) / n,
        ave_srec=statistics.fmean(b.srec for b in buildings),
        r_srec_ge06=sum(b.srec >= srec_min for b in buildings) / n,
    )


@dataclass
class BenchReport:
    engine: str
    v_c: int
    samples: list[float]
    groups: int

    @property
    def min_t(self) -> float:
        return min(self.samples)

    @property
    def max_t(self) -> float:
        return max(self.samples)

    @property
    def ave_t(self) -> float:
        return statistics.fmean(self.samples)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(min_t=self.min_t, max_t=self.max_t, ave_t=self.ave_t)
        return d


def _kgraph_once(model: Model, lods: Sequence[int]) -> tuple[float, set]:
    g = model.graph.copy()
    th = model.thresholds
    t0 = time.perf_counter()
    if model.schema == "three-step":
        derive_pairwise(g, th)
        derive_structural(g, th)
    for lod in lods:
        recognize_c_patterns(g, lod)
    dt = time.perf_counter() - t0
    return dt, {p.key() for p in collect_patterns(g) if p.provenance == "direct"}


def _baseline_once(model: Model, lods: Sequence[int]) -> tuple[float, set]:
    th = model.thresholds
    t0 = time.perf_counter()
    found = []
    for lod in lods:
        found += baseline_recognize(model.scene.at(lod), model.proximity[lod], th)
    dt = time.perf_counter() - t0
    return dt, {p.key() for p in found}


def benchmark(scene: Scene | Model, engine: str = "kgraph", runs: int = 10,
              thresholds: Thresholds | None = None) -> BenchReport:
    """Time direct recognition only; graph construction happens before the clock starts.

    Both engines are run once up front and must agree on the group set.
    """
    if engine not in ENGINES:
        raise InvalidArgumentError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    if runs < 1:
        raise InvalidArgumentError("runs must be >= 1")
    model = scene if isinstance(scene, Model) else build_graph(scene, thresholds)
    lods = model.scene.lods
    _, a = _kgraph_once(model, lods)
    _, b = _baseline_once(model, lods)
    if a != b:
        raise ConsistencyError(f"kgraph and baseline disagree: {len(a ^ b)} groups differ")
    once = _kgraph_once if engine == "kgraph" else _baseline_once
    samples = []
    gc_was = gc.isenabled()
    try:
        for _ in range(runs):
            gc.collect()
            gc.disable()
            dt, _ = once(model, lods)
            gc.enable()
            samples.append(dt)
    finally:
        if gc_was:
            gc.enable()
    return BenchReport(engine, len(model.scene), samples, len(a))


def bench_table(reports: Sequence[BenchReport]) -> str:
    lines = [f"{'engine':<10}{'V_c':>7}{'Min_t':>10}{'Max_t':>10}{'Ave_t':>10}"]
    for r in reports:
        lines.append(f"{r.engine:<10}{r.v_c:>7}{r.min_t:>10.4f}{r.max_t:>10.4f}{r.ave_t:>10.4f}")
    return "\n".join(lines)


def scaling_benchmark(models: Sequence[Model], engine: str = "kgraph", runs: int = 10) -> list[BenchReport]:
    """Benchmark several scenes with their runs interleaved round-robin.

    Slow drifts in machine load then hit every scene size alike instead of
    biasing whichever size happened to run during a busy spell.
    """
    if engine not in ENGINES:
        raise InvalidArgumentError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    if runs < 1:
        raise InvalidArgumentError("runs must be >= 1")
    once = _kgraph_once if engine == "kgraph" else _baseline_once
    groups = []
    for m in models:
        _, a = _kgraph_once(m, m.scene.lods)
        _, b = _baseline_once(m, m.scene.lods)
        if a != b:
            raise ConsistencyError(f"kgraph and baseline disagree on a {len(m.scene)}-building scene")
        groups.append(len(a))
    samples: list[list[float]] = [[] for _ in models]
    gc_was = gc.isenabled()
    try:
        for _ in range(runs):
            for k, m in enumerate(models):
                gc.collect()
                gc.disable()
                dt, _ = once(m, m.scene.lods)
                gc.enable()
                samples[k].append(dt)
    finally:
        if gc_was:
            gc.enable()
    return [BenchReport(engine, len(m.scene), s, n) for m, s, n in zip(models, samples, groups)]
