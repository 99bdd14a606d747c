"""Command-line entry point: ``cpattern <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Sequence

from . import evaluation, fixtures
from .errors import CPatternError, InvalidArgumentError
from .io import export_results, load_config, load_scene, results_json, scene_to_geojson, thresholds_from
from .pipeline import SCHEMAS, build_graph, recognize
from .scene import Scene

log = logging.getLogger("cpattern")


def _passes(text: str) -> int | None:
    if text == "fixpoint":
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer or 'fixpoint'") from None
    if n < 0:
        raise argparse.ArgumentTypeError("passes must be >= 0")
    return n


def _scene_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("scene", nargs="+", help="GeoJSON FeatureCollection(s) with buildings and roads")
    p.add_argument("--labels", help="JSON list/map of building ids labelled C-shaped")
    p.add_argument("--overrides", help="JSON list of manual match corrections")
    p.add_argument("--config", help="TOML or JSON thresholds file")
    for name in ("delta1", "delta2", "delta3", "srec_min", "overlap_min"):
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    p.add_argument("--densify-step", type=float)
    p.add_argument("--max-gap", type=float)
    p.add_argument("--schema", choices=SCHEMAS, default="three-step")


def _prepare(args: argparse.Namespace):
    cfg = load_config(args.config)
    th = thresholds_from(cfg, {k: getattr(args, k) for k in
                               ("delta1", "delta2", "delta3", "srec_min", "overlap_min")})
    scene = load_scene(args.scene, args.labels, args.overrides)
    kw = {"densify_step": args.densify_step if args.densify_step is not None else cfg.get("densify_step", 5.0),
          "max_gap": args.max_gap if args.max_gap is not None else cfg.get("max_gap")}
    return scene, th, kw


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_build_graph(args: argparse.Namespace) -> int:
    scene, th, kw = _prepare(args)
    model = build_graph(scene, th, args.schema, **kw)
    _write(model.graph.dumps(), args.out)
    log.info("%d entities, %d relations", len(model.graph.entities), len(model.graph.relations))
    return 0


def cmd_recognize(args: argparse.Namespace) -> int:
    scene, th, kw = _prepare(args)
    model = build_graph(scene, th, args.schema, **kw)
    groups = recognize(model, args.passes, args.verify, args.lod)
    if args.snapshot:
        model.graph.save(args.snapshot)
    if args.format == "json" and not args.out:
        sys.stdout.write(results_json(groups))
    else:
        if not args.out:
            raise InvalidArgumentError(f"--out is required for format {args.format}")
        export_results(groups, scene, args.format, args.out)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    scene, th, kw = _prepare(args)
    truth = evaluation.load_truth(args.truth)
    lods = scene.lods
    report = evaluation.EvalReport()
    for variant, passes in (("SP+PP", 0), ("SP+PP+EP", args.passes)):
        model = build_graph(scene, th, args.schema, **kw)
        groups = recognize(model, passes, args.verify)
        for lod, s in evaluation.score_by_lod(groups, truth, lods).items():
            report.add(variant, lod, s)
    _write(report.to_json() + "\n" if args.json else report.to_text() + "\n", args.out)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    if args.synthetic:
        th = thresholds_from(load_config(args.config))
        scene = fixtures.synthetic_scene(args.synthetic, args.seed)
        model = build_graph(scene, th)
    else:
        scene, th, kw = _prepare(args)
        model = build_graph(scene, th, args.schema, **kw)
    reports = [evaluation.benchmark(model, e, args.runs) for e in args.engine]
    if args.json:
        _write(json.dumps([r.to_dict() for r in reports], indent=2) + "\n", args.out)
    else:
        _write(evaluation.bench_table(reports) + "\n", args.out)
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    scene, th, kw = _prepare(args)
    model = build_graph(scene, th, args.schema, **kw)
    export_results(recognize(model, args.passes), scene, "svg", args.out)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    scene, th, _ = _prepare(args)
    rows = {}
    for lod in scene.lods:
        st = evaluation.dataset_stats(scene.at(lod), th.srec_min)
        rows[lod] = st
    lines = [f"{'lod':>4}{'B_c':>7}{'Ave_Area':>11}{'Ave_Ed':>8}{'R_Ed<=8':>9}{'Ave_Srec':>10}{'R_Srec>=0.6':>13}"]
    for lod, s in rows.items():
        lines.append(f"{lod:>4}{s.b_c:>7}{s.ave_area:>11.1f}{s.ave_ed:>8.2f}{s.r_ed_le8:>9.3f}"
                     f"{s.ave_srec:>10.3f}{s.r_srec_ge06:>13.3f}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def cmd_gen_fixture(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed)
    if args.kind == "three-lod":
        scene, expected = fixtures.three_lod_scene()
        if args.truth_out:
            truth = [{"lod": lod, "members": sorted(m)} for lod in sorted(expected) for m in
                     sorted(expected[lod], key=sorted)]
            Path(args.truth_out).write_text(json.dumps(truth, indent=2) + "\n", encoding="utf-8")
    elif args.kind == "c":
        scene = Scene({1: fixtures.c_fixture()})
    elif args.kind == "random":
        scene = fixtures.random_multilod_scene(rng, args.n, args.lods)
    else:
        scene = fixtures.synthetic_scene(args.n, args.seed)
    data = scene_to_geojson(scene)
    if args.crs:
        data["crs"] = {"type": "name", "properties": {"name": args.crs}}
    _write(json.dumps(data) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cpattern", description="C-shaped building pattern recognition across LODs")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-graph", help="build the knowledge graph and write a snapshot")
    _scene_args(p)
    p.add_argument("--out", help="snapshot path (default: stdout)")
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("recognize", help="recognize and enrich C-shaped patterns")
    _scene_args(p)
    p.add_argument("--lod", type=int, action="append", help="only report these LODs")
    p.add_argument("--passes", type=_passes, default=None, help="enrichment sweeps, or 'fixpoint' (default)")
    p.add_argument("--verify", action="store_true", help="re-check enriched triples against the C rule")
    p.add_argument("--format", choices=("json", "geojson", "svg"), default="json")
    p.add_argument("--out")
    p.add_argument("--snapshot", help="also write the final graph snapshot here")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("evaluate", help="precision/recall with and without enrichment")
    _scene_args(p)
    p.add_argument("--truth", required=True, help="JSON list of {lod, members}")
    p.add_argument("--passes", type=_passes, default=None)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="time rule-based recognition")
    p.add_argument("scene", nargs="*")
    p.add_argument("--synthetic", type=int, metavar="N", help="use a generated scene of N buildings")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--labels")
    p.add_argument("--overrides")
    p.add_argument("--config")
    for name in ("delta1", "delta2", "delta3", "srec_min", "overlap_min"):
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    p.add_argument("--densify-step", type=float)
    p.add_argument("--max-gap", type=float)
    p.add_argument("--schema", choices=SCHEMAS, default="three-step")
    p.add_argument("--engine", choices=evaluation.ENGINES, action="append")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("render", help="draw buildings per LOD with patterns highlighted")
    _scene_args(p)
    p.add_argument("--passes", type=_passes, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("stats", help="per-LOD dataset statistics")
    _scene_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen-fixture", help="write a generated scene as GeoJSON")
    p.add_argument("--kind", choices=("three-lod", "c", "random", "synthetic"), default="three-lod")
    p.add_argument("--n", type=int, default=20, help="cells (random) or buildings (synthetic)")
    p.add_argument("--lods", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--crs", default="EPSG:3857")
    p.add_argument("--truth-out", help="three-lod only: write the expected groups here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_fixture)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "bench":
        if not args.scene and not args.synthetic:
            print("error: bench needs a scene or --synthetic N", file=sys.stderr)
            return 1
        args.engine = args.engine or list(evaluation.ENGINES)
    try:
        return args.func(args)
    except CPatternError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - last-resort guard for the exit code contract
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
