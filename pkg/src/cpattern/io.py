"""Scene loading, configuration and result export."""

from __future__ import annotations

import json
import statistics
from dataclasses import fields
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .crossscale import load_overrides
from .errors import CPatternError, ExportError, InvalidArgumentError, LoadError
from .geometry import Polygon
from .reasoner import PatternGroup
from .relations import Thresholds
from .scene import Building, Road, Scene

GEOGRAPHIC_CRS = ("4326", "CRS84", "4490", "4258")
PROVENANCE_COLORS = {"direct": "#d62728", "bottom_up": "#1f77b4", "up_bottom": "#2ca02c", "shape": "#9467bd"}


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise LoadError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise LoadError(f"{path} is not valid JSON: {exc}") from exc


# -- config ---------------------------------------------------------------------

def load_config(path: str | Path | None) -> dict[str, Any]:
    """TOML or JSON mapping; unknown keys are rejected."""
    if path is None:
        return {}
    p = Path(path)
    if p.suffix.lower() == ".toml":
        try:
            cfg = tomllib.loads(p.read_text(encoding="utf-8"))
        except OSError as exc:
            raise LoadError(f"cannot read {path}: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise LoadError(f"{path} is not valid TOML: {exc}") from exc
    else:
        cfg = read_json(p)
    if not isinstance(cfg, dict):
        raise LoadError(f"config {path} must be a mapping")
    known = {f.name for f in fields(Thresholds)} | {"densify_step", "max_gap"}
    bad = set(cfg) - known
    if bad:
        raise LoadError(f"unknown config keys in {path}: {sorted(bad)}")
    return cfg


def thresholds_from(cfg: Mapping[str, Any], overrides: Mapping[str, Any] | None = None) -> Thresholds:
    merged = {k: v for k, v in cfg.items() if k in {f.name for f in fields(Thresholds)}}
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return Thresholds(**{k: float(v) for k, v in merged.items()})
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"bad threshold value: {exc}") from exc


# -- scene loading ----------------------------------------------------------------

def _declared_crs(fc: Mapping) -> str | None:
    crs = fc.get("crs")
    if crs is None:
        return None
    try:
        return str(crs["properties"]["name"])
    except (KeyError, TypeError):
        return str(crs)


def _looks_geographic(buildings: Sequence[Building]) -> bool:
    # degree-valued footprints are tiny and sit inside the lon/lat box
    if not buildings:
        return False
    in_box = all(abs(x) <= 180 and abs(y) <= 90 for b in buildings for x, y in b.polygon.exterior)
    size = statistics.median(2 * b.sbr.long_half for b in buildings)
    return in_box and size < 0.01


def _feature_id(feat: Mapping, k: int) -> str:
    props = feat.get("properties") or {}
    return str(props.get("id", feat.get("id", f"#{k}")))


def _ring(coords: Any) -> tuple[tuple[float, float], ...]:
    return tuple((float(p[0]), float(p[1])) for p in coords)


def load_scene(paths: Sequence[str | Path], labels: str | Path | None = None,
               overrides: str | Path | None = None) -> Scene:
    """Read buildings and roads from GeoJSON FeatureCollections.

    Buildings are Polygon features with ``id`` and integer ``lod`` properties
    and an optional boolean ``shape_c``; roads are LineString features with an
    optional ``lod``.
    """
    raw_b: list[tuple[str, int, Polygon, bool, str]] = []
    roads: list[Road] = []
    crs_seen: dict[str, str] = {}
    for path in paths:
        fc = read_json(path)
        if not isinstance(fc, dict) or fc.get("type") != "FeatureCollection":
            raise LoadError(f"{path}: expected a GeoJSON FeatureCollection")
        crs = _declared_crs(fc)
        if crs is not None:
            if any(tag in crs for tag in GEOGRAPHIC_CRS):
                raise LoadError(f"{path}: geographic CRS {crs!r}; a projected CRS in metres is required")
            crs_seen[str(path)] = crs
        for k, feat in enumerate(fc.get("features", [])):
            fid = _feature_id(feat, k)
            geom = feat.get("geometry") or {}
            props = feat.get("properties") or {}
            gtype = geom.get("type")
            try:
                if gtype == "Polygon":
                    if "id" not in props:
                        raise LoadError(f"{path}: building feature {fid} has no id property")
                    if "lod" not in props:
                        raise LoadError(f"{path}: building feature {fid} has no lod property")
                    lod = props["lod"]
                    if isinstance(lod, bool) or int(lod) != lod:
                        raise LoadError(f"{path}: building feature {fid} has non-integer lod {lod!r}")
                    rings = geom["coordinates"]
                    poly = Polygon(_ring(rings[0]), tuple(_ring(h) for h in rings[1:]))
                    raw_b.append((fid, int(lod), poly, bool(props.get("shape_c", False)), str(path)))
                elif gtype == "LineString":
                    lod = props.get("lod")
                    roads.append(Road(_ring(geom["coordinates"]), None if lod is None else int(lod)))
                else:
                    raise LoadError(f"{path}: feature {fid} has unsupported geometry {gtype!r}")
            except LoadError:
                raise
            except (CPatternError, KeyError, TypeError, ValueError, IndexError) as exc:
                raise LoadError(f"{path}: feature {fid} is invalid: {exc}") from exc
    if len(set(crs_seen.values())) > 1:
        raise LoadError(f"mixed CRS across inputs: {crs_seen}")

    seen: dict[str, str] = {}
    for fid, _, _, _, src in raw_b:
        if fid in seen:
            raise LoadError(f"duplicate building id {fid!r} ({seen[fid]}, {src})")
        seen[fid] = src
    shape_ids = set(load_labels(labels)) if labels else set()
    unknown = shape_ids - seen.keys()
    if unknown:
        raise LoadError(f"shape labels reference unknown buildings: {sorted(unknown)}")
    by_lod: dict[int, list[Building]] = {}
    for fid, lod, poly, shape_c, _ in raw_b:
        by_lod.setdefault(lod, []).append(Building(fid, lod, poly, shape_c or fid in shape_ids))
    all_b = [b for bs in by_lod.values() for b in bs]
    if _looks_geographic(all_b):
        raise LoadError("coordinates look like degrees; a projected CRS in metres is required")
    ovr = load_overrides(overrides) if overrides else []
    crs = next(iter(crs_seen.values()), None)
    return Scene(by_lod, roads, ovr, crs)


def load_labels(path: str | Path) -> list[str]:
    """ShapeC labels as a list of ids or an {id: bool} map."""
    raw = read_json(path)
    if isinstance(raw, list):
        return [str(x) for x in raw]
    if isinstance(raw, dict):
        return [str(k) for k, v in raw.items() if v]
    raise LoadError(f"{path}: shape labels must be a list or an object")


def scene_to_geojson(scene: Scene) -> dict:
    feats = []
    for lod in scene.lods:
        for b in scene.at(lod):
            feats.append({"type": "Feature",
                          "properties": {"id": b.id, "lod": lod, "shape_c": b.shape_c},
                          "geometry": {"type": "Polygon",
                                       "coordinates": [[list(p) for p in r] for r in b.polygon.to_coords()]}})
    for r in scene.roads:
        props = {} if r.lod is None else {"lod": r.lod}
        feats.append({"type": "Feature", "properties": props,
                      "geometry": {"type": "LineString", "coordinates": [list(p) for p in r.points]}})
    out = {"type": "FeatureCollection", "features": feats}
    if scene.crs:
        out["crs"] = {"type": "name", "properties": {"name": scene.crs}}
    return out


# -- export ---------------------------------------------------------------------

def results_json(groups: Iterable[PatternGroup]) -> str:
    data = {"groups": [g.to_dict() for g in sorted(groups, key=PatternGroup.key)]}
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def results_geojson(groups: Sequence[PatternGroup], scene: Scene) -> dict:
    membership: dict[str, list[PatternGroup]] = {}
    for g in sorted(groups, key=PatternGroup.key):
        for m in g.members:
            membership.setdefault(m, []).append(g)
    feats = []
    for lod in scene.lods:
        for b in scene.at(lod):
            gs = membership.get(b.id, [])
            feats.append({
                "type": "Feature",
                "properties": {"id": b.id, "lod": lod, "groups": [g.group_vid for g in gs],
                               "provenance": [g.provenance for g in gs]},
                "geometry": {"type": "Polygon",
                             "coordinates": [[list(p) for p in r] for r in b.polygon.to_coords()]},
            })
    return {"type": "FeatureCollection", "features": feats}


def groups_from_geojson(fc: Mapping) -> dict[str, frozenset[str]]:
    """Group id -> member ids, inverting :func:`results_geojson`."""
    out: dict[str, set[str]] = {}
    for feat in fc.get("features", []):
        props = feat.get("properties") or {}
        for gid in props.get("groups", []):
            out.setdefault(gid, set()).add(str(props["id"]))
    return {k: frozenset(v) for k, v in sorted(out.items())}


def results_svg(groups: Sequence[PatternGroup], scene: Scene, panel: float = 400.0, pad: float = 10.0) -> str:
    """One panel per LOD, pattern members filled by provenance."""
    colour: dict[str, str] = {}
    for g in sorted(groups, key=PatternGroup.key):
        for m in g.members:
            colour.setdefault(m, PROVENANCE_COLORS.get(g.provenance, "#ff7f0e"))
    pts = [p for bs in scene.buildings.values() for b in bs for p in b.polygon.exterior]
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    else:
        x0 = y0 = 0.0
        x1 = y1 = 1.0
    scale = (panel - 2 * pad) / max(x1 - x0, y1 - y0, 1e-9)
    lods = scene.lods
    width = panel * max(1, len(lods))
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0f}" height="{panel + 20:.0f}">']
    for k, lod in enumerate(lods):
        ox = k * panel
        lines.append(f'<g id="lod{lod}"><text x="{ox + pad:.1f}" y="{panel + 14:.1f}" font-size="12">LOD{lod}</text>')
        for b in scene.at(lod):
            d = " ".join(f"{ox + pad + (x - x0) * scale:.2f},{pad + (y1 - y) * scale:.2f}"
                         for x, y in b.polygon.exterior)
            fill = colour.get(b.id, "#dddddd")
            lines.append(f'<polygon id="{_esc(b.id)}" points="{d}" fill="{fill}" stroke="#333" stroke-width="0.5"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def export_results(groups: Sequence[PatternGroup], scene: Scene, fmt: str, path: str | Path) -> None:
    if fmt == "json":
        text = results_json(groups)
    elif fmt == "geojson":
        text = json.dumps(results_geojson(groups, scene), sort_keys=True) + "\n"
    elif fmt == "svg":
        text = results_svg(groups, scene)
    else:
        raise InvalidArgumentError(f"unknown export format {fmt!r}")
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
