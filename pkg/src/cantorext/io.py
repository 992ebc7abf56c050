"""File formats: diagram and IFS JSON, orbit CSV, fiber JSON, PGM rasters."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from fractions import Fraction
from pathlib import Path

from .bratteli import Edge, OrderedBratteliDiagram
from .errors import DimensionUnsupported, FormatError, UnknownPreset
from .ifs import (
    ContractionSystem,
    attractor_sample,
    digit_system,
    preset,
    realize,
    similitude_system,
)


def fmt_q(x) -> str:
    return str(Fraction(x))


def parse_q(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise FormatError(f"expected a rational 'p/q', got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {s!r}") from exc


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_atomic(path, data):
    """Write text or bytes via a temporary file renamed into place."""
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- diagrams ------------------------------------------------------------------

def _label_index(raw):
    if raw is None:
        return None
    if isinstance(raw, int) and not isinstance(raw, bool) and raw >= 0:
        return raw
    if isinstance(raw, str) and raw[:1] == "f" and raw[1:].isdigit():
        return int(raw[1:])
    if isinstance(raw, str) and raw.isdigit():
        return int(raw)
    raise FormatError(f"bad label {raw!r}: expected null, a map index, or 'fK'")


def diagram_from_obj(obj):
    """Parse the diagram schema; returns ``(diagram, labels)``.

    ``labels`` is None when every label is null (an unlabeled diagram);
    otherwise null entries mean the identity.
    """
    if not isinstance(obj, dict) or "levels" not in obj or "edges" not in obj:
        raise FormatError("diagram must be an object with 'levels' and 'edges'")
    levels, edges = obj["levels"], obj["edges"]
    repeat = obj.get("repeat_from")
    if not isinstance(levels, list) or not all(isinstance(v, list) for v in levels):
        raise FormatError("'levels' must be a list of lists of vertex names")
    if not isinstance(edges, list) or not all(isinstance(e, list) for e in edges):
        raise FormatError("'edges' must be a list of lists of edge objects")
    if repeat is not None and (isinstance(repeat, bool) or not isinstance(repeat, int)):
        raise FormatError("'repeat_from' must be an integer or null")
    parsed, labels = [], []
    for n, level in enumerate(edges, start=1):
        row, lrow = [], []
        for e in level:
            if not isinstance(e, dict):
                raise FormatError(f"edge at level {n} is not an object")
            try:
                vals = [e["source"], e["range"], e["order"]]
            except KeyError as exc:
                raise FormatError(f"edge at level {n} lacks {exc}") from exc
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in vals):
                raise FormatError(f"edge at level {n}: source/range/order must be integers")
            row.append(Edge(*vals))
            lrow.append(_label_index(e.get("label")))
        parsed.append(row)
        labels.append(lrow)
    d = OrderedBratteliDiagram([[str(v) for v in vs] for vs in levels], parsed, repeat)
    if all(x is None for row in labels for x in row):
        return d, None
    return d, labels


def load_diagram(path):
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read diagram {path}: {exc}") from exc
    return diagram_from_obj(obj)


def diagram_to_obj(d: OrderedBratteliDiagram, labels=None):
    edges = []
    for n, level in enumerate(d.edges):
        edges.append([{"source": e.source, "range": e.range, "order": e.order,
                       "label": None if labels is None or labels[n][i] is None else f"f{labels[n][i]}"}
                      for i, e in enumerate(level)])
    return {"levels": [list(v) for v in d.levels], "edges": edges, "repeat_from": d.repeat_from}


def dump_diagram(d, labels=None) -> str:
    return canonical_json(diagram_to_obj(d, labels))


# -- iterated function systems ---------------------------------------------------

def ifs_from_obj(obj) -> ContractionSystem:
    if not isinstance(obj, dict) or obj.get("kind") not in ("similitude", "digit"):
        raise FormatError("IFS must be an object with kind 'similitude' or 'digit'")
    try:
        if obj["kind"] == "similitude":
            n = obj["dimension"]
            ratio = parse_q(obj["ratio"])
            offsets = [[parse_q(b) for b in m["offset"]] for m in obj["maps"]]
            if not offsets or any(len(o) != n for o in offsets):
                raise FormatError("each map offset must have 'dimension' entries")
            return similitude_system(ratio, offsets)
        return digit_system(obj["base"], [tuple(d) for d in obj["digits"]], obj["dimension"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed IFS: {exc}") from exc


def ifs_to_obj(sys: ContractionSystem):
    if sys.kind == "digit":
        return {"kind": "digit", "base": sys.base, "dimension": sys.dimension,
                "digits": [list(f.digit) for f in sys.maps]}
    return {"kind": "similitude", "dimension": sys.dimension, "ratio": fmt_q(sys.maps[0].ratio),
            "maps": [{"offset": [fmt_q(b) for b in f.offset]} for f in sys.maps]}


def load_ifs(spec: str) -> ContractionSystem:
    """A preset name (``interval2``, ``cube2(2)``, ...) or a path to an IFS JSON file."""
    try:
        return preset(spec)
    except UnknownPreset:
        pass
    if not os.path.exists(spec):
        raise FormatError(f"{spec!r} is neither a preset nor a readable file")
    try:
        with open(spec, encoding="utf-8") as fh:
            return ifs_from_obj(json.load(fh))
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read IFS {spec}: {exc}") from exc


# -- points, boxes, orbits ------------------------------------------------------

def box_obj(box):
    return [[fmt_q(lo), fmt_q(hi)] for lo, hi in box.intervals]


def fiber_obj(result):
    from .extension import Copy
    if isinstance(result, Copy):
        region = result.cylinder.region
        return {"type": "copy", "region": box_obj(region), "diameter": fmt_q(region.diameter),
                "path": list(result.cylinder.path)}
    return {"type": "singleton", "region": box_obj(result.box), "diameter": fmt_q(result.box.diameter),
            "nonidentity": result.nonidentity}


def ranks(d, edges, start=1):
    return [d.edges_at(start + i)[idx].order for i, idx in enumerate(edges)]


def orbit_csv(d, points, depth, tag) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "prefix", "tail"])
    for i, x in enumerate(points):
        n = max(depth, len(x.prefix))
        w.writerow([i, ",".join(map(str, ranks(d, x.edges(n)))), tag(x)])
    return buf.getvalue()


def extended_orbit_csv(lab, points, depth) -> str:
    from .extension import Exact
    d, sys = lab.diagram, lab.system
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "prefix", "kind", "coordinate"])
    for i, p in enumerate(points):
        n = max(depth, len(p.base.prefix))
        pref = ",".join(map(str, ranks(d, p.base.edges(n))))
        if isinstance(p.coord, Exact):
            w.writerow([i, pref, "exact", ",".join(fmt_q(x) for x in realize(sys, p.coord.actual))])
        else:
            w.writerow([i, pref, "box", ",".join(f"{fmt_q(lo)}..{fmt_q(hi)}" for lo, hi in p.coord.box.intervals)])
    return buf.getvalue()


# -- attractor rendering ----------------------------------------------------------

def grid_base(sys: ContractionSystem) -> int:
    if sys.kind == "digit":
        return sys.base
    inv = 1 / sys.ratio
    if inv.denominator != 1:
        raise DimensionUnsupported(f"ratio {sys.ratio} has no integer grid")
    return int(inv)


def raster(sys: ContractionSystem, depth: int):
    """0/1 rows (top row first) marking cells of side base**-depth that meet a depth-k box."""
    if sys.dimension != 2:
        raise DimensionUnsupported(f"raster needs a 2-dimensional system, got {sys.dimension}")
    side = grid_base(sys) ** depth
    grid = [[0] * side for _ in range(side)]
    for box in attractor_sample(sys, depth):
        (x0, x1), (y0, y1) = box.intervals
        xs = range(math.floor(x0 * side), math.ceil(x1 * side))
        ys = range(math.floor(y0 * side), math.ceil(y1 * side))
        for j in ys:
            for i in xs:
                grid[side - 1 - j][i] = 1
    return grid


def pgm_bytes(grid) -> bytes:
    h, w = len(grid), len(grid[0])
    return f"P5\n{w} {h}\n1\n".encode() + bytes(v for row in grid for v in row)


def attractor_csv(sys: ContractionSystem, depth: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{j}" for j in range(sys.dimension)] + ["side"])
    for box in attractor_sample(sys, depth):
        w.writerow([fmt_q(a) for a in box.lower] + [fmt_q(box.side)])
    return buf.getvalue()
