"""Command-line front end.

Exit codes: 0 success, 1 validation failure or unsatisfiable request,
2 malformed input.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import io as fio
from .bratteli import check_properly_ordered, telescope, validate_diagram, Ordering
from .errors import (
    BadCuts,
    CantorExtError,
    FormatError,
    InvalidPath,
    LevelOutOfRange,
    NotStationary,
    UnknownPreset,
)
from .extension import (
    EdgeLabeling,
    auto_label,
    bounded_point,
    classify_point,
    density_probe,
    exact_from_pulled,
    exact_point,
    extended_cylinder,
    extended_orbit,
    fiber,
    identity_point,
    lift_measure,
    subregions,
    Type1,
    validate_labeling,
)
from .vershik import (
    K0Element,
    cylinder_measure,
    k0_equal,
    k0_map,
    max_point,
    min_point,
    orbit,
    tail_tag,
    with_tail,
)


class UsageError(Exception):
    """Bad option values (exit code 2)."""


class ValidationFailed(Exception):
    """Input parsed but violates the diagram invariants (exit code 1)."""

    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = violations


def _load_valid(path):
    d, labels = fio.load_diagram(path)
    rep = validate_diagram(d)
    if not rep.ok:
        raise ValidationFailed(rep.violations)
    return d, labels


def _parse_ranks(text):
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad rank list {text!r}") from exc


def ranks_to_edges(d, ranks):
    """Resolve order ranks level by level from v_0 (lowest range index on ties)."""
    path, v = [], 0
    for n, r in enumerate(ranks, start=1):
        options = [i for i in d.out_edges(n, v) if d.edges_at(n)[i].order == r]
        if not options:
            raise UsageError(f"no edge of rank {r} leaves vertex {v} at level {n}")
        i = min(options, key=lambda i: (d.edges_at(n)[i].range, i))
        path.append(i)
        v = d.edges_at(n)[i].range
    return tuple(path)


def _parse_point(d, text, lab=None):
    if text in ("min", "max"):
        return min_point(d) if text == "min" else max_point(d)
    kind, _, rest = text.partition(":")
    prefix = ranks_to_edges(d, _parse_ranks(rest))
    if kind in ("min", "max"):
        return with_tail(d, prefix, kind)
    if kind == "id":
        if lab is None:
            raise UsageError("id points need a labeled diagram (--ifs)")
        return identity_point(lab, prefix)
    raise UsageError(f"bad --point {text!r}: use min, max, id:<ranks>, min:<ranks> or max:<ranks>")


def _parse_coord(text):
    try:
        return tuple(Fraction(t) for t in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad coordinate {text!r}") from exc


def _parse_k0(text):
    level, _, vec = text.partition(":")
    try:
        return K0Element(int(level), tuple(int(t) for t in vec.split(",")))
    except ValueError as exc:
        raise UsageError(f"bad K0 element {text!r}: use level:v1,v2,...") from exc


def _emit(args, text):
    if getattr(args, "out", None):
        fio.write_atomic(args.out, text)
    else:
        sys.stdout.write(text if isinstance(text, str) else text.decode("latin-1"))


def _labeled(args):
    d, labels = _load_valid(args.diagram)
    system = fio.load_ifs(args.ifs)
    if labels is None:
        return auto_label(d, system)[1]
    if any(i is not None and i >= len(system.maps) for row in labels for i in row):
        raise FormatError("label refers to a map index outside the IFS")
    return EdgeLabeling(d, system, labels)


def _start_point(args, lab):
    x = _parse_point(lab.diagram, args.point, lab)
    if isinstance(classify_point(x, lab), Type1):
        # boxes this deep are far below any probe resolution used in practice
        return bounded_point(lab, x, max(args.depth, 40))
    if args.coord:
        return exact_point(lab, x, _parse_coord(args.coord))
    return exact_from_pulled(lab, x, lab.system.default_point())


# -- subcommands -----------------------------------------------------------------

def cmd_validate(args):
    d, labels = fio.load_diagram(args.diagram)
    rep = validate_diagram(d)
    out = rep.to_dict()
    if rep.ok and d.stationary:
        verdict = check_properly_ordered(d)
        out["properly_ordered"] = verdict is Ordering.PROPERLY_ORDERED
        out["ordering"] = verdict.value
        if verdict is not Ordering.PROPERLY_ORDERED:
            out["violations"].append(f"not properly ordered: {verdict.value}")
            out["ok"] = False
        if labels is not None and args.ifs:
            lrep = validate_labeling(EdgeLabeling(d, fio.load_ifs(args.ifs), labels))
            out["labeling"] = lrep.to_dict()
            if not lrep.ok:
                out["violations"].extend(lrep.violations)
                out["ok"] = False
    elif rep.ok:
        out["properly_ordered"] = None
    if args.json:
        text = fio.canonical_json(out)
    else:
        lines = [f"ok: {str(out['ok']).lower()}"]
        if "properly_ordered" in out:
            po = out["properly_ordered"]
            lines.append(f"properly_ordered: {'n/a' if po is None else str(po).lower()}")
        lines.append("full_connections: " + ",".join(
            str(x).lower() for x in out.get("full_connections", [])))
        lines += [f"violation: {v}" for v in out["violations"]]
        lines += [f"warning: {w}" for w in out["warnings"]]
        text = "\n".join(lines) + "\n"
    (sys.stdout if out["ok"] else sys.stderr).write(text)
    return 0 if out["ok"] else 1


def cmd_telescope(args):
    d, labels = _load_valid(args.diagram)
    t = telescope(d, _parse_ranks(args.cuts))
    _emit(args, fio.dump_diagram(t))
    return 0


def cmd_label_auto(args):
    d, _ = _load_valid(args.diagram)
    t, lab = auto_label(d, fio.load_ifs(args.ifs))
    _emit(args, fio.dump_diagram(t, lab.labels))
    return 0


def cmd_orbit(args):
    if args.ifs:
        lab = _labeled(args)
        pts = extended_orbit(_start_point(args, lab), lab, args.steps)
        _emit(args, fio.extended_orbit_csv(lab, pts, args.depth))
        return 0
    d, _ = _load_valid(args.diagram)
    x = _parse_point(d, args.point)
    pts = orbit(d, x, args.steps)
    _emit(args, fio.orbit_csv(d, pts, args.depth, lambda p: tail_tag(d, p)))
    return 0


def cmd_fiber(args):
    lab = _labeled(args)
    x = _parse_point(lab.diagram, args.point, lab)
    _emit(args, fio.canonical_json(fio.fiber_obj(fiber(x, lab, args.depth))))
    return 0


def cmd_measure(args):
    if args.ifs:
        lab = _labeled(args)
        prefix = ranks_to_edges(lab.diagram, _parse_ranks(args.prefix))
        value = lift_measure(lab, prefix)
    else:
        d, _ = _load_valid(args.diagram)
        value = cylinder_measure(d, ranks_to_edges(d, _parse_ranks(args.prefix)))
    text = str(value)
    _emit(args, fio.canonical_json({"measure": text}) if args.json else text + "\n")
    return 0


def cmd_k0(args):
    d, _ = _load_valid(args.diagram)
    a = _parse_k0(args.element)
    if args.equal:
        result = k0_equal(d, a, _parse_k0(args.equal))
        text = fio.canonical_json({"equal": result}) if args.json else f"{str(result).lower()}\n"
    else:
        b = k0_map(d, a, a.level if args.to_level is None else args.to_level)
        text = fio.canonical_json({"element": str(b)}) if args.json else f"{b}\n"
    _emit(args, text)
    return 0


def cmd_render(args):
    system = fio.load_ifs(args.ifs)
    fmt = args.format or ("pgm" if args.out and args.out.endswith(".pgm") else "csv")
    if fmt == "pgm":
        data = fio.pgm_bytes(fio.raster(system, args.depth))
        if not args.out:
            raise UsageError("PGM output needs --out")
        fio.write_atomic(args.out, data)
    else:
        _emit(args, fio.attractor_csv(system, args.depth))
    return 0


def cmd_probe(args):
    lab = _labeled(args)
    start = _start_point(args, lab)
    cyl = extended_cylinder(lab, ranks_to_edges(lab.diagram, _parse_ranks(args.target)))
    pieces = subregions(lab, cyl, args.eps_exp)
    if args.target_coord:
        c = _parse_coord(args.target_coord)
        pieces = [b for b in pieces if b.contains(c)]
        if not pieces:
            raise UsageError("--target-coord lies outside the target cylinder")
    results = []
    for box in pieces:
        step = density_probe(start, cyl, box, lab, args.budget)
        results.append({"region": fio.box_obj(box), "visited_at": step})
    if args.json:
        text = fio.canonical_json({"results": results})
    else:
        text = "".join(
            (f"VisitedAt({r['visited_at']})" if r["visited_at"] is not None else "NotWithinBudget")
            + " " + ",".join(f"[{lo},{hi}]" for lo, hi in r["region"]) + "\n" for r in results)
    _emit(args, text)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="cantorext", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, *opts):
        sp = sub.add_parser(name)
        sp.set_defaults(func=func)
        for opt in opts:
            opt(sp)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--out", help="write the artifact here instead of stdout")
        return sp

    diagram = lambda sp: sp.add_argument("--diagram", required=True)
    ifs_req = lambda sp: sp.add_argument("--ifs", required=True, help="preset name or IFS JSON path")
    ifs_opt = lambda sp: sp.add_argument("--ifs", help="preset name or IFS JSON path")
    point = lambda sp: sp.add_argument("--point", default="min",
                                       help="min | max | id:<ranks> | min:<ranks> | max:<ranks>")
    depth = lambda sp: sp.add_argument("--depth", type=int, default=3)
    coord = lambda sp: sp.add_argument("--coord", help="exact start coordinate p/q,...")

    add("validate", cmd_validate, diagram, ifs_opt)
    add("telescope", cmd_telescope, diagram,
        lambda sp: sp.add_argument("--cuts", required=True, help="ascending levels, e.g. 0,2"))
    add("label-auto", cmd_label_auto, diagram, ifs_req)
    add("orbit", cmd_orbit, diagram, ifs_opt, point, depth, coord,
        lambda sp: sp.add_argument("--steps", type=int, default=10))
    add("fiber", cmd_fiber, diagram, ifs_req, point, depth)
    add("measure", cmd_measure, diagram, ifs_opt,
        lambda sp: sp.add_argument("--prefix", default="", help="cylinder prefix ranks"))
    add("k0", cmd_k0, diagram,
        lambda sp: sp.add_argument("--element", required=True, help="level:v1,v2,..."),
        lambda sp: sp.add_argument("--to-level", type=int),
        lambda sp: sp.add_argument("--equal", help="second element to compare with"))
    add("render", cmd_render, ifs_req,
        lambda sp: sp.add_argument("--depth", type=int, default=3),
        lambda sp: sp.add_argument("--format", choices=["pgm", "csv"]))
    add("probe", cmd_probe, diagram, ifs_req, point, depth, coord,
        lambda sp: sp.add_argument("--target", required=True, help="target cylinder ranks"),
        lambda sp: sp.add_argument("--target-coord", help="pick the eps-piece containing this point"),
        lambda sp: sp.add_argument("--eps-exp", type=int, default=0, help="eps = lambda**K"),
        lambda sp: sp.add_argument("--budget", type=int, default=10_000))
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("depth", "steps", "budget", "eps_exp"):
        if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
            parser.error(f"--{name.replace('_', '-')} must be non-negative")
    try:
        return args.func(args)
    except ValidationFailed as exc:
        if getattr(args, "json", False):
            sys.stderr.write(fio.canonical_json({"ok": False, "violations": exc.violations}))
        else:
            sys.stderr.write("".join(f"violation: {v}\n" for v in exc.violations))
        return 1
    except (FormatError, UsageError, UnknownPreset, InvalidPath, BadCuts, LevelOutOfRange, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except NotStationary as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except CantorExtError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
