"""The extension (X~, phi~) of a Bratteli-Vershik system by an edge-labeled IFS.

Every edge e carries a map f_e, either one of the IFS maps or the identity.
A point of X~ is a pair (x, c) with c in f_{x_1} o ... o f_{x_n}(C) for all n.
Along paths whose labels are eventually the identity (Type 2) the fiber is a
copy of C and coordinates are tracked exactly; along the other paths (Type 1)
the fiber is a single point, represented by the nested boxes that pin it down.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from . import _periodic
from .bratteli import (
    OrderedBratteliDiagram,
    Ordering,
    ValidationReport,
    check_properly_ordered,
    greedy_cuts,
    reverse_order,
    telescope,
    unroll,
)
from .errors import (
    IdSubgraphNotSinglePath,
    IsMaximumPath,
    NoAvoidingPath,
    NotInImage,
    NotProperlyOrdered,
)
from .ifs import (
    IDENTITY,
    ContractionSystem,
    apply_all,
    composition_fixed_point,
    cover_check,
    image_box,
    invert,
    preimage_box,
    invert_all,
    uncovered_cells,
)
from .vershik import (
    PathPoint,
    _shift,
    cylinder_measure,
    min_point,
)


@dataclass(frozen=True)
class EdgeLabeling:
    """Assignment e -> f_e; ``labels[n-1][i]`` is a map index into ``system.maps`` or None (identity)."""
    diagram: OrderedBratteliDiagram
    system: ContractionSystem
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(tuple(level) for level in self.labels))
        if [len(x) for x in self.labels] != [len(x) for x in self.diagram.edges]:
            raise ValueError("labels must give one entry per edge at every stored level")

    def label_index(self, n, idx):
        return self.labels[self.diagram.base_level(n) - 1][idx]

    def label(self, n, idx):
        i = self.label_index(n, idx)
        return IDENTITY if i is None else self.system.maps[i]

    def is_identity(self, n, idx) -> bool:
        return self.label_index(n, idx) is None

    def maps(self, x, n):
        """[f_{x_1}, ..., f_{x_n}] for a PathPoint or a finite path."""
        edges = x.edges(n) if isinstance(x, PathPoint) else tuple(x)[:n]
        return [self.label(i + 1, e) for i, e in enumerate(edges)]

    @cached_property
    def reversed(self) -> "EdgeLabeling":
        """The same labels on the order-reversed diagram."""
        return EdgeLabeling(reverse_order(self.diagram), self.system, self.labels)

    def with_label(self, n, idx, value) -> "EdgeLabeling":
        labels = [list(level) for level in self.labels]
        labels[n - 1][idx] = value
        return EdgeLabeling(self.diagram, self.system, labels)


# -- building and checking labelings -------------------------------------------

def _allowed_path(d, a, u, b, w, allowed):
    """Lowest-rank path from (a, u) to (b, w) using edges with ``allowed(n, idx)``; None if none."""
    can = [set() for _ in range(b + 1)]
    can[b] = {w}
    for n in range(b, a, -1):
        can[n - 1] = {e.source for i, e in enumerate(d.edges_at(n))
                      if e.range in can[n] and allowed(n, i)}
    if u not in can[a]:
        return None
    path, v = [], u
    for n in range(a + 1, b + 1):
        options = [i for i in d.out_edges(n, v) if allowed(n, i) and d.edges_at(n)[i].range in can[n]]
        i = min(options, key=lambda i: (d.edges_at(n)[i].order, i))
        path.append(i)
        v = d.edges_at(n)[i].range
    return path


def _find_avoiding_cycle(d):
    """(u, prefix path to u at level k, block path u -> u) through non-extreme edges, else None."""
    k, L = d.repeat_from, d.depth
    allowed = lambda n, i: not d.is_max(n, i) and not d.is_min(n, i)
    for u in range(d.num_vertices(k)):
        loop = _allowed_path(d, k, u, L, u, allowed)
        if loop is None:
            continue
        head = _allowed_path(d, 0, 0, k, u, allowed) if k else []
        if head is not None:
            return u, head, loop
    return None


def _block_cycle_length(d):
    """Shortest c such that some vertex returns to itself through c non-extreme blocks."""
    k, L = d.repeat_from, d.depth
    allowed = lambda n, i: not d.is_max(n, i) and not d.is_min(n, i)
    nv = d.num_vertices(k)
    step = {u: {w for w in range(nv) if _allowed_path(d, k, u, L, w, allowed) is not None}
            for u in range(nv)}
    best = None
    for u in range(nv):
        frontier = {u}
        for c in range(1, nv + 1):
            frontier = set().union(*(step[w] for w in frontier)) if frontier else set()
            if u in frontier:
                best = c if best is None else min(best, c)
                break
    return best


def auto_label(d: OrderedBratteliDiagram, sys: ContractionSystem):
    """Telescope ``d`` and label its edges so that the three labeling conditions hold.

    Returns ``(telescoped diagram, EdgeLabeling)``.  The identity-labeled
    edges form a single infinite path avoiding maximal and minimal edges; the
    other edges out of each vertex are labeled round-robin by order rank, which
    maps them onto the whole IFS.
    """
    d.require_stationary()
    if check_properly_ordered(d) is not Ordering.PROPERLY_ORDERED:
        raise NotProperlyOrdered("auto_label needs a properly ordered diagram")
    nmaps = len(sys.maps)
    t = telescope(d, greedy_cuts(d, max(nmaps + 1, 3)))
    found = _find_avoiding_cycle(t)
    if found is None:
        c = _block_cycle_length(t)
        if c is not None:
            t = unroll(t, copies=c)
            found = _find_avoiding_cycle(t)
    tries = 0
    while found is None and tries < max(1, t.num_vertices(t.repeat_from)):
        t = unroll(t, prefix_blocks=1)
        found = _find_avoiding_cycle(t)
        tries += 1
    if found is None:
        raise NoAvoidingPath("no infinite path avoids maximal and minimal edges")
    _, head, loop = found
    id_path = list(head) + list(loop)
    labels = []
    for n, level in enumerate(t.edges, start=1):
        row = [None] * len(level)
        for w in range(t.num_vertices(n - 1)):
            rest = [i for i in t.out_edges(n, w) if i != id_path[n - 1]]
            rest.sort(key=lambda i: (level[i].order, level[i].range, i))
            for j, i in enumerate(rest):
                row[i] = j % nmaps
        labels.append(row)
    return t, EdgeLabeling(t, sys, labels)


def _id_graph(lab, only_identity):
    d = lab.diagram
    k, L = d.repeat_from, d.depth
    node = lambda n, v: (k if n == L else n, v)
    graph = {}
    for n in range(1, L + 1):
        for i, e in enumerate(d.edges_at(n)):
            if only_identity and not lab.is_identity(n, i):
                continue
            graph.setdefault(node(n - 1, e.source), []).append((node(n, e.range), (n, i)))
    return graph


def _reachable(graph, start):
    seen, stack = {start}, [start]
    while stack:
        a = stack.pop()
        for b, _ in graph.get(a, []):
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return seen


def _has_cycle(graph, nodes):
    """Whether the subgraph induced on ``nodes`` (closed under successors) contains a cycle."""
    nodes = set(nodes)
    changed = True
    while changed:
        changed = False
        for a in list(nodes):
            if not any(b in nodes for b, _ in graph.get(a, [])):
                nodes.discard(a)
                changed = True
    return bool(nodes)


def identity_path_condition(lab: EdgeLabeling) -> str:
    """"strong" if the identity edges contain an infinite path from v_0,
    "weak" if some infinite path meets identity edges infinitely often, else "fail"."""
    idg = _id_graph(lab, True)
    if _has_cycle(idg, _reachable(idg, (0, 0))):
        return "strong"
    full = _id_graph(lab, False)
    reach = _reachable(full, (0, 0))
    for a, outs in full.items():
        if a not in reach:
            continue
        for b, (n, i) in outs:
            if lab.is_identity(n, i) and a in _reachable(full, b):
                return "weak"
    return "fail"


def validate_labeling(lab: EdgeLabeling) -> ValidationReport:
    d, sys = lab.diagram, lab.system
    rep = ValidationReport()
    d.require_stationary()
    bad1 = []
    for n in range(1, d.depth + 1):
        for i in range(len(d.edges_at(n))):
            if lab.is_identity(n, i) and (d.is_max(n, i) or d.is_min(n, i)):
                kind = "maximal" if d.is_max(n, i) else "minimal"
                bad1.append({"level": n, "edge": i})
                rep.violations.append(f"condition 1: {kind} edge {i} at level {n} is labeled Identity")
    bad2 = []
    for n in range(1, d.depth + 1):
        for w in range(d.num_vertices(n - 1)):
            maps = [lab.label(n, i) for i in d.out_edges(n, w) if not lab.is_identity(n, i)]
            if not cover_check(maps, sys):
                gaps = uncovered_cells(maps, sys)
                bad2.append({"level": n - 1, "vertex": w, "uncovered": [str(g) for g in gaps]})
                rep.violations.append(
                    f"condition 2: non-identity images out of vertex {w} at level {n - 1} "
                    f"miss {_fmt_gaps(gaps)}")
    c3 = identity_path_condition(lab)
    if c3 == "fail":
        rep.violations.append("condition 3: no infinite path meets identity edges infinitely often")
    elif c3 == "weak":
        rep.warnings.append("condition 3 holds only in its weak form (identity labels infinitely often)")
    rep.details.update(condition1=bad1, condition2=bad2, condition3=c3)
    return rep


def _fmt_gaps(gaps):
    out = []
    for g in gaps:
        if isinstance(g, tuple) and g and isinstance(g[0], tuple):
            out.append("x".join(f"[{lo},{hi}]" for lo, hi in g))
        else:
            out.append(f"digit {g}")
    return ", ".join(out)


def identity_edges(lab: EdgeLabeling):
    return [[i for i in range(len(level)) if lab.is_identity(n, i)]
            for n, level in enumerate(lab.diagram.edges, start=1)]


def id_single_path(lab: EdgeLabeling) -> bool:
    """Whether the identity edges form exactly one infinite path from v_0."""
    d = lab.diagram
    ids = identity_edges(lab)
    if any(len(x) != 1 for x in ids):
        return False
    v = 0
    for n, (i,) in enumerate(ids, start=1):
        e = d.edges_at(n)[i]
        if e.source != v:
            return False
        v = e.range
    first_block = d.edges_at(d.repeat_from + 1)[ids[d.repeat_from][0]]
    return first_block.source == v


def identity_point(lab: EdgeLabeling, prefix=()):
    """A Type 2 point: ``prefix`` continued by identity-labeled edges forever."""
    from .vershik import path_point
    d = lab.diagram
    k = d.repeat_from
    prefix = tuple(prefix)
    v = d.check_path(prefix)
    n = len(prefix)
    idg = _id_graph(lab, True)
    start = (k + d.phase(n) if n >= k else n, v)
    seen = {start: []}
    # depth-first walk along identity edges until a node repeats inside the block
    node, trail = start, []
    while True:
        outs = idg.get(node, [])
        if not outs:
            raise NotInImage(f"no identity-labeled continuation from vertex {v} at level {n}")
        nxt, (_, i) = min(outs, key=lambda o: (d.edges_at(o[1][0])[o[1][1]].order, o[1][1]))
        trail.append(i)
        node = nxt
        if node in seen:
            j = len(seen[node])
            tail = trail[j:]
            head = trail[:j]
            if node[0] < k:
                raise NotInImage("identity continuation does not reach the repeating block")
            return path_point(d, prefix + tuple(head), tuple(tail))
        seen[node] = list(trail)


# -- fibers ------------------------------------------------------------------

@dataclass(frozen=True)
class Type1:
    """Infinitely many non-identity labels; non-identity positions are listed lazily."""
    prefix_positions: tuple
    prefix_length: int
    cycle_offsets: tuple
    cycle_length: int

    def positions(self, depth):
        out = [p for p in self.prefix_positions if p <= depth]
        n = self.prefix_length
        while n < depth:
            out.extend(n + o for o in self.cycle_offsets if n + o <= depth)
            n += self.cycle_length
        return out


@dataclass(frozen=True)
class Type2:
    """Labels beyond ``split`` are all the identity."""
    split: int


def classify_point(x: PathPoint, lab: EdgeLabeling):
    n = len(x.prefix)
    offs = tuple(o + 1 for o, idx in enumerate(x.cycle) if not lab.is_identity(n + o + 1, idx))
    if offs:
        pos = tuple(i for i in range(1, n + 1) if not lab.is_identity(i, x.edge(i)))
        return Type1(pos, n, offs, len(x.cycle))
    split = n
    while split > 0 and lab.is_identity(split, x.edge(split)):
        split -= 1
    return Type2(split)


@dataclass(frozen=True)
class ExtendedCylinder:
    """X~_n(p): paths through p times f_{p_1} o ... o f_{p_n}(C)."""
    path: tuple
    region: object


def extended_cylinder(lab: EdgeLabeling, path) -> ExtendedCylinder:
    path = tuple(path)
    lab.diagram.check_path(path)
    return ExtendedCylinder(path, image_box(lab.system, lab.maps(path, len(path))))


@dataclass(frozen=True)
class Singleton:
    box: object
    nonidentity: int


@dataclass(frozen=True)
class Copy:
    cylinder: ExtendedCylinder


def fiber(x: PathPoint, lab: EdgeLabeling, depth: int):
    """pi^{-1}(x): a Copy of C for Type 2 points, else a box around the single point."""
    kind = classify_point(x, lab)
    if isinstance(kind, Type2):
        return Copy(extended_cylinder(lab, x.edges(kind.split)))
    maps = lab.maps(x, depth)
    return Singleton(image_box(lab.system, maps), sum(f is not IDENTITY for f in maps))


def type1_coordinate(x: PathPoint, lab: EdgeLabeling):
    """Exact c_x for a Type 1 point: the image of the fixed point of its label cycle."""
    n = len(x.prefix)
    cyc = [lab.label(n + o + 1, idx) for o, idx in enumerate(x.cycle)]
    return apply_all(lab.maps(x, n), composition_fixed_point(cyc))


# -- points of X~ and the extended map ---------------------------------------

@dataclass(frozen=True)
class Exact:
    """Type 2 coordinate: actual c = f_{x_1} o ... o f_{x_split}(pulled)."""
    split: int = field(compare=False)
    pulled: object = field(compare=False)
    actual: object


@dataclass(frozen=True)
class Bounded:
    """Type 1 coordinate, known through the box of the first ``depth`` labels."""
    depth: int = field(compare=False)
    box: object = field(compare=False)


@dataclass(frozen=True)
class ExtendedPoint:
    base: PathPoint
    coord: object

    @property
    def exact(self) -> bool:
        return isinstance(self.coord, Exact)


def exact_point(lab: EdgeLabeling, x: PathPoint, c) -> ExtendedPoint:
    """(x, c) for a Type 2 path x and an actual coordinate c in its fiber."""
    kind = classify_point(x, lab)
    if not isinstance(kind, Type2):
        raise ValueError("exact coordinates need a Type 2 path")
    pulled = invert_all(lab.maps(x, kind.split), c)
    if pulled is None:
        raise NotInImage(f"{c} is not in the fiber over this path")
    return ExtendedPoint(x, Exact(kind.split, pulled, c))


def exact_from_pulled(lab: EdgeLabeling, x: PathPoint, pulled, split=None) -> ExtendedPoint:
    kind = classify_point(x, lab)
    if not isinstance(kind, Type2):
        raise ValueError("exact coordinates need a Type 2 path")
    split = kind.split if split is None else split
    if split < kind.split:
        raise ValueError(f"split {split} is below the identity tail start {kind.split}")
    return ExtendedPoint(x, Exact(split, pulled, apply_all(lab.maps(x, split), pulled)))


def bounded_point(lab: EdgeLabeling, x: PathPoint, depth: int = 40) -> ExtendedPoint:
    if not isinstance(classify_point(x, lab), Type1):
        raise ValueError("bounded coordinates are for Type 1 paths")
    return ExtendedPoint(x, Bounded(depth, image_box(lab.system, lab.maps(x, depth))))


def coordinate(p: ExtendedPoint, lab: EdgeLabeling):
    """Actual fiber coordinate: exact for Type 2, exact limit for eventually periodic Type 1."""
    if isinstance(p.coord, Exact):
        return p.coord.actual
    return type1_coordinate(p.base, lab)


def type2_formula(lab: EdgeLabeling, x: PathPoint, y: PathPoint, n: int, c):
    """f_{y_1} o ... o f_{y_n} o f_{x_n}^{-1} o ... o f_{x_1}^{-1} (c), evaluated literally."""
    pulled = invert_all(lab.maps(x, n), c)
    if pulled is None:
        raise NotInImage(f"{c} is not in the image of the first {n} labels of x")
    return apply_all(lab.maps(y, n), pulled)


def extended_step(p: ExtendedPoint, lab: EdgeLabeling) -> ExtendedPoint:
    """phi~ on a point of X~."""
    d = lab.diagram
    x = p.base
    if isinstance(p.coord, Exact):
        y, j = _shift(d, x, True)
        # levels beyond j are shared by x and y, so only the first j labels move c
        c = invert_all(lab.maps(x, j), p.coord.actual)
        if c is None:
            raise NotInImage("coordinate left its fiber")
        actual = apply_all(lab.maps(y, j), c)
        return ExtendedPoint(y, Exact(max(p.coord.split, j), p.coord.pulled, actual))
    depth = p.coord.depth
    try:
        y, j = _shift(d, x, True)
    except IsMaximumPath:
        y, j = min_point(d), None
    if j is None or j > depth:
        return ExtendedPoint(y, Bounded(depth, image_box(lab.system, lab.maps(y, depth))))
    # the labels past level j are shared, so only the first j maps are swapped
    inner = preimage_box(lab.system, lab.maps(x, j), p.coord.box)
    return ExtendedPoint(y, Bounded(depth, image_box(lab.system, lab.maps(y, j), inner)))


def extended_inverse_step(p: ExtendedPoint, lab: EdgeLabeling) -> ExtendedPoint:
    """phi~^{-1}: the extended map of the order-reversed diagram, same labels."""
    return extended_step(p, lab.reversed)


def extended_orbit(p: ExtendedPoint, lab: EdgeLabeling, k: int) -> list:
    out = [p]
    for _ in range(k):
        out.append(extended_step(out[-1], lab))
    return out


@dataclass(frozen=True)
class SemiconjugacyResult:
    ok: bool
    first_divergence: int | None = None

    def __bool__(self):
        return self.ok


def check_semiconjugacy(p: ExtendedPoint, lab: EdgeLabeling, k: int, step=None) -> SemiconjugacyResult:
    """Compare pi(phi~^i(p)) with phi_E^i(pi(p)) for i = 0..k."""
    from .vershik import vershik_map
    step = step or extended_step
    q, x = p, p.base
    for i in range(k + 1):
        if q.base != x:
            return SemiconjugacyResult(False, i)
        if i < k:
            q, x = step(q, lab), vershik_map(lab.diagram, x)
    return SemiconjugacyResult(True)


# -- density probes ----------------------------------------------------------

def subregions(lab: EdgeLabeling, cyl: ExtendedCylinder, eps_exp: int) -> list:
    """Split the cylinder's region into pieces of diameter lambda**eps_exp."""
    sys = lab.system
    region = cyl.region
    if sys.kind == "digit":
        extra = max(0, eps_exp - len(region.prefix))
        return [type(region)(region.prefix + w, region.base, region.dimension)
                for w in itertools.product(sorted(sys.digits), repeat=extra)]
    eps = sys.ratio ** eps_exp
    if region.side <= eps:
        return [region]
    m = region.side / eps
    if m.denominator != 1:
        raise ValueError(f"region side {region.side} is not a multiple of {eps}")
    cells = []
    for idx in itertools.product(range(int(m)), repeat=sys.dimension):
        lower = tuple(a + i * eps for a, i in zip(region.lower, idx))
        cells.append(type(region)(lower, eps))
    return cells


def _inside(p: ExtendedPoint, path, box, lab):
    if p.base.edges(len(path)) != tuple(path):
        return False
    if isinstance(p.coord, Exact):
        return box.contains(p.coord.actual)
    return box.contains_box(p.coord.box)


def first_visits(start: ExtendedPoint, targets, lab: EdgeLabeling, budget: int) -> dict:
    """First step at which the orbit enters each ``(path, box)`` target, within ``budget`` steps."""
    pending = {t: None for t in targets}
    found = {}
    p = start
    for step in range(budget + 1):
        for t in list(pending):
            if _inside(p, t[0], t[1], lab):
                found[t] = step
                del pending[t]
        if not pending or step == budget:
            break
        p = extended_step(p, lab)
    return found


def density_probe(start: ExtendedPoint, target: ExtendedCylinder, subregion, lab: EdgeLabeling,
                  budget: int):
    """First step whose point lies over ``target.path`` with coordinate in ``subregion``.

    Returns None when not reached within ``budget`` steps, which is
    inconclusive rather than evidence against minimality.
    """
    key = (tuple(target.path), subregion)
    return first_visits(start, [key], lab, budget).get(key)


def backward_solve(lab: EdgeLabeling, n: int, v: int, c):
    """Some non-identity edge e of E_n out of v and d with f_e(d) = c."""
    d = lab.diagram
    for i in d.out_edges(n, v):
        if lab.is_identity(n, i):
            continue
        pre = invert(lab.label(n, i), c)
        if pre is not None:
            return i, pre
    return None


def path_rank(d: OrderedBratteliDiagram, path) -> int:
    """Position of ``path`` among depth-n paths with the same end vertex (right-to-left order)."""
    counts = [1]
    rank = 0
    for n in range(1, len(path) + 1):
        nxt = [0] * d.num_vertices(n)
        for e in d.edges_at(n):
            nxt[e.range] += counts[e.source]
        e = d.edges_at(n)[path[n - 1]]
        below = sum(counts[d.edges_at(n)[i].source] for i in d.in_edges(n, e.range)
                    if d.edges_at(n)[i].order < e.order)
        rank += below
        counts = nxt
    return rank


def approach(lab: EdgeLabeling, start: ExtendedPoint, target: ExtendedPoint, m: int, extra: int):
    """Cofinal surgery: a step count k with phi~^k(start) close to ``target``.

    The target must be Type 2 with split <= m.  Levels ``m+1 .. m+extra`` of
    the new path use non-identity edges solving f_{z_l}(d_l) = d_{l-1}, level
    ``m+extra+1`` bridges to the start's path, and beyond that the path equals
    the start's.  Returns ``(k, z)`` where z is the reached base path.
    """
    from .vershik import path_point
    d = lab.diagram
    x = start.base
    if not isinstance(target.coord, Exact) or target.coord.split > m:
        raise ValueError("target must be an exact point with split <= m")
    z = list(target.base.edges(m))
    dm = invert_all(lab.maps(z, m), target.coord.actual)
    v = d.end_vertex(z)
    cur = dm
    for level in range(m + 1, m + extra + 1):
        i, cur = backward_solve(lab, level, v, cur)
        z.append(i)
        v = d.edges_at(level)[i].range
    top = m + extra + 1
    goal = d.edges_at(top + 1)[x.edge(top + 1)].source
    bridge = [i for i in d.out_edges(top, v) if d.edges_at(top)[i].range == goal]
    if not bridge:
        raise NoAvoidingPath(f"no edge joins vertex {v} to vertex {goal} at level {top}")
    z.append(bridge[0])
    prefix, cycle = _periodic.advance(x.prefix, x.cycle, top)
    zp = path_point(d, tuple(z) + prefix[top:], cycle)
    k = path_rank(d, zp.edges(top)) - path_rank(d, x.edges(top))
    return k, zp


def lift_measure(lab: EdgeLabeling, path):
    """Measure of X~_n(p) under the lift of the unique invariant measure on X_E."""
    lab.diagram.require_stationary()
    if not id_single_path(lab):
        raise IdSubgraphNotSinglePath("identity-labeled edges do not form a single infinite path")
    return cylinder_measure(lab.diagram, tuple(path))
