"""Path space X_E of a stationary ordered Bratteli diagram and the Vershik map.

A point of X_E is an eventually periodic path: a finite prefix followed by a
cycle of edges repeated forever.  The cycle starts at a level ``>= k`` (the
start of the repeating block) and its length is a multiple of the block
length, so every edge in it is read against the right stored edge level.
Prefix and cycle are kept in canonical (shortest) form, which makes ``==``
on :class:`PathPoint` equality of infinite paths.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

import numpy as np
import sympy

from . import _periodic
from .bratteli import OrderedBratteliDiagram, extreme_path, incidence_matrix, transfer_matrix
from .errors import (
    DepthExhausted,
    InvalidPath,
    IsMaximumPath,
    IsMinimumPath,
    LevelOutOfRange,
    NotPrimitive,
    UndecidableNonInjective,
)


@dataclass(frozen=True)
class PathPoint:
    prefix: tuple
    cycle: tuple

    def edge(self, n: int) -> int:
        """Edge index x_n (levels are 1-based)."""
        return _periodic.item(self.prefix, self.cycle, n - 1)

    def edges(self, n: int) -> tuple:
        return _periodic.take(self.prefix, self.cycle, n)


def path_point(d: OrderedBratteliDiagram, prefix, cycle, check: bool = True) -> PathPoint:
    """Canonical point ``prefix + cycle + cycle + ...`` of X_E."""
    d.require_stationary()
    prefix, cycle = tuple(prefix), tuple(cycle)
    k, B = d.repeat_from, d.block_length
    if not cycle or len(cycle) % B:
        raise InvalidPath(f"cycle length {len(cycle)} is not a positive multiple of {B}")
    if len(prefix) < k:
        prefix, cycle = _periodic.advance(prefix, cycle, k)
    if check:
        v = d.check_path(prefix)
        u = v
        for i, idx in enumerate(cycle):
            n = len(prefix) + i + 1
            level = d.edges_at(n)
            if not 0 <= idx < len(level) or level[idx].source != u:
                raise InvalidPath(f"tail edge {idx} at level {n} does not continue the path")
            u = level[idx].range
        if u != v:
            raise InvalidPath("tail cycle does not return to its starting vertex")
    p, c = _periodic.canonical(prefix, cycle, min_prefix=k, period_multiple=B)
    return PathPoint(p, c)


def extreme_point(d: OrderedBratteliDiagram, which: str) -> PathPoint:
    """x^max (``which="max"``) or x^min as an exact eventually periodic point."""
    k, B = d.repeat_from, d.block_length
    edges = extreme_path(d, which, k + B)
    return path_point(d, edges[:k], edges[k:], check=False)


def max_point(d):
    return extreme_point(d, "max")


def min_point(d):
    return extreme_point(d, "min")


def with_tail(d: OrderedBratteliDiagram, prefix, tail) -> PathPoint:
    """Continue ``prefix`` by the x^min tail (``"min"``), x^max tail (``"max"``), or a cycle.

    The min/max continuation exists only when the prefix ends on the vertex
    that x^min (x^max) passes through at that level.
    """
    prefix = tuple(prefix)
    if tail not in ("min", "max"):
        return path_point(d, prefix, tail)
    k, B = d.repeat_from, d.block_length
    n = len(prefix)
    top = max(n, k)
    ext = extreme_path(d, tail, top + B)
    end = d.check_path(prefix)
    if n and d.edges_at(n)[ext[n - 1]].range != end:
        raise InvalidPath(f"prefix does not end on the vertex of x^{tail} at level {n}")
    return path_point(d, prefix + ext[n:top], ext[top:], check=False)


def tail_tag(d: OrderedBratteliDiagram, x: PathPoint, labeling=None) -> str:
    """One of "max", "min", "id" (all tail labels Identity) or "periodic"."""
    for which in ("max", "min"):
        n = len(x.prefix)
        ext = extreme_path(d, which, n + len(x.cycle))
        if all(x.edge(i) == ext[i - 1] for i in range(n + 1, n + len(x.cycle) + 1)):
            return which
    if labeling is not None and all(labeling.is_identity(len(x.prefix) + i + 1, idx)
                                     for i, idx in enumerate(x.cycle)):
        return "id"
    return "periodic"


def _first_non_extreme(d, x, which):
    bound = len(x.prefix) + len(x.cycle)
    for n in range(1, bound + 1):
        idx = x.edge(n)
        if not (d.is_max(n, idx) if which == "max" else d.is_min(n, idx)):
            return n
    return None


def _shift(d: OrderedBratteliDiagram, x: PathPoint, forward: bool):
    """Successor (forward) or predecessor of ``x``, and the deepest changed level."""
    top, bottom = ("max", "min") if forward else ("min", "max")
    j = _first_non_extreme(d, x, top)
    if j is None:
        raise (IsMaximumPath if forward else IsMinimumPath)("no successor" if forward else "no predecessor")
    prefix, cycle = _periodic.advance(x.prefix, x.cycle, j)
    e = d.edges_at(j)[prefix[j - 1]]
    ins = d.in_edges(j, e.range)
    pos = ins.index(prefix[j - 1])
    new = ins[pos + 1] if forward else ins[pos - 1]
    head = [new]
    v = d.edges_at(j)[new].source
    for n in range(j - 1, 0, -1):
        idx = d.extreme_in_edge(n, v, bottom)
        head.append(idx)
        v = d.edges_at(n)[idx].source
    return path_point(d, tuple(reversed(head)) + prefix[j:], cycle, check=False), j


def successor(d: OrderedBratteliDiagram, x: PathPoint) -> PathPoint:
    """Next path in the right-to-left lexicographic order; raises IsMaximumPath at x^max."""
    return _shift(d, x, True)[0]


def predecessor(d: OrderedBratteliDiagram, x: PathPoint) -> PathPoint:
    return _shift(d, x, False)[0]


def vershik_map(d: OrderedBratteliDiagram, x: PathPoint) -> PathPoint:
    """phi_E: successor, with x^max sent to x^min."""
    try:
        return successor(d, x)
    except IsMaximumPath:
        return min_point(d)


def inverse_vershik_map(d: OrderedBratteliDiagram, x: PathPoint) -> PathPoint:
    try:
        return predecessor(d, x)
    except IsMinimumPath:
        return max_point(d)


def orbit(d: OrderedBratteliDiagram, x: PathPoint, k: int) -> list:
    """``[x, phi(x), ..., phi^k(x)]``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = [x]
    for _ in range(k):
        out.append(vershik_map(d, out[-1]))
    return out


def metric_dE(x: PathPoint, y: PathPoint, resolution: int) -> Fraction:
    """2^-m for the common prefix length m, or 0 if x, y agree to ``resolution``."""
    for m in range(resolution):
        if x.edge(m + 1) != y.edge(m + 1):
            return Fraction(1, 2 ** m)
    return Fraction(0)


def cylinder_points(d: OrderedBratteliDiagram, n: int) -> list:
    """All finite paths of depth ``n`` from v_0."""
    paths = [()]
    for level in range(1, n + 1):
        nxt = []
        for p in paths:
            v = d.end_vertex(p) if p else 0
            nxt.extend(p + (i,) for i in d.out_edges(level, v))
        paths = nxt
    return paths


# -- invariant measures ------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    @property
    def width(self):
        return self.hi - self.lo

    def __contains__(self, x):
        return self.lo <= x <= self.hi

    def __str__(self):
        return f"[{self.lo},{self.hi}]"


def is_primitive(a) -> bool:
    """Some power of the non-negative square matrix ``a`` is strictly positive (Wielandt bound)."""
    b = (np.asarray(a, dtype=object) > 0).astype(int)
    n = b.shape[0]
    p = b.copy()
    for _ in range((n - 1) ** 2 + 1):
        if p.min() > 0:
            return True
        p = (p @ b > 0).astype(int)
    return bool(p.min() > 0)


def block_matrix(d: OrderedBratteliDiagram):
    k = d.repeat_from
    return transfer_matrix(d, k, d.depth)


@lru_cache(maxsize=64)
def perron_vector(d: OrderedBratteliDiagram):
    """Exact (eigenvalue, positive left Perron vector) of the block matrix, or None if irrational.

    The vector ``p`` satisfies ``A^T p = lambda p`` for the block matrix A.
    """
    d.require_stationary()
    a = block_matrix(d)
    if not is_primitive(a):
        raise NotPrimitive("repeating-block incidence matrix is not primitive")
    lam_f = max(abs(np.linalg.eigvals(np.array(a, dtype=float))))
    lam = int(round(lam_f))
    at = sympy.Matrix(a.T.tolist())
    ns = (at - lam * sympy.eye(at.shape[0])).nullspace() if lam > 0 else []
    if len(ns) != 1:
        return None
    vec = [Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in ns[0]]
    if vec[0] < 0:
        vec = [-x for x in vec]
    if any(x <= 0 for x in vec):
        return None
    return lam, tuple(vec)


def _measure_setup(d, path):
    d.require_stationary()
    d.check_path(path)
    k, B = d.repeat_from, d.block_length
    n = len(path)
    top = k + B * max(0, -(-(n - k) // B))
    v = d.end_vertex(path)
    below = transfer_matrix(d, n, top)[:, v]
    total = transfer_matrix(d, 0, top)[:, 0]
    return below, total


def cylinder_measure(d: OrderedBratteliDiagram, path, tol=Fraction(1, 10 ** 12), max_blocks=100_000):
    """Invariant measure of the cylinder of ``path``.

    Returns a ``Fraction`` when the Perron eigenvector of the block matrix is
    rational, otherwise an :class:`Interval` of width ``<= tol`` certified by
    path-count ratios.
    """
    pv = perron_vector(d)
    below, total = _measure_setup(d, path)
    if pv is not None:
        _, vec = pv
        return (sum(Fraction(int(b)) * p for b, p in zip(below, vec))
                / sum(Fraction(int(t)) * p for t, p in zip(total, vec)))
    return measure_bounds(d, path, tol, max_blocks)


def measure_bounds(d: OrderedBratteliDiagram, path, tol=Fraction(1, 10 ** 12), max_blocks=100_000):
    """Certified enclosure of the cylinder measure from path-count ratios.

    For every vertex c deep in the diagram the measure lies between the
    extremes of (#paths from the cylinder's end to c) / (#paths from v_0 to c);
    the enclosure tightens as the level grows.
    """
    if not is_primitive(block_matrix(d)):
        raise NotPrimitive("repeating-block incidence matrix is not primitive")
    below, total = _measure_setup(d, path)
    a = block_matrix(d)
    for _ in range(max_blocks):
        if min(total) > 0:
            ratios = [Fraction(int(g), int(h)) for g, h in zip(below, total)]
            box = Interval(min(ratios), max(ratios))
            if box.width <= tol:
                return box
        below, total = a.dot(below), a.dot(total)
    raise DepthExhausted(f"measure enclosure wider than {tol} after {max_blocks} blocks")


# -- K^0 as a direct limit ----------------------------------------------------

@dataclass(frozen=True)
class K0Element:
    level: int
    vector: tuple

    def __str__(self):
        return f"{self.level}:" + ",".join(str(x) for x in self.vector)


def k0_map(d: OrderedBratteliDiagram, a: K0Element, to_level: int) -> K0Element:
    if to_level < a.level:
        raise LevelOutOfRange(f"cannot map level {a.level} down to {to_level}")
    if len(a.vector) != d.num_vertices(a.level):
        raise ValueError(f"vector length {len(a.vector)} != #V_{a.level}")
    v = np.array(a.vector, dtype=object)
    for n in range(a.level + 1, to_level + 1):
        v = incidence_matrix(d, n).dot(v)
    return K0Element(to_level, tuple(int(x) for x in v))


def _injective_from(d, m):
    last = d.depth if not d.stationary else max(m, d.depth) + d.block_length
    for n in range(m + 1, last + 1):
        mat = sympy.Matrix(incidence_matrix(d, n).tolist())
        if mat.rank() < mat.shape[1]:
            return n
    return None


def k0_equal(d: OrderedBratteliDiagram, a: K0Element, b: K0Element) -> bool:
    """Equality in lim (Z^{V_n}, M_n), decided at the common level."""
    m = max(a.level, b.level)
    bad = _injective_from(d, m)
    if bad is not None:
        raise UndecidableNonInjective(f"incidence matrix at level {bad} is not injective")
    return k0_map(d, a, m).vector == k0_map(d, b, m).vector
