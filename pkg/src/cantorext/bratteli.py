"""Ordered Bratteli diagrams: structure, proper ordering, telescoping.

A diagram is stored as levels ``V_0 .. V_L`` and edge sets ``E_1 .. E_L``.
When ``repeat_from = k`` is set, the block of edge sets ``E_{k+1} .. E_L``
repeats forever, level ``L`` being identified with level ``k``.  Paths are
plain tuples of edge indices, entry ``i`` indexing into ``edges_at(i + 1)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    BadCuts,
    CannotTelescope,
    InvalidPath,
    LevelOutOfRange,
    NotProperlyOrdered,
    NotStationary,
)


@dataclass(frozen=True)
class Edge:
    source: int
    range: int
    order: int


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self):
        return {"ok": self.ok, "violations": list(self.violations),
                "warnings": list(self.warnings), **self.details}


class Ordering(enum.Enum):
    PROPERLY_ORDERED = "properly_ordered"
    MULTIPLE_MAX_PATHS = "multiple_max_paths"
    MULTIPLE_MIN_PATHS = "multiple_min_paths"
    BOTH = "both"


@dataclass(frozen=True)
class OrderedBratteliDiagram:
    levels: tuple
    edges: tuple
    repeat_from: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(tuple(v) for v in self.levels))
        object.__setattr__(self, "edges", tuple(
            tuple(e if isinstance(e, Edge) else Edge(*e) for e in level)
            for level in self.edges))

    @classmethod
    def from_counts(cls, vertex_counts, edge_lists, repeat_from=None):
        """Build from vertex counts and lists of ``(source, range, order)`` triples."""
        levels = [tuple(f"v{n}_{i}" for i in range(c)) for n, c in enumerate(vertex_counts)]
        return cls(levels, edge_lists, repeat_from)

    @property
    def depth(self) -> int:
        """Number of stored edge levels L."""
        return len(self.edges)

    @property
    def stationary(self) -> bool:
        return self.repeat_from is not None

    @property
    def block_length(self) -> int:
        self.require_stationary()
        return self.depth - self.repeat_from

    def require_stationary(self):
        if self.repeat_from is None:
            raise NotStationary("diagram has no repeating block (repeat_from unset)")

    def base_level(self, n: int) -> int:
        """Stored level whose structure level ``n`` copies (vertex or edge level)."""
        if n < 0:
            raise LevelOutOfRange(n)
        if n <= self.depth:
            return n
        if self.repeat_from is None:
            raise LevelOutOfRange(f"level {n} beyond finite diagram of depth {self.depth}")
        k = self.repeat_from
        return k + 1 + (n - k - 1) % (self.depth - k)

    def phase(self, n: int) -> int:
        """Position of vertex level ``n >= k`` inside the repeating block."""
        k = self.repeat_from
        return (n - k) % (self.depth - k)

    def num_vertices(self, n: int) -> int:
        return len(self.levels[self.base_level(n)])

    def edges_at(self, n: int) -> tuple:
        if n < 1:
            raise LevelOutOfRange(n)
        return self.edges[self.base_level(n) - 1]

    @cached_property
    def _in_edges(self):
        out = []
        for level in self.edges:
            table = {}
            for idx, e in enumerate(level):
                table.setdefault(e.range, []).append(idx)
            for v in table:
                table[v].sort(key=lambda i: level[i].order)
            out.append(table)
        return out

    def in_edges(self, n: int, v: int) -> list:
        """Indices of edges of E_n with range ``v``, sorted by order rank."""
        return self._in_edges[self.base_level(n) - 1].get(v, [])

    def out_edges(self, n: int, w: int) -> list:
        """Indices of edges of E_n with source ``w``."""
        return [i for i, e in enumerate(self.edges_at(n)) if e.source == w]

    def is_max(self, n: int, idx: int) -> bool:
        e = self.edges_at(n)[idx]
        return e.order == len(self.in_edges(n, e.range)) - 1

    def is_min(self, n: int, idx: int) -> bool:
        return self.edges_at(n)[idx].order == 0

    def extreme_in_edge(self, n: int, v: int, which: str) -> int:
        ins = self.in_edges(n, v)
        return ins[-1] if which == "max" else ins[0]

    def check_path(self, path, start: int = 0):
        """Raise InvalidPath unless ``path`` chains from v_0 (edge levels start+1 ..)."""
        v = 0 if start == 0 else None
        for i, idx in enumerate(path):
            level = self.edges_at(start + i + 1)
            if not 0 <= idx < len(level):
                raise InvalidPath(f"edge index {idx} out of range at level {start + i + 1}")
            e = level[idx]
            if v is not None and e.source != v:
                raise InvalidPath(f"edge {idx} at level {start + i + 1} does not start at vertex {v}")
            v = e.range
        return v

    def end_vertex(self, path) -> int:
        return self.edges_at(len(path))[path[-1]].range if path else 0


def validate_diagram(d: OrderedBratteliDiagram) -> ValidationReport:
    """Collect structural violations; full edge connections are reported per level."""
    rep = ValidationReport()
    if len(d.levels) != len(d.edges) + 1:
        rep.violations.append(
            f"{len(d.levels)} vertex levels but {len(d.edges)} edge levels (need one more vertex level)")
        return rep
    if len(d.levels[0]) != 1:
        rep.violations.append(f"V_0 has {len(d.levels[0])} vertices, expected exactly 1")
    for n, vs in enumerate(d.levels):
        if not vs:
            rep.violations.append(f"V_{n} is empty")
    full = []
    for n, level in enumerate(d.edges, start=1):
        if not level:
            rep.violations.append(f"E_{n} is empty")
        nsrc, nrng = len(d.levels[n - 1]), len(d.levels[n])
        counts = np.zeros((nrng, nsrc), dtype=int)
        ranks = {}
        bad = False
        for i, e in enumerate(level):
            if not 0 <= e.source < nsrc:
                rep.violations.append(f"E_{n} edge {i}: source {e.source} outside V_{n - 1}")
                bad = True
                continue
            if not 0 <= e.range < nrng:
                rep.violations.append(f"E_{n} edge {i}: range {e.range} outside V_{n}")
                bad = True
                continue
            counts[e.range, e.source] += 1
            ranks.setdefault(e.range, []).append(e.order)
        for v, rs in sorted(ranks.items()):
            if sorted(rs) != list(range(len(rs))):
                rep.violations.append(
                    f"E_{n}: order ranks into vertex {v} are {sorted(rs)}, expected 0..{len(rs) - 1}")
        if not bad:
            for v in range(nrng):
                if counts[v].sum() == 0:
                    rep.violations.append(f"vertex {v} of V_{n} has no incoming edge")
            for w in range(nsrc):
                if counts[:, w].sum() == 0:
                    rep.violations.append(f"vertex {w} of V_{n - 1} has no outgoing edge")
        full.append(bool(not bad and nrng and nsrc and counts.min() >= 1))
    if d.repeat_from is not None:
        k = d.repeat_from
        if not 0 <= k < d.depth:
            rep.violations.append(f"repeat_from={k} must lie in 0..{d.depth - 1}")
        elif len(d.levels[k]) != len(d.levels[d.depth]):
            rep.violations.append(
                f"repeating block inconsistent: #V_{d.depth}={len(d.levels[d.depth])} "
                f"but #V_{k}={len(d.levels[k])}")
    rep.details["full_connections"] = full
    return rep


def incidence_matrix(d: OrderedBratteliDiagram, n: int) -> np.ndarray:
    """Entry (v, w) counts edges of E_n from w in V_{n-1} to v in V_n."""
    if n < 1 or (not d.stationary and n > d.depth):
        raise LevelOutOfRange(f"level {n}")
    m = np.zeros((d.num_vertices(n), d.num_vertices(n - 1)), dtype=object)
    for e in d.edges_at(n):
        m[e.range, e.source] += 1
    return m


def transfer_matrix(d: OrderedBratteliDiagram, a: int, b: int) -> np.ndarray:
    """Path counts from level ``a`` to level ``b``: M_b ... M_{a+1}."""
    t = np.identity(d.num_vertices(a), dtype=int).astype(object)
    for n in range(a + 1, b + 1):
        t = incidence_matrix(d, n).dot(t)
    return t


def _extreme_pred(d, n, which):
    return [d.edges_at(n)[d.extreme_in_edge(n, v, which)].source
            for v in range(d.num_vertices(n))]


def _block_map(d, which):
    """G(u): vertex at level k reached by walking extreme edges back from u at level L."""
    k, L = d.repeat_from, d.depth
    preds = [_extreme_pred(d, n, which) for n in range(k + 1, L + 1)]

    def g(u):
        for pred in reversed(preds):
            u = pred[u]
        return u
    return [g(u) for u in range(d.num_vertices(L))]


def _periodic_points(g):
    periodic = set()
    for start in range(len(g)):
        seen = {}
        u, t = start, 0
        while u not in seen:
            seen[u] = t
            u, t = g[u], t + 1
        cyc = [u]
        w = g[u]
        while w != u:
            cyc.append(w)
            w = g[w]
        periodic.update(cyc)
    return sorted(periodic)


def extreme_paths_count(d: OrderedBratteliDiagram, which: str) -> int:
    """Number of infinite paths made only of maximal (or minimal) edges."""
    d.require_stationary()
    return len(_periodic_points(_block_map(d, which)))


def check_properly_ordered(d: OrderedBratteliDiagram) -> Ordering:
    d.require_stationary()
    many_max = extreme_paths_count(d, "max") != 1
    many_min = extreme_paths_count(d, "min") != 1
    if many_max and many_min:
        return Ordering.BOTH
    if many_max:
        return Ordering.MULTIPLE_MAX_PATHS
    if many_min:
        return Ordering.MULTIPLE_MIN_PATHS
    return Ordering.PROPERLY_ORDERED


def extreme_path(d: OrderedBratteliDiagram, which: str, depth: int) -> tuple:
    """Depth-``depth`` prefix of x^max (``which="max"``) or x^min."""
    if which not in ("max", "min"):
        raise ValueError(which)
    d.require_stationary()
    per = _periodic_points(_block_map(d, which))
    if len(per) != 1:
        raise NotProperlyOrdered(f"{len(per)} infinite {which}imal paths")
    k, B = d.repeat_from, d.block_length
    top = k + B * max(0, -(-(depth - k) // B))
    v = per[0]
    path = []
    for n in range(top, 0, -1):
        idx = d.extreme_in_edge(n, v, which)
        path.append(idx)
        v = d.edges_at(n)[idx].source
    path.reverse()
    return tuple(path[:depth])


def paths_between(d: OrderedBratteliDiagram, a: int, b: int):
    """All paths from level ``a`` to level ``b`` as (source, range, edges) triples."""
    out = []
    for w in range(d.num_vertices(a)):
        stack = [(w, ())]
        while stack:
            v, p = stack.pop()
            n = a + len(p)
            if n == b:
                out.append((w, v, p))
                continue
            for idx in d.out_edges(n + 1, v):
                stack.append((d.edges_at(n + 1)[idx].range, p + (idx,)))
    return out


def composite_edges(d: OrderedBratteliDiagram, a: int, b: int):
    """Paths from level ``a`` to ``b``, grouped by range and ranked right-to-left lexicographically.

    Returns a list of ``(Edge, path)`` sorted by (range, order).
    """
    groups = {}
    for src, rng, p in paths_between(d, a, b):
        groups.setdefault(rng, []).append((src, p))
    out = []
    for rng in sorted(groups):
        key = lambda sp: tuple(d.edges_at(a + 1 + i)[sp[1][i]].order
                               for i in reversed(range(len(sp[1]))))
        for rank, (src, p) in enumerate(sorted(groups[rng], key=key)):
            out.append((Edge(src, rng, rank), p))
    return out


def _check_cuts(d, cuts):
    cuts = list(cuts)
    if len(cuts) < 2 or cuts[0] != 0:
        raise BadCuts("cuts must start at 0 and contain at least two levels")
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise BadCuts("cuts must be strictly ascending")
    if not d.stationary:
        if cuts[-1] > d.depth:
            raise BadCuts(f"cut {cuts[-1]} beyond finite depth {d.depth}")
        return cuts, None
    k, B = d.repeat_from, d.block_length
    r = len(cuts) - 1
    for j in range(r - 1, -1, -1):
        if cuts[j] >= k and (cuts[r] - cuts[j]) % B == 0:
            return cuts, j
    raise BadCuts("no earlier cut shares the phase of the last cut inside the repeating block")


def telescope(d: OrderedBratteliDiagram, cuts) -> OrderedBratteliDiagram:
    """Collapse the levels between consecutive cuts into composite edges.

    For a stationary diagram the cut sequence continues periodically: the
    new repeating block starts at the last earlier cut with the same block
    phase as the final cut.
    """
    cuts, j = _check_cuts(d, cuts)
    levels = [d.levels[d.base_level(c)] for c in cuts]
    edges = [tuple(e for e, _ in composite_edges(d, a, b)) for a, b in zip(cuts, cuts[1:])]
    return OrderedBratteliDiagram(levels, edges, j)


def greedy_cuts(d: OrderedBratteliDiagram, min_edges: int, max_span: int = 256) -> list:
    """Fewest-cut telescoping so every adjacent vertex pair has >= ``min_edges`` edges."""
    d.require_stationary()
    k = d.repeat_from
    cuts = [0]
    phases = {0: 0} if k == 0 else {}
    while True:
        a = cuts[-1]
        t = np.identity(d.num_vertices(a), dtype=int).astype(object)
        for b in range(a + 1, a + max_span + 1):
            t = incidence_matrix(d, b).dot(t)
            if t.min() >= min_edges:
                break
        else:
            raise CannotTelescope(
                f"no telescoping within {max_span} levels reaches {min_edges} edges per vertex pair")
        cuts.append(b)
        if b >= k:
            ph = d.phase(b)
            if ph in phases:
                return cuts
            phases[ph] = len(cuts) - 1


def unroll(d: OrderedBratteliDiagram, copies: int = 1, prefix_blocks: int = 0) -> OrderedBratteliDiagram:
    """Same infinite diagram with ``prefix_blocks`` block copies moved into the
    non-repeating prefix and a repeating block made of ``copies`` blocks."""
    d.require_stationary()
    k, B = d.repeat_from, d.block_length
    start = k + prefix_blocks * B
    top = start + copies * B
    levels = [d.levels[d.base_level(n)] for n in range(top + 1)]
    edges = [d.edges_at(n) for n in range(1, top + 1)]
    return OrderedBratteliDiagram(levels, edges, start)


def reverse_order(d: OrderedBratteliDiagram) -> OrderedBratteliDiagram:
    """The diagram with every edge order reversed (rank r -> m - 1 - r)."""
    edges = []
    for n, level in enumerate(d.edges, start=1):
        edges.append(tuple(Edge(e.source, e.range, len(d.in_edges(n, e.range)) - 1 - e.order)
                           for e in level))
    return OrderedBratteliDiagram(d.levels, edges, d.repeat_from)
