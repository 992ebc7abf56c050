"""Compact invertible iterated function systems with exact arithmetic.

Two families are supported: axis-aligned similitudes ``x -> r*x + b`` on the
unit cube with the sup metric, and digit maps on a symbolic space of digit
sequences (prepend a digit) with the common-prefix metric ``base**-m``.

Points of a similitude system are tuples of ``Fraction``; points of a digit
system are :class:`DigitPoint` values.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

from . import _periodic
from .errors import IdentityHasNoUniqueFixedPoint, UnknownPreset


@dataclass(frozen=True)
class Similitude:
    ratio: Fraction
    offset: tuple

    def __post_init__(self):
        object.__setattr__(self, "ratio", Fraction(self.ratio))
        object.__setattr__(self, "offset", tuple(Fraction(b) for b in self.offset))
        if not 0 < self.ratio < 1:
            raise ValueError(f"ratio {self.ratio} not in (0, 1)")
        if any(b < 0 or b + self.ratio > 1 for b in self.offset):
            raise ValueError(f"image of {self} leaves the unit cube")

    @property
    def dimension(self):
        return len(self.offset)


@dataclass(frozen=True)
class DigitMap:
    base: int
    digit: tuple

    def __post_init__(self):
        digit = self.digit if isinstance(self.digit, tuple) else (self.digit,)
        object.__setattr__(self, "digit", tuple(int(x) for x in digit))

    @property
    def ratio(self):
        return Fraction(1, self.base)


class _Identity:
    ratio = Fraction(1)

    def __repr__(self):
        return "IDENTITY"

    def __reduce__(self):
        return "IDENTITY"


IDENTITY = _Identity()


@dataclass(frozen=True)
class DigitPoint:
    """The digit sequence ``prefix`` followed by ``cycle`` repeated forever."""
    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        p, c = _periodic.canonical(tuple(map(tuple, self.prefix)), tuple(map(tuple, self.cycle)))
        object.__setattr__(self, "prefix", p)
        object.__setattr__(self, "cycle", c)

    def digit(self, i):
        return _periodic.item(self.prefix, self.cycle, i)

    def digits(self, n):
        return _periodic.take(self.prefix, self.cycle, n)


@dataclass(frozen=True)
class CubeBox:
    """Closed cube ``lower + [0, side]^n``."""
    lower: tuple
    side: Fraction

    @property
    def diameter(self):
        return self.side

    @property
    def intervals(self):
        return tuple((a, a + self.side) for a in self.lower)

    def contains(self, c):
        return all(a <= x <= a + self.side for a, x in zip(self.lower, c))

    def contains_box(self, other):
        return all(a <= b and b + other.side <= a + self.side
                   for a, b in zip(self.lower, other.lower))


@dataclass(frozen=True)
class DigitBox:
    """All digit sequences starting with ``prefix``."""
    prefix: tuple
    base: int
    dimension: int

    @property
    def diameter(self):
        return Fraction(1, self.base ** len(self.prefix))

    @property
    def lower(self):
        """Lower corner of the geometric realization sum_i digit_i * base**-i."""
        return tuple(sum((Fraction(d[j], self.base ** (i + 1)) for i, d in enumerate(self.prefix)),
                         Fraction(0)) for j in range(self.dimension))

    @property
    def side(self):
        return self.diameter

    @property
    def intervals(self):
        return tuple((a, a + self.side) for a in self.lower)

    def contains(self, c):
        return c.digits(len(self.prefix)) == self.prefix

    def contains_box(self, other):
        return other.prefix[:len(self.prefix)] == self.prefix


@dataclass(frozen=True)
class ContractionSystem:
    kind: str                      # "similitude" or "digit"
    dimension: int
    maps: tuple
    base: int | None = None        # digit kind only
    digits: frozenset | None = None

    @property
    def ratio(self) -> Fraction:
        """Uniform contraction constant lambda (largest map ratio)."""
        return max(f.ratio for f in self.maps)

    @property
    def diameter(self) -> Fraction:
        if self.kind == "digit" and len(self.digits) < 2:
            return Fraction(0)
        return Fraction(1)

    def whole(self):
        """C itself as a box."""
        if self.kind == "similitude":
            return CubeBox((Fraction(0),) * self.dimension, Fraction(1))
        return DigitBox((), self.base, self.dimension)

    def default_point(self):
        if self.kind == "similitude":
            return (Fraction(0),) * self.dimension
        return DigitPoint((), (min(self.digits),))

    def names(self):
        return [f"f{i}" for i in range(len(self.maps))]


def similitude_system(ratio, offsets) -> ContractionSystem:
    maps = tuple(Similitude(Fraction(ratio), tuple(b)) for b in offsets)
    return ContractionSystem("similitude", maps[0].dimension, maps)


def digit_system(base, digits, dimension=1) -> ContractionSystem:
    digits = [tuple(d) if isinstance(d, (tuple, list)) else (d,) for d in digits]
    if any(len(d) != dimension or not all(0 <= x < base for x in d) for d in digits):
        raise ValueError("digits must be length-dimension tuples over 0..base-1")
    maps = tuple(DigitMap(base, d) for d in digits)
    return ContractionSystem("digit", dimension, maps, base, frozenset(digits))


def _cube(scale, n):
    offsets = [tuple(Fraction(x, scale) for x in delta)
               for delta in itertools.product(range(scale), repeat=n)]
    return similitude_system(Fraction(1, scale), offsets)


def preset(name: str) -> ContractionSystem:
    """Named example systems: interval2, cube2(n), cube3(n), cantor3, carpet."""
    m = re.fullmatch(r"(cube[23])(?:\((\d+)\)|:(\d+))", name)
    if m:
        n = int(m.group(2) or m.group(3))
        if n < 1:
            raise UnknownPreset(name)
        return _cube(2 if m.group(1) == "cube2" else 3, n)
    if name == "interval2":
        return _cube(2, 1)
    if name == "cantor3":
        return digit_system(3, [0, 2])
    if name == "carpet":
        return digit_system(3, [d for d in itertools.product(range(3), repeat=2) if d != (1, 1)], 2)
    raise UnknownPreset(name)


def apply(f, c):
    if f is IDENTITY:
        return c
    if isinstance(f, Similitude):
        return tuple(f.ratio * x + b for x, b in zip(c, f.offset))
    return DigitPoint((f.digit,) + c.prefix, c.cycle)


def invert(f, c):
    """Preimage of ``c`` under ``f``, or None when ``c`` is not in f(C)."""
    if f is IDENTITY:
        return c
    if isinstance(f, Similitude):
        x = tuple((y - b) / f.ratio for y, b in zip(c, f.offset))
        return x if all(0 <= t <= 1 for t in x) else None
    if c.digit(0) != f.digit:
        return None
    if c.prefix:
        return DigitPoint(c.prefix[1:], c.cycle)
    return DigitPoint((), c.cycle[1:] + c.cycle[:1])


def apply_all(maps, c):
    """Apply the composition ``maps[0] o maps[1] o ... o maps[-1]`` to ``c``."""
    for f in reversed(maps):
        c = apply(f, c)
    return c


def invert_all(maps, c):
    """Inverse of :func:`apply_all`; None if ``c`` is outside the image."""
    for f in maps:
        c = invert(f, c)
        if c is None:
            return None
    return c


def image_box(sys: ContractionSystem, maps, box=None):
    """Exact image of ``box`` (default C) under the composition ``maps[0] o ... o maps[-1]``."""
    if box is None:
        box = sys.whole()
    if sys.kind == "digit":
        head = tuple(f.digit for f in maps if f is not IDENTITY)
        return DigitBox(head + box.prefix, sys.base, sys.dimension)
    lower, side = box.lower, box.side
    for f in reversed(maps):
        if f is IDENTITY:
            continue
        lower = tuple(f.ratio * a + b for a, b in zip(lower, f.offset))
        side *= f.ratio
    return CubeBox(lower, side)


def preimage_box(sys: ContractionSystem, maps, box):
    """Inverse of :func:`image_box` for a box lying inside the image of ``maps``."""
    if sys.kind == "digit":
        n = sum(f is not IDENTITY for f in maps)
        return DigitBox(box.prefix[n:], sys.base, sys.dimension)
    lower, side = box.lower, box.side
    for f in maps:
        if f is IDENTITY:
            continue
        lower = tuple((a - b) / f.ratio for a, b in zip(lower, f.offset))
        side /= f.ratio
    return CubeBox(lower, side)


def distance(sys: ContractionSystem, a, b) -> Fraction:
    if sys.kind == "similitude":
        return max((abs(x - y) for x, y in zip(a, b)), default=Fraction(0))
    i = _periodic.first_difference((a.prefix, a.cycle), (b.prefix, b.cycle))
    return Fraction(0) if i is None else Fraction(1, sys.base ** i)


def cover_check(maps, sys: ContractionSystem) -> bool:
    """Decide whether the images f(C), f in ``maps``, cover C."""
    return not uncovered_cells(maps, sys)


def uncovered_cells(maps, sys: ContractionSystem):
    """Grid cells (Similitude) or digits (Digit) that ``maps`` fail to cover."""
    maps = [f for f in maps if f is not IDENTITY]
    if sys.kind == "digit":
        return sorted(set(sys.digits) - {f.digit for f in maps})
    boxes = [image_box(sys, [f]) for f in maps]
    # each closed box is a union of cells of the grid spanned by all endpoints
    grids = []
    for j in range(sys.dimension):
        pts = {Fraction(0), Fraction(1)}
        for b in boxes:
            pts.update(b.intervals[j])
        grids.append(sorted(pts))
    return [cell for cell in itertools.product(*[list(zip(g, g[1:])) for g in grids])
            if not any(all(b.lower[j] <= lo and hi <= b.lower[j] + b.side
                           for j, (lo, hi) in enumerate(cell)) for b in boxes)]


def attractor_sample(sys: ContractionSystem, depth: int) -> list:
    """Distinct image regions of C under all compositions of ``depth`` maps."""
    seen = {}
    for word in itertools.product(sys.maps, repeat=depth):
        box = image_box(sys, word)
        seen.setdefault(box, None)
    return list(seen)


def fixed_point(f):
    """The unique fixed point of a single map (see also :func:`composition_fixed_point`)."""
    return composition_fixed_point([f])


def composition_fixed_point(maps):
    """Fixed point of ``maps[0] o ... o maps[-1]``; Identity entries are skipped."""
    maps = [f for f in maps if f is not IDENTITY]
    if not maps:
        raise IdentityHasNoUniqueFixedPoint("identity composition fixes every point")
    if isinstance(maps[0], DigitMap):
        return DigitPoint((), tuple(f.digit for f in maps))
    ratio = Fraction(1)
    offset = (Fraction(0),) * maps[0].dimension
    for f in reversed(maps):
        offset = tuple(f.ratio * a + b for a, b in zip(offset, f.offset))
        ratio *= f.ratio
    return tuple(b / (1 - ratio) for b in offset)


def realize(sys: ContractionSystem, c):
    """Coordinates in the unit cube of a point of C (digit sequences summed exactly)."""
    if sys.kind == "similitude":
        return tuple(c)
    b = sys.base
    out = []
    for j in range(sys.dimension):
        head = sum((Fraction(d[j], b ** (i + 1)) for i, d in enumerate(c.prefix)), Fraction(0))
        per = sum((Fraction(d[j], b ** (i + 1)) for i, d in enumerate(c.cycle)), Fraction(0))
        out.append(head + per / (1 - Fraction(1, b ** len(c.cycle))) / b ** len(c.prefix))
    return tuple(out)
