import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cantorext.errors import IdentityHasNoUniqueFixedPoint, UnknownPreset
from cantorext.ifs import (
    IDENTITY,
    CubeBox,
    DigitPoint,
    apply,
    apply_all,
    attractor_sample,
    composition_fixed_point,
    cover_check,
    digit_system,
    distance,
    fixed_point,
    image_box,
    invert,
    invert_all,
    preset,
    realize,
    similitude_system,
)

F = Fraction


def third_scale(*digits):
    return similitude_system(F(1, 3), [(F(i, 3),) for i in digits])


def raster_cover(sys, maps, res):
    """Oracle: every cell of a res-grid has its centre inside some image box."""
    boxes = [image_box(sys, [f]) for f in maps]
    for idx in itertools.product(range(res), repeat=sys.dimension):
        centre = tuple(F(2 * i + 1, 2 * res) for i in idx)
        if not any(b.contains(centre) for b in boxes):
            return False
    return True


# -- presets -------------------------------------------------------------------

def test_presets():
    s = preset("interval2")
    assert len(s.maps) == 2 and s.ratio == F(1, 2)
    c = preset("cube2(2)")
    assert len(c.maps) == 4
    assert sorted(f.offset for f in c.maps) == [(F(a, 2), F(b, 2)) for a in (0, 1) for b in (0, 1)]
    assert preset("cube2:2") == c
    assert len(preset("carpet").maps) == 8
    assert len(preset("cube3(1)").maps) == 3
    for bad in ("nope", "cube2(0)", "cube4(2)"):
        with pytest.raises(UnknownPreset):
            preset(bad)


def test_bad_similitude():
    with pytest.raises(ValueError):
        similitude_system(F(1, 2), [(F(3, 4),)])
    with pytest.raises(ValueError):
        similitude_system(F(1), [(F(0),)])


# -- apply / invert ------------------------------------------------------------

def test_apply_examples():
    f0, f1 = preset("interval2").maps
    assert apply(f1, (F(0),)) == (F(1, 2),)
    assert apply(f0, (F(1),)) == (F(1, 2),)
    two = preset("cantor3").maps[1]
    assert apply(two, DigitPoint(((0,), (2,)), ((0,),))).digits(3) == ((2,), (0,), (2,))


def test_invert_examples():
    f0, _ = preset("interval2").maps
    assert invert(f0, (F(1, 2),)) == (F(1),)
    assert invert(f0, (F(3, 4),)) is None
    zero = preset("cantor3").maps[0]
    assert invert(zero, DigitPoint(((2,),), ((0,),))) is None
    assert invert(IDENTITY, (F(1, 3),)) == (F(1, 3),)


@settings(max_examples=200)
@given(st.lists(st.integers(0, 3), max_size=8), st.integers(0, 16), st.integers(0, 16))
def test_invert_undoes_apply(word, a, b):
    sys = preset("cube2(2)")
    maps = [sys.maps[i] for i in word]
    c = (F(a, 16), F(b, 16))
    assert invert_all(maps, apply_all(maps, c)) == c
    assert image_box(sys, maps).contains(apply_all(maps, c))


@settings(max_examples=100)
@given(st.lists(st.sampled_from([0, 2]), max_size=6), st.lists(st.sampled_from([0, 2]), min_size=1, max_size=3))
def test_digit_apply_invert(word, cyc):
    sys = preset("cantor3")
    maps = [sys.maps[0] if w == 0 else sys.maps[1] for w in word]
    c = DigitPoint((), tuple((x,) for x in cyc))
    assert invert_all(maps, apply_all(maps, c)) == c


# -- boxes ---------------------------------------------------------------------

def test_image_box_examples():
    s = preset("interval2")
    f0, f1 = s.maps
    b = image_box(s, [f0, f1])
    assert b.intervals == ((F(1, 4), F(1, 2)),) and b.diameter == F(1, 4)
    assert image_box(s, []).diameter == 1
    b = image_box(s, [f0, IDENTITY, f0])
    assert b.intervals == ((F(0), F(1, 4)),) and b.diameter == F(1, 4)


def test_distance():
    s = preset("interval2")
    assert distance(s, (F(1, 4),), (F(3, 4),)) == F(1, 2)
    c = preset("cantor3")
    a = DigitPoint(((0,), (2,)), ((0,),))
    b = DigitPoint(((0,), (0,)), ((0,),))
    assert distance(c, a, b) == F(1, 3)
    assert distance(c, a, a) == 0


# -- cover check ---------------------------------------------------------------

def test_cover_examples():
    assert cover_check(preset("cube2(2)").maps, preset("cube2(2)"))
    sys = third_scale(0, 1, 2)
    assert not cover_check([sys.maps[0], sys.maps[2]], sys)
    assert cover_check(preset("cantor3").maps, preset("cantor3"))
    assert not cover_check(preset("cantor3").maps[:1], preset("cantor3"))
    assert not cover_check([], preset("interval2"))
    assert cover_check(preset("carpet").maps, preset("carpet"))


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=8))
def test_cover_matches_raster(offsets):
    # ratio 1/2 boxes on a quarter grid; a 40x40 raster resolves every cell edge
    sys = similitude_system(F(1, 2), [(F(a, 8), F(b, 8)) for a, b in offsets])
    assert cover_check(sys.maps, sys) == raster_cover(sys, sys.maps, 40)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=5))
def test_cover_matches_raster_1d(offsets):
    sys = similitude_system(F(1, 3), [(F(a, 9),) for a in offsets])
    assert cover_check(sys.maps, sys) == raster_cover(sys, sys.maps, 90)


# -- attractors and fixed points -------------------------------------------------

def test_attractor_samples():
    boxes = attractor_sample(preset("cantor3"), 3)
    assert len(boxes) == 8
    lefts = sorted(b.lower[0] for b in boxes)
    expected = sorted(sum(F(d, 3 ** (i + 1)) for i, d in enumerate(w))
                      for w in itertools.product((0, 2), repeat=3))
    assert lefts == expected
    assert all(b.side == F(1, 27) for b in boxes)
    carpet = attractor_sample(preset("carpet"), 2)
    assert len(carpet) == 64 and all(b.side == F(1, 9) for b in carpet)
    for name in ("interval2", "cantor3", "carpet"):
        (whole,) = attractor_sample(preset(name), 0)
        assert whole.diameter == 1


def test_fixed_points():
    f0, f1 = preset("interval2").maps
    assert fixed_point(f1) == (F(1),)
    assert fixed_point(f0) == (F(0),)
    two = preset("cantor3").maps[1]
    assert fixed_point(two) == DigitPoint((), ((2,),))
    with pytest.raises(IdentityHasNoUniqueFixedPoint):
        composition_fixed_point([IDENTITY])


@settings(max_examples=100)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=6))
def test_composition_fixed_point_is_fixed(word):
    sys = preset("cube2(2)")
    maps = [sys.maps[i] for i in word]
    c = composition_fixed_point(maps)
    assert apply_all(maps, c) == c


def test_realize_cantor_points():
    s = preset("cantor3")
    assert realize(s, DigitPoint((), ((2,),))) == (F(1),)
    assert realize(s, DigitPoint(((0,),), ((2,),))) == (F(1, 3),)
    assert realize(s, DigitPoint(((2,),), ((0,),))) == (F(2, 3),)
    assert realize(s, DigitPoint((), ((0,), (2,)))) == (F(1, 4),)


def test_digit_system_validation():
    with pytest.raises(ValueError):
        digit_system(3, [3])
    with pytest.raises(ValueError):
        digit_system(3, [(0, 1)], dimension=1)


def test_cube_box_containment():
    big = CubeBox((F(0), F(0)), F(1, 2))
    assert big.contains_box(CubeBox((F(1, 4), F(1, 4)), F(1, 4)))
    assert not big.contains_box(CubeBox((F(1, 4), F(1, 2)), F(1, 4)))


@settings(max_examples=100)
@given(st.lists(st.sampled_from([0, 1, 2, 3, None]), max_size=6), st.lists(st.integers(0, 3), max_size=4))
def test_preimage_box_inverts_image_box(word, inner):
    from cantorext.ifs import preimage_box
    for sys in (preset("cube2(2)"), preset("carpet")):
        maps = [IDENTITY if i is None else sys.maps[i] for i in word]
        box = image_box(sys, [sys.maps[i] for i in inner])
        assert preimage_box(sys, maps, image_box(sys, maps, box)) == box
