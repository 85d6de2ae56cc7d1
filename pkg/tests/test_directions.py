import math
import random

import pytest

from bootperc.directions import (
    Direction,
    ccw_width,
    circular_cmp,
    normalize_angle,
    sort_circular,
    width_class,
)


def test_exact_reduction():
    d = Direction.exact(4, -6)
    assert (d.ax, d.ay) == (2, -3)
    with pytest.raises(ValueError):
        Direction.exact(0, 0)


def test_angle_normalization():
    assert normalize_angle(3 * math.pi) == pytest.approx(math.pi)
    assert normalize_angle(-math.pi) == pytest.approx(math.pi)
    d = Direction.from_angle(2 * math.pi)
    assert d.angle() == pytest.approx(0.0)


def test_perp_and_antipode():
    d = Direction.exact(2, 1)
    assert (d.perp_ccw().ax, d.perp_ccw().ay) == (-1, 2)
    assert (d.perp_cw().ax, d.perp_cw().ay) == (1, -2)
    assert (d.antipode().ax, d.antipode().ay) == (-2, -1)


def test_plus_keeps_exactness_at_zero():
    d = Direction.exact(1, 3)
    assert d.plus(0.0) is d
    assert not d.plus(0.5).is_exact


def test_circular_order_matches_angles():
    rng = random.Random(7)
    dirs = []
    while len(dirs) < 100:
        a, b = rng.randint(-20, 20), rng.randint(-20, 20)
        if (a, b) != (0, 0):
            dirs.append(Direction.exact(a, b))
    ordered = sort_circular(dirs)
    angles = [d.angle() % (2 * math.pi) for d in ordered]
    for a, b, da, db in zip(ordered, ordered[1:], angles, angles[1:]):
        if circular_cmp(a, b) == 0:
            continue
        assert da <= db + 1e-12


def test_circular_order_transitive():
    rng = random.Random(3)
    dirs = []
    while len(dirs) < 100:
        a, b = rng.randint(-50, 50), rng.randint(-50, 50)
        if (a, b) != (0, 0):
            dirs.append(Direction.exact(a, b))
    ordered = sort_circular(dirs)
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            assert circular_cmp(ordered[i], ordered[j]) <= 0


def test_width_class():
    e = Direction.exact
    assert width_class(e(1, 0), e(0, 1)) == "lt"
    assert width_class(e(1, 0), e(-1, 0)) == "eq"
    assert width_class(e(1, 0), e(0, -1)) == "gt"
    assert ccw_width(e(1, 0), e(0, 1)) == pytest.approx(math.pi / 2)
    assert ccw_width(e(0, 1), e(1, 0)) == pytest.approx(3 * math.pi / 2)


def test_pretty_pi_fractions():
    assert Direction.exact(-1, 1).pretty() == "3*pi/4"
    assert Direction.exact(2, 1).pretty() == "(2,1)"
