import math
import random

from bootperc.arcs import ArcSet
from bootperc.directions import Direction

E = Direction.exact


def test_open_arc_membership():
    a = ArcSet.open_arc(E(-1, -1), E(1, -1))  # (-3pi/4, -pi/4)
    assert a.contains(E(0, -1))
    assert not a.contains(E(-1, -1))
    assert not a.contains(E(1, -1))
    assert not a.contains(E(0, 1))


def test_union_merges_touching_closed():
    a = ArcSet.closed_arc(E(1, 0), E(0, 1))
    b = ArcSet.closed_arc(E(0, 1), E(-1, 0))
    u = a.union(b)
    assert len(u.arcs) == 1
    assert u.contains(E(0, 1)) and u.contains(E(1, 1)) and u.contains(E(-1, 1))
    assert not u.contains(E(0, -1))


def test_union_open_arcs_keeps_isolated_point_out():
    a = ArcSet.open_arc(E(1, 0), E(0, 1))
    b = ArcSet.open_arc(E(0, 1), E(-1, 0))
    u = a.union(b)
    assert not u.contains(E(0, 1))
    assert u.contains(E(1, 2)) and u.contains(E(-1, 2))
    comp = u.complement()
    assert comp.contains(E(0, 1))  # isolated stable point survives complementation


def test_complement_roundtrip():
    a = ArcSet.open_arc(E(-1, -1), E(1, -1))
    assert a.complement().complement() == a
    assert ArcSet.empty().complement().is_full()
    assert ArcSet.full().complement().is_empty()


def test_punctured_circle():
    rest = ArcSet.open_arc(E(0, 1), E(0, 1))  # everything but the single direction
    assert rest.contains(E(1, 0)) and rest.contains(E(0, -1))
    assert not rest.contains(E(0, 1))
    assert rest.fits_open_semicircle() and rest.fits_closed_semicircle()
    assert rest.complement() == ArcSet.point(E(0, 1))


def test_normalization_order_independent():
    pieces = [
        ArcSet.open_arc(E(1, 0), E(0, 1)),
        ArcSet.closed_arc(E(0, 1), E(-1, 1)),
        ArcSet.open_arc(E(-1, 0), E(0, -1)),
        ArcSet.point(E(1, -1)),
    ]
    rng = random.Random(11)
    reference = ArcSet.union_all(pieces)
    for _ in range(20):
        shuffled = pieces[:]
        rng.shuffle(shuffled)
        assert ArcSet.union_all(shuffled) == reference
    # idempotent
    assert ArcSet.union_all([reference, reference]) == reference


def test_semicircle_fits():
    lt = ArcSet.open_arc(E(1, 0), E(0, 1))
    assert not lt.fits_open_semicircle()
    exactly = ArcSet.open_arc(E(1, 0), E(-1, 0))  # open, width pi
    assert exactly.fits_open_semicircle()
    assert not exactly.fits_closed_semicircle()
    closed_half = ArcSet.closed_arc(E(1, 0), E(-1, 0))
    assert closed_half.fits_closed_semicircle()
    wide = ArcSet.open_arc(E(1, 0), E(0, -1))  # width 3pi/2
    assert wide.fits_closed_semicircle()


def test_widest_arc():
    s = ArcSet.union_all(
        [ArcSet.open_arc(E(1, 0), E(0, 1)), ArcSet.open_arc(E(-1, 0), E(1, -1))]
    )
    w = s.widest_arc()
    assert w.width() > math.pi / 2
