import math

import numpy as np
import pytest

from bootperc.directions import Direction
from bootperc.lattice import box_coords
from bootperc.regions import (
    GeometryError,
    Region,
    cone,
    droplet_sites,
    region_contains,
    region_equal_on_box,
)

A = Direction.from_angle
E = Direction.exact


def test_halfplane_strict_inequality():
    h = Region.half_plane(E(0, 1))
    assert not region_contains(h, (0, 0))  # boundary excluded
    assert region_contains(h, (5, -1))
    assert not region_contains(h, (5, 1))


def test_empty_region():
    e = Region.empty()
    assert not region_contains(e, (0, 0))
    xs, ys = box_coords(5)
    assert not e.mask(xs, ys).any()


def test_cone_matches_halfplane_conjunction():
    u, v = A(1.1), A(2.9)
    c = Region.cone_of(u, v)
    xs, ys = box_coords(20)
    expected = Region.half_plane(u).mask(xs, ys) & Region.half_plane(v).mask(xs, ys)
    assert np.array_equal(c.mask(xs, ys), expected)


def test_cone_symmetry_same_site_set():
    for u0, th in [(0.3, 1.1), (2.0, -0.7), (math.pi / 3, 0.01), (1.0, math.pi)]:
        r1 = cone(A(u0), th)
        r2 = cone(A(u0 + th), -th)
        assert region_equal_on_box(r1, r2, radius=50)


def test_cone_degenerate_theta():
    # theta == 0 is the half-plane itself
    r = cone(A(math.pi / 2), 0.0)
    assert r.kind == "halfplane"
    assert region_contains(r, (0, -1))
    assert not region_contains(r, (0, 1))
    # theta == pi intersects antipodal half-planes: nothing within B_50 survives,
    # and in particular neither pole is a member
    r_pi = cone(A(math.pi / 2), math.pi)
    assert not region_contains(r_pi, (0, 1))
    assert not region_contains(r_pi, (0, -1))
    exact_pi = Region.cone_of(E(0, 1), E(0, -1))
    xs, ys = box_coords(50)
    assert not exact_pi.mask(xs, ys).any()


def test_cone_quarter_membership():
    r = cone(A(math.pi / 2), math.pi / 2)
    # H_{pi/2} n H_{pi} = {y < eps} n {x > eps}: the lower-right quadrant
    assert region_contains(r, (3, -3))
    assert not region_contains(r, (-3, -3))
    assert not region_contains(r, (3, 3))


def _op_droplet_dirs():
    return [A(3 * math.pi / 4), A(math.pi), A(5 * math.pi / 4), A(3 * math.pi / 2),
            A(7 * math.pi / 4), A(2 * math.pi), A(math.pi / 4)]


def test_droplet_sites_against_halfplane_scan():
    dirs = _op_droplet_dirs()
    L, clip = 10.0, 40
    got = droplet_sites(dirs, L, clip)
    # independent scan: direct evaluation of every half-plane inequality
    from bootperc.regions import droplet_anchor

    ax, ay = droplet_anchor(tuple(dirs), L)
    expected = set()
    for y in range(-clip, clip + 1):
        for x in range(-clip, clip + 1):
            if all((x + ax) * d.unit()[0] + (y + ay) * d.unit()[1] < L for d in dirs):
                expected.add((x, y))
    assert got == expected
    assert len(got) > 0


def test_droplet_inscribed_in_cone():
    dirs = _op_droplet_dirs()
    c = Region.cone_of(dirs[0], dirs[-1])
    for site in droplet_sites(dirs, 12.0, 60):
        assert region_contains(c, site)


def test_droplet_monotone_in_size():
    dirs = _op_droplet_dirs()
    small = droplet_sites(dirs, 6.0, 40)
    large = droplet_sites(dirs, 11.0, 40)
    assert small <= large


def test_droplet_empty_when_tiny():
    dirs = _op_droplet_dirs()
    assert droplet_sites(dirs, 0.05, 10) == set()


def test_droplet_rejects_degenerate_directions():
    bad = [A(0.0), A(1.0), A(2.0), A(2.5), A(3.0), A(3.3), A(3.6)]  # inner span != pi
    with pytest.raises(GeometryError):
        droplet_sites(bad, 5.0, 10)
    with pytest.raises(GeometryError):
        droplet_sites(_op_droplet_dirs()[:4], 5.0, 10)


def test_region_equality_extensional():
    # same half-plane through exact and angle representations
    h1 = Region.half_plane(E(0, 1))
    h2 = Region.half_plane(A(math.pi / 2 + 1e-13))
    assert region_equal_on_box(h1, h2, radius=50)


def test_explicit_region():
    r = Region.explicit([(1, 2), (-3, 0)])
    assert region_contains(r, (1, 2))
    assert not region_contains(r, (2, 1))
    xs, ys = box_coords(4)
    assert int(r.mask(xs, ys).sum()) == 2
