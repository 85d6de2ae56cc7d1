import math

import numpy as np
import pytest

from bootperc.closure import INF_TIME, close, close_naive, close_naive_batch, ClosurePrep, origin_escapes
from bootperc.directions import Direction
from bootperc.families import Rule, UpdateFamily
from bootperc.lattice import LatticeInstance
from bootperc.regions import Region, cone
from bootperc.rng import bernoulli_box, box_field

from oracles import closure_times_reference


def test_empty_sample_never_infects(op):
    t = close(LatticeInstance.empty(4), op)
    assert (t.times == INF_TIME).all()
    assert t.origin_escapes()


def test_full_sample_all_time_zero(op):
    t = close(LatticeInstance.fully_infected(4), op)
    assert (t.times == 0).all()
    assert not t.origin_escapes()


def test_op_one_round_example(op):
    # the two parents of the origin plus one deeper seed
    inst = LatticeInstance.from_sites(2, [(-1, 1), (1, 1), (0, 2)])
    t = close(inst, op)
    assert t.time_at(0, 0) == 1
    assert t.time_at(-1, 1) == 0
    assert t.time_at(0, 2) == 0
    # (0, -2) needs (-1, -1), (1, -1); neither ever infects
    assert t.time_at(0, -2) == INF_TIME


def test_closure_against_dict_reference(op, spiral):
    for fam in (op, spiral):
        for trial in range(40):
            grid = bernoulli_box(17, trial, 5, 0.35)
            t = close(LatticeInstance.from_bitmap(5, grid), fam)
            ref = closure_times_reference(5, grid, fam)
            assert np.array_equal(t.times, ref)


def test_close_equals_naive_with_boundary(op):
    boundary = cone(Direction.from_angle(-math.pi / 2), 0.4)
    for trial in range(60):
        grid = bernoulli_box(3, trial, 6, 0.3)
        inst = LatticeInstance.from_bitmap(6, grid, boundary)
        assert close(inst, op) == close_naive(inst, op)


def test_naive_batch_matches_scalar(dtbp):
    prep = ClosurePrep(5, dtbp, Region.empty())
    batch = np.stack([bernoulli_box(9, t, 5, 0.4) for t in range(16)])
    times = close_naive_batch(prep, batch)
    for i in range(16):
        single = close_naive(LatticeInstance.from_bitmap(5, batch[i]), dtbp)
        assert np.array_equal(times[i], single.times)


def test_naive_radius_cap(op):
    with pytest.raises(ValueError):
        close_naive(LatticeInstance.empty(17), op)


def test_monotone_in_infections(op, two_neighbour):
    for fam in (op, two_neighbour):
        for trial in range(25):
            field = box_field(5, trial, 6)
            small = close(LatticeInstance.from_bitmap(6, field < 0.25), fam)
            large = close(LatticeInstance.from_bitmap(6, field < 0.5), fam)
            # closure containment and pointwise earlier times
            s, l = small.times, large.times
            assert ((s < 0) | (l >= 0)).all()  # infected stays infected
            both = (s >= 0) & (l >= 0)
            assert (l[both] <= s[both]).all()


def test_idempotent(op):
    grid = bernoulli_box(10, 0, 6, 0.45)
    first = close(LatticeInstance.from_bitmap(6, grid), op)
    again = close(LatticeInstance.from_bitmap(6, first.infected_mask()), op)
    assert np.array_equal(again.infected_mask(), first.infected_mask())
    assert (again.times[again.infected_mask()] == 0).all()


def test_translation_covariance(dtbp):
    n = 8
    shift = (2, -1)
    base = bernoulli_box(21, 4, 3, 0.4)  # 7x7 patch
    grid1 = np.zeros((2 * n + 1, 2 * n + 1), dtype=bool)
    grid2 = np.zeros_like(grid1)
    grid1[n - 3 : n + 4, n - 3 : n + 4] = base
    grid2[n - 3 + shift[1] : n + 4 + shift[1], n - 3 + shift[0] : n + 4 + shift[0]] = base
    t1 = close(LatticeInstance.from_bitmap(n, grid1), dtbp)
    t2 = close(LatticeInstance.from_bitmap(n, grid2), dtbp)
    # compare on a window that stays well inside both boxes
    for x in range(-3, 4):
        for y in range(-3, 4):
            assert t1.time_at(x, y) == t2.time_at(x + shift[0], y + shift[1])


def test_box_monotone_escape(op):
    # restriction of one sample: escape on the bigger box implies escape on the smaller
    for trial in range(40):
        field = box_field(8, trial, 12)
        esc = {}
        for n in (6, 12):
            sl = field[12 - n : 12 + n + 1, 12 - n : 12 + n + 1] < 0.3
            esc[n] = origin_escapes(LatticeInstance.from_bitmap(n, sl), op)
        if esc[12]:
            assert esc[6]


def test_cone_monotone_escape(op):
    u = Direction.from_angle(math.pi / 2)
    small = cone(u, 0.3)
    large = cone(u, 0.1)  # smaller theta -> larger cone region
    xs = np.arange(-50, 51)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    assert (large.mask(X, Y) | ~small.mask(X, Y)).all()  # small subset of large
    for trial in range(30):
        grid = bernoulli_box(12, trial, 8, 0.25)
        esc_large = origin_escapes(LatticeInstance.from_bitmap(8, grid, large), op)
        esc_small = origin_escapes(LatticeInstance.from_bitmap(8, grid, small), op)
        if esc_large:
            assert esc_small


def test_boundary_region_sites_time_zero(op):
    boundary = cone(Direction.from_angle(-math.pi / 2), 0.0)  # upper half-plane
    t = close(LatticeInstance.empty(4, boundary), op)
    assert t.time_at(0, 2) == 0
    # infection propagates downward from the infected half-plane
    assert t.time_at(0, 0) == 1
    assert t.time_at(0, -3) == 4


def test_dump_golden(op):
    inst = LatticeInstance.from_sites(2, [(-1, 1), (1, 1), (0, 2)])
    expected = "\n".join(
        [
            ". . 0 . .",
            ". 0 . 0 .",
            ". . 1 . .",
            ". . . . .",
            ". . . . .",
        ]
    )
    assert close(inst, op).dump() == expected
