"""Bootstrap closure on a box with per-site infection times.

Two engines with one contract:

* ``close`` -- work-queue propagation.  When a site becomes infected only the
  sites that can see it through some rule offset are re-examined, with per-rule
  remaining-offset counters making each re-examination O(1).  Times are
  synchronous-round indices tracked through queue levels, not pop order.
  Compiled with numba; without it the computation drops to the vectorized
  full-grid sweep.

* ``close_naive`` -- the reference oracle: literal repeated full-grid
  synchronous sweeps until stable, capped to small boxes.

Sites outside the box (and box sites clipped by a domain mask) count as
permanently infected when they lie in the boundary region and as permanently
healthy otherwise.  The working grid is the box padded by range(family); ring
sites are consulted during rule checks but sliced away from the result.
"""

from __future__ import annotations

import numpy as np

from ._accel import JIT_ENABLED, njit_maybe
from .families import UpdateFamily
from .lattice import LatticeInstance

INF_TIME = -1  # sentinel in int32 time grids
_DEAD = 1 << 29
_NAIVE_MAX_RADIUS = 16


class InfectionTimes:
    """Per-site synchronous infection round over B_n; INF_TIME marks never."""

    __slots__ = ("n", "times")

    def __init__(self, n: int, times: np.ndarray):
        self.n = n
        self.times = times

    @property
    def origin_time(self) -> int:
        return int(self.times[self.n, self.n])

    def infected_mask(self) -> np.ndarray:
        return self.times >= 0

    def time_at(self, x: int, y: int) -> int:
        return int(self.times[y + self.n, x + self.n])

    def origin_escapes(self) -> bool:
        return self.origin_time == INF_TIME

    def dump(self) -> str:
        """Plain-text grid, top row = y = n; '.' for never-infected."""
        finite = self.times[self.times >= 0]
        width = max(1, len(str(int(finite.max()))) if finite.size else 1)
        rows = []
        for iy in range(2 * self.n, -1, -1):
            cells = []
            for ix in range(2 * self.n + 1):
                t = int(self.times[iy, ix])
                cells.append("." .rjust(width) if t < 0 else str(t).rjust(width))
            rows.append(" ".join(cells))
        return "\n".join(rows)

    def __eq__(self, other):
        if not isinstance(other, InfectionTimes):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.times, other.times)


class ClosurePrep:
    """Static geometry for repeated closures of one (n, family, boundary) setup."""

    __slots__ = (
        "n",
        "reach",
        "width",
        "frozen",
        "base_infected",
        "rule_ptr",
        "offx",
        "offy",
        "updatable",
    )

    def __init__(self, n: int, family: UpdateFamily, boundary, domain=None):
        self.n = n
        self.reach = family.range()
        m = n + self.reach
        self.width = 2 * m + 1

        coords = np.arange(-m, m + 1)
        xs, ys = np.meshgrid(coords, coords, indexing="xy")

        inbox = (np.abs(xs) <= n) & (np.abs(ys) <= n)
        self.updatable = inbox.copy()
        if domain is not None:
            self.updatable[self.reach : self.reach + 2 * n + 1,
                           self.reach : self.reach + 2 * n + 1] &= domain
        self.frozen = ~self.updatable
        # Region sites are permanently infected everywhere, ring included.
        self.base_infected = boundary.mask(xs, ys)

        ptr = [0]
        offx, offy = [], []
        for rule in family.rules:
            for ox, oy in rule.offsets:
                offx.append(ox)
                offy.append(oy)
            ptr.append(len(offx))
        self.rule_ptr = np.asarray(ptr, dtype=np.int64)
        self.offx = np.asarray(offx, dtype=np.int64)
        self.offy = np.asarray(offy, dtype=np.int64)

    def initial_times(self, infected_inbox: np.ndarray) -> np.ndarray:
        w = self.width
        infected = self.base_infected.copy()
        r = self.reach
        n = self.n
        block = infected[r : r + 2 * n + 1, r : r + 2 * n + 1]
        block |= infected_inbox & self.updatable[r : r + 2 * n + 1, r : r + 2 * n + 1]
        times = np.full((w, w), INF_TIME, dtype=np.int32)
        times[infected] = 0
        return times

    def slice_box(self, times: np.ndarray) -> np.ndarray:
        r, n = self.reach, self.n
        return times[r : r + 2 * n + 1, r : r + 2 * n + 1].copy()


def close(instance: LatticeInstance, family: UpdateFamily) -> InfectionTimes:
    """Least fixed point of the synchronous update restricted to the box."""
    prep = ClosurePrep(instance.n, family, instance.boundary, instance.domain)
    times = run_closure(prep, instance.infected)
    return InfectionTimes(instance.n, prep.slice_box(times))


def run_closure(prep: ClosurePrep, infected_inbox, stop_at_origin=False) -> np.ndarray:
    times = prep.initial_times(infected_inbox)
    if JIT_ENABLED:
        _queue_kernel(
            times,
            prep.frozen,
            prep.rule_ptr,
            prep.offx,
            prep.offy,
            prep.n + prep.reach if stop_at_origin else -1,
        )
    else:
        _sweep(times, prep.updatable, prep.rule_ptr, prep.offx, prep.offy)
    return times


def origin_escapes(instance: LatticeInstance, family: UpdateFamily) -> bool:
    """True iff the origin's infection time is infinite."""
    prep = ClosurePrep(instance.n, family, instance.boundary, instance.domain)
    times = run_closure(prep, instance.infected, stop_at_origin=True)
    m = prep.n + prep.reach
    return int(times[m, m]) == INF_TIME


def close_naive(instance: LatticeInstance, family: UpdateFamily) -> InfectionTimes:
    """Reference implementation: repeated full-grid synchronous sweeps."""
    if instance.n > _NAIVE_MAX_RADIUS:
        raise ValueError(f"close_naive is capped at box radius {_NAIVE_MAX_RADIUS}")
    prep = ClosurePrep(instance.n, family, instance.boundary, instance.domain)
    times = prep.initial_times(instance.infected)
    _sweep(times, prep.updatable, prep.rule_ptr, prep.offx, prep.offy)
    return InfectionTimes(instance.n, prep.slice_box(times))


def close_naive_batch(prep: ClosurePrep, infected_batch: np.ndarray) -> np.ndarray:
    """Sweep a batch of samples at once; returns (B, 2n+1, 2n+1) time grids."""
    if prep.n > _NAIVE_MAX_RADIUS:
        raise ValueError(f"close_naive is capped at box radius {_NAIVE_MAX_RADIUS}")
    b = infected_batch.shape[0]
    w = prep.width
    times = np.full((b, w, w), INF_TIME, dtype=np.int32)
    infected = np.broadcast_to(prep.base_infected, (b, w, w)).copy()
    r, n = prep.reach, prep.n
    upd_box = prep.updatable[r : r + 2 * n + 1, r : r + 2 * n + 1]
    infected[:, r : r + 2 * n + 1, r : r + 2 * n + 1] |= infected_batch & upd_box
    times[infected] = 0
    _sweep_arrays(times, infected, prep.updatable, prep.rule_ptr, prep.offx, prep.offy)
    return times[:, r : r + 2 * n + 1, r : r + 2 * n + 1].copy()


# -- sweep engine (numpy) -----------------------------------------------------


def _shifted(mask: np.ndarray, ox: int, oy: int) -> np.ndarray:
    """out[..., iy, ix] = mask[..., iy + oy, ix + ox], False beyond the edge."""
    w = mask.shape[-1]
    out = np.zeros_like(mask)
    xs_src = slice(max(ox, 0), w + min(ox, 0))
    ys_src = slice(max(oy, 0), w + min(oy, 0))
    xs_dst = slice(max(-ox, 0), w + min(-ox, 0))
    ys_dst = slice(max(-oy, 0), w + min(-oy, 0))
    out[..., ys_dst, xs_dst] = mask[..., ys_src, xs_src]
    return out


def _sweep(times: np.ndarray, updatable, rule_ptr, offx, offy):
    infected = times == 0
    _sweep_arrays(times[None], infected[None], updatable, rule_ptr, offx, offy)


def _sweep_arrays(times, infected, updatable, rule_ptr, offx, offy):
    n_rules = len(rule_ptr) - 1
    t = 0
    while True:
        sat = np.zeros_like(infected)
        for r in range(n_rules):
            acc = None
            for k in range(rule_ptr[r], rule_ptr[r + 1]):
                sh = _shifted(infected, int(offx[k]), int(offy[k]))
                acc = sh if acc is None else acc & sh
            sat |= acc
        new = sat & updatable & ~infected
        if not new.any():
            return
        t += 1
        times[new] = t
        infected |= new


# -- queue engine (numba) -----------------------------------------------------


@njit_maybe()
def _queue_kernel(times, frozen, rule_ptr, offx, offy, stop_idx):
    w = times.shape[0]
    n_rules = len(rule_ptr) - 1
    n_off = len(offx)

    off_rule = np.empty(n_off, dtype=np.int32)
    for r in range(n_rules):
        for k in range(rule_ptr[r], rule_ptr[r + 1]):
            off_rule[k] = r

    counters = np.empty((w, w, n_rules), dtype=np.int32)
    for iy in range(w):
        for ix in range(w):
            if frozen[iy, ix]:
                continue
            for r in range(n_rules):
                cnt = 0
                dead = False
                for k in range(rule_ptr[r], rule_ptr[r + 1]):
                    nx = ix + offx[k]
                    ny = iy + offy[k]
                    if nx < 0 or nx >= w or ny < 0 or ny >= w:
                        dead = True
                        break
                    if frozen[ny, nx] and times[ny, nx] != 0:
                        dead = True
                        break
                    cnt += 1
                counters[iy, ix, r] = _DEAD if dead else cnt

    qx = np.empty(w * w, dtype=np.int32)
    qy = np.empty(w * w, dtype=np.int32)
    tail = 0
    for iy in range(w):
        for ix in range(w):
            if times[iy, ix] == 0:
                qx[tail] = ix
                qy[tail] = iy
                tail += 1

    head = 0
    t = 0
    while head < tail:
        level_end = tail
        while head < level_end:
            ix = qx[head]
            iy = qy[head]
            head += 1
            for k in range(n_off):
                tx = ix - offx[k]
                ty = iy - offy[k]
                if tx < 0 or tx >= w or ty < 0 or ty >= w:
                    continue
                if frozen[ty, tx] or times[ty, tx] >= 0:
                    continue
                r = off_rule[k]
                c = counters[ty, tx, r] - 1
                counters[ty, tx, r] = c
                if c == 0:
                    times[ty, tx] = t + 1
                    qx[tail] = tx
                    qy[tail] = ty
                    tail += 1
                    if stop_idx >= 0 and tx == stop_idx and ty == stop_idx:
                        return
        t += 1
