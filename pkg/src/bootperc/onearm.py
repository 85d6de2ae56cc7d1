"""One-arm event detection and randomized low-revealment exploration.

The one-arm event on B_n: there exist sites x_0 = 0, ..., x_N with
x_{i-1} in x_i + U (U the union of all rule offsets), each x_i surviving at
least i synchronous rounds of the box dynamics, and x_N within Chebyshev
distance C of the boundary.  Detection is a forward dynamic program over the
step index; once the index exceeds the largest finite infection time only
never-infected sites can continue, and a single reachability pass finishes.

The exploration algorithm answers the same question while revealing as few
sites as possible.  It draws a ring radius k at random, then repeatedly
reveals the lexicographically smallest unrevealed site from which a path to
the k-ring's neighborhood is *certified*: with every unrevealed site
pessimistically assumed infected, the revealed healthy sites alone must
witness the per-step survival constraints.  Certification is recomputed after
each reveal via the pessimistic closure, which lives entirely on the revealed
healthy subgraph and is therefore cheap.  If the origin was never revealed the
event certainly fails; otherwise everything is revealed and the exact detector
decides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import njit_maybe
from .closure import INF_TIME, ClosurePrep, InfectionTimes, run_closure
from .families import UpdateFamily
from .lattice import LatticeInstance
from .regions import Region
from .rng import derive_key, randint_scalar

_BIG = 1 << 28


@dataclass(frozen=True)
class OneArmConfig:
    n: int
    C: int

    def __post_init__(self):
        if self.C < 1:
            raise ValueError("boundary margin C must be positive")
        if self.n <= self.C:
            raise ValueError("need box radius n > C")


def default_config(family: UpdateFamily, n: int) -> OneArmConfig:
    """Margin C defaults to the family's range: the smallest value for which
    one U-step cannot jump across the boundary band."""
    return OneArmConfig(n=n, C=family.range())


def _step_offsets(family: UpdateFamily):
    offs = family.union_offsets()
    ox = np.array([o[0] for o in offs], dtype=np.int64)
    oy = np.array([o[1] for o in offs], dtype=np.int64)
    return ox, oy


def detect_one_arm(times: InfectionTimes, family: UpdateFamily, config: OneArmConfig) -> bool:
    """Exact decision of the one-arm event from precomputed infection times."""
    if times.n != config.n:
        raise ValueError("times grid does not match the configured box")
    ox, oy = _step_offsets(family)
    return bool(_detect_kernel(times.times, config.n, config.C, config.n, ox, oy))


@njit_maybe()
def _detect_kernel(times, n, C, k, ox, oy):
    """Forward DP for a survival-constrained U-step path from 0 to the k-ring band."""
    w = 2 * n + 1
    n_off = len(ox)

    tmax = 0
    for iy in range(w):
        for ix in range(w):
            t = times[iy, ix]
            if t > tmax:
                tmax = t

    stamp = np.full((w, w), -1, dtype=np.int64)
    cur_x = np.empty(w * w, dtype=np.int64)
    cur_y = np.empty(w * w, dtype=np.int64)
    nxt_x = np.empty(w * w, dtype=np.int64)
    nxt_y = np.empty(w * w, dtype=np.int64)

    cur_x[0] = n
    cur_y[0] = n
    n_cur = 1
    # origin band check is vacuous for n > C

    level = 0
    while n_cur > 0 and level <= tmax:
        level += 1
        n_nxt = 0
        for i in range(n_cur):
            px, py = cur_x[i], cur_y[i]
            for j in range(n_off):
                tx = px - ox[j]
                ty = py - oy[j]
                if tx < 0 or tx >= w or ty < 0 or ty >= w:
                    continue
                if stamp[ty, tx] == level:
                    continue
                t = times[ty, tx]
                if t >= 0 and t < level:
                    continue
                stamp[ty, tx] = level
                cheb = max(abs(tx - n), abs(ty - n))
                if abs(k - cheb) <= C:
                    return True
                nxt_x[n_nxt] = tx
                nxt_y[n_nxt] = ty
                n_nxt += 1
        cur_x, nxt_x = nxt_x, cur_x
        cur_y, nxt_y = nxt_y, cur_y
        n_cur = n_nxt

    if n_cur == 0:
        return False

    # Past the last finite time: plain reachability over never-infected sites.
    visited = np.zeros((w, w), dtype=np.uint8)
    qx = np.empty(w * w, dtype=np.int64)
    qy = np.empty(w * w, dtype=np.int64)
    head, tail = 0, 0
    for i in range(n_cur):
        if not visited[cur_y[i], cur_x[i]]:
            visited[cur_y[i], cur_x[i]] = 1
            qx[tail] = cur_x[i]
            qy[tail] = cur_y[i]
            tail += 1
    while head < tail:
        px, py = qx[head], qy[head]
        head += 1
        for j in range(n_off):
            tx = px - ox[j]
            ty = py - oy[j]
            if tx < 0 or tx >= w or ty < 0 or ty >= w:
                continue
            if visited[ty, tx] or times[ty, tx] >= 0:
                continue
            visited[ty, tx] = 1
            cheb = max(abs(tx - n), abs(ty - n))
            if abs(k - cheb) <= C:
                return True
            qx[tail] = tx
            qy[tail] = ty
            tail += 1
    return False


# -- exploration --------------------------------------------------------------


@dataclass
class ExploreResult:
    decision: bool
    revealed: np.ndarray  # bool over B_n
    k: int


@dataclass
class RevealmentStats:
    counts: np.ndarray  # per-site reveal counts over B_n
    runs: int
    decisions: int  # how many runs decided the event holds

    @property
    def max_revealment(self) -> float:
        return float(self.counts.max()) / self.runs

    def revealment_grid(self) -> np.ndarray:
        return self.counts / self.runs


def explore_one_arm(
    sample: np.ndarray,
    family: UpdateFamily,
    config: OneArmConfig,
    seed: int | None = None,
    k: int | None = None,
) -> ExploreResult:
    """Two-stage randomized decision of the one-arm event.

    Reveals sites one at a time (each at most once); the decision always
    equals the exact detector on the full sample.
    """
    n, C = config.n, config.C
    if k is None:
        if seed is None:
            raise ValueError("need a seed or an explicit ring radius k")
        k = randint_scalar(derive_key(seed, "ring"), 1, n)
    if not (1 <= k < n):
        raise ValueError("ring radius must satisfy 1 <= k < n")

    prep = ClosurePrep(n, family, Region.empty())
    rule_ptr, rofx, rofy = prep.rule_ptr, prep.offx, prep.offy
    ox, oy = _step_offsets(family)
    sample = np.asarray(sample, dtype=bool)

    revealed, origin_revealed = _explore_stage1(
        sample, n, C, k, rule_ptr, rofx, rofy, ox, oy
    )
    if not origin_revealed:
        return ExploreResult(False, revealed.astype(bool), k)

    times = prep.slice_box(run_closure(prep, sample))
    decision = bool(_detect_kernel(times, n, C, n, ox, oy))
    return ExploreResult(decision, np.ones_like(sample, dtype=bool), k)


@njit_maybe()
def _explore_stage1(sample, n, C, k, rule_ptr, rofx, rofy, ox, oy):
    """Stage one of the exploration; returns (revealed mask, origin revealed)."""
    w = 2 * n + 1
    n_rules = len(rule_ptr) - 1
    n_roff = len(rofx)
    n_off = len(ox)

    off_rule = np.empty(n_roff, dtype=np.int32)
    for r in range(n_rules):
        for j in range(rule_ptr[r], rule_ptr[r + 1]):
            off_rule[j] = r

    revealed = np.zeros((w, w), dtype=np.uint8)  # 0 unrevealed, 1 healthy, 2 infected
    hidx = np.full((w, w), -1, dtype=np.int64)
    cap = w * w
    hx = np.empty(cap, dtype=np.int64)
    hy = np.empty(cap, dtype=np.int64)
    n_h = 0

    tau = np.empty(cap, dtype=np.int64)  # pessimistic times of healthy-revealed sites
    mval = np.empty(cap, dtype=np.int64)
    counters = np.empty(cap * n_rules, dtype=np.int64)

    # Lexicographic min-heap of candidate sites, lazily deduplicated.
    heap = np.empty(4 * cap + 16, dtype=np.int64)
    heap_n = 0
    pushed = np.zeros((w, w), dtype=np.uint8)

    def _band(ix, iy):
        cheb = max(abs(ix - n), abs(iy - n))
        return abs(k - cheb) <= C

    # All unrevealed band sites start as candidates (a zero-step path).
    for iy in range(w):
        for ix in range(w):
            if _band(ix, iy):
                code = ix * w + iy
                heap_n = _heap_push(heap, heap_n, code)
                pushed[iy, ix] = 1

    origin_revealed = False
    while heap_n > 0:
        code = heap[0]
        heap_n = _heap_pop(heap, heap_n)
        ix = code // w
        iy = code % w
        if revealed[iy, ix] != 0:
            continue

        if sample[iy, ix]:
            revealed[iy, ix] = 2
        else:
            revealed[iy, ix] = 1
            hidx[iy, ix] = n_h
            hx[n_h] = ix
            hy[n_h] = iy
            n_h += 1
            _pessimistic_times(
                sample, revealed, hidx, hx, hy, n_h, tau, counters,
                rule_ptr, rofx, rofy, off_rule, w,
            )
            _certified_indices(
                hidx, hx, hy, n_h, tau, mval, ox, oy, n, C, k, w
            )
            # New candidates: unrevealed U-neighbors of sites certified >= 1.
            for h in range(n_h):
                if mval[h] >= 1:
                    for j in range(n_off):
                        cx = hx[h] + ox[j]
                        cy = hy[h] + oy[j]
                        if cx < 0 or cx >= w or cy < 0 or cy >= w:
                            continue
                        if revealed[cy, cx] == 0 and pushed[cy, cx] == 0:
                            heap_n = _heap_push(heap, heap_n, cx * w + cy)
                            pushed[cy, cx] = 1
        if ix == n and iy == n:
            origin_revealed = True

    return revealed, origin_revealed


@njit_maybe()
def _pessimistic_times(
    sample, revealed, hidx, hx, hy, n_h, tau, counters,
    rule_ptr, rofx, rofy, off_rule, w,
):
    """Box-closure times when every unrevealed site counts as infected.

    Only revealed-healthy sites have nonzero times, so the computation stays
    on that subgraph: offsets to unrevealed or revealed-infected box sites are
    infected at round 0, offsets leaving the box are healthy forever.
    """
    n_rules = len(rule_ptr) - 1
    n_roff = len(rofx)
    qx = np.empty(n_h, dtype=np.int64)
    qlev = np.empty(n_h, dtype=np.int64)
    tail = 0

    for h in range(n_h):
        tau[h] = -1  # never infected until proven otherwise
        for r in range(n_rules):
            counters[h * n_rules + r] = 0
    for h in range(n_h):
        ix, iy = hx[h], hy[h]
        for r in range(n_rules):
            cnt = 0
            dead = False
            for j in range(rule_ptr[r], rule_ptr[r + 1]):
                nx_ = ix + rofx[j]
                ny_ = iy + rofy[j]
                if nx_ < 0 or nx_ >= w or ny_ < 0 or ny_ >= w:
                    dead = True
                    break
                if revealed[ny_, nx_] == 1:
                    cnt += 1  # healthy-revealed neighbor, not yet infected
            if dead:
                counters[h * n_rules + r] = _BIG
            elif cnt == 0:
                counters[h * n_rules + r] = 0
                if tau[h] < 0:
                    tau[h] = 1
                    qx[tail] = h
                    qlev[tail] = 1
                    tail += 1
            else:
                counters[h * n_rules + r] = cnt

    head = 0
    while head < tail:
        h = qx[head]
        t = qlev[head]
        head += 1
        if tau[h] != t:
            continue
        ix, iy = hx[h], hy[h]
        # neighbors that see (ix, iy) through some rule offset
        for j in range(n_roff):
            tx = ix - rofx[j]
            ty = iy - rofy[j]
            if tx < 0 or tx >= w or ty < 0 or ty >= w:
                continue
            g = hidx[ty, tx]
            if g < 0 or tau[g] >= 0:
                continue
            r = off_rule[j]
            c = counters[g * n_rules + r] - 1
            counters[g * n_rules + r] = c
            if c == 0:
                tau[g] = t + 1
                qx_new = g
                if tail < len(qx):
                    qx[tail] = qx_new
                    qlev[tail] = t + 1
                    tail += 1
    # note: queue capacity n_h suffices, each healthy site is enqueued at most once


@njit_maybe()
def _certified_indices(hidx, hx, hy, n_h, tau, mval, ox, oy, n, C, k, w):
    """Largest start index certified per healthy-revealed site.

    mval[h] >= i iff a pessimistically witnessed path can start at site h with
    step index i and reach the k-ring band.  Computed as the least fixed point
    of  m = min(tau_cap, band ? BIG : max_u m(. - u) - 1)  by sweeping.
    """
    n_off = len(ox)
    for h in range(n_h):
        cheb = max(abs(hx[h] - n), abs(hy[h] - n))
        band = abs(k - cheb) <= C
        cap = _BIG if tau[h] < 0 else tau[h]
        mval[h] = cap if band else -1

    changed = True
    sweeps = 0
    while changed and sweeps <= n_h + 2:
        changed = False
        sweeps += 1
        for h in range(n_h):
            cap = _BIG if tau[h] < 0 else tau[h]
            if mval[h] >= cap:
                continue
            best = -1
            for j in range(n_off):
                px = hx[h] - ox[j]
                py = hy[h] - oy[j]
                if px < 0 or px >= w or py < 0 or py >= w:
                    continue
                g = hidx[py, px]
                if g >= 0 and mval[g] > best:
                    best = mval[g]
            cand = best - 1
            if cand > cap:
                cand = cap
            if cand > mval[h]:
                mval[h] = cand
                changed = True


@njit_maybe()
def _heap_push(heap, n_items, code):
    i = n_items
    heap[i] = code
    while i > 0:
        parent = (i - 1) // 2
        if heap[parent] <= heap[i]:
            break
        heap[parent], heap[i] = heap[i], heap[parent]
        i = parent
    return n_items + 1


@njit_maybe()
def _heap_pop(heap, n_items):
    n_items -= 1
    heap[0] = heap[n_items]
    i = 0
    while True:
        l = 2 * i + 1
        r = l + 1
        smallest = i
        if l < n_items and heap[l] < heap[smallest]:
            smallest = l
        if r < n_items and heap[r] < heap[smallest]:
            smallest = r
        if smallest == i:
            break
        heap[i], heap[smallest] = heap[smallest], heap[i]
        i = smallest
    return n_items


def run_revealment(
    family: UpdateFamily,
    q: float,
    n: int,
    runs: int,
    seed: int,
    C: int | None = None,
) -> RevealmentStats:
    """Aggregate per-site reveal counts of the exploration over random samples."""
    from .rng import bernoulli_box

    config = OneArmConfig(n=n, C=C if C is not None else family.range())
    counts = np.zeros((2 * n + 1, 2 * n + 1), dtype=np.int64)
    key = derive_key(seed, "revealment")
    decisions = 0
    for trial in range(runs):
        sample = bernoulli_box(key, trial, n, q)
        k = randint_scalar(key, 1, n, "ring", trial)
        res = explore_one_arm(sample, family, config, k=k)
        counts += res.revealed
        decisions += res.decision
    return RevealmentStats(counts=counts, runs=runs, decisions=decisions)


# -- origin-escape exploration (shifted ring window) ---------------------------


def explore_origin_event(
    sample: np.ndarray,
    family: UpdateFamily,
    config: OneArmConfig,
    k0: int,
    seed: int | None = None,
    k: int | None = None,
) -> tuple[bool, np.ndarray]:
    """Decide whether the origin is eventually infected, revealing few sites.

    Runs the one-arm exploration with the ring drawn from [3 k0, 4 k0); on
    termination checks from revealed data whether some site near the ring
    certifiably survives more than n/C rounds.  If so everything is revealed
    and the exact answer returned; if not, the origin's infection is already
    certain.  Returns (origin infected, revealed mask).
    """
    n, C = config.n, config.C
    if not (C < k0 < n / (4 * C)):
        raise ValueError("need C < k0 < n/(4C)")
    if k is None:
        if seed is None:
            raise ValueError("need a seed or an explicit ring radius k")
        k = randint_scalar(derive_key(seed, "ring0"), 3 * k0, 4 * k0)
    if not (3 * k0 <= k < 4 * k0):
        raise ValueError("ring radius outside [3 k0, 4 k0)")

    prep = ClosurePrep(n, family, Region.empty())
    ox, oy = _step_offsets(family)
    sample = np.asarray(sample, dtype=bool)

    revealed, _ = _explore_stage1(
        sample, n, C, k, prep.rule_ptr, prep.offx, prep.offy, ox, oy
    )
    slow = _ring_survivor_certified(
        sample, revealed, n, C, k, prep.rule_ptr, prep.offx, prep.offy, n / C
    )
    if not slow:
        return True, revealed.astype(bool)
    times = prep.slice_box(run_closure(prep, sample))
    infected = times[n, n] != INF_TIME
    return bool(infected), np.ones_like(sample, dtype=bool)


@njit_maybe()
def _ring_survivor_certified(sample, revealed, n, C, k, rule_ptr, rofx, rofy, threshold):
    """Does the revealed data witness a near-ring site surviving past threshold?"""
    w = 2 * n + 1
    n_rules = len(rule_ptr) - 1
    n_roff = len(rofx)

    off_rule = np.empty(n_roff, dtype=np.int32)
    for r in range(n_rules):
        for j in range(rule_ptr[r], rule_ptr[r + 1]):
            off_rule[j] = r

    hidx = np.full((w, w), -1, dtype=np.int64)
    cap = w * w
    hx = np.empty(cap, dtype=np.int64)
    hy = np.empty(cap, dtype=np.int64)
    n_h = 0
    for iy in range(w):
        for ix in range(w):
            if revealed[iy, ix] == 1:
                hidx[iy, ix] = n_h
                hx[n_h] = ix
                hy[n_h] = iy
                n_h += 1
    tau = np.empty(cap, dtype=np.int64)
    counters = np.empty(cap * n_rules, dtype=np.int64)
    _pessimistic_times(
        sample, revealed, hidx, hx, hy, n_h, tau, counters,
        rule_ptr, rofx, rofy, off_rule, w,
    )
    for h in range(n_h):
        cheb = max(abs(hx[h] - n), abs(hy[h] - n))
        if abs(k - cheb) <= C and (tau[h] < 0 or tau[h] > threshold):
            return True
    return False
