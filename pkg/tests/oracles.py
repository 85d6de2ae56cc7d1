"""Independent reference implementations used only to cross-check the package."""

from __future__ import annotations

import numpy as np

from bootperc.closure import InfectionTimes
from bootperc.families import UpdateFamily
from bootperc.onearm import OneArmConfig


def detect_one_arm_dfs(times: InfectionTimes, family: UpdateFamily, config: OneArmConfig) -> bool:
    """Depth-bounded exhaustive path search for the one-arm event.

    States are (site, capped step index); the index constraint saturates once
    it exceeds the largest finite time, because only never-infected sites can
    continue past that point.
    """
    n, C = config.n, config.C
    t = times.times
    steps = [(-ux, -uy) for ux, uy in family.union_offsets()]
    finite = t[t >= 0]
    cap = int(finite.max()) + 1 if finite.size else 1

    seen = set()
    stack = [(0, 0, 0)]
    while stack:
        x, y, i = stack.pop()
        key = (x, y, min(i, cap))
        if key in seen:
            continue
        seen.add(key)
        if max(abs(x), abs(y)) >= n - C:
            return True
        for dx, dy in steps:
            nx, ny = x + dx, y + dy
            if abs(nx) > n or abs(ny) > n:
                continue
            tt = t[ny + n, nx + n]
            if tt < 0 or tt >= i + 1:
                stack.append((nx, ny, i + 1))
    return False


def closure_times_reference(n: int, infected, family: UpdateFamily, region_sites=frozenset()):
    """Site-by-site synchronous closure with dict bookkeeping (tiny boxes only)."""
    state = {}
    for y in range(-n, n + 1):
        for x in range(-n, n + 1):
            state[(x, y)] = bool(infected[y + n, x + n]) or (x, y) in region_sites

    def helper(x, y):
        if abs(x) <= n and abs(y) <= n:
            return state[(x, y)]
        return (x, y) in region_sites

    times = {s: (0 if v else None) for s, v in state.items()}
    t = 0
    while True:
        new = []
        for (x, y), v in state.items():
            if v:
                continue
            for rule in family.rules:
                if all(helper(x + dx, y + dy) for dx, dy in rule.offsets):
                    new.append((x, y))
                    break
        if not new:
            break
        t += 1
        for s in new:
            state[s] = True
            times[s] = t
    grid = np.full((2 * n + 1, 2 * n + 1), -1, dtype=np.int32)
    for (x, y), v in times.items():
        if v is not None:
            grid[y + n, x + n] = v
    return grid


def explore_one_arm_reference(sample, family: UpdateFamily, config: OneArmConfig, k: int):
    """Pure-Python mirror of the exploration, consuming sites through an oracle
    that enforces the reveal-at-most-once contract."""
    n, C = config.n, config.C
    w = 2 * n + 1
    queried = set()

    def oracle(x, y):
        assert (x, y) not in queried, "site queried twice"
        queried.add((x, y))
        return bool(sample[y + n, x + n])

    revealed = {}  # site -> state

    def band(x, y):
        return abs(k - max(abs(x), abs(y))) <= C

    def pessimistic_times():
        healthy = {s for s, v in revealed.items() if not v}
        times = {}
        frontier = []
        counters = {}
        for (x, y) in healthy:
            for r, rule in enumerate(family.rules):
                cnt = 0
                dead = False
                for dx, dy in rule.offsets:
                    nx, ny = x + dx, y + dy
                    if abs(nx) > n or abs(ny) > n:
                        dead = True
                        break
                    if (nx, ny) in healthy:
                        cnt += 1
                counters[((x, y), r)] = None if dead else cnt
                if not dead and cnt == 0 and (x, y) not in times:
                    times[(x, y)] = 1
                    frontier.append((x, y))
        while frontier:
            nxt = []
            for s in frontier:
                t = times[s]
                for r, rule in enumerate(family.rules):
                    for dx, dy in rule.offsets:
                        tx, ty = s[0] - dx, s[1] - dy
                        if (tx, ty) not in healthy or (tx, ty) in times:
                            continue
                        c = counters[((tx, ty), r)]
                        if c is None:
                            continue
                        counters[((tx, ty), r)] = c - 1
                        if c - 1 == 0 and (tx, ty) not in times:
                            times[(tx, ty)] = t + 1
                            nxt.append((tx, ty))
            frontier = nxt
        return times  # healthy sites absent from the dict never get infected

    def certified(times):
        healthy = {s for s, v in revealed.items() if not v}
        big = 1 << 20
        m = {}
        for s in healthy:
            cap = times.get(s, big)
            m[s] = cap if band(*s) else -1
        changed = True
        while changed:
            changed = False
            for s in healthy:
                cap = times.get(s, big)
                best = -1
                for ux, uy in family.union_offsets():
                    prev = (s[0] - ux, s[1] - uy)
                    if prev in m and m[prev] > best:
                        best = m[prev]
                val = min(cap, best - 1) if not band(*s) else min(cap, big)
                if val > m[s]:
                    m[s] = val
                    changed = True
        return m

    while True:
        times = pessimistic_times()
        m = certified(times)
        candidates = []
        for y in range(-n, n + 1):
            for x in range(-n, n + 1):
                if (x, y) in revealed:
                    continue
                if band(x, y):
                    candidates.append((x, y))
                    continue
                for ux, uy in family.union_offsets():
                    prev = (x - ux, y - uy)
                    if m.get(prev, -1) >= 1:
                        candidates.append((x, y))
                        break
        if not candidates:
            break
        site = min(candidates)
        revealed[site] = oracle(*site)

    origin_revealed = (0, 0) in revealed
    revealed_mask = np.zeros((w, w), dtype=bool)
    for (x, y) in revealed:
        revealed_mask[y + n, x + n] = True
    return origin_revealed, revealed_mask
