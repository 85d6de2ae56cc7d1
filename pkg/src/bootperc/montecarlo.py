"""Monte Carlo estimators over Bernoulli initial configurations.

All estimators sample sites through the counter-based RNG, so runs are
bit-reproducible from (seed, parameters) alone and coupled across box radii,
densities and boundary regions.  Trials chunk across a thread pool; success
counts are integers, so results do not depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._accel import default_threads
from .closure import INF_TIME, ClosurePrep, run_closure
from .families import UpdateFamily
from .onearm import OneArmConfig, _detect_kernel, _step_offsets
from .regions import GeometryError, Region
from .rng import bernoulli_box, box_field, config_digest, derive_key


@dataclass(frozen=True)
class TrialEstimate:
    value: float
    stderr: float
    samples: int
    seed: int
    config_digest: str

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
            "config_digest": self.config_digest,
        }


@dataclass
class DecayDiagnostic:
    q: float
    radii: list[int]
    estimates: list[TrialEstimate]
    exponents: list[float]
    verdict: str  # "summable" | "not-summable" | "inconclusive"

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "radii": self.radii,
            "estimates": [e.as_dict() for e in self.estimates],
            "exponents": self.exponents,
            "verdict": self.verdict,
        }


EXPONENT_MARGIN = 0.25  # summability heuristic: local log2 slope vs 2 +/- margin


def _bernoulli(successes: int, samples: int, seed: int, digest: str) -> TrialEstimate:
    p = successes / samples
    se = math.sqrt(p * (1.0 - p) / samples)
    return TrialEstimate(p, se, samples, seed, digest)


def _run_chunked(samples: int, threads: int | None, chunk_fn):
    """Sum chunk_fn(lo, hi) over a partition of range(samples)."""
    threads = threads or default_threads()
    if threads <= 1 or samples < 64:
        return chunk_fn(0, samples)
    bounds = np.linspace(0, samples, threads + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda ab: chunk_fn(ab[0], ab[1]), zip(bounds[:-1], bounds[1:])))
    return sum(parts)


def estimate_theta(
    family: UpdateFamily,
    q: float,
    n: int,
    boundary: Region | None = None,
    samples: int = 1000,
    seed: int = 0,
    threads: int | None = None,
) -> TrialEstimate:
    """Frequency of the origin escaping the closure of a Bernoulli(q) sample."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("density q must be in [0, 1]")
    boundary = boundary or Region.empty()
    digest = config_digest(
        {"op": "theta", "family": family.to_json(), "q": q, "n": n,
         "boundary": repr(boundary), "samples": samples}
    )
    prep = ClosurePrep(n, family, boundary)
    key = derive_key(seed, "theta")
    m = n + prep.reach

    def chunk(lo, hi):
        hits = 0
        for trial in range(lo, hi):
            infected = bernoulli_box(key, trial, n, q)
            times = run_closure(prep, infected, stop_at_origin=True)
            hits += times[m, m] == INF_TIME
        return hits

    return _bernoulli(_run_chunked(samples, threads, chunk), samples, seed, digest)


def estimate_tilde_theta(
    family: UpdateFamily,
    q: float,
    n: int,
    samples: int = 1000,
    seed: int = 0,
    C: int | None = None,
    threads: int | None = None,
) -> TrialEstimate:
    """Frequency of the one-arm event on a healthy-boundary box."""
    config = OneArmConfig(n=n, C=C if C is not None else family.range())
    digest = config_digest(
        {"op": "tilde-theta", "family": family.to_json(), "q": q, "n": n,
         "C": config.C, "samples": samples}
    )
    prep = ClosurePrep(n, family, Region.empty())
    ox, oy = _step_offsets(family)
    key = derive_key(seed, "tilde-theta")

    def chunk(lo, hi):
        hits = 0
        for trial in range(lo, hi):
            infected = bernoulli_box(key, trial, n, q)
            times = prep.slice_box(run_closure(prep, infected))
            hits += bool(_detect_kernel(times, n, config.C, n, ox, oy))
        return hits

    return _bernoulli(_run_chunked(samples, threads, chunk), samples, seed, digest)


def estimate_tau_tail(
    family: UpdateFamily,
    q: float,
    threshold: int,
    samples: int = 1000,
    seed: int = 0,
    box_radius: int | None = None,
    threads: int | None = None,
) -> TrialEstimate:
    """Frequency of the origin surviving more than `threshold` rounds.

    The box must be large enough that the event does not depend on sites
    beyond it: radius >= range(family) * threshold.
    """
    need = family.range() * max(threshold, 1)
    if box_radius is None:
        box_radius = need
    if box_radius < need:
        raise ValueError(f"box radius {box_radius} too small; need >= {need}")
    digest = config_digest(
        {"op": "tau-tail", "family": family.to_json(), "q": q,
         "threshold": threshold, "box_radius": box_radius, "samples": samples}
    )
    prep = ClosurePrep(box_radius, family, Region.empty())
    key = derive_key(seed, "tau-tail")
    m = box_radius + prep.reach

    def chunk(lo, hi):
        hits = 0
        for trial in range(lo, hi):
            infected = bernoulli_box(key, trial, box_radius, q)
            times = run_closure(prep, infected)
            t0 = times[m, m]
            hits += (t0 == INF_TIME) or (t0 > threshold)
        return hits

    return _bernoulli(_run_chunked(samples, threads, chunk), samples, seed, digest)


def critical_density_sweep(
    family: UpdateFamily,
    u,
    theta: float,
    q_grid,
    radii,
    samples: int = 500,
    seed: int = 0,
    threads: int | None = None,
) -> tuple[list[DecayDiagnostic], tuple[float | None, float | None]]:
    """Escape-decay diagnostics against a cone boundary, over a density grid.

    One uniform field per trial drives every (q, radius) pair, so the escape
    counts are coupled: monotone in q and in the radius without Monte Carlo
    noise.  The summability verdict is the documented finite-size heuristic
    (local log2 exponents vs 2 with margin 0.25), not an exact decision.
    """
    from .regions import cone

    q_grid = list(q_grid)
    if sorted(q_grid) != q_grid:
        raise ValueError("q grid must be sorted ascending")
    radii = sorted(radii)
    boundary = cone(u, theta)
    preps = {r: ClosurePrep(r, family, boundary) for r in radii}
    key = derive_key(seed, "critdens")
    n_max = max(radii)

    def chunk(lo, hi):
        counts = np.zeros((len(q_grid), len(radii)), dtype=np.int64)
        for trial in range(lo, hi):
            fld = box_field(key, trial, n_max)
            for qi, q in enumerate(q_grid):
                infected = fld < q
                for ri, r in enumerate(radii):
                    prep = preps[r]
                    sl = infected[n_max - r : n_max + r + 1, n_max - r : n_max + r + 1]
                    times = run_closure(prep, sl, stop_at_origin=True)
                    m = r + prep.reach
                    counts[qi, ri] += times[m, m] == INF_TIME
        return counts

    counts = _run_chunked(samples, threads, chunk)
    digest = config_digest(
        {"op": "critdens", "family": family.to_json(), "u": repr(u), "theta": theta,
         "q_grid": q_grid, "radii": radii, "samples": samples}
    )

    diags = []
    for qi, q in enumerate(q_grid):
        ests = [_bernoulli(int(c), samples, seed, digest) for c in counts[qi]]
        exps = []
        for a, b in zip(ests, ests[1:]):
            if b.value == 0.0:
                exps.append(math.inf)
            elif a.value == 0.0:
                exps.append(0.0)  # cannot happen under coupling; defensive
            else:
                exps.append(math.log2(a.value / b.value))
        tail = exps[-2:] if len(exps) >= 2 else exps
        if tail and all(e > 2.0 + EXPONENT_MARGIN for e in tail):
            verdict = "summable"
        elif tail and all(e < 2.0 - EXPONENT_MARGIN for e in tail):
            verdict = "not-summable"
        else:
            verdict = "inconclusive"
        diags.append(DecayDiagnostic(q, list(radii), ests, exps, verdict))

    q_lo = None
    q_hi = None
    for d in diags:
        if d.verdict == "not-summable":
            q_lo = d.q
    for d in reversed(diags):
        if d.verdict == "summable":
            q_hi = d.q
    if q_lo is not None and q_hi is not None and q_lo > q_hi:
        q_lo = q_hi = None  # ordering anomaly: report inconclusive
    return diags, (q_lo, q_hi)


def droplet_growth_probability(
    family: UpdateFamily,
    directions,
    L: float,
    Lambda: float,
    q: float,
    samples: int = 200,
    seed: int = 0,
    growth_factor: int = 4,
    threads: int | None = None,
) -> TrialEstimate:
    """Probability that an infected droplet plus Bernoulli(q) noise fills its cone.

    Event: the closure of droplet(L) union a sample on the box of radius
    growth_factor * Lambda covers cone(u0, u_last) within radius Lambda / 2.
    """
    from .lattice import box_coords
    from .regions import Region as R

    if Lambda < growth_factor * L:
        raise GeometryError("need Lambda >= growth_factor * L")
    dirs = tuple(directions)
    n = int(round(growth_factor * Lambda))
    prep = ClosurePrep(n, family, Region.empty())
    xs, ys = box_coords(n)

    droplet_mask = (
        R.droplet(dirs, L).mask(xs, ys) if L > 0
        else np.zeros_like(xs, dtype=bool)
    )
    cone_region = R.cone_of(dirs[0], dirs[-1])
    target = cone_region.mask(xs, ys) & (np.maximum(np.abs(xs), np.abs(ys)) <= Lambda / 2)
    if not target.any():
        raise GeometryError("target cone slice contains no lattice sites")
    digest = config_digest(
        {"op": "droplet", "family": family.to_json(), "L": L, "Lambda": Lambda,
         "q": q, "growth_factor": growth_factor, "samples": samples}
    )
    key = derive_key(seed, "droplet")
    r = prep.reach
    w = 2 * n + 1

    def chunk(lo, hi):
        hits = 0
        for trial in range(lo, hi):
            infected = bernoulli_box(key, trial, n, q) | droplet_mask
            times = run_closure(prep, infected)
            final = times[r : r + w, r : r + w] != INF_TIME
            hits += bool((final | ~target).all())
        return hits

    return _bernoulli(_run_chunked(samples, threads, chunk), samples, seed, digest)
