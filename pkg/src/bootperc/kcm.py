"""Kinetically constrained dynamics: simulation, exact generators, spectral gaps.

The constraint at a site is "some rule is fully infected right now"; the site's
own state never enters (rules exclude the origin).  Each site carries a rate-1
clock; at a ring of the clock a constrained site resamples Bernoulli(q).  The
chain is reversible for the product measure, which the generator checks
numerically to 1e-12.

Finite tori are genuinely non-ergodic (blocked configurations are absorbing),
so outputs expose the closed communicating class structure instead of
pretending a unique gap; the spectral gap is taken on the class containing the
all-infected state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from ._accel import njit_maybe
from .families import UpdateFamily
from .rng import derive_key

_MAX_SITES = 16


@dataclass
class GeneratorMatrix:
    k: int
    q: float
    rates: sp.csr_matrix  # dense-able: dimension 2^(k^2)
    weights: np.ndarray  # unnormalized stationary weights pi_q
    n_sites: int

    @property
    def dim(self) -> int:
        return self.rates.shape[0]

    def dense(self) -> np.ndarray:
        return self.rates.toarray()

    def row_sum_defect(self) -> float:
        return float(np.abs(self.rates.sum(axis=1)).max())

    def detailed_balance_defect(self) -> float:
        coo = self.rates.tocoo()
        worst = 0.0
        for i, j, r in zip(coo.row, coo.col, coo.data):
            if i == j:
                continue
            back = self.rates[j, i]
            worst = max(worst, abs(self.weights[i] * r - self.weights[j] * back))
        return worst


def _site_masks(family: UpdateFamily, k: int) -> list[list[int]]:
    """Per-site, per-rule bitmasks of the offsets on the torus Z_k x Z_k."""
    masks = []
    for i in range(k * k):
        x, y = i % k, i // k
        per_rule = []
        for rule in family.rules:
            m = 0
            ok = True
            for dx, dy in rule.offsets:
                j = ((x + dx) % k) + k * ((y + dy) % k)
                if j == i:
                    ok = False  # offset wraps onto the site itself; rule can never bind
                    break
                m |= 1 << j
            if ok:
                per_rule.append(m)
        masks.append(per_rule)
    return masks


def build_generator(family: UpdateFamily, k: int, q: float) -> GeneratorMatrix:
    """Explicit rate matrix of the KCM on the k x k torus."""
    n_sites = k * k
    if n_sites > _MAX_SITES:
        raise ValueError(f"generator capped at {_MAX_SITES} sites, got {n_sites}")
    if not 0.0 < q < 1.0:
        raise ValueError("q must be in (0, 1)")
    masks = _site_masks(family, k)
    dim = 1 << n_sites

    rows, cols, data = [], [], []
    diag = np.zeros(dim)
    for state in range(dim):
        for i in range(n_sites):
            if not any((state & m) == m for m in masks[i]):
                continue
            rate = (1.0 - q) if (state >> i) & 1 else q
            to = state ^ (1 << i)
            rows.append(state)
            cols.append(to)
            data.append(rate)
            diag[state] -= rate
    rows.extend(range(dim))
    cols.extend(range(dim))
    data.extend(diag)
    rates = sp.csr_matrix((data, (rows, cols)), shape=(dim, dim))

    bits = np.array([bin(s).count("1") for s in range(dim)])
    weights = (q ** bits) * ((1.0 - q) ** (n_sites - bits))
    return GeneratorMatrix(k, q, rates, weights, n_sites)


def communicating_classes(gen: GeneratorMatrix):
    """(labels, closed-class labels) of the transition digraph."""
    adj = gen.rates.copy()
    adj.setdiag(0)
    adj.eliminate_zeros()
    n_comp, labels = connected_components(adj, directed=True, connection="strong")
    closed = set(range(n_comp))
    coo = adj.tocoo()
    for i, j in zip(coo.row, coo.col):
        if labels[i] != labels[j]:
            closed.discard(labels[i])
    return labels, sorted(closed)


def zero_eigenvalue_count(gen: GeneratorMatrix, tol: float = 1e-8) -> int:
    eigs = np.linalg.eigvals(gen.dense())
    return int(np.sum(np.abs(eigs) < tol))


def spectral_gap(gen: GeneratorMatrix) -> float:
    """Gap of the generator restricted to the class of the all-infected state.

    Detailed balance makes D^{1/2} Q D^{-1/2} symmetric; the gap is the
    smallest nonzero eigenvalue magnitude of its negative on that class.
    """
    labels, _ = communicating_classes(gen)
    full = (1 << gen.n_sites) - 1
    members = np.nonzero(labels == labels[full])[0]
    sub = gen.rates[np.ix_(members, members)].toarray()
    w = gen.weights[members]
    d = np.sqrt(w)
    sym = (d[:, None] * sub) / d[None, :]
    sym = 0.5 * (sym + sym.T)  # symmetric up to 1e-12 already
    eigs = np.linalg.eigvalsh(-sym)
    eigs.sort()
    if abs(eigs[0]) > 1e-9:
        raise RuntimeError("restricted generator lost its zero mode")
    return float(eigs[1]) if len(eigs) > 1 else 0.0


def relaxation_time(gen: GeneratorMatrix) -> float:
    return 1.0 / spectral_gap(gen)


def exact_mean_infection_time(gen: GeneratorMatrix) -> float:
    """E[tau_0] from the generator, started from pi_q conditioned on the
    ergodic class of all-infected and on the origin being healthy."""
    labels, _ = communicating_classes(gen)
    full = (1 << gen.n_sites) - 1
    in_class = labels == labels[full]
    healthy0 = np.array([not (s & 1) for s in range(gen.dim)])
    src = in_class & healthy0
    if not src.any():
        return 0.0
    idx = np.nonzero(src)[0]
    sub = gen.rates[np.ix_(idx, idx)].toarray()
    h = np.linalg.solve(sub, -np.ones(len(idx)))
    w = gen.weights[idx]
    return float((w @ h) / w.sum())


def class_member_mask(gen: GeneratorMatrix) -> np.ndarray:
    labels, _ = communicating_classes(gen)
    full = (1 << gen.n_sites) - 1
    return labels == labels[full]


# -- trajectory simulation ------------------------------------------------------


@dataclass
class SimResult:
    tau0: float
    censored: bool
    final_time: float


@njit_maybe()
def _kcm_kernel(state, k, rule_ptr, offx, offy, q, horizon, seed, want_tau0, occupancy_out):
    """Event-driven run on the torus; returns (tau0 or -1, elapsed).

    With want_tau0 the run stops when the origin first becomes infected.
    Otherwise it integrates origin occupation time into occupancy_out[0].
    """
    np.random.seed(seed)
    n_sites = k * k
    n_rules = len(rule_ptr) - 1
    t = 0.0
    if want_tau0 and state[0] == 1:
        return 0.0, 0.0
    while True:
        dt = -math.log(1.0 - np.random.random()) / n_sites
        if t + dt > horizon:
            if not want_tau0:
                occupancy_out[0] += (horizon - t) * state[0]
            return -1.0, horizon
        if not want_tau0:
            occupancy_out[0] += dt * state[0]
        t += dt
        i = np.random.randint(0, n_sites)
        x = i % k
        y = i // k
        ok = False
        for r in range(n_rules):
            good = True
            for j in range(rule_ptr[r], rule_ptr[r + 1]):
                xx = (x + offx[j]) % k
                yy = (y + offy[j]) % k
                if state[xx + k * yy] == 0:
                    good = False
                    break
            if good:
                ok = True
                break
        if ok:
            state[i] = 1 if np.random.random() < q else 0
            if want_tau0 and i == 0 and state[0] == 1:
                return t, t


def _flat_offsets(family: UpdateFamily):
    ptr = [0]
    ox, oy = [], []
    for rule in family.rules:
        for dx, dy in rule.offsets:
            ox.append(dx)
            oy.append(dy)
        ptr.append(len(ox))
    return (
        np.asarray(ptr, dtype=np.int64),
        np.asarray(ox, dtype=np.int64),
        np.asarray(oy, dtype=np.int64),
    )


def _sample_initial(
    key: int,
    trial: int,
    n_sites: int,
    q: float,
    condition_origin_healthy: bool,
    class_mask: np.ndarray | None,
) -> np.ndarray:
    """pi_q sample, rejection-conditioned as requested."""
    from .rng import site_uniforms

    attempt = 0
    while True:
        u = site_uniforms(key, trial * 100003 + attempt, np.arange(n_sites), np.zeros(n_sites, dtype=np.int64))
        state = (u < q).astype(np.uint8)
        ok = True
        if condition_origin_healthy and state[0]:
            ok = False
        if ok and class_mask is not None:
            code = int(np.bitwise_or.reduce((state.astype(np.int64) << np.arange(n_sites))))
            ok = bool(class_mask[code])
        if ok:
            return state
        attempt += 1
        if attempt > 100000:
            raise RuntimeError("rejection sampling failed; conditioning event too rare")


def simulate(
    family: UpdateFamily,
    k: int,
    q: float,
    horizon: float,
    seed: int,
    initial: np.ndarray | None = None,
    condition_origin_healthy: bool = False,
    class_mask: np.ndarray | None = None,
    trial: int = 0,
) -> SimResult:
    """One trajectory on the k x k torus; tau0 is censored at the horizon."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must be in (0, 1)")
    key = derive_key(seed, "kcm", k)
    if initial is None:
        state = _sample_initial(key, trial, k * k, q, condition_origin_healthy, class_mask)
    else:
        state = np.asarray(initial, dtype=np.uint8).reshape(k * k).copy()
    ptr, ox, oy = _flat_offsets(family)
    occupancy = np.zeros(1)
    tau, elapsed = _kcm_kernel(
        state, k, ptr, ox, oy, q, horizon,
        derive_key(key, "traj", trial) % (2**31 - 1), True, occupancy,
    )
    return SimResult(tau0=tau, censored=tau < 0, final_time=elapsed)


def mean_infection_time_mc(
    family: UpdateFamily,
    k: int,
    q: float,
    trajectories: int,
    seed: int,
    horizon: float = 1e7,
    condition_origin_healthy: bool = True,
    condition_class: bool = True,
) -> tuple[float, float, int]:
    """(mean tau0, stderr, censored count) over equilibrium-started runs."""
    class_mask = None
    if condition_class and k * k <= _MAX_SITES:
        class_mask = class_member_mask(build_generator(family, k, q))
    taus = []
    censored = 0
    for trial in range(trajectories):
        res = simulate(
            family, k, q, horizon, seed,
            condition_origin_healthy=condition_origin_healthy,
            class_mask=class_mask, trial=trial,
        )
        if res.censored:
            censored += 1
        else:
            taus.append(res.tau0)
    arr = np.asarray(taus)
    mean = float(arr.mean()) if arr.size else math.inf
    se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else math.inf
    return mean, se, censored


def origin_occupation(
    family: UpdateFamily, k: int, q: float, horizon: float, seed: int,
    initial: np.ndarray | None = None,
) -> float:
    """Time fraction the origin spends infected over [0, horizon]."""
    if initial is None:
        initial = np.ones(k * k, dtype=np.uint8)  # all-infected: ergodic class
    state = np.asarray(initial, dtype=np.uint8).reshape(k * k).copy()
    ptr, ox, oy = _flat_offsets(family)
    occupancy = np.zeros(1)
    _kcm_kernel(
        state, k, ptr, ox, oy, q, horizon,
        derive_key(seed, "occupation", k) % (2**31 - 1), False, occupancy,
    )
    return float(occupancy[0] / horizon)


# -- bootstrap rounds on the torus (for the comparison diagnostics) -------------


def torus_bootstrap_tau0(family: UpdateFamily, k: int, infected: np.ndarray) -> int:
    """Synchronous rounds until the origin infects on the torus; -1 if never."""
    grid = np.asarray(infected, dtype=bool).reshape(k, k).copy()
    if grid[0, 0]:
        return 0
    t = 0
    while True:
        sat = np.zeros_like(grid)
        for rule in family.rules:
            acc = np.ones_like(grid)
            for dx, dy in rule.offsets:
                acc &= np.roll(np.roll(grid, -dy, axis=0), -dx, axis=1)
            sat |= acc
        new = sat & ~grid
        if not new.any():
            return -1
        t += 1
        grid |= new
        if grid[0, 0]:
            return t


def lemma46_report(
    family: UpdateFamily,
    k: int,
    q: float,
    samples: int,
    seed: int,
    horizon: float = 1e6,
) -> dict:
    """Mean-infection-time diagnostics tying bootstrap rounds, KCM and T_rel.

    Reported, not asserted: the underlying inequalities concern the infinite
    lattice, and the lower constant is not quantitative, so finite-torus
    numbers come with provenance and censoring counts only.
    """
    from .rng import site_uniforms

    gen = build_generator(family, k, q)
    gap = spectral_gap(gen)
    t_rel = 1.0 / gap
    kcm_mean, kcm_se, censored = mean_infection_time_mc(
        family, k, q, samples, seed, horizon=horizon,
        condition_origin_healthy=True, condition_class=True,
    )
    class_mask = class_member_mask(gen)
    key = derive_key(seed, "bp-rounds", k)
    rounds = []
    for trial in range(samples):
        state = _sample_initial(key, trial, k * k, q, True, class_mask)
        rounds.append(torus_bootstrap_tau0(family, k, state))
    finite = [r for r in rounds if r >= 0]
    bp_mean = float(np.mean(finite)) if finite else math.inf
    return {
        "schema": "bootperc/lemma46/1",
        "family": family.name,
        "k": k,
        "q": q,
        "samples": samples,
        "seed": seed,
        "spectral_gap": gap,
        "t_rel": t_rel,
        "kcm_mean_tau0": kcm_mean,
        "kcm_stderr": kcm_se,
        "kcm_censored": censored,
        "bp_mean_rounds": bp_mean,
        "bp_never_infected": len(rounds) - len(finite),
        "upper_ratio_kcm_vs_trel_over_q": kcm_mean / (t_rel / q),
        "lower_ratio_kcm_vs_bp": (kcm_mean / bp_mean) if bp_mean > 0 else math.inf,
        "initial_law": "pi_q | origin healthy, ergodic class of all-infected",
        "note": "finite-torus diagnostic; the constant in the lower bound is unknown",
    }
