"""Oriented percolation: right-edge speed, closed-form bounds, density profiles.

The right edge grows from the half-line {(y, 0) : y <= 0} with steps
(-1, 1), (1, 1) through open sites (i.i.d. Bernoulli(p)); its speed alpha(p)
is the almost-sure limit of r_n / n.  The closed form

    alpha(p) <= (p^3 + p - 1) / (p^3 - 2 p^2 + 3 p - 1)

inverts to a cubic whose root lower-bounds alpha^{-1}(a); both directions are
implemented and are algebraically consistent.  Directional critical-density
profiles for transformed OP rules are built from the canonical three-piece
profile (zero on the unstable arc, a constant on the stable half, and the
re-parametrised edge speed in between), pulled back through the direction map
of the rule transform.

alpha^{-1} has two evaluation modes, stamped into every profile: the rigorous
closed-form bound, or a monotone interpolation of a Monte Carlo alpha table.
The OP critical density constant is never hardcoded as truth: it resolves to
the closed-form bound 0.317672 or to a user-supplied literature value.  The
published sharper contour bound (0.312) is intentionally out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import JIT_ENABLED, njit_maybe
from .directions import Direction, normalize_angle
from .rng import derive_key, site_uniforms

TWO_PI = 2.0 * math.pi


# -- closed-form bound machinery -----------------------------------------------


def alpha_bound(p: float) -> float:
    """Upper bound on the edge speed; valid branch has a positive denominator."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    den = p**3 - 2 * p**2 + 3 * p - 1
    if den <= 0.0:
        raise ValueError(f"alpha bound undefined at p={p}: nonpositive denominator")
    return (p**3 + p - 1) / den

def gws_root(a: float, tol: float = 1e-12) -> float:
    """Bisection root of (1-a) p^3 + 2a p^2 + (1-3a) p - (1-a) = 0 in (0, 1).

    The root lower-bounds alpha^{-1}(a); the cubic is the cross-multiplied
    form of (p^3 - p^2 + 2p - 1)/(p - p^2) = (1 + a)/(1 - a).
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError("slope must be in [0, 1]")
    if a == 1.0:
        return 1.0

    def f(p):
        return (1 - a) * p**3 + 2 * a * p**2 + (1 - 3 * a) * p - (1 - a)

    lo, hi = 0.0, 1.0
    if not f(lo) < 0 < f(hi):
        raise ValueError(f"no sign change for slope a={a}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


GWS_QC = 1.0 - 0.6823278038280193  # 1 - gws_root(0): the closed-form OP constant
LITERATURE_SHARPER_BOUND = 0.312  # published refinement, not implemented here


# -- right edge simulation ------------------------------------------------------


@dataclass(frozen=True)
class EdgeSpeedEstimate:
    p: float
    n: int
    trials: int
    mean_slope: float
    stderr: float
    bound: float
    died_out: int

    def as_dict(self) -> dict:
        return {
            "p": self.p, "n": self.n, "trials": self.trials,
            "mean_slope": self.mean_slope, "stderr": self.stderr,
            "bound": self.bound, "died_out": self.died_out,
        }


def _open_row(key: int, trial: int, t: int, lo: int, hi: int, p: float) -> np.ndarray:
    xs = np.arange(lo, hi + 1, dtype=np.int64)
    return site_uniforms(key, trial, xs, np.full_like(xs, t)) < p


def right_edge_run(p: float, n: int, key: int, trial: int, width: int | None = None):
    """One run of the right edge; returns (slope r_n/n, died_out flag).

    The column window is [-width, n]; paths achieving a nonnegative right edge
    never leave it, so width >= n is lossless there.
    """
    if width is None:
        width = n
    if width < n:
        raise ValueError("window width must be at least n")
    lo, hi = -width, n
    reach = np.zeros(hi - lo + 1, dtype=bool)
    reach[: -lo + 1] = True  # columns x <= 0
    if JIT_ENABLED:
        r = _edge_kernel(np.int64(lo), np.int64(hi), np.int64(n), p,
                         np.uint64(derive_key(key, trial)))
        if r == lo - 1:
            return math.nan, True
        return r / n, False
    for t in range(1, n + 1):
        open_row = _open_row(key, trial, t, lo, hi, p)
        left = np.zeros_like(reach)
        left[1:] = reach[:-1]
        right = np.zeros_like(reach)
        right[:-1] = reach[1:]
        reach = open_row & (left | right)
        if not reach.any():
            return math.nan, True
    r = int(np.nonzero(reach)[0].max()) + lo
    return r / n, False


@njit_maybe()
def _edge_kernel(lo, hi, n, p, kstream):
    width = hi - lo + 1
    reach = np.zeros(width, dtype=np.uint8)
    for i in range(-lo + 1):
        reach[i] = 1
    nxt = np.zeros(width, dtype=np.uint8)
    mult_x = np.uint64(0x8AD8A4B06F2D3F25)
    mult_y = np.uint64(0xA3EC647659359ACD)
    for t in range(1, n + 1):
        any_alive = False
        ty = np.uint64(t) * mult_y
        for i in range(width):
            ok = False
            if i > 0 and reach[i - 1] == 1:
                ok = True
            elif i < width - 1 and reach[i + 1] == 1:
                ok = True
            if ok:
                x = np.uint64(lo + i) * mult_x
                z = x ^ ty ^ kstream
                z = z + np.uint64(0x9E3779B97F4A7C15)
                z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
                z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
                z = z ^ (z >> np.uint64(31))
                u = (z >> np.uint64(11)) * (2.0 ** -53)
                if u < p:
                    nxt[i] = 1
                    any_alive = True
                else:
                    nxt[i] = 0
            else:
                nxt[i] = 0
        reach, nxt = nxt, reach
        if not any_alive:
            return lo - 1
    r = lo - 1
    for i in range(width):
        if reach[i] == 1:
            r = lo + i
    return r


def right_edge_run_fullgrid(p: float, n: int, key: int, trial: int, width: int | None = None):
    """Oracle engine: materialize the whole open-site grid, then sweep rows.

    Shares the per-site random stream with right_edge_run, so same-seed runs
    agree exactly.
    """
    if width is None:
        width = n
    lo, hi = -width, n
    cols = np.arange(lo, hi + 1, dtype=np.int64)
    grid = np.empty((n + 1, cols.size), dtype=bool)
    for t in range(n + 1):
        grid[t] = site_uniforms(key, trial, cols, np.full_like(cols, t)) < p
    reach = np.zeros(cols.size, dtype=bool)
    reach[: -lo + 1] = True
    for t in range(1, n + 1):
        left = np.zeros_like(reach)
        left[1:] = reach[:-1]
        right = np.zeros_like(reach)
        right[:-1] = reach[1:]
        reach = grid[t] & (left | right)
        if not reach.any():
            return math.nan, True
    return (int(np.nonzero(reach)[0].max()) + lo) / n, False


def edge_speed_estimate(p: float, n: int, trials: int, seed: int = 0) -> EdgeSpeedEstimate:
    """Trial mean of r_n / n, die-outs excluded from the mean and counted."""
    key = derive_key(seed, "edge-speed", n)
    slopes = []
    died = 0
    for trial in range(trials):
        s, d = right_edge_run(p, n, key, trial)
        if d:
            died += 1
        else:
            slopes.append(s)
    arr = np.asarray(slopes)
    mean = float(arr.mean()) if arr.size else math.nan
    se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else math.nan
    return EdgeSpeedEstimate(p, n, trials, mean, se, alpha_bound(p), died)


def alpha_mc_table(p_grid, n: int = 500, trials: int = 50, seed: int = 0):
    """Monte Carlo alpha(p) on a grid, for the empirical profile mode."""
    rows = []
    for p in p_grid:
        est = edge_speed_estimate(p, n, trials, seed)
        rows.append((p, est.mean_slope))
    return rows


# -- density profiles -----------------------------------------------------------


def make_alpha_inverse(mode: str = "gws", table=None):
    """alpha^{-1} as a callable on [0, 1], per the selected evaluation mode."""
    if mode == "gws":
        return gws_root
    if mode == "mc-table":
        if not table:
            raise ValueError("mc-table mode needs (p, alpha) rows")
        rows = sorted((a, p) for p, a in table if not math.isnan(a))
        alphas = np.array([a for a, _ in rows])
        ps = np.array([p for _, p in rows])

        def inv(a: float) -> float:
            return float(np.interp(a, alphas, ps))

        return inv
    raise ValueError(f"unknown alpha-inverse mode {mode!r}")


@dataclass
class DensityProfile:
    """Piecewise critical-density function on the circle of directions."""

    evaluate_fn: object
    breakpoints: list[float]
    mode: str
    qc: float
    pieces: list[str] = field(default_factory=list)

    def evaluate(self, u: float) -> float:
        return self.evaluate_fn(normalize_angle(u))

    def __call__(self, u: float) -> float:
        return self.evaluate(u)

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "qc": self.qc,
            "breakpoints": sorted(normalize_angle(b) for b in self.breakpoints),
            "pieces": self.pieces,
        }


def _canonical_eval(u: float, alpha_inv, qc: float) -> float:
    """Three-piece profile of the canonical rule {(-1,1),(1,1)}."""
    u = normalize_angle(u)
    if -3 * math.pi / 4 <= u <= -math.pi / 4:
        return 0.0
    if 0.0 <= u or u == math.pi:
        return qc
    # remaining: (-pi, -3pi/4) and (-pi/4, 0)
    return 1.0 - alpha_inv(abs(math.tan(u)))


def _map_direction(matrix, u: float) -> float:
    """Angle of (L(u - pi/2)) + pi/2 for the profile pullback."""
    phi = u - math.pi / 2.0
    vx, vy = math.cos(phi), math.sin(phi)
    wx = matrix[0][0] * vx + matrix[0][1] * vy
    wy = matrix[1][0] * vx + matrix[1][1] * vy
    return normalize_angle(math.atan2(wy, wx) + math.pi / 2.0)


def _map_direction_inv(matrix, beta: float) -> float:
    det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    inv = [
        [matrix[1][1] / det, -matrix[0][1] / det],
        [-matrix[1][0] / det, matrix[0][0] / det],
    ]
    return _map_direction(inv, beta)


_CANONICAL_BREAKS = [math.pi, -3 * math.pi / 4, -math.pi / 4, 0.0]


def find_op_transform(rule) -> list[list[float]]:
    """Matrix L with det > 0 mapping the rule's two offsets onto {(-1,1),(1,1)}."""
    offs = list(rule.offsets)
    if len(offs) != 2:
        raise ValueError("an OP-type rule has exactly two offsets")
    (a, b), (c, d) = offs
    det_x = a * d - b * c
    if det_x == 0:
        raise ValueError("offsets are collinear; not an OP-type rule")
    for t1, t2 in ((( -1, 1), (1, 1)), ((1, 1), (-1, 1))):
        # Solve L [a c; b d] = [t1x t2x; t1y t2y].
        l00 = (t1[0] * d - t2[0] * b) / det_x
        l01 = (t2[0] * a - t1[0] * c) / det_x
        l10 = (t1[1] * d - t2[1] * b) / det_x
        l11 = (t2[1] * a - t1[1] * c) / det_x
        if l00 * l11 - l01 * l10 > 0:
            return [[l00, l01], [l10, l11]]
    raise ValueError("no positively oriented transform onto the canonical rule")


def op_profile(
    transform=None,
    bidirectional: bool = False,
    mode: str = "gws",
    alpha_table=None,
    qc: float | None = None,
) -> DensityProfile:
    """Critical-density profile of a transformed (optionally bidirectional) OP rule.

    `transform` is the matrix L (det > 0) carrying the target rule onto the
    canonical {(-1,1),(1,1)}; identity means the canonical rule itself.
    """
    L = transform if transform is not None else [[1.0, 0.0], [0.0, 1.0]]
    det = L[0][0] * L[1][1] - L[0][1] * L[1][0]
    if det <= 0:
        raise ValueError("transform must have positive determinant")
    alpha_inv = make_alpha_inverse(mode, alpha_table)
    qc_val = qc if qc is not None else (1.0 - alpha_inv(0.0) if mode == "mc-table" else GWS_QC)

    def base(u: float) -> float:
        return _canonical_eval(_map_direction(L, u), alpha_inv, qc_val)

    if bidirectional:
        def ev(u: float) -> float:
            return min(base(u), base(u + math.pi))
    else:
        ev = base

    breaks = [_map_direction_inv(L, b) for b in _CANONICAL_BREAKS]
    if bidirectional:
        breaks += [normalize_angle(b + math.pi) for b in breaks]
    label = "bidirectional-op" if bidirectional else "op"
    return DensityProfile(ev, breaks, mode, qc_val, [f"{label} pullback det={det:g}"])


def constant_profile(c: float) -> DensityProfile:
    return DensityProfile(lambda u: c, [], "constant", c, [f"constant {c}"])


def profile_min(a: DensityProfile, b: DensityProfile) -> DensityProfile:
    """Pointwise minimum; crossing points are located by bisection and inserted."""
    breaks = sorted({normalize_angle(x) for x in (list(a.breakpoints) + list(b.breakpoints))})
    if not breaks:
        breaks = [0.0]

    def diff(u):
        return a.evaluate(u) - b.evaluate(u)

    crossings = []
    m = len(breaks)
    for i in range(m):
        lo = breaks[i]
        hi = breaks[(i + 1) % m]
        if hi <= lo:
            hi += TWO_PI
        probes = np.linspace(lo, hi, 33)
        vals = [diff(u) for u in probes]
        for j in range(len(probes) - 1):
            if vals[j] == 0.0:
                crossings.append(normalize_angle(probes[j]))
                continue
            if vals[j] * vals[j + 1] >= 0:
                continue
            x0, x1 = probes[j], probes[j + 1]
            f0 = vals[j]
            for _ in range(60):
                xm = 0.5 * (x0 + x1)
                fm = diff(xm)
                if fm == 0.0:
                    break
                if (fm > 0) == (f0 > 0):
                    x0, f0 = xm, fm
                else:
                    x1 = xm
            crossings.append(normalize_angle(0.5 * (x0 + x1)))

    def ev(u: float) -> float:
        return min(a.evaluate(u), b.evaluate(u))

    return DensityProfile(
        ev,
        sorted(set(breaks) | set(crossings)),
        f"min({a.mode},{b.mode})" if a.mode != b.mode else a.mode,
        min(a.qc, b.qc),
        a.pieces + b.pieces,
    )


@dataclass
class InfSupReport:
    value: float
    semicircle_start: float
    local_maxima: list[tuple[float, float]]

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "semicircle_start": self.semicircle_start,
            "local_maxima": [{"angle": a, "value": v} for a, v in self.local_maxima],
        }


_EPS_ANGLE = 1e-7


def semicircle_infsup(profile: DensityProfile, grid: int = 2048) -> InfSupReport:
    """inf over closed semicircles of the sup of the profile on the semicircle.

    Pieces are monotone between breakpoints, so suprema live at breakpoints
    and one-sided limits; candidate semicircle endpoints are the breakpoints
    themselves plus a uniform safety grid.
    """
    breaks = sorted(normalize_angle(b) for b in profile.breakpoints)
    probe_pts = set()
    for b in breaks:
        probe_pts.update((b - _EPS_ANGLE, b, b + _EPS_ANGLE))
    probe_pts.update(np.linspace(-math.pi, math.pi, grid, endpoint=False))
    probe = np.array(sorted(normalize_angle(t) for t in probe_pts))
    vals = np.array([profile.evaluate(t) for t in probe])

    def sup_on(lo: float) -> float:
        # closed semicircle [lo, lo + pi]
        hi = lo + math.pi
        rel = np.mod(probe - lo, TWO_PI)
        inside = rel <= math.pi + 1e-12
        best = vals[inside].max() if inside.any() else -math.inf
        best = max(best, profile.evaluate(lo), profile.evaluate(hi))
        return best

    candidates = set(breaks)
    for b in breaks:
        candidates.update((b - math.pi, b - _EPS_ANGLE, b + _EPS_ANGLE))
    candidates.update(np.linspace(-math.pi, math.pi, 256, endpoint=False))
    best_lo, best_val = 0.0, math.inf
    for lo in sorted(normalize_angle(c) for c in candidates):
        s = sup_on(lo)
        if s < best_val:
            best_val, best_lo = s, lo

    maxima = []
    for b in breaks:
        v = profile.evaluate(b)
        if v >= profile.evaluate(b - _EPS_ANGLE) - 1e-12 and v >= profile.evaluate(b + _EPS_ANGLE) - 1e-12:
            maxima.append((b, v))
    return InfSupReport(best_val, best_lo, maxima)


# -- DTBP ----------------------------------------------------------------------


def dtbp_profiles(mode: str = "gws", alpha_table=None) -> list[DensityProfile]:
    """One pulled-back OP profile per DTBP rule."""
    from .models import dtbp

    return [
        op_profile(find_op_transform(rule), mode=mode, alpha_table=alpha_table)
        for rule in dtbp().rules
    ]


def dtbp_combined_profile(mode: str = "gws", alpha_table=None) -> DensityProfile:
    p1, p2, p3 = dtbp_profiles(mode=mode, alpha_table=alpha_table)
    return profile_min(profile_min(p1, p2), p3)


def dtbp_bound() -> dict:
    """The closed-form critical-density bound for DTBP, with context constants."""
    root = gws_root(1.0 / 3.0)
    bound = 1.0 - root
    return {
        "bound": bound,
        "reference": 0.2452,
        "is_below_reference": bound < 0.2452,
        "cubic_residual": root**3 + root**2 - 1.0,
        "op_constant_bound": GWS_QC,
        "sharper_published_op_bound": LITERATURE_SHARPER_BOUND,
        "mode": "gws",
    }
