"""Builtin update families, rule transforms, and the Spiral/OP event check.

The Spiral check compares, sample by sample, origin escape under bidirectional
oriented percolation against escape under the two "forward" Spiral rules on a
shallow strip with an infected cone.  Within the admissible parameter window
the two events coincide exactly, which is what makes the Spiral model tractable
through oriented percolation.
"""

from __future__ import annotations

import math

import numpy as np

from .closure import origin_escapes
from .directions import Direction
from .families import Rule, UpdateFamily
from .lattice import LatticeInstance
from .regions import GeometryError, Region, cone
from .rng import bernoulli_box, site_uniforms

OP_RULE = Rule.of((-1, 1), (1, 1))

SPIRAL_U1 = Rule.of((1, -1), (1, 0), (1, 1), (0, 1))
SPIRAL_U2 = Rule.of((1, -1), (1, 0), (-1, -1), (0, -1))


def op() -> UpdateFamily:
    return UpdateFamily("oriented-percolation", (OP_RULE,))


def bidirectional_op() -> UpdateFamily:
    return UpdateFamily(
        "bidirectional-op",
        (Rule.of((0, 1), (1, 1)), Rule.of((0, -1), (-1, -1))),
    )


def dtbp() -> UpdateFamily:
    return UpdateFamily(
        "dtbp",
        (Rule.of((1, 0), (0, 1)), Rule.of((1, 0), (-1, -1)), Rule.of((0, 1), (-1, -1))),
    )


def spiral() -> UpdateFamily:
    return UpdateFamily(
        "spiral",
        (SPIRAL_U1, SPIRAL_U2, SPIRAL_U1.negated(), SPIRAL_U2.negated()),
    )


def two_neighbour() -> UpdateFamily:
    nbrs = [(0, 1), (1, 0), (-1, 0), (0, -1)]
    rules = []
    for i in range(4):
        for j in range(i + 1, 4):
            rules.append(Rule.of(nbrs[i], nbrs[j]))
    return UpdateFamily("two-neighbour", tuple(rules))


def site_perc_rule() -> UpdateFamily:
    return UpdateFamily("site-percolation", (Rule.of((0, 1), (1, 0), (-1, 0), (0, -1)),))


def north_east() -> UpdateFamily:
    return UpdateFamily("north-east", (Rule.of((0, 1), (1, 0)),))


def gop(u: Direction, r: int) -> UpdateFamily:
    """Generalised oriented percolation: the single rule H_u intersected with B_r."""
    ux, uy = u.unit()
    offsets = []
    for y in range(-r, r + 1):
        for x in range(-r, r + 1):
            if (x, y) == (0, 0):
                continue
            if u.is_exact:
                inside = x * u.ax + y * u.ay < 0
            else:
                inside = x * ux + y * uy < 0.0
            if inside:
                offsets.append((x, y))
    if not offsets:
        raise GeometryError(f"no lattice sites in the half-plane slab of radius {r}")
    return UpdateFamily(f"gop-r{r}", (Rule(tuple(offsets)),))


BUILTINS = {
    "op": op,
    "bidirectional-op": bidirectional_op,
    "dtbp": dtbp,
    "spiral": spiral,
    "two-neighbour": two_neighbour,
    "site-percolation": site_perc_rule,
    "north-east": north_east,
}


def builtin(name: str) -> UpdateFamily:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin family {name!r}; have {sorted(BUILTINS)}") from None


# -- transforms ---------------------------------------------------------------


def linear_transform(family: UpdateFamily, matrix) -> UpdateFamily:
    """Map every offset through an invertible 2x2 integer matrix."""
    m = [[int(matrix[0][0]), int(matrix[0][1])], [int(matrix[1][0]), int(matrix[1][1])]]
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if det == 0:
        raise ValueError("transform matrix must be invertible")
    rules = []
    for rule in family.rules:
        rules.append(
            Rule(
                tuple(
                    (m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y)
                    for x, y in rule.offsets
                )
            )
        )
    return UpdateFamily(f"{family.name}*L", tuple(rules))


def transform_direction(matrix, u: Direction) -> Direction:
    """Direction of (L(u - pi/2)) + pi/2: pulls critical-density profiles back
    through a rule transform.  No closed-form cross-check exists for it, so it
    is implemented literally on unit vectors."""
    phi = u.angle() - math.pi / 2.0
    vx, vy = math.cos(phi), math.sin(phi)
    wx = matrix[0][0] * vx + matrix[0][1] * vy
    wy = matrix[1][0] * vx + matrix[1][1] * vy
    return Direction.from_angle(math.atan2(wy, wx) + math.pi / 2.0)


# -- the Spiral / bidirectional-OP event pair ---------------------------------


def _strip_domain(n: int, c: float, tilt: float) -> np.ndarray:
    """Box [-n, n] x [0, c n] as a domain mask over B_n, optionally rotated."""
    coords = np.arange(-n, n + 1)
    xs, ys = np.meshgrid(coords, coords, indexing="xy")
    if tilt != 0.0:
        co, si = math.cos(-tilt), math.sin(-tilt)
        rx = xs * co - ys * si
        ry = xs * si + ys * co
    else:
        rx, ry = xs, ys
    return (rx >= -n) & (rx <= n) & (ry >= 0) & (ry <= c * n)


def spiral_check_params(u: float, theta: float, n: int, c: float):
    """Validate the admissible window for the event-pair check."""
    if not (math.pi / 2 < u < 5 * math.pi / 4):
        raise GeometryError("u must lie in (pi/2, 5*pi/4)")
    if not (math.pi / 2 - u < theta < 5 * math.pi / 4 - u):
        raise GeometryError("theta must keep u + theta inside (pi/2, 5*pi/4)")
    if not 0 < c <= 1:
        raise GeometryError("aspect c must be in (0, 1]")
    for ang in (u, u + theta):
        if math.pi / 2 < ang < math.pi and not c < math.tan(ang - math.pi / 2):
            raise GeometryError(
                f"aspect c={c} violates the slope constraint for direction {ang:.4f}"
            )
    if n < 4:
        raise GeometryError("box radius too small")


def spiral_event_pair(
    sample: np.ndarray,
    u: float,
    theta: float,
    n: int,
    c: float = 0.2,
    tilted: bool = False,
) -> tuple[bool, bool]:
    """(escape under bidirectional OP, escape under {U1, U2}) on one sample.

    The sample is clipped to the strip; the cone is a permanent boundary
    region, infected inside and outside the strip alike (in particular the
    wedge below the strip's floor, which keeps downward offsets honest).
    `tilted` rotates the strip (sample window) by 3*pi/4, the companion
    geometry for paths leaving through the second rule; the cone stays put,
    being the boundary condition under study.
    """
    spiral_check_params(u, theta, n, c)
    tilt = 3 * math.pi / 4 if tilted else 0.0
    domain = _strip_domain(n, c, tilt)
    region = cone(Direction.from_angle(u), theta)

    infected = np.asarray(sample, dtype=bool) & domain

    inst = LatticeInstance.from_bitmap(n, infected, region, domain)
    e1 = origin_escapes(inst, bidirectional_op())
    e2 = origin_escapes(inst, UpdateFamily("spiral-forward", (SPIRAL_U1, SPIRAL_U2)))
    return e1, e2


def spiral_pair_agreement(
    u: float,
    theta: float,
    n: int,
    q: float,
    samples: int,
    seed: int,
    c: float = 0.2,
    tilted: bool = False,
) -> tuple[int, int]:
    """Run the event pair over Bernoulli(q) samples; (agreements, samples)."""
    agree = 0
    for trial in range(samples):
        sample = bernoulli_box(seed, trial, n, q)
        e1, e2 = spiral_event_pair(sample, u, theta, n, c, tilted=tilted)
        agree += e1 == e2
    return agree, samples
