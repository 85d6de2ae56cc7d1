"""Directions on the circle, in exact or floating form.

A direction is either an exact primitive integer vector (a, b) with
gcd(|a|,|b|) = 1, or a real angle in (-pi, pi].  Exact directions support a
total circular order computed purely with integer cross/dot products, which is
what the classifier relies on; angle directions are for Monte Carlo geometry
where float inner products are fine.
"""

from __future__ import annotations

import math
from functools import cmp_to_key

TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Map an angle to (-pi, pi]."""
    t = math.fmod(theta, TWO_PI)
    if t <= -math.pi:
        t += TWO_PI
    elif t > math.pi:
        t -= TWO_PI
    return t


class Direction:
    """A point of S^1: exact primitive lattice vector or float angle."""

    __slots__ = ("ax", "ay", "_angle")

    def __init__(self, ax=None, ay=None, angle=None):
        if ax is not None:
            if ax == 0 and ay == 0:
                raise ValueError("zero vector has no direction")
            g = math.gcd(abs(ax), abs(ay))
            self.ax = ax // g
            self.ay = ay // g
            self._angle = None
        else:
            self.ax = None
            self.ay = None
            self._angle = normalize_angle(float(angle))

    @classmethod
    def exact(cls, ax: int, ay: int) -> "Direction":
        return cls(ax=int(ax), ay=int(ay))

    @classmethod
    def from_angle(cls, theta: float) -> "Direction":
        return cls(angle=theta)

    @property
    def is_exact(self) -> bool:
        return self.ax is not None

    def angle(self) -> float:
        if self.is_exact:
            return math.atan2(self.ay, self.ax)
        return self._angle

    def unit(self) -> tuple[float, float]:
        if self.is_exact:
            r = math.hypot(self.ax, self.ay)
            return (self.ax / r, self.ay / r)
        return (math.cos(self._angle), math.sin(self._angle))

    def norm(self) -> float:
        if self.is_exact:
            return math.hypot(self.ax, self.ay)
        return 1.0

    def plus(self, theta: float) -> "Direction":
        """Direction rotated by theta radians; exact form survives theta == 0."""
        if theta == 0.0:
            return self
        return Direction.from_angle(self.angle() + theta)

    def antipode(self) -> "Direction":
        if self.is_exact:
            return Direction.exact(-self.ax, -self.ay)
        return Direction.from_angle(self._angle + math.pi)

    def perp_ccw(self) -> "Direction":
        """Rotate by +pi/2 (exact only)."""
        return Direction.exact(-self.ay, self.ax)

    def perp_cw(self) -> "Direction":
        """Rotate by -pi/2 (exact only)."""
        return Direction.exact(self.ay, -self.ax)

    def __eq__(self, other):
        if not isinstance(other, Direction):
            return NotImplemented
        if self.is_exact and other.is_exact:
            return self.ax == other.ax and self.ay == other.ay
        return self.angle() == other.angle()

    def __hash__(self):
        if self.is_exact:
            return hash(("d", self.ax, self.ay))
        return hash(("a", self._angle))

    def __repr__(self):
        if self.is_exact:
            return f"Direction.exact({self.ax}, {self.ay})"
        return f"Direction.from_angle({self._angle!r})"

    def pretty(self) -> str:
        """Angle as an exact fraction of pi when representable, else the vector."""
        if self.is_exact:
            eighth = _PI_FRACTIONS.get((self.ax, self.ay))
            if eighth is not None:
                return eighth
            return f"({self.ax},{self.ay})"
        return f"{self._angle / math.pi:+.6f}*pi"


_PI_FRACTIONS = {
    (1, 0): "0",
    (1, 1): "pi/4",
    (0, 1): "pi/2",
    (-1, 1): "3*pi/4",
    (-1, 0): "pi",
    (-1, -1): "-3*pi/4",
    (0, -1): "-pi/2",
    (1, -1): "-pi/4",
}


def cross(d1: Direction, d2: Direction) -> int:
    return d1.ax * d2.ay - d1.ay * d2.ax


def dot(d1: Direction, d2: Direction) -> int:
    return d1.ax * d2.ax + d1.ay * d2.ay


def _half(d: Direction) -> int:
    """0 for angles in [0, pi), 1 for [pi, 2pi); exact."""
    if d.ay > 0 or (d.ay == 0 and d.ax > 0):
        return 0
    return 1


def circular_cmp(d1: Direction, d2: Direction) -> int:
    """Total circular order on exact directions, anchored just above angle 0."""
    h1, h2 = _half(d1), _half(d2)
    if h1 != h2:
        return -1 if h1 < h2 else 1
    c = cross(d1, d2)
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


circular_key = cmp_to_key(circular_cmp)


def sort_circular(dirs) -> list[Direction]:
    return sorted(dirs, key=circular_key)


def ccw_gap_exceeds_pi(d1: Direction, d2: Direction) -> bool:
    """True iff the CCW gap from d1 to d2 is strictly greater than pi.

    Assumes d1 != d2 as directions (antipodal pairs give exactly pi).
    """
    return cross(d1, d2) < 0


def width_class(s: Direction, e: Direction) -> str:
    """Classify the CCW width from s to e against pi: 'lt', 'eq' or 'gt'.

    s and e must be distinct exact directions.
    """
    c = cross(s, e)
    if c > 0:
        return "lt"
    if c < 0:
        return "gt"
    return "eq"


def ccw_width(s: Direction, e: Direction) -> float:
    """Float CCW width from s to e in (0, 2pi) for distinct directions."""
    w = e.angle() - s.angle()
    while w <= 0:
        w += TWO_PI
    while w > TWO_PI:
        w -= TWO_PI
    return w
