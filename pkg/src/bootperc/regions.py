"""Geometric boundary regions: half-planes, cones, droplets, explicit sets.

Membership is strict-inequality with no epsilon.  Exact directions use integer
inner products; angle directions use float inner products, where ties sit on a
measure-zero set and resolve by the strict test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .directions import Direction, normalize_angle
from .families import Site


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Region:
    kind: str  # "empty" | "halfplane" | "cone" | "droplet" | "explicit"
    u: Direction | None = None
    v: Direction | None = None
    offset: float = 0.0
    directions: tuple[Direction, ...] = ()
    size: float = 0.0
    sites: frozenset = field(default_factory=frozenset)

    # -- constructors ------------------------------------------------------

    @classmethod
    def empty(cls) -> "Region":
        return cls("empty")

    @classmethod
    def half_plane(cls, u: Direction, a: float = 0.0) -> "Region":
        return cls("halfplane", u=u, offset=float(a))

    @classmethod
    def cone_of(cls, u: Direction, v: Direction) -> "Region":
        return cls("cone", u=u, v=v)

    @classmethod
    def droplet(cls, directions, size: float) -> "Region":
        dirs = tuple(directions)
        _validate_droplet_directions(dirs)
        if size <= 0:
            raise GeometryError("droplet size must be positive")
        return cls("droplet", directions=dirs, size=float(size))

    @classmethod
    def explicit(cls, sites) -> "Region":
        return cls("explicit", sites=frozenset((int(x), int(y)) for x, y in sites))

    # -- membership --------------------------------------------------------

    def mask(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Vectorized membership over integer coordinate arrays."""
        if self.kind == "empty":
            return np.zeros(np.broadcast(xs, ys).shape, dtype=bool)
        if self.kind == "halfplane":
            return _halfplane_mask(self.u, self.offset, xs, ys)
        if self.kind == "cone":
            return _halfplane_mask(self.u, 0.0, xs, ys) & _halfplane_mask(self.v, 0.0, xs, ys)
        if self.kind == "droplet":
            anchor = droplet_anchor(self.directions, self.size)
            out = np.ones(np.broadcast(xs, ys).shape, dtype=bool)
            for d in self.directions:
                ux, uy = d.unit()
                out &= (xs + anchor[0]) * ux + (ys + anchor[1]) * uy < self.size
            return out
        if self.kind == "explicit":
            flat = np.zeros(np.broadcast(xs, ys).shape, dtype=bool)
            bx = np.broadcast_arrays(xs, ys)
            it = np.nditer(flat, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                if (int(bx[0][idx]), int(bx[1][idx])) in self.sites:
                    flat[idx] = True
            return flat
        raise GeometryError(f"unknown region kind {self.kind!r}")

    def __contains__(self, site: Site) -> bool:
        return region_contains(self, site)


def region_contains(region: Region, site: Site) -> bool:
    """Pure membership test for a single site."""
    x, y = site
    if region.kind == "empty":
        return False
    if region.kind == "explicit":
        return (x, y) in region.sites
    if region.kind == "halfplane":
        return _halfplane_contains(region.u, region.offset, x, y)
    if region.kind == "cone":
        return _halfplane_contains(region.u, 0.0, x, y) and _halfplane_contains(
            region.v, 0.0, x, y
        )
    if region.kind == "droplet":
        anchor = droplet_anchor(region.directions, region.size)
        for d in region.directions:
            ux, uy = d.unit()
            if not (x + anchor[0]) * ux + (y + anchor[1]) * uy < region.size:
                return False
        return True
    raise GeometryError(f"unknown region kind {region.kind!r}")


def _halfplane_contains(u: Direction, a: float, x: int, y: int) -> bool:
    if u.is_exact:
        lhs = x * u.ax + y * u.ay
        if a == 0.0:
            return lhs < 0
        return lhs < a * u.norm()
    ux, uy = u.unit()
    return x * ux + y * uy < a


def _halfplane_mask(u: Direction, a: float, xs, ys) -> np.ndarray:
    if u.is_exact:
        lhs = xs * u.ax + ys * u.ay
        if a == 0.0:
            return lhs < 0
        return lhs < a * u.norm()
    ux, uy = u.unit()
    return xs * ux + ys * uy < a


def cone(u: Direction, theta: float) -> Region:
    """Boundary region for a direction with angular slack theta.

    theta == 0 degenerates to the half-plane at u; otherwise the intersection
    of the half-planes at u and u + theta, normalized so the pair is listed
    counterclockwise.  Symmetric: cone(u, t) and cone(u + t, -t) describe the
    same site set.
    """
    if abs(theta) > math.pi:
        raise GeometryError("cone angle must satisfy |theta| <= pi")
    if theta == 0.0:
        return Region.half_plane(u)
    w = u.plus(theta)
    if theta > 0:
        return Region.cone_of(u, w)
    return Region.cone_of(w, u)


# -- droplets ---------------------------------------------------------------


def _validate_droplet_directions(dirs: tuple[Direction, ...]):
    if len(dirs) < 6:
        raise GeometryError("droplet needs at least six directions (n >= 3)")
    angles = [d.angle() for d in dirs]
    base = angles[0]
    unrolled = [base]
    for a in angles[1:]:
        nxt = a
        while nxt <= unrolled[-1] + 1e-12:
            nxt += 2.0 * math.pi
        unrolled.append(nxt)
    if unrolled[-1] - unrolled[0] >= 2.0 * math.pi:
        raise GeometryError("droplet directions must fit in one turn, strictly increasing")
    mid_span = unrolled[-2] - unrolled[1]
    if abs(mid_span - math.pi) > 1e-9:
        raise GeometryError("inner droplet directions must span exactly a half turn")


def droplet_anchor(dirs: tuple[Direction, ...], size: float) -> tuple[float, float]:
    """Intersection point of the two bounding lines through the flank directions."""
    u = dirs[0]
    v = dirs[-1]
    (ux, uy), (vx, vy) = u.unit(), v.unit()
    det = ux * vy - uy * vx
    if abs(det) < 1e-12:
        raise GeometryError("flank droplet directions are parallel")
    # Solve <p, u> = size, <p, v> = size.
    px = (size * vy - size * uy) / det
    py = (ux * size - vx * size) / det
    return (px, py)


def droplet_sites(directions, size: float, clip: int) -> set[Site]:
    """Lattice points of the droplet polygon, restricted to the clip box."""
    region = Region.droplet(directions, size)
    r = int(clip)
    xs, ys = np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="xy")
    inside = region.mask(xs, ys)
    return {(int(x), int(y)) for x, y in zip(xs[inside], ys[inside])}


def region_equal_on_box(r1: Region, r2: Region, radius: int = 50) -> bool:
    """Extensional equality check over B_radius."""
    xs, ys = np.meshgrid(
        np.arange(-radius, radius + 1), np.arange(-radius, radius + 1), indexing="xy"
    )
    return bool(np.array_equal(r1.mask(xs, ys), r2.mask(xs, ys)))
