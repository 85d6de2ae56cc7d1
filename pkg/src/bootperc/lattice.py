"""Finite-box configurations: the box B_n, an infection bitmap, a boundary region.

Conventions: the box B_n is [-n, n]^2, bitmaps are (2n+1) x (2n+1) boolean
arrays indexed [y + n, x + n].  Sites of the boundary region are permanently
infected whether inside or outside the box; everything else outside the box
never helps.  An optional domain mask clips the dynamics to a sub-shape of the
box (clipped sites behave exactly like sites outside the box).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .regions import Region


@dataclass(frozen=True)
class LatticeInstance:
    n: int
    infected: np.ndarray  # bool, (2n+1, 2n+1), [y + n, x + n]
    boundary: Region
    domain: np.ndarray | None = None  # bool, same shape; None means the full box

    def __post_init__(self):
        w = 2 * self.n + 1
        if self.infected.shape != (w, w):
            raise ValueError(f"bitmap must be {(w, w)}, got {self.infected.shape}")
        if self.domain is not None and self.domain.shape != (w, w):
            raise ValueError("domain mask shape mismatch")

    @classmethod
    def from_sites(cls, n: int, sites, boundary: Region | None = None) -> "LatticeInstance":
        grid = np.zeros((2 * n + 1, 2 * n + 1), dtype=bool)
        for x, y in sites:
            if abs(x) > n or abs(y) > n:
                raise ValueError(f"site {(x, y)} outside B_{n}")
            grid[y + n, x + n] = True
        return cls(n, grid, boundary or Region.empty())

    @classmethod
    def from_bitmap(cls, n, grid, boundary=None, domain=None) -> "LatticeInstance":
        return cls(n, np.asarray(grid, dtype=bool), boundary or Region.empty(), domain)

    @classmethod
    def empty(cls, n: int, boundary: Region | None = None) -> "LatticeInstance":
        return cls(n, np.zeros((2 * n + 1, 2 * n + 1), dtype=bool), boundary or Region.empty())

    @classmethod
    def fully_infected(cls, n: int, boundary: Region | None = None) -> "LatticeInstance":
        return cls(n, np.ones((2 * n + 1, 2 * n + 1), dtype=bool), boundary or Region.empty())

    def has_site(self, x: int, y: int) -> bool:
        return bool(self.infected[y + self.n, x + self.n])


def box_coords(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Meshgrid of (x, y) integer coordinates for B_n, indexed [y + n, x + n]."""
    coords = np.arange(-n, n + 1)
    xs, ys = np.meshgrid(coords, coords, indexing="xy")
    return xs, ys
