"""Stable/unstable direction arcs and the universality class of a family.

Everything here is exact integer arithmetic: arc endpoints are directions
perpendicular to rule offsets, kept as primitive vectors, so tangent cases
(semicircles of width exactly pi, isolated stable points) never suffer float
misclassification.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arcs import Arc, ArcSet
from .directions import Direction, ccw_gap_exceeds_pi, sort_circular
from .families import Rule, UpdateFamily

SUPERCRITICAL = "supercritical"
CRITICAL = "critical"
SUBCRITICAL = "subcritical"


@dataclass(frozen=True)
class Classification:
    unstable: ArcSet
    stable: ArcSet
    klass: str
    trivial_subcritical: bool


@dataclass(frozen=True)
class SemicircleScan:
    widest_arc: Arc | None
    widest_width: float
    has_open_semicircle: bool
    semicircle_avoids_positive_stable: bool


def unstable_arc(rule: Rule) -> ArcSet:
    """Directions u with <x, u> < 0 for every offset x of the rule.

    Empty exactly when the origin lies in the convex hull of the offsets;
    otherwise a single open arc whose endpoints are perpendicular to the
    extreme rays of the offsets' conic hull.
    """
    dirs = _dedupe([Direction.exact(dx, dy) for dx, dy in rule.offsets])
    if len(dirs) == 1:
        g_cw = g_ccw = dirs[0]
    else:
        ordered = sort_circular(dirs)
        m = len(ordered)
        wide = None
        for i in range(m):
            a, b = ordered[i], ordered[(i + 1) % m]
            if ccw_gap_exceeds_pi(a, b):
                wide = (a, b)
                break
        if wide is None:
            return ArcSet.empty()
        g_ccw, g_cw = wide  # offsets span CCW from g_cw around to g_ccw
    return ArcSet.open_arc(g_ccw.perp_ccw(), g_cw.perp_cw())


def classify(family: UpdateFamily) -> Classification:
    unstable = ArcSet.union_all([unstable_arc(r) for r in family.rules])
    stable = unstable.complement()
    trivial = unstable.is_empty()
    if unstable.fits_open_semicircle():
        klass = SUPERCRITICAL
    elif stable.drop_points().complement().fits_closed_semicircle():
        klass = CRITICAL
    else:
        klass = SUBCRITICAL
    return Classification(unstable, stable, klass, trivial)


def semicircle_scan(unstable: ArcSet) -> SemicircleScan:
    """Sweep report: widest unstable arc and the two semicircle predicates.

    Candidate semicircles all have an endpoint at an arc endpoint, which the
    per-arc width classification covers exactly.
    """
    widest = unstable.widest_arc()
    width = widest.width() if widest is not None else (
        2.0 * 3.141592653589793 if unstable.is_full() else 0.0
    )
    stable_plus = unstable.complement().drop_points()
    return SemicircleScan(
        widest_arc=widest,
        widest_width=width,
        has_open_semicircle=unstable.fits_open_semicircle(),
        semicircle_avoids_positive_stable=stable_plus.complement().fits_closed_semicircle(),
    )


def _dedupe(dirs: list[Direction]) -> list[Direction]:
    seen = set()
    out = []
    for d in dirs:
        if d not in seen:
            seen.add(d)
            out.append(d)
    return out
