"""Finite unions of circular arcs with exact rational-direction endpoints.

An ArcSet is the canonical form of a subset of S^1 built from finitely many
arcs.  Internally every boolean operation goes through an "elementary piece"
decomposition: the distinct endpoint directions cut the circle into isolated
points and open gaps, memberships are resolved per piece, and maximal runs are
reassembled.  That keeps unions, complements and normalization exact and
trivially order-independent.

Degenerate arcs are first-class: start == end with both endpoints closed is a
single point, start == end with both open is the circle minus that point.
"""

from __future__ import annotations

from dataclasses import dataclass

from .directions import Direction, ccw_width, circular_cmp, sort_circular, width_class


@dataclass(frozen=True)
class Arc:
    start: Direction
    end: Direction
    closed_start: bool
    closed_end: bool

    def is_point(self) -> bool:
        return self.start == self.end and self.closed_start and self.closed_end

    def is_punctured_circle(self) -> bool:
        return self.start == self.end and not self.closed_start and not self.closed_end

    def width(self) -> float:
        if self.is_point():
            return 0.0
        if self.is_punctured_circle():
            return 2.0 * 3.141592653589793
        return ccw_width(self.start, self.end)

    def pretty(self) -> str:
        if self.is_point():
            return f"{{{self.start.pretty()}}}"
        lb = "[" if self.closed_start else "("
        rb = "]" if self.closed_end else ")"
        return f"{lb}{self.start.pretty()}, {self.end.pretty()}{rb}"


class ArcSet:
    """Normalized finite union of arcs; immutable."""

    __slots__ = ("arcs", "_full")

    def __init__(self, arcs: tuple[Arc, ...], full: bool = False):
        self.arcs = arcs
        self._full = full

    # -- constructors ------------------------------------------------------

    @classmethod
    def empty(cls) -> "ArcSet":
        return cls(())

    @classmethod
    def full(cls) -> "ArcSet":
        return cls((), full=True)

    @classmethod
    def from_arc(cls, start, end, closed_start, closed_end) -> "ArcSet":
        if start == end and not (closed_start and closed_end):
            if closed_start != closed_end:
                raise ValueError("half-open arc with identical endpoints")
            return cls((Arc(start, end, False, False),))
        return cls._assemble([Arc(start, end, closed_start, closed_end)])

    @classmethod
    def open_arc(cls, start: Direction, end: Direction) -> "ArcSet":
        return cls.from_arc(start, end, False, False)

    @classmethod
    def closed_arc(cls, start: Direction, end: Direction) -> "ArcSet":
        return cls.from_arc(start, end, True, True)

    @classmethod
    def point(cls, d: Direction) -> "ArcSet":
        return cls((Arc(d, d, True, True),))

    # -- piece machinery ---------------------------------------------------

    def _endpoint_dirs(self) -> list[Direction]:
        out = []
        for a in self.arcs:
            out.append(a.start)
            out.append(a.end)
        return out

    def _memberships(self, nodes: list[Direction]):
        """(node_in, gap_in) against a sorted node list covering our endpoints."""
        m = len(nodes)
        node_in = [False] * m
        gap_in = [False] * m  # gap_in[i] covers the open gap (nodes[i], nodes[i+1])
        if self._full:
            return [True] * m, [True] * m
        index = {d: i for i, d in enumerate(nodes)}
        for a in self.arcs:
            if a.is_point():
                node_in[index[a.start]] = True
                continue
            if a.is_punctured_circle():
                for i in range(m):
                    node_in[i] = node_in[i] or nodes[i] != a.start
                    gap_in[i] = True
                continue
            i = index[a.start]
            j = index[a.end]
            if a.closed_start:
                node_in[i] = True
            if a.closed_end:
                node_in[j] = True
            k = i
            while True:
                gap_in[k] = True
                k = (k + 1) % m
                if k == j:
                    break
                node_in[k] = True
        return node_in, gap_in

    @classmethod
    def _assemble(cls, arcs: list[Arc]) -> "ArcSet":
        sets = [cls((a,), full=False) for a in arcs]
        return cls.union_all(sets) if sets else cls.empty()

    @classmethod
    def _from_pieces(cls, nodes: list[Direction], node_in, gap_in) -> "ArcSet":
        m = len(nodes)
        if m == 0:
            return cls.empty()
        if all(node_in) and all(gap_in):
            return cls.full()
        if not any(node_in) and not any(gap_in):
            return cls.empty()

        # Pieces in circular order: node 0, gap 0, node 1, gap 1, ...
        pieces = []
        for i in range(m):
            pieces.append(("node", i, node_in[i]))
            pieces.append(("gap", i, gap_in[i]))
        total = len(pieces)

        # Rotate so position 0 is outside the set, then collect runs.
        start0 = next(i for i, p in enumerate(pieces) if not p[2])
        order = [pieces[(start0 + t) % total] for t in range(total)]

        arcs_out: list[Arc] = []
        run: list = []
        for p in order + [("node", -1, False)]:  # sentinel flushes the last run
            if p[2]:
                run.append(p)
                continue
            if run:
                arcs_out.append(cls._run_to_arc(run, nodes))
                run = []
        arcs_out.sort(key=lambda a: _arc_sort_key(a))
        return cls(tuple(arcs_out))

    @staticmethod
    def _run_to_arc(run, nodes) -> Arc:
        kind0, i0, _ = run[0]
        kind1, i1, _ = run[-1]
        if kind0 == "node":
            start, closed_start = nodes[i0], True
        else:
            start, closed_start = nodes[i0], False
        if kind1 == "node":
            end, closed_end = nodes[i1], True
        else:
            end, closed_end = nodes[(i1 + 1) % len(nodes)], False
        if len(run) == 1 and kind0 == "node":
            return Arc(start, start, True, True)
        if start == end and not (closed_start and closed_end):
            # Wrapped all the way around except one point.
            return Arc(start, end, False, False)
        return Arc(start, end, closed_start, closed_end)

    # -- boolean algebra ---------------------------------------------------

    @classmethod
    def union_all(cls, sets: list["ArcSet"]) -> "ArcSet":
        sets = [s for s in sets if not s.is_empty()]
        if not sets:
            return cls.empty()
        if any(s._full for s in sets):
            return cls.full()
        nodes = []
        for s in sets:
            nodes.extend(s._endpoint_dirs())
        nodes = _dedupe_sorted(nodes)
        node_in = [False] * len(nodes)
        gap_in = [False] * len(nodes)
        for s in sets:
            ni, gi = s._memberships(nodes)
            node_in = [a or b for a, b in zip(node_in, ni)]
            gap_in = [a or b for a, b in zip(gap_in, gi)]
        return cls._from_pieces(nodes, node_in, gap_in)

    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet.union_all([self, other])

    def complement(self) -> "ArcSet":
        if self._full:
            return ArcSet.empty()
        if self.is_empty():
            return ArcSet.full()
        nodes = _dedupe_sorted(self._endpoint_dirs())
        ni, gi = self._memberships(nodes)
        return ArcSet._from_pieces(nodes, [not b for b in ni], [not b for b in gi])

    # -- queries -----------------------------------------------------------

    def is_empty(self) -> bool:
        return not self._full and not self.arcs

    def is_full(self) -> bool:
        return self._full

    def contains(self, d: Direction) -> bool:
        if self._full:
            return True
        for a in self.arcs:
            if a.is_point():
                if d == a.start:
                    return True
                continue
            if a.is_punctured_circle():
                if d != a.start:
                    return True
                continue
            if d == a.start:
                if a.closed_start:
                    return True
                continue
            if d == a.end:
                if a.closed_end:
                    return True
                continue
            if _strictly_inside(a.start, a.end, d):
                return True
        return False

    def drop_points(self) -> "ArcSet":
        """Remove isolated points (arcs of zero width)."""
        if self._full:
            return self
        kept = tuple(a for a in self.arcs if not a.is_point())
        return ArcSet._assemble(list(kept)) if kept else ArcSet.empty()

    def fits_open_semicircle(self) -> bool:
        """Does some open semicircle lie inside this set?"""
        if self._full:
            return True
        for a in self.arcs:
            if a.is_punctured_circle():
                return True
            if a.is_point():
                continue
            if width_class(a.start, a.end) in ("eq", "gt"):
                return True
        return False

    def fits_closed_semicircle(self) -> bool:
        """Does some closed semicircle lie inside this set?"""
        if self._full:
            return True
        for a in self.arcs:
            if a.is_punctured_circle():
                return True
            if a.is_point():
                continue
            wc = width_class(a.start, a.end)
            if wc == "gt":
                return True
            if wc == "eq" and a.closed_start and a.closed_end:
                return True
        return False

    def widest_arc(self) -> Arc | None:
        if self._full or not self.arcs:
            return None
        return max(self.arcs, key=lambda a: a.width())

    def __eq__(self, other):
        if not isinstance(other, ArcSet):
            return NotImplemented
        return self._full == other._full and self.arcs == other.arcs

    def __hash__(self):
        return hash((self._full, self.arcs))

    def __repr__(self):
        if self._full:
            return "ArcSet.full()"
        if not self.arcs:
            return "ArcSet.empty()"
        return "ArcSet<" + " u ".join(a.pretty() for a in self.arcs) + ">"


def _arc_sort_key(a: Arc):
    from .directions import circular_key

    return circular_key(a.start)


def _dedupe_sorted(dirs: list[Direction]) -> list[Direction]:
    out: list[Direction] = []
    for d in sort_circular(dirs):
        if not out or circular_cmp(out[-1], d) != 0:
            out.append(d)
    return out


def _half_turn_class(anchor: Direction, d: Direction) -> int:
    """0 for d in (anchor, anchor+pi), 1 for d == anchor+pi, 2 beyond; exact."""
    from .directions import cross, dot

    c = cross(anchor, d)
    if c > 0:
        return 0
    if c < 0:
        return 2
    return 1 if dot(anchor, d) < 0 else 3  # 3: d == anchor (callers exclude)


def _strictly_inside(s: Direction, e: Direction, d: Direction) -> bool:
    """Is d in the open CCW arc (s, e)?  All exact, d distinct from s and e."""
    from .directions import cross

    hd = _half_turn_class(s, d)
    he = _half_turn_class(s, e)
    if hd != he:
        return hd < he
    if hd == 1:
        return False  # both equal s+pi, so d == e, excluded by the caller
    # Same open half-turn: angular separation < pi, cross sign is decisive.
    return cross(d, e) > 0
