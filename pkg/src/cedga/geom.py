"""Exact planar primitives: rational points, segment intersection, turning counts.

Everything here is integer/rational arithmetic; no floats.  Directions are
primitive integer vectors, points are Fractions.  Turning is measured in
half-turns (pi units) by counting signed crossings of the vertical line,
which is exact for polygonal paths.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence, Tuple

Point = Tuple[Fraction, Fraction]
IVec = Tuple[int, int]


def cross(a: IVec, b: IVec) -> int:
    return a[0] * b[1] - a[1] * b[0]


def dot(a: IVec, b: IVec) -> int:
    return a[0] * b[0] + a[1] * b[1]


def neg(a: IVec) -> IVec:
    return (-a[0], -a[1])


def rot90(a: IVec) -> IVec:
    """Rotate a quarter turn counterclockwise (exact)."""
    return (-a[1], a[0])


def rot90cw(a: IVec) -> IVec:
    return (a[1], -a[0])


def reduce_vec(a: Sequence) -> IVec:
    """Scale a rational direction to a canonical primitive integer vector."""
    x, y = Fraction(a[0]), Fraction(a[1])
    if x == 0 and y == 0:
        raise ValueError("zero direction")
    den = (x.denominator * y.denominator) // gcd(x.denominator, y.denominator)
    xi, yi = int(x * den), int(y * den)
    g = gcd(abs(xi), abs(yi))
    return (xi // g, yi // g)


def sigma(d: IVec) -> int:
    """Side of the vertical line, with vertical-up counted as the +x side.

    This is a deterministic epsilon-clockwise perturbation: (0, +) lies on
    the +x side, (0, -) on the -x side.
    """
    if d[0] > 0:
        return 1
    if d[0] < 0:
        return -1
    return 1 if d[1] > 0 else -1


def ccw_compare(a: IVec, b: IVec) -> int:
    """-1/0/+1 comparison of directions in counterclockwise angle order.

    The order starts at the +x axis: east, then angles increasing to (but not
    including) a full turn.
    """
    ha = 0 if (a[1] > 0 or (a[1] == 0 and a[0] > 0)) else 1
    hb = 0 if (b[1] > 0 or (b[1] == 0 and b[0] > 0)) else 1
    if ha != hb:
        return -1 if ha < hb else 1
    c = cross(a, b)
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


def sort_ccw(items: Iterable, key=lambda it: it) -> list:
    return sorted(items, key=functools.cmp_to_key(lambda p, q: ccw_compare(key(p), key(q))))


def _ccw_leq_quarter(a: IVec, b: IVec) -> bool:
    """True when the counterclockwise arc from a to b is in (0, 90] degrees."""
    return cross(a, b) > 0 and dot(a, b) >= 0


class TurnCounter:
    """Accumulates signed vertical-line crossings of a moving direction.

    One signed crossing of the vertical line equals one half-turn (pi).  For
    paths whose end directions are normalized to horizontal the running total
    is the exact integer number of half-turns.
    """

    def __init__(self) -> None:
        self.count = 0
        self._cur: Optional[IVec] = None

    def start(self, d) -> None:
        self._cur = reduce_vec(d)

    @property
    def current(self) -> Optional[IVec]:
        return self._cur

    def _step(self, nxt: IVec, sign: int) -> None:
        if sigma(self._cur) != sigma(nxt):
            self.count += sign
        self._cur = nxt

    def turn_short(self, d) -> None:
        """Rotate to d the short way (|angle| < pi)."""
        d = reduce_vec(d)
        cur = self._cur
        assert cur is not None
        c = cross(cur, d)
        if c == 0:
            if dot(cur, d) < 0:
                raise ValueError("antiparallel turn is ambiguous")
            self._cur = d
            return
        self._step(d, 1 if c > 0 else -1)

    def turn_ccw(self, d) -> None:
        """Rotate counterclockwise to d, arc in (0, 2*pi]."""
        d = reduce_vec(d)
        assert self._cur is not None
        if self._cur == d:
            for _ in range(4):
                self._step(rot90(self._cur), 1)
            return
        guard = 0
        while not _ccw_leq_quarter(self._cur, d):
            self._step(rot90(self._cur), 1)
            if self._cur == d:
                return
            guard += 1
            if guard > 4:
                raise AssertionError("turn_ccw failed to converge")
        self._step(d, 1)

    def turn_cw(self, d) -> None:
        """Rotate clockwise to d, arc in (0, 2*pi]."""
        d = reduce_vec(d)
        assert self._cur is not None
        if self._cur == d:
            for _ in range(4):
                self._step(rot90cw(self._cur), -1)
            return
        guard = 0
        while not _ccw_leq_quarter(d, self._cur):
            self._step(rot90cw(self._cur), -1)
            if self._cur == d:
                return
            guard += 1
            if guard > 4:
                raise AssertionError("turn_cw failed to converge")
        self._step(d, -1)

    def normalize_end_horizontal(self) -> None:
        cur = self._cur
        assert cur is not None
        target = (sigma(cur), 0)
        if cur != target:
            self.turn_short(target)


def polyline_directions(points: Sequence[Point]) -> list:
    dirs = []
    for p, q in zip(points, points[1:]):
        dx, dy = q[0] - p[0], q[1] - p[1]
        if dx == 0 and dy == 0:
            raise ValueError("repeated polyline point")
        dirs.append(reduce_vec((dx, dy)))
    return dirs


def polyline_half_turns(points: Sequence[Point], normalize_ends: bool = True) -> int:
    """Signed half-turn count of the tangent along a polyline.

    With normalize_ends both end directions are snapped to the horizontal ray
    on their own side of vertical (never crossing vertical), making the total
    an exact integer: the edge winding.
    """
    dirs = polyline_directions(points)
    tc = TurnCounter()
    tc.start(dirs[0])
    for d in dirs[1:]:
        tc.turn_short(d)
    if normalize_ends:
        tc.normalize_end_horizontal()
    return tc.count


def seg_intersection(p1: Point, p2: Point, q1: Point, q2: Point):
    """Proper interior intersection of two segments.

    Returns (t, u, point) with t, u in (0,1) exact, or None when the open
    segments do not cross transversally.  Raises ValueError on collinear
    overlap or endpoint touching, which violate general position.
    """
    d1 = (p2[0] - p1[0], p2[1] - p1[1])
    d2 = (q2[0] - q1[0], q2[1] - q1[1])
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    w = (q1[0] - p1[0], q1[1] - p1[1])
    if denom == 0:
        if w[0] * d1[1] - w[1] * d1[0] == 0:
            def param(pt):
                if d1[0] != 0:
                    return Fraction(pt[0] - p1[0], d1[0])
                return Fraction(pt[1] - p1[1], d1[1])

            a, b = sorted((param(q1), param(q2)))
            if b > 0 and a < 1:
                raise ValueError("collinear overlapping segments")
        return None
    t = Fraction(w[0] * d2[1] - w[1] * d2[0], denom)
    u = Fraction(w[0] * d1[1] - w[1] * d1[0], denom)
    if t < 0 or t > 1 or u < 0 or u > 1:
        return None
    if t in (0, 1) or u in (0, 1):
        raise ValueError("segments touch at an endpoint")
    pt = (p1[0] + t * d1[0], p1[1] + t * d1[1])
    return (t, u, pt)
