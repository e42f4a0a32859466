"""Points, pairs and arcs on the circle, and the order predicates on them.

Angles are the only stored representation.  The chart helpers use the
stereographic projection from the point at angle pi, so chart coordinate
``s`` corresponds to angle ``2 * atan(s)`` and ``inf`` to pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateConfiguration

TWO_PI = 2.0 * math.pi
EPS_ANGLE = 1e-12


def _wrap(t: float) -> float:
    t = t - TWO_PI * math.floor(t / TWO_PI)
    return 0.0 if t >= TWO_PI else t


def _gap(a: float, b: float) -> float:
    d = abs(a - b)
    return min(d, TWO_PI - d)


@dataclass(frozen=True, order=True)
class CirclePoint:
    angle: float

    def __post_init__(self):
        a = float(self.angle)
        if not math.isfinite(a):
            raise ValueError(f"angle must be finite, got {self.angle!r}")
        object.__setattr__(self, "angle", _wrap(a))

    @classmethod
    def from_chart(cls, s: float) -> CirclePoint:
        if math.isinf(s):
            return cls(math.pi)
        return cls(2.0 * math.atan(s))

    def to_chart(self) -> float:
        if self.angle == math.pi:
            return math.inf
        return math.tan(0.5 * self.angle)

    def approx_eq(self, other: CirclePoint, eps: float = EPS_ANGLE) -> bool:
        return _gap(self.angle, other.angle) <= eps

    def offset_from(self, start: CirclePoint) -> float:
        """Counterclockwise angular distance from ``start`` to this point."""
        return _wrap(self.angle - start.angle)


def as_point(x) -> CirclePoint:
    return x if isinstance(x, CirclePoint) else CirclePoint(x)


@dataclass(frozen=True)
class PointPair:
    """Unordered pair of distinct circle points, stored sorted by angle."""

    p: CirclePoint
    q: CirclePoint

    def __post_init__(self):
        p, q = as_point(self.p), as_point(self.q)
        if p == q:
            raise DegenerateConfiguration("degenerate configuration: pair with equal points")
        if q < p:
            p, q = q, p
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_angles(cls, a: float, b: float) -> PointPair:
        return cls(CirclePoint(a), CirclePoint(b))

    @classmethod
    def from_chart(cls, s: float, t: float) -> PointPair:
        return cls(CirclePoint.from_chart(s), CirclePoint.from_chart(t))

    @property
    def angles(self) -> tuple[float, float]:
        return self.p.angle, self.q.angle

    def __iter__(self):
        yield self.p
        yield self.q

    def __contains__(self, x) -> bool:
        x = as_point(x)
        return x == self.p or x == self.q

    def shares_point(self, other: PointPair) -> bool:
        return other.p in self or other.q in self

    def approx_eq(self, other: PointPair, eps: float = EPS_ANGLE) -> bool:
        return ((self.p.approx_eq(other.p, eps) and self.q.approx_eq(other.q, eps))
                or (self.p.approx_eq(other.q, eps) and self.q.approx_eq(other.p, eps)))


@dataclass(frozen=True)
class Arc:
    """Open arc running counterclockwise from ``start`` to ``end``."""

    start: CirclePoint
    end: CirclePoint

    def __post_init__(self):
        object.__setattr__(self, "start", as_point(self.start))
        object.__setattr__(self, "end", as_point(self.end))

    @property
    def length(self) -> float:
        return self.end.offset_from(self.start)

    def contains(self, x) -> bool:
        s, e, p = self.start.angle, self.end.angle, as_point(x).angle
        # exact comparisons of normalized angles; offsets would round nearby points together
        if s < e:
            return s < p < e
        if s > e:
            return p > s or p < e
        return p != s

    def point(self, fraction: float) -> CirclePoint:
        return CirclePoint(self.start.angle + fraction * self.length)

    def reversed(self) -> Arc:
        return Arc(self.end, self.start)


def cyclic_order(p1, p2, p3) -> int:
    """+1 for counterclockwise order, -1 for clockwise, 0 if two coincide."""
    p1, p2, p3 = as_point(p1), as_point(p2), as_point(p3)
    if p1 == p2 or p2 == p3 or p1 == p3:
        return 0
    a, b, c = p1.angle, p2.angle, p3.angle
    ccw = (a < b < c) or (b < c < a) or (c < a < b)
    return 1 if ccw else -1


def _require_disjoint(*pairs: PointPair) -> None:
    for i, a in enumerate(pairs):
        for b in pairs[i + 1:]:
            if a.shares_point(b):
                raise DegenerateConfiguration("degenerate configuration: pairs share a point")


def pairs_separate(a: PointPair, b: PointPair) -> bool:
    """True iff the points of ``b`` lie in different components of X minus ``a``."""
    _require_disjoint(a, b)
    arc = Arc(a.p, a.q)
    return arc.contains(b.p) != arc.contains(b.q)


def strong_causal(b: PointPair, b2: PointPair) -> bool:
    """True iff ``b2`` lies in a single open arc determined by ``b``."""
    return not pairs_separate(b, b2)


def pair_separates_pairs(d: PointPair, b: PointPair, c: PointPair) -> bool:
    """True iff ``b`` and ``c`` lie on different open arcs of X minus ``d``."""
    _require_disjoint(d, b)
    _require_disjoint(d, c)
    arc = Arc(d.p, d.q)
    b_in = arc.contains(b.p) and arc.contains(b.q)
    b_out = not arc.contains(b.p) and not arc.contains(b.q)
    c_in = arc.contains(c.p) and arc.contains(c.q)
    c_out = not arc.contains(c.p) and not arc.contains(c.q)
    return (b_in and c_out) or (b_out and c_in)
