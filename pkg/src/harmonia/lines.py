"""Lines of harmonic pairs sharing an axis, and the distance along them.

On the line with axis ``a = (x, y)`` every pair ``b = (z, u)`` has the
coordinate ``ln d(x, z) - ln d(y, z)``; harmonicity makes it the same for
``u``.  Differences of coordinates are the line distance and do not depend
on the semi-metric chosen from the structure, but absolute values do, so
coordinates are only ever compared within one line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from . import _kernels as K
from .circle import Arc, CirclePoint, PointPair, as_point, pair_separates_pairs, strong_causal
from .errors import DegenerateConfiguration, NoCommonPerpendicular, NotCollinear, NotOnLine
from .harmonic import HarmonicPair, HmPoint, harmonic_pair_through, harmonic_residual
from .moebius import MoebiusStructure

PairLike = Union[HarmonicPair, HmPoint]


def _pair(q: PairLike) -> HarmonicPair:
    return q.pair if isinstance(q, HmPoint) else q


def _default_orientation(axis: PointPair) -> Arc:
    p, q = axis.angles
    mid = 0.5 * (p + q)
    ccw = Arc(axis.p, axis.q)
    other_mid = mid - math.pi if mid >= math.pi else mid + math.pi
    return ccw if mid <= other_mid else ccw.reversed()


@dataclass(frozen=True)
class Line:
    """All harmonic pairs with a given axis.

    ``positive`` is the component of the circle minus the axis that carries
    the parametrizing point of each pair.
    """

    axis: PointPair
    positive: Arc = field(default=None)

    def __post_init__(self):
        if self.positive is None:
            object.__setattr__(self, "positive", _default_orientation(self.axis))
        ends = {self.positive.start, self.positive.end}
        if ends != {self.axis.p, self.axis.q}:
            raise ValueError("orientation arc must be bounded by the axis")

    def point(self, m: MoebiusStructure, z) -> HarmonicPair:
        return harmonic_pair_through(m, self.axis, z)

    def point_at(self, m: MoebiusStructure, t: float) -> HarmonicPair:
        """The pair on this line with coordinate ``t``."""
        z = K.point_at(m.S, self.axis.p.angle, self.axis.q.angle, float(t))
        if math.isnan(z):
            raise ValueError(f"no point with coordinate {t!r}")
        return self.point(m, z)

    def coord(self, m: MoebiusStructure, q: PairLike) -> float:
        return line_coord(m, self, q)

    def parametrizing_point(self, b: PointPair) -> CirclePoint:
        return b.p if self.positive.contains(b.p) else b.q


def project_point(m: MoebiusStructure, x, a: PointPair) -> HarmonicPair:
    """Projection of the circle point ``x`` to the line with axis ``a``."""
    x = as_point(x)
    if x in a:
        raise DegenerateConfiguration("degenerate configuration: point lies on the axis")
    return harmonic_pair_through(m, a, x)


def point_coord(m: MoebiusStructure, a: PointPair, x) -> float:
    """Line coordinate on ``h_a`` of the projection of the circle point ``x``."""
    return K.tcoord(m.S, a.p.angle, a.q.angle, as_point(x).angle)


def line_coord(m: MoebiusStructure, line: Line, q: PairLike) -> float:
    q = _pair(q)
    try:
        b = q.other_axis(line.axis, m.tol.angle)
    except ValueError:
        raise NotOnLine("harmonic pair does not have the line's axis") from None
    if harmonic_residual(m, line.axis, b) > m.tol.harmonic:
        raise NotOnLine("pair is not harmonic with the line's axis")
    return point_coord(m, line.axis, line.parametrizing_point(b))


def shared_axis(q: PairLike, q2: PairLike, eps: float = 1e-12) -> PointPair | None:
    q, q2 = _pair(q), _pair(q2)
    for a in q.axes:
        if q2.has_axis(a, eps):
            return a
    return None


def line_distance(m: MoebiusStructure, q: PairLike, q2: PairLike) -> float:
    q, q2 = _pair(q), _pair(q2)
    a = shared_axis(q, q2, m.tol.angle)
    if a is None:
        raise NotCollinear("not collinear: the pairs share no axis")
    b, b2 = q.other_axis(a, m.tol.angle), q2.other_axis(a, m.tol.angle)
    if b.approx_eq(b2, m.tol.angle):
        return 0.0
    # same evaluation order as path side lengths, so both agree to the last bit
    return abs(point_coord(m, a, b2.p) - point_coord(m, a, b.p))


def distance_expressions(m: MoebiusStructure, a: PointPair, b: PointPair, b2: PointPair) -> tuple[float, ...]:
    """The four equivalent expressions of the distance between (a, b) and (a, b2)."""
    x, y = a.p, a.q
    z, u = b.p, b.q
    z2, u2 = b2.p, b2.q
    L = m.log_dist
    return (
        abs(L(x, z2) + L(y, z) - L(x, z) - L(y, z2)),
        abs(L(x, u2) + L(y, u) - L(x, u) - L(y, u2)),
        abs(L(x, u2) + L(y, z) - L(x, z) - L(y, u2)),
        abs(L(x, z2) + L(y, u) - L(x, u) - L(y, z2)),
    )


def common_perpendicular(m: MoebiusStructure, b: PointPair, b2: PointPair) -> PointPair:
    """The unique axis harmonic to both strongly causal pairs ``b`` and ``b2``."""
    if b.shares_point(b2) or not strong_causal(b, b2):
        raise NoCommonPerpendicular("no common perpendicular (separating or linked axes)")
    x, y = K.perpendicular(m.S, b.p.angle, b.q.angle, b2.p.angle, b2.q.angle)
    if math.isnan(x) or math.isnan(y):
        raise NoCommonPerpendicular("no common perpendicular (solver failed to bracket)")
    return PointPair(CirclePoint(x), CirclePoint(y))


@dataclass(frozen=True)
class Segment:
    line: Line
    start: HarmonicPair
    end: HarmonicPair

    def length(self, m: MoebiusStructure) -> float:
        return line_distance(m, self.start, self.end)

    def contains(self, m: MoebiusStructure, q: PairLike) -> bool:
        """Ends, or pairs on the line whose other axis separates the ends' axes."""
        q = _pair(q)
        if not q.has_axis(self.line.axis, m.tol.angle):
            return False
        b = q.other_axis(self.line.axis, m.tol.angle)
        b0 = self.start.other_axis(self.line.axis, m.tol.angle)
        b1 = self.end.other_axis(self.line.axis, m.tol.angle)
        if b.approx_eq(b0, m.tol.angle) or b.approx_eq(b1, m.tol.angle):
            return True
        if b.shares_point(b0) or b.shares_point(b1):
            return False
        return pair_separates_pairs(b, b0, b1)
