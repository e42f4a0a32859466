"""Harmonic 4-tuples and harmonic pairs.

A pair of point-pairs ``(a, b)`` with ``a = (x, y)``, ``b = (z, u)`` is
harmonic when ``d(x,z) d(y,u) = d(x,u) d(y,z)``.  The partner of a point
across a pair is found by a bracketing solve on the arc that must contain
it, so all routines here work for any monotone structure, not only the
canonical one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import _kernels as K
from .circle import CirclePoint, PointPair, as_point, pairs_separate
from .errors import DegenerateConfiguration, MonotonicityFailure
from .moebius import MoebiusStructure


def harmonic_residual(m: MoebiusStructure, a: PointPair, b: PointPair) -> float:
    if a.shares_point(b):
        raise DegenerateConfiguration("degenerate configuration: axes share a point")
    return K.harmonic_residual(m.S, a.p.angle, a.q.angle, b.p.angle, b.q.angle)


BRACKET_ULPS = 4


def conjugate(m: MoebiusStructure, a: PointPair, z) -> CirclePoint:
    """The point u with ``(a, (z, u))`` harmonic.

    A residual above the harmonic tolerance is accepted when the exact
    partner lies within a few ulps of u, which happens for points closer
    to an axis end than float resolution can express.
    """
    z = as_point(z)
    if z in a:
        raise DegenerateConfiguration("degenerate configuration: z lies on the axis")
    x, y = a.angles
    u, res, _ = K.conjugate_with_info(m.S, x, y, z.angle)
    if math.isnan(u) or (res > m.tol.harmonic and not K.partner_bracketed(m.S, x, y, z.angle, u, BRACKET_ULPS)):
        raise MonotonicityFailure(f"monotonicity failure: no harmonic partner found (residual {res:g})")
    return CirclePoint(u)


def reflection(m: MoebiusStructure, b: PointPair, x) -> CirclePoint:
    """rho_b(x); the two points of ``b`` are fixed."""
    x = as_point(x)
    if x in b:
        return x
    return conjugate(m, b, x)


def embed_e(m: MoebiusStructure, i: int, t: Sequence) -> tuple[CirclePoint, ...]:
    """Harmonic 4-tuple of type ``i`` built from the nondegenerate triple ``t``.

    Returns ``(y, x1, x2, x3)`` where ``y`` is the midpoint of
    ``x_{i+1}, x_{i+2}`` in the chart that sends ``x_i`` to infinity.
    """
    if i not in (1, 2, 3):
        raise ValueError("embedding index must be 1, 2 or 3")
    xs = tuple(as_point(x) for x in t)
    if len(xs) != 3 or len(set(xs)) != 3:
        raise DegenerateConfiguration("degenerate triple")
    xi, xj, xk = xs[i - 1], xs[i % 3], xs[(i + 1) % 3]
    y = conjugate(m, PointPair(xj, xk), xi)
    return (y, *xs)


def harmonic_type_residuals(m: MoebiusStructure, q: Sequence) -> tuple[float, float, float]:
    """|ln cr_i(q)| for i = 1, 2, 3; type (i) harmonic iff entry i vanishes."""
    t = m.cross_ratio_triple(q)
    return abs(t.a1), abs(t.a2), abs(t.a3)


@dataclass(frozen=True)
class HarmonicPair:
    """Ordered harmonic pair ``(left, right)`` of point-pairs.

    Direct construction only checks that the axes separate each other; use
    :meth:`checked` to also validate the harmonic residual.
    """

    left: PointPair
    right: PointPair

    def __post_init__(self):
        if not pairs_separate(self.left, self.right):
            raise DegenerateConfiguration("axes of a harmonic pair must separate each other")

    @classmethod
    def checked(cls, m: MoebiusStructure, a: PointPair, b: PointPair) -> HarmonicPair:
        res = harmonic_residual(m, a, b)
        if not res <= m.tol.harmonic:
            raise DegenerateConfiguration(f"not harmonic: residual {res:.3e} exceeds {m.tol.harmonic:g}")
        return cls(a, b)

    @property
    def axes(self) -> tuple[PointPair, PointPair]:
        return self.left, self.right

    def residual(self, m: MoebiusStructure) -> float:
        return harmonic_residual(m, self.left, self.right)

    def other_axis(self, axis: PointPair, eps: float = 1e-12) -> PointPair:
        if self.left.approx_eq(axis, eps):
            return self.right
        if self.right.approx_eq(axis, eps):
            return self.left
        raise ValueError("axis is not an axis of this pair")

    def has_axis(self, axis: PointPair, eps: float = 1e-12) -> bool:
        return self.left.approx_eq(axis, eps) or self.right.approx_eq(axis, eps)

    def hm(self) -> HmPoint:
        return HmPoint(self)

    def approx_eq(self, other: HarmonicPair, eps: float = 1e-12) -> bool:
        return self.left.approx_eq(other.left, eps) and self.right.approx_eq(other.right, eps)


def involution_j(q: HarmonicPair) -> HarmonicPair:
    return HarmonicPair(q.right, q.left)


def pr1(q: HarmonicPair) -> PointPair:
    return q.left


def pr2(q: HarmonicPair) -> PointPair:
    return q.right


class HmPoint:
    """A harmonic pair up to swapping its axes."""

    __slots__ = ("pair",)

    def __init__(self, q: HarmonicPair):
        self.pair = q

    @property
    def axes(self) -> frozenset[PointPair]:
        return frozenset(self.pair.axes)

    def __eq__(self, other):
        if not isinstance(other, HmPoint):
            return NotImplemented
        return self.axes == other.axes

    def __hash__(self):
        return hash(self.axes)

    def __repr__(self):
        return f"HmPoint({self.pair.left!r}, {self.pair.right!r})"

    def approx_eq(self, other: HmPoint, eps: float = 1e-12) -> bool:
        a, b = self.pair, other.pair
        return a.approx_eq(b, eps) or a.approx_eq(involution_j(b), eps)


def harmonic_pair_through(m: MoebiusStructure, axis: PointPair, z) -> HarmonicPair:
    """The harmonic pair ``(axis, (z, rho_axis(z)))``."""
    z = as_point(z)
    return HarmonicPair(axis, PointPair(z, conjugate(m, axis, z)))
