"""Projections of a harmonic pair to a line, and the checks that back them.

A pair ``p = (c, d)`` on the target line ``h_c`` is parametrized by the
point ``v`` of ``d = (v, w)`` on the counterclockwise arc from ``c.p`` to
``c.q``; ``w`` is then ``rho_c(v)``.  Projecting ``v`` and ``w`` to the
source line ``h_a`` gives the segment ``v_a w_a`` whose position relative
to ``b`` defines the projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .circle import CirclePoint, PointPair
from .errors import MonotonicityFailure
from .harmonic import HarmonicPair, harmonic_pair_through, harmonic_residual
from .moebius import MoebiusStructure


@dataclass(frozen=True)
class ProjectionResult:
    p: HarmonicPair
    s: float | None
    iterations: int = 0
    residual: float = 0.0

    @property
    def d(self) -> PointPair:
        return self.p.right


def _is_harmonic(m: MoebiusStructure, a: PointPair, c: PointPair) -> bool:
    if a.shares_point(c):
        return False
    return harmonic_residual(m, a, c) <= m.tol.harmonic


def admissible_interval(m: MoebiusStructure, a: PointPair, c: PointPair) -> tuple[float, float]:
    """Offsets from ``c.p`` bounding the segment ``z_c u_c`` on the plus arc of ``c``."""
    S = m.S
    cp, cq = c.angles
    ends = [K.offset(K.plus_rep(S, cp, cq, x), cp) for x in a.angles]
    return min(ends), max(ends)


def pair_at_offset(m: MoebiusStructure, c: PointPair, off: float) -> HarmonicPair:
    return harmonic_pair_through(m, c, CirclePoint(c.p.angle + off))


def s_projection(m: MoebiusStructure, q: HarmonicPair, c: PointPair, s: float) -> ProjectionResult:
    """The pair ``p = (c, d)`` for which ``b`` is the s-point of ``v_a w_a``.

    The s-point of an oriented segment ``v w`` has line coordinate
    ``(t_v + s t_w) / (1 + s)``.
    """
    s = float(s)
    if not s > 0.0 or not math.isfinite(s):
        raise ValueError(f"s must be a positive real, got {s!r}")
    a, b = q.left, q.right
    if c.approx_eq(a, m.tol.angle):
        return ProjectionResult(HarmonicPair(c, b), s)
    if _is_harmonic(m, a, c):
        return ProjectionResult(HarmonicPair(c, a), s)
    v, res, it = K.s_project(m.S, *a.angles, *b.angles, *c.angles, s)
    if math.isnan(v):
        raise MonotonicityFailure("monotonicity failure: s-projection did not bracket")
    return ProjectionResult(harmonic_pair_through(m, c, v), s, int(it), float(res))


def midpoint_projection(m: MoebiusStructure, q: HarmonicPair, c: PointPair) -> ProjectionResult:
    return s_projection(m, q, c, 1.0)


def equal_ratio_terms(m: MoebiusStructure, q: HarmonicPair, c: PointPair, v) -> tuple[float, float]:
    """The two ratios ``(|v_b a| / |a w_b|, |v_a b| / |b w_a|)`` for d through ``v``."""
    a, b = q.left, q.right
    v = v.angle if isinstance(v, CirclePoint) else float(v)
    return K.ratio_pair(m.S, *a.angles, *b.angles, *c.angles, v)


def equal_ratio_projection(m: MoebiusStructure, q: HarmonicPair, c: PointPair) -> ProjectionResult:
    """The pair on ``h_c`` where both ratios agree; ``s`` is their common value.

    When ``c`` is harmonic to ``a`` or to ``b`` the ratios are 0/0 and the
    answer is ``(c, a)`` or ``(c, b)`` with ``s`` set to None.
    """
    a, b = q.left, q.right
    if c.approx_eq(a, m.tol.angle) or _is_harmonic(m, c, b):
        return ProjectionResult(HarmonicPair(c, b), None)
    if c.approx_eq(b, m.tol.angle) or _is_harmonic(m, a, c):
        return ProjectionResult(HarmonicPair(c, a), None)
    v, s, res, it = K.equal_ratio(m.S, *a.angles, *b.angles, *c.angles)
    if math.isnan(v):
        raise MonotonicityFailure("monotonicity failure: equal-ratio projection did not bracket")
    return ProjectionResult(harmonic_pair_through(m, c, v), float(s), int(it), float(res))


@dataclass(frozen=True)
class FamilyCheck:
    monotone: bool
    margin: float
    samples: int
    degenerate: str | None = None


def monotone_family_check(m: MoebiusStructure, a: PointPair, c: PointPair,
                          samples: int = 1000, seed: int = 0) -> FamilyCheck:
    """Check that both ends of ``v_a w_a`` move the same way as ``p`` moves along ``z_c u_c``.

    The margin is the smallest ``min(|dt_v|, |dt_w|)`` over sampled pairs,
    negated when the two ends move in opposite directions.
    """
    if c.approx_eq(a, m.tol.angle):
        return FamilyCheck(True, math.inf, 0, "identical")
    if _is_harmonic(m, a, c):
        return FamilyCheck(True, math.inf, 0, "constant")
    S = m.S
    ap, aq = a.angles
    cp, cq = c.angles
    lo, hi = admissible_interval(m, a, c)
    rng = np.random.default_rng(seed)
    margin = math.inf
    for _ in range(samples):
        o1, o2 = np.sort(rng.uniform(lo, hi, size=2))
        if o1 == o2:
            continue
        tv, tw = [], []
        for off in (o1, o2):
            v = K.wrap(cp + off)
            w = K.conjugate(S, cp, cq, v)
            tv.append(K.tcoord(S, ap, aq, v))
            tw.append(K.tcoord(S, ap, aq, w))
        dv, dw = tv[1] - tv[0], tw[1] - tw[0]
        slack = min(abs(dv), abs(dw))
        if (dv > 0) != (dw > 0):
            slack = -slack
        margin = min(margin, slack)
    return FamilyCheck(margin > 0.0, margin, samples)


def averaged_expansion_slack(m: MoebiusStructure, a: PointPair, c: PointPair,
                             d: PointPair, d2: PointPair) -> float:
    """``(|v_a v'_a| + |w_a w'_a|) / 2 - |d d'|`` for ``d, d'`` on ``h_c``.

    ``v, v'`` are taken on the plus arc of ``c``.
    """
    S = m.S
    ap, aq = a.angles
    cp, cq = c.angles
    v = K.plus_rep(S, cp, cq, d.p.angle)
    v2 = K.plus_rep(S, cp, cq, d2.p.angle)
    w = K.conjugate(S, cp, cq, v)
    w2 = K.conjugate(S, cp, cq, v2)
    side_v = abs(K.tcoord(S, ap, aq, v) - K.tcoord(S, ap, aq, v2))
    side_w = abs(K.tcoord(S, ap, aq, w) - K.tcoord(S, ap, aq, w2))
    dd = abs(K.tcoord(S, cp, cq, v) - K.tcoord(S, cp, cq, v2))
    return 0.5 * (side_v + side_w) - dd


def contraction_ratio(m: MoebiusStructure, q: HarmonicPair, q2: HarmonicPair, c: PointPair) -> float:
    """``|pr_c(q) pr_c(q')| / |q q'|`` for two pairs on a common line."""
    from .lines import line_distance

    before = line_distance(m, q, q2)
    after = line_distance(m, midpoint_projection(m, q, c).p, midpoint_projection(m, q2, c).p)
    return after / before
