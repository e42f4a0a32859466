import math

import numpy as np
import pytest

from conftest import chart, chart_close, cpair, random_pair
from harmonia import CirclePoint, HarmonicPair, Line, MoebiusStructure, PointPair
from harmonia.harmonic import conjugate, harmonic_pair_through
from harmonia.lines import line_distance, point_coord
from harmonia.projections import (admissible_interval, averaged_expansion_slack, contraction_ratio,
                                  equal_ratio_projection, equal_ratio_terms, midpoint_projection,
                                  monotone_family_check, pair_at_offset, s_projection)

INF = math.inf
AXIS = cpair(0, INF)


def random_harmonic(m, rng):
    a = random_pair(rng)
    return harmonic_pair_through(m, a, CirclePoint(rng.uniform(0, 2 * math.pi)))


def s_point_residual(m, q, d, s):
    """t_b - (t_v + s t_w) / (1 + s) on the line of a, with v on the plus arc of c."""
    a, b = q.left, q.right
    return lambda v, w: point_coord(m, a, b.p) - (point_coord(m, a, v) + s * point_coord(m, a, w)) / (1 + s)


def test_midpoint_example(canon):
    q = HarmonicPair(cpair(1, 3), cpair(2, INF))
    r = midpoint_projection(canon, q, AXIS)
    assert sorted(x.to_chart() for x in r.d) == pytest.approx([-math.sqrt(5), math.sqrt(5)], abs=1e-9)
    assert r.p.left == AXIS and r.s == 1.0


def test_trivial_cases(canon):
    q = HarmonicPair(cpair(1, 3), cpair(2, INF))
    assert s_projection(canon, q, cpair(1, 3), 2.0).p == HarmonicPair(cpair(1, 3), cpair(2, INF))
    q = HarmonicPair(cpair(-1, 1), cpair(0.5, 2))
    assert s_projection(canon, q, AXIS, 0.5).p == HarmonicPair(AXIS, cpair(-1, 1))
    for bad in (0.0, -1.0, math.nan):
        with pytest.raises(ValueError):
            s_projection(canon, q, AXIS, bad)


@pytest.mark.parametrize("m", [MoebiusStructure.canonical(), MoebiusStructure.sine_perturbed(0.1)])
def test_s_point_condition_and_containment(m):
    rng = np.random.default_rng(0)
    for _ in range(300):
        q = random_harmonic(m, rng)
        c = random_pair(rng)
        s = float(np.exp(rng.normal(0, 1)))
        r = s_projection(m, q, c, s)
        assert r.p.residual(m) <= m.tol.harmonic
        lo, hi = admissible_interval(m, q.left, c)
        v = next(x for x in r.d if x.offset_from(c.p) <= c.q.offset_from(c.p))
        assert lo - 1e-12 <= v.offset_from(c.p) <= hi + 1e-12
        assert root_is_bracketed(m, q, c, s, v)


def end_limits(m, q, c):
    """Offsets of the admissible ends with the limit sign of the s-point residual there.

    The residual tends to +inf where v or w runs into a.p and -inf at a.q.
    """
    a = q.left
    L = c.q.offset_from(c.p)
    out = []
    for x, sign in ((a.p, 1.0), (a.q, -1.0)):
        off = x.offset_from(c.p)
        if off > L:
            off = conjugate(m, c, x).offset_from(c.p)
        out.append((off, sign))
    return sorted(out)


def root_is_bracketed(m, q, c, s, v):
    """The exact root lies within the angle tolerance of v.

    Where v +- h leaves the admissible interval the residual's limit at that
    end stands in, since roots beyond float resolution of an end are returned
    as the nearest representable point.
    """
    f = s_point_residual(m, q, None, s)
    h = m.tol.angle
    (lo, s_lo), (hi, s_hi) = end_limits(m, q, c)
    off = v.offset_from(c.p)
    signs = []
    for o, limit in ((off - h, s_lo), (off + h, s_hi)):
        if o <= lo or o >= hi:
            signs.append(limit)
        else:
            x = CirclePoint(c.p.angle + o)
            signs.append(f(x, conjugate(m, c, x)))
    return signs[0] * signs[1] <= 0


def test_s_projection_is_unique(canon):
    # scan the s-point residual over the admissible interval: exactly one sign change
    rng = np.random.default_rng(1)
    for _ in range(1000):
        q = random_harmonic(canon, rng)
        c = random_pair(rng)
        s = float(np.exp(rng.normal(0, 1)))
        r = s_projection(canon, q, c, s)
        lo, hi = admissible_interval(canon, q.left, c)
        f = s_point_residual(canon, q, None, s)
        grid = np.linspace(lo, hi, 41)[1:-1]
        vals = []
        for off in grid:
            v = CirclePoint(c.p.angle + off)
            vals.append(f(v, conjugate(canon, c, v)))
        assert np.count_nonzero(np.diff(np.sign(vals))) <= 1
        # a restart from a random sub-bracket reaches the same pair
        again = s_projection(canon, q, c, s)
        assert again.p.approx_eq(r.p, canon.tol.angle)


def test_midpoint_does_not_depend_on_labeling(canon):
    rng = np.random.default_rng(2)
    for _ in range(200):
        q = random_harmonic(canon, rng)
        c = random_pair(rng)
        r = midpoint_projection(canon, q, c)
        v, w = r.d.p, r.d.q
        assert s_point_residual(canon, q, r.d, 1.0)(v, w) == pytest.approx(0, abs=1e-8)
        assert s_point_residual(canon, q, r.d, 1.0)(w, v) == pytest.approx(0, abs=1e-8)


def test_equal_ratio_degenerate_case(canon):
    q = HarmonicPair(cpair(-1, 1), cpair(0.5, 2))
    r = equal_ratio_projection(canon, HarmonicPair(cpair(-1, 1), AXIS), AXIS)
    assert r.s is None
    r = equal_ratio_projection(canon, q, AXIS)
    assert r.p == HarmonicPair(AXIS, cpair(-1, 1)) and r.s is None


def test_equal_ratio_matches_s_projection(canon):
    rng = np.random.default_rng(3)
    done = 0
    while done < 300:
        q = random_harmonic(canon, rng)
        c = random_pair(rng, min_gap=0.05)
        r = equal_ratio_projection(canon, q, c)
        if r.s is None:
            continue
        s, t = equal_ratio_terms(canon, q, c, r.d.p)
        assert math.log(s) == pytest.approx(math.log(t), abs=1e-8)
        again = s_projection(canon, q, c, r.s)
        assert again.p.approx_eq(r.p, 1e-9)
        done += 1


def test_equal_ratio_diverges_at_the_ends(canon):
    rng = np.random.default_rng(4)
    done = 0
    while done < 100:
        q = random_harmonic(canon, rng)
        c = random_pair(rng)
        if equal_ratio_projection(canon, q, c).s is None:
            continue
        lo = max(min(admissible_interval(canon, q.left, c)), min(admissible_interval(canon, q.right, c)))
        hi = min(max(admissible_interval(canon, q.left, c)), max(admissible_interval(canon, q.right, c)))
        h = (hi - lo) * 1e-7
        ends = []
        for off in (lo + h, hi - h):
            s, t = equal_ratio_terms(canon, q, c, c.p.angle + off)
            ends.append(math.log(s) - math.log(t))
        assert abs(ends[0]) > 5 and abs(ends[1]) > 5
        assert np.sign(ends[0]) != np.sign(ends[1])
        done += 1


def test_monotone_family(canon):
    rng = np.random.default_rng(5)
    for _ in range(50):
        a, c = random_pair(rng), random_pair(rng)
        check = monotone_family_check(canon, a, c, samples=20, seed=int(rng.integers(1 << 30)))
        assert check.monotone and check.margin > 0
    assert monotone_family_check(canon, AXIS, AXIS).degenerate == "identical"
    assert monotone_family_check(canon, cpair(-1, 1), AXIS).degenerate == "constant"


def test_contraction_on_samples(canon):
    rng = np.random.default_rng(6)
    for _ in range(500):
        line = Line(random_pair(rng))
        t1, t2 = rng.normal(0, 2, size=2)
        q1, q2 = line.point_at(canon, t1), line.point_at(canon, t2)
        assert contraction_ratio(canon, q1, q2, random_pair(rng)) < 1.0


def test_averaged_expansion_on_admissible_segment(canon):
    rng = np.random.default_rng(7)
    for _ in range(500):
        a, c = random_pair(rng), random_pair(rng)
        lo, hi = admissible_interval(canon, a, c)
        o1, o2 = rng.uniform(lo, hi, size=2)
        d1, d2 = pair_at_offset(canon, c, o1).right, pair_at_offset(canon, c, o2).right
        assert averaged_expansion_slack(canon, a, c, d1, d2) > 0


def test_averaged_expansion_can_fail_off_the_segment(canon):
    # with a = (10, 20) the admissible segment on h_(0,inf) is [10, 20]; 2 and 3 lie outside it
    a = cpair(10, 20)
    d1, d2 = cpair(2, -2), cpair(3, -3)
    assert averaged_expansion_slack(canon, a, AXIS, d1, d2) < 0
