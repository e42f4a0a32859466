"""Zig-zag paths, upper bounds for the path pseudometric, and closed-path checks.

A path is stored as its chain of axes ``s_0, ..., s_m``.  Vertex ``i`` is
the harmonic pair ``{s_i, s_(i+1)}`` and side ``i`` (for ``1 <= i < m``)
runs along the line with axis ``s_i`` from vertex ``i - 1`` to vertex
``i``.  Consecutive axes of a chain built here are harmonic by
construction: new axes come from reflections and common perpendiculars,
never from penalized optimization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from . import _kernels as K
from ._parallel import pmap
from .circle import CirclePoint, PointPair
from .errors import NotCollinear
from .harmonic import HarmonicPair, HmPoint
from .lines import Line, common_perpendicular, line_distance, shared_axis
from .moebius import MoebiusStructure

MAX_WALK = 4
RESTARTS = 8
FEV_PER_PARAM = 100
START_SCALE = 1.5
XATOL = 1e-10
FATOL = 1e-13


def _pair(q) -> HarmonicPair:
    return q.pair if isinstance(q, HmPoint) else q


def _same(a: PointPair, b: PointPair, eps: float) -> bool:
    return a.approx_eq(b, eps)


@dataclass(frozen=True)
class Validation:
    ok: bool
    vertex: int | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class ZZPath:
    """Zig-zag path given by its axis chain (at least two axes)."""

    chain: tuple[PointPair, ...]

    def __post_init__(self):
        chain = tuple(self.chain)
        if len(chain) < 2:
            raise ValueError("a path needs at least two axes (one vertex)")
        object.__setattr__(self, "chain", chain)

    # construction
    @classmethod
    def empty(cls, q) -> ZZPath:
        q = _pair(q)
        return cls((q.right, q.left))

    @classmethod
    def segment(cls, m: MoebiusStructure, q, q2) -> ZZPath:
        """One-side path along the common axis of ``q`` and ``q2``."""
        q, q2 = _pair(q), _pair(q2)
        a = shared_axis(q, q2, m.tol.angle)
        if a is None:
            raise NotCollinear("not collinear: the pairs share no axis")
        b, b2 = q.other_axis(a, m.tol.angle), q2.other_axis(a, m.tol.angle)
        if _same(b, b2, m.tol.angle):
            return cls((b, a))
        return cls((b, a, b2))

    @classmethod
    def from_vertices(cls, m: MoebiusStructure, vertices: Sequence) -> ZZPath:
        """Path through the given harmonic pairs; consecutive ones must share an axis.

        Repeated consecutive vertices are dropped.  Two consecutive sides on
        the same axis are rejected as non-alternating.
        """
        eps = m.tol.angle
        vs = [_pair(v) for v in vertices]
        if not vs:
            raise ValueError("no vertices")
        kept = [vs[0]]
        for v in vs[1:]:
            if not HmPoint(v).approx_eq(HmPoint(kept[-1]), eps):
                kept.append(v)
        if len(kept) == 1:
            return cls.empty(kept[0])
        sides = []
        for u, v in zip(kept, kept[1:]):
            a = shared_axis(u, v, eps)
            if a is None:
                raise NotCollinear("not collinear: consecutive vertices share no axis")
            sides.append(a)
        for i in range(1, len(sides)):
            if _same(sides[i - 1], sides[i], eps):
                raise ValueError(f"non-alternating path: sides {i - 1} and {i} lie on the same axis")
        chain = [kept[0].other_axis(sides[0], eps), *sides, kept[-1].other_axis(sides[-1], eps)]
        return cls(tuple(chain))

    @classmethod
    def from_array(cls, arr) -> ZZPath:
        return cls(tuple(PointPair(CirclePoint(p), CirclePoint(q)) for p, q in np.asarray(arr)))

    def as_array(self) -> np.ndarray:
        return np.array([a.angles for a in self.chain], dtype=float)

    # structure
    @property
    def n_sides(self) -> int:
        return len(self.chain) - 2

    @property
    def side_axes(self) -> tuple[PointPair, ...]:
        return self.chain[1:-1]

    @property
    def vertices(self) -> list[HmPoint]:
        return [HmPoint(HarmonicPair(a, b)) for a, b in zip(self.chain, self.chain[1:])]

    @property
    def start(self) -> HmPoint:
        return HmPoint(HarmonicPair(self.chain[0], self.chain[1]))

    @property
    def end(self) -> HmPoint:
        return HmPoint(HarmonicPair(self.chain[-2], self.chain[-1]))

    def lengths(self, m: MoebiusStructure) -> np.ndarray:
        return K.side_lengths(m.S, self.as_array())

    def length(self, m: MoebiusStructure) -> float:
        return math.fsum(self.lengths(m))

    def validate(self, m: MoebiusStructure) -> Validation:
        """Check that every vertex is a harmonic pair of distinct, separating axes."""
        eps = m.tol.angle
        for i, (a, b) in enumerate(zip(self.chain, self.chain[1:])):
            if _same(a, b, eps):
                return Validation(False, i, "consecutive axes coincide")
            if a.shares_point(b):
                return Validation(False, i, "consecutive axes share a point")
            res = K.harmonic_residual(m.S, *a.angles, *b.angles)
            if not res <= m.tol.harmonic:
                return Validation(False, i, f"axes not harmonic (residual {res:.3e})")
        return Validation(True)

    def normalized(self, eps: float = 1e-12) -> ZZPath:
        """Drop zero-length sides, i.e. axes whose two neighbours coincide."""
        chain = list(self.chain)
        changed = True
        while changed:
            changed = False
            m = len(chain) - 1
            for i in range(1, m):
                if _same(chain[i - 1], chain[i + 1], eps):
                    if i == 1:
                        del chain[0]
                    elif i == m - 1:
                        del chain[m]
                    else:
                        del chain[i:i + 2]
                    changed = True
                    break
        return ZZPath(tuple(chain))

    def reversed(self) -> ZZPath:
        return ZZPath(self.chain[::-1])

    def concat(self, other: ZZPath, eps: float = 1e-12) -> ZZPath:
        """This path followed by ``other``, which must start where this one ends."""
        s1, s2 = self.chain[-2], self.chain[-1]
        t1, t2 = other.chain[0], other.chain[1]
        if _same(s1, t1, eps) and _same(s2, t2, eps):
            chain = self.chain + other.chain[2:]
        elif _same(s1, t2, eps) and _same(s2, t1, eps):
            # both paths run along s1 through the joint, merge those sides
            chain = self.chain[:-1] + other.chain[2:]
        else:
            raise ValueError("paths do not meet: end vertex differs from start vertex")
        return ZZPath(chain).normalized(eps)

    def is_closed(self, eps: float = 1e-12) -> bool:
        if self.n_sides < 1:
            return False
        a, b = self.chain[0], self.chain[1]
        c, d = self.chain[-2], self.chain[-1]
        return (_same(a, c, eps) and _same(b, d, eps)) or (_same(a, d, eps) and _same(b, c, eps))

    def to_json(self, m: MoebiusStructure) -> dict:
        return {
            "axes": [list(a.angles) for a in self.chain],
            "vertices": [[list(a.angles), list(b.angles)] for a, b in zip(self.chain, self.chain[1:])],
            "side_lengths": [float(x) for x in self.lengths(m)],
            "length": self.length(m),
        }


def connect_five(m: MoebiusStructure, q, q2, a2: PointPair) -> ZZPath:
    """Path from ``q = (a, b)`` to ``q2 = (a', b')`` with at most five sides.

    It runs along ``a`` to the common perpendicular of ``a`` and ``a2``,
    along that to ``a2``, along ``a2`` to the common perpendicular of
    ``a'`` and ``a2``, and along ``a'`` to ``q2``.
    """
    q, q2 = _pair(q), _pair(q2)
    a, b = q.left, q.right
    a1, b1 = q2.left, q2.right
    bt = common_perpendicular(m, a, a2)
    bt2 = common_perpendicular(m, a1, a2)
    return ZZPath((b, a, bt, a2, bt2, a1, b1))


# ------------------------------------------------------------ upper bounds


@dataclass
class DeltaEstimate:
    upper: float
    witness: ZZPath
    evaluations: int
    seed: int
    budget: int = 0
    trace: list[tuple[int, float]] = field(default_factory=list)


class _Exhausted(Exception):
    pass


class _Objective:
    """Counts evaluations against a hard budget and remembers the best one."""

    def __init__(self, m: MoebiusStructure, budget: int):
        self.S = m.S
        self.tol = m.tol.harmonic
        self.left = budget
        self.used = 0
        self.best = math.inf
        self.best_arg = None
        self.trace: list[tuple[int, float]] = []

    def __call__(self, x, slot):
        if self.left <= 0:
            raise _Exhausted
        self.left -= 1
        self.used += 1
        k, head, tail, arc = slot
        val = K.walk_length(self.S, head, np.asarray(x, dtype=float), arc, tail, self.tol)
        if val < self.best:
            self.best = val
            self.best_arg = (slot, np.array(x, dtype=float))
            self.trace.append((self.used, val))
        return val


def _search_slots(q: HarmonicPair, q2: HarmonicPair) -> list:
    heads = [np.array([q.right.angles, q.left.angles]), np.array([q.left.angles, q.right.angles])]
    tails = [np.array([q2.left.angles, q2.right.angles]), np.array([q2.right.angles, q2.left.angles])]
    slots = []
    for k in range(MAX_WALK + 1):
        for head in heads:
            for tail in tails:
                if k == 0 and np.array_equal(head[1], tail[0]):
                    # both perpendiculars coincide and the path prunes to the direct segment
                    continue
                if k == 0:
                    n_arcs = K.complementary_arcs(np.array([*head[1], *tail[0]])).shape[0]
                else:
                    n_arcs = 4
                for arc in range(n_arcs):
                    slots.append((k, head, tail, arc))
    return slots


def _search(m: MoebiusStructure, q: HarmonicPair, q2: HarmonicPair, budget: int, seed: int):
    """Multi-start simplex search over walk-and-connect paths from q to q2."""
    slots = _search_slots(q, q2)
    rng = np.random.default_rng([seed])
    # every start is drawn before any evaluation so a larger budget only extends the run
    starts = [[rng.normal(0.0, START_SCALE, slot[0] + 2) for slot in slots] for _ in range(RESTARTS)]
    obj = _Objective(m, budget)
    try:
        for r in range(RESTARTS):
            for slot, x0 in zip(slots, starts[r]):
                dim = slot[0] + 2
                minimize(obj, x0, args=(slot,), method="Nelder-Mead",
                         options={"xatol": XATOL, "fatol": FATOL, "maxfev": FEV_PER_PARAM * dim})
    except _Exhausted:
        pass
    if obj.best_arg is None or not math.isfinite(obj.best):
        return None, obj
    (k, head, tail, arc), x = obj.best_arg
    chain = K.walk_chain(m.S, head, x, arc, tail)
    return ZZPath.from_array(chain).normalized(m.tol.angle), obj


def _order_key(q: HarmonicPair) -> tuple:
    return tuple(sorted(a.angles for a in q.axes))


def _endpoints_match(m: MoebiusStructure, path: ZZPath, q, q2) -> bool:
    eps = 1e-9
    return path.start.approx_eq(HmPoint(q), eps) and path.end.approx_eq(HmPoint(q2), eps)


def delta_upper(m: MoebiusStructure, q, q2, budget: int = 10_000, seed: int = 0,
                include_direct: bool = True, extra: Iterable[ZZPath] = ()) -> DeltaEstimate:
    """Upper bound for the path pseudometric between ``q`` and ``q2``.

    Candidates are the direct segment (if the pairs are collinear and
    ``include_direct``), any ``extra`` paths from ``q`` to ``q2`` and the best
    walk-and-connect path found within ``budget`` length evaluations.
    Among candidates within the cross-ratio tolerance of the shortest, the
    one with fewest sides is the witness.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    q, q2 = _pair(q), _pair(q2)
    extra = list(extra)
    if _order_key(q2) < _order_key(q):
        est = delta_upper(m, q2, q, budget, seed, include_direct, [p.reversed() for p in extra])
        return replace(est, witness=est.witness.reversed())
    if HmPoint(q).approx_eq(HmPoint(q2), m.tol.angle):
        return DeltaEstimate(0.0, ZZPath.empty(q), 0, seed, budget)

    candidates: list[ZZPath] = []
    if include_direct and shared_axis(q, q2, m.tol.angle) is not None:
        candidates.append(ZZPath.segment(m, q, q2))
    for p in extra:
        if not _endpoints_match(m, p, q, q2):
            raise ValueError("extra candidate does not connect the given pairs")
        if p.validate(m):
            candidates.append(p.normalized(m.tol.angle))
    found, obj = _search(m, q, q2, budget, seed)
    if found is not None and found.validate(m):
        candidates.append(found)
    if not candidates:
        raise RuntimeError("no candidate path found")
    lengths = [p.length(m) for p in candidates]
    shortest = min(lengths)
    near = [i for i, L in enumerate(lengths) if L <= shortest + m.tol.cross_ratio]
    pick = min(near, key=lambda i: (candidates[i].n_sides, i))
    return DeltaEstimate(lengths[pick], candidates[pick], obj.used, seed, budget, obj.trace)


@dataclass
class GeodesicReport:
    distance: float
    found: float
    margin: float
    evaluations: int
    witness: ZZPath
    trace: list[tuple[int, float]] = field(default_factory=list)


def verify_geodesic(m: MoebiusStructure, line: Line, q, q2, budget: int = 10_000,
                    seed: int = 0) -> GeodesicReport:
    """Search for a zig-zag path between two points of ``line`` shorter than their distance."""
    q, q2 = _pair(q), _pair(q2)
    for p in (q, q2):
        if not p.has_axis(line.axis, m.tol.angle):
            raise ValueError("pairs must lie on the line")
    dist = line_distance(m, q, q2)
    est = delta_upper(m, q, q2, budget, seed, include_direct=False)
    return GeodesicReport(dist, est.upper, est.upper - dist, est.evaluations, est.witness, est.trace)


# ------------------------------------------------------------ closed paths


@dataclass
class ClosedPathReport:
    lengths: list[float]
    slacks: list[float]

    @property
    def min_slack(self) -> float:
        return min(self.slacks)

    @property
    def ok(self) -> bool:
        return self.min_slack > 0.0


def closed_path_check(m: MoebiusStructure, path: ZZPath) -> ClosedPathReport:
    """Slack ``sum(other sides) - side`` for every side of a closed path."""
    if not path.is_closed(m.tol.angle):
        raise ValueError("path is not closed")
    if path.n_sides >= 2 and _same(path.chain[1], path.chain[-2], m.tol.angle):
        raise ValueError("non-alternating path: first and last sides lie on the same axis")
    v = path.validate(m)
    if not v:
        raise ValueError(f"invalid path at vertex {v.vertex}: {v.message}")
    lengths = [float(x) for x in path.lengths(m)]
    slacks = [math.fsum(lengths[:i] + lengths[i + 1:]) - lengths[i] for i in range(len(lengths))]
    return ClosedPathReport(lengths, slacks)


# ------------------------------------------------------------ samplers


def random_line(rng: np.random.Generator) -> Line:
    a, b = rng.uniform(0.0, 2 * math.pi, size=2)
    return Line(PointPair(CirclePoint(a), CirclePoint(b)))


def random_collinear_pair(m: MoebiusStructure, rng: np.random.Generator, scale: float = 2.0):
    """A random line and two pairs on it with normally distributed coordinates."""
    line = random_line(rng)
    t1, t2 = rng.normal(0.0, scale, size=2)
    q = line.point_at(m, t1)
    q2 = line.point_at(m, t2)
    return line, HarmonicPair(line.axis, q.right), HarmonicPair(line.axis, q2.right)


def random_connector(rng: np.random.Generator, a: PointPair, a1: PointPair) -> PointPair:
    """Two random points on one random open arc of the circle minus ``a`` and ``a1``."""
    arcs = K.complementary_arcs(np.array([*a.angles, *a1.angles]))
    start, length = arcs[int(rng.integers(arcs.shape[0]))]
    u = np.sort(rng.uniform(0.0, 1.0, size=2))
    return PointPair(CirclePoint(start + length * u[0]), CirclePoint(start + length * u[1]))


def random_hexagon(m: MoebiusStructure, rng: np.random.Generator) -> ZZPath:
    """Closed path: a five-side connector between two collinear pairs plus the segment back."""
    line, q, q2 = random_collinear_pair(m, rng)
    # move off the line first: q = (A, L), q2 = (A', L)
    q, q2 = HarmonicPair(q.right, q.left), HarmonicPair(q2.right, q2.left)
    a2 = random_connector(rng, q.left, q2.left)
    five = connect_five(m, q, q2, a2)
    return five.concat(ZZPath.segment(m, q2, q))


def sweep(fn, n: int, seed: int) -> list:
    """Apply ``fn(index, rng)`` over sample indices with per-index generators."""
    return pmap(lambda i: fn(i, np.random.default_rng([seed, i])), range(n))
