"""Sampling checkers for monotonicity, the increment axiom and related bounds.

Each checker draws ``n`` configurations with a generator seeded by
``(seed, sample_index)``, evaluates a slack that is positive exactly when
the property holds strictly, and reports the minimum.  Checkers only ever
falsify or gather evidence; a positive margin proves nothing.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from ._parallel import pmap
from .circle import CirclePoint, as_point
from .errors import MonotonicityFailure, SamplerStarvation
from .moebius import MoebiusStructure

TWO_PI = 2.0 * math.pi
RETRY_BUDGET = 100
MAX_COUNTEREXAMPLES = 20

# Which pairs of a harmonic 4-tuple separate each other inside the increment axiom.
INCREMENT_READING = "separating pairs: entries 1,3 and 2,4 of each subtuple"


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _angles(pts: Sequence) -> list[float]:
    return [as_point(p).angle for p in pts]


# ---------------------------------------------------------------- slacks


def monotone_slack(m: MoebiusStructure, pts: Sequence) -> float:
    """``ln(|xy||zu|) - max(ln(|xz||yu|), ln(|xu||yz|))`` with (x, y), (z, u) separating."""
    x, y, z, u = _angles(pts)
    L = lambda p, q: K.logd(m.S, p, q)
    return L(x, y) + L(z, u) - max(L(x, z) + L(y, u), L(x, u) + L(y, z))


def nested_slack(m: MoebiusStructure, pts: Sequence) -> float:
    """``ln |xy|_u - ln |xz|_u`` for z strictly between x and y on the line X minus u."""
    x, z, y, u = _angles(pts)
    L = lambda p, q: K.logd(m.S, p, q)
    return (L(x, y) - L(y, u)) - (L(x, z) - L(z, u))


def nonzero_slack(m: MoebiusStructure, pts: Sequence) -> float:
    return m.cross_ratio_triple(pts).max_norm


def ptolemaic_slack(m: MoebiusStructure, pts: Sequence) -> float:
    """Smallest ``ln(|xz||yu| + |xu||yz|) - ln(|xy||zu|)`` over the three pairings.

    The expression is a function of cross-ratios, so it does not depend on
    which semi-metric of the structure is used.
    """
    x, y, z, u = _angles(pts)
    d = lambda p, q: K.dist(m.S, p, q)
    out = math.inf
    for a, b, c, e in ((x, y, z, u), (x, z, y, u), (x, u, y, z)):
        out = min(out, math.log(d(a, c) * d(b, e) + d(a, e) * d(b, c)) - math.log(d(a, b) * d(c, e)))
    return out


def _cr1(m: MoebiusStructure, q: Sequence[float]) -> float:
    x1, x2, x3, x4 = q
    L = lambda p, r: K.logd(m.S, p, r)
    return L(x1, x3) + L(x2, x4) - L(x1, x4) - L(x2, x3)


def increment_slack(m: MoebiusStructure, pts: Sequence) -> float:
    """``ln cr1(x1, x2, x6, x7) - ln cr1(x4, x5, x6, x7)``."""
    x1, x2, x3, x4, x5, x6, x7 = _angles(pts)
    return _cr1(m, (x1, x2, x6, x7)) - _cr1(m, (x4, x5, x6, x7))


SLACKS: dict[str, Callable[[MoebiusStructure, Sequence], float]] = {
    "monotone": monotone_slack,
    "monotone-nested": nested_slack,
    "nonzero": nonzero_slack,
    "ptolemaic": ptolemaic_slack,
    "increment": increment_slack,
}


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class Counterexample:
    form: str
    index: int
    points: tuple[float, ...]
    slack: float

    def reevaluate(self, m: MoebiusStructure) -> float:
        return SLACKS[self.form](m, self.points)


@dataclass
class AxiomReport:
    axiom: str
    n: int
    seed: int
    attempted: int
    valid: int
    margin: float
    counterexamples: list[Counterexample] = field(default_factory=list)
    violations: int = 0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.margin > 0.0

    def to_json(self) -> dict:
        out = asdict(self)
        out["counterexamples"] = [asdict(c) for c in self.counterexamples]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    CSV_COLUMNS = ("axiom", "n", "seed", "attempted", "valid", "margin", "violations")

    def csv_row(self) -> list:
        return [getattr(self, k) for k in self.CSV_COLUMNS]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        w.writerow(self.csv_row())
        return buf.getvalue()


def _check_budget(n: int) -> None:
    if n < 1:
        raise ValueError("empty sample budget")


def _reduce(axiom: str, n: int, seed: int, results: list, details: dict | None = None) -> AxiomReport:
    """Fold per-sample ``[(form, points, slack), ...]`` lists into a report."""
    margin = math.inf
    margins: dict[str, float] = {}
    cex: list[Counterexample] = []
    violations = 0
    valid = 0
    attempted = 0
    for index, (tries, rows) in enumerate(results):
        attempted += tries
        if rows is None:
            continue
        valid += 1
        for form, pts, slack in rows:
            margins[form] = min(margins.get(form, math.inf), slack)
            margin = min(margin, slack)
            if not slack > 0.0:
                violations += 1
                if len(cex) < MAX_COUNTEREXAMPLES:
                    cex.append(Counterexample(form, index, tuple(pts), slack))
    det = {"margins": margins}
    det.update(details or {})
    return AxiomReport(axiom, n, seed, attempted, valid, margin, cex, violations, det)


def _sorted_angles(rng: np.random.Generator, k: int) -> list[float]:
    return sorted(float(v) for v in rng.uniform(0.0, TWO_PI, size=k))


def check_monotone(m: MoebiusStructure, n: int, seed: int = 0) -> AxiomReport:
    """Monotonicity on separating 4-tuples, plus its nested-interval form."""
    _check_budget(n)

    def one(i):
        rng = sample_rng(seed, i)
        p1, p2, p3, p4 = _sorted_angles(rng, 4)
        if len({p1, p2, p3, p4}) < 4:
            return 1, None
        sep = (p1, p3, p2, p4)
        # the remote point u is drawn uniformly among the four
        r = int(rng.integers(4))
        c = [p1, p2, p3, p4][r:] + [p1, p2, p3, p4][:r]
        nested = (c[0], c[1], c[2], c[3])
        return 1, [("monotone", sep, monotone_slack(m, sep)),
                   ("monotone-nested", nested, nested_slack(m, nested))]

    return _reduce("monotone", n, seed, pmap(one, range(n)))


def check_nonzero(m: MoebiusStructure, n: int, seed: int = 0) -> AxiomReport:
    """Smallest max-norm of the cross-ratio triple over random 4-tuples."""
    _check_budget(n)

    def one(i):
        rng = sample_rng(seed, i)
        pts = tuple(float(v) for v in rng.uniform(0.0, TWO_PI, size=4))
        if len(set(pts)) < 4:
            return 1, None
        return 1, [("nonzero", pts, nonzero_slack(m, pts))]

    return _reduce("nonzero", n, seed, pmap(one, range(n)))


def check_ptolemaic(m: MoebiusStructure, n: int, seed: int = 0) -> AxiomReport:
    """Smallest ptolemaic log-slack over random 4-tuples and all pairings."""
    _check_budget(n)

    def one(i):
        rng = sample_rng(seed, i)
        pts = tuple(float(v) for v in rng.uniform(0.0, TWO_PI, size=4))
        if len(set(pts)) < 4:
            return 1, None
        return 1, [("ptolemaic", pts, ptolemaic_slack(m, pts))]

    return _reduce("ptolemaic", n, seed, pmap(one, range(n)))


@dataclass(frozen=True)
class SeventupleSample:
    """Seven points in counterclockwise order with two harmonic subtuples."""

    points: tuple[CirclePoint, ...]
    residual_247: float
    residual_157: float
    attempts: int = 1

    def __post_init__(self):
        if len(self.points) != 7:
            raise ValueError("expected seven points")

    @property
    def angles(self) -> tuple[float, ...]:
        return tuple(p.angle for p in self.points)

    def subtuple(self, drop: str) -> tuple[CirclePoint, ...]:
        """The 4-tuple left after crossing out the 1-based entries in ``drop``."""
        gone = {int(ch) for ch in drop}
        return tuple(p for i, p in enumerate(self.points, start=1) if i not in gone)

    def in_cyclic_order(self) -> bool:
        a = self.angles
        offs = [K.offset(x, a[0]) for x in a]
        return all(offs[i] < offs[i + 1] for i in range(6))


def _on_arc(start: float, end: float, x: float) -> bool:
    o = K.offset(x, start)
    return 0.0 < o < K.offset(end, start)


def sample_increment_tuple(m: MoebiusStructure, seed=0) -> SeventupleSample:
    """Draw a 7-tuple for the increment axiom.

    x1, x3, x5 are uniform; x6 makes (x1, x3, x5, x6) harmonic, x2 is
    uniform on the arc x1 -> x3, x4 makes (x2, x3, x4, x6) harmonic and x7
    is uniform on the arc x6 -> x1.  Draws where x4 misses the arc x3 -> x5
    are retried, up to the retry budget.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    S = m.S
    for attempt in range(1, RETRY_BUDGET + 1):
        x1, x3, x5 = _sorted_angles(rng, 3)
        if x1 == x3 or x3 == x5:
            continue
        x6 = K.conjugate(S, x1, x5, x3)
        if math.isnan(x6):
            raise MonotonicityFailure("monotonicity failure: no harmonic partner for x6")
        x2 = K.wrap(x1 + K.offset(x3, x1) * rng.uniform())
        x4 = K.conjugate(S, x3, x6, x2)
        if math.isnan(x4):
            raise MonotonicityFailure("monotonicity failure: no harmonic partner for x4")
        x7 = K.wrap(x6 + K.offset(x1, x6) * rng.uniform())
        pts = (x1, x2, x3, x4, x5, x6, x7)
        offs = [K.offset(x, x1) for x in pts]
        if not all(offs[i] < offs[i + 1] for i in range(6)):
            continue
        r247 = K.harmonic_residual(S, x1, x5, x3, x6)
        r157 = K.harmonic_residual(S, x2, x4, x3, x6)
        return SeventupleSample(tuple(CirclePoint(x) for x in pts), r247, r157, attempt)
    raise SamplerStarvation(f"sampler starvation: no admissible 7-tuple in {RETRY_BUDGET} draws")


def check_increment(m: MoebiusStructure, n: int, seed: int = 0) -> AxiomReport:
    """Increment axiom margin ``ln cr1(q_345) - ln cr1(q_123)`` over sampled 7-tuples."""
    _check_budget(n)

    def one(i):
        sample = sample_increment_tuple(m, sample_rng(seed, i))
        pts = sample.angles
        worst = max(sample.residual_247, sample.residual_157)
        return sample.attempts, [("increment", pts, increment_slack(m, pts))], worst

    raw = pmap(one, range(n))
    worst = max(r[2] for r in raw)
    return _reduce("increment", n, seed, [(t, rows) for t, rows, _ in raw],
                   {"harmonic_reading": INCREMENT_READING, "max_harmonic_residual": worst})


CHECKERS = {
    "monotone": check_monotone,
    "increment": check_increment,
    "ptolemaic": check_ptolemaic,
    "nonzero": check_nonzero,
}


def check_all(m: MoebiusStructure, n: int, seed: int = 0) -> list[AxiomReport]:
    return [fn(m, n, seed) for fn in CHECKERS.values()]
