"""Semi-metrics on the circle, their inversions, and cross-ratio triples.

A :class:`MoebiusStructure` is represented by one everywhere-finite base
semi-metric.  Cross-ratios are always computed from that base; inversion
charts exist only as a view (:meth:`MoebiusStructure.dist_inverted`).

Shipped base semi-metrics:

``canonical-chordal``
    ``2 |sin((x - y) / 2)|``; generates the canonical structure.
``sine-perturbed``
    chordal times ``1 + eps * sin(x + y)``, ``|eps| < 1``.
``power-perturbed``
    chordal raised to ``1 + eps``, ``eps > -1``.
``tabulated``
    chordal times a positive factor sampled on the uniform ``n x n`` angle
    grid, interpolated bilinearly and symmetrized.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels as K
from .circle import CirclePoint, as_point
from .errors import DegenerateConfiguration

EPS_CR = 1e-9
EPS_HARM = 1e-10

KINDS = {
    "canonical-chordal": K.CANONICAL,
    "sine-perturbed": K.SINE,
    "power-perturbed": K.POWER,
    "tabulated": K.TABULATED,
}
ALIASES = {"canonical": "canonical-chordal", "sine": "sine-perturbed", "power": "power-perturbed"}


@dataclass(frozen=True)
class Tolerances:
    cross_ratio: float = EPS_CR
    harmonic: float = EPS_HARM
    angle: float = 1e-12


@dataclass(frozen=True)
class SemiMetricSpec:
    kind: str = "canonical-chordal"
    epsilon: float = 0.0
    table: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        kind = ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise ValueError(f"unknown semi-metric kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        eps = float(self.epsilon)
        if not math.isfinite(eps):
            raise ValueError("epsilon must be finite")
        if kind == "sine-perturbed" and not abs(eps) < 1.0:
            raise ValueError("sine-perturbed needs |epsilon| < 1 to stay positive")
        if kind == "power-perturbed" and not eps > -1.0:
            raise ValueError("power-perturbed needs epsilon > -1")
        if kind == "tabulated":
            if self.table is None:
                raise ValueError("tabulated semi-metric needs a table")
            arr = np.asarray(self.table, dtype=float)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
                raise ValueError("table must be a square n x n grid with n >= 2")
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
                raise ValueError("table factors must be finite and positive")
            object.__setattr__(self, "table", tuple(tuple(float(v) for v in row) for row in arr))
        elif self.table is not None:
            raise ValueError(f"{kind} does not take a table")
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def from_json(cls, doc: dict | str) -> SemiMetricSpec:
        if isinstance(doc, str):
            doc = json.loads(doc)
        if "kind" not in doc:
            raise ValueError("structure spec needs a 'kind'")
        extra = set(doc) - {"kind", "epsilon", "table"}
        if extra:
            raise ValueError(f"unexpected keys in structure spec: {sorted(extra)}")
        table = doc.get("table")
        if isinstance(table, dict):
            table = table.get("values")
        return cls(kind=doc["kind"], epsilon=doc.get("epsilon", 0.0), table=table)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind in ("sine-perturbed", "power-perturbed"):
            out["epsilon"] = self.epsilon
        if self.table is not None:
            out["table"] = {"values": [list(row) for row in self.table]}
        return out


@dataclass(frozen=True)
class CrossRatioTriple:
    """Natural logarithms of the three cross-ratios of a 4-tuple."""

    a1: float
    a2: float
    a3: float

    def __iter__(self):
        return iter((self.a1, self.a2, self.a3))

    def __getitem__(self, i: int) -> float:
        return (self.a1, self.a2, self.a3)[i]

    @property
    def total(self) -> float:
        return self.a1 + self.a2 + self.a3

    @property
    def max_norm(self) -> float:
        return max(abs(self.a1), abs(self.a2), abs(self.a3))

    def cross_ratios(self) -> tuple[float, float, float]:
        return math.exp(self.a1), math.exp(self.a2), math.exp(self.a3)

    def allclose(self, other: CrossRatioTriple, tol: float = EPS_CR) -> bool:
        return all(abs(x - y) <= tol for x, y in zip(self, other))


@dataclass(frozen=True)
class MoebiusStructure:
    spec: SemiMetricSpec = field(default_factory=SemiMetricSpec)
    tol: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        table = (np.asarray(self.spec.table, dtype=float) if self.spec.table is not None
                 else np.zeros((1, 1)))
        object.__setattr__(self, "_S", (KINDS[self.spec.kind], self.spec.epsilon, table))

    # constructors
    @classmethod
    def canonical(cls) -> MoebiusStructure:
        return cls(SemiMetricSpec("canonical-chordal"))

    @classmethod
    def sine_perturbed(cls, eps: float) -> MoebiusStructure:
        return cls(SemiMetricSpec("sine-perturbed", eps))

    @classmethod
    def power_perturbed(cls, eps: float) -> MoebiusStructure:
        return cls(SemiMetricSpec("power-perturbed", eps))

    @classmethod
    def tabulated(cls, table: Sequence[Sequence[float]]) -> MoebiusStructure:
        return cls(SemiMetricSpec("tabulated", table=table))

    @classmethod
    def from_json(cls, doc: dict | str) -> MoebiusStructure:
        return cls(SemiMetricSpec.from_json(doc))

    @property
    def S(self):
        """Argument tuple for the compiled kernels."""
        return self._S

    def __hash__(self):
        return hash((self.spec.kind, self.spec.epsilon, self.spec.table, self.tol))

    # distances
    def dist(self, x, y) -> float:
        return K.dist(self._S, as_point(x).angle, as_point(y).angle)

    def log_dist(self, x, y) -> float:
        return K.logd(self._S, as_point(x).angle, as_point(y).angle)

    def dist_inverted(self, omega, x, y) -> float:
        """Distance in the inversion chart with infinitely remote point ``omega``."""
        omega, x, y = as_point(omega), as_point(x), as_point(y)
        if x == y:
            return 0.0
        if x == omega or y == omega:
            return math.inf
        return self.dist(x, y) / (self.dist(x, omega) * self.dist(y, omega))

    def cross_ratio_triple(self, q: Sequence) -> CrossRatioTriple:
        x1, x2, x3, x4 = _distinct4(q)
        L = self.log_dist
        l12, l13, l14 = L(x1, x2), L(x1, x3), L(x1, x4)
        l23, l24, l34 = L(x2, x3), L(x2, x4), L(x3, x4)
        return CrossRatioTriple(
            l13 + l24 - l14 - l23,
            l14 + l23 - l12 - l34,
            l12 + l34 - l24 - l13,
        )

    def ptolemaic_residual(self, q: Sequence) -> float:
        """d(x,z)d(y,u) + d(x,u)d(y,z) - d(x,y)d(z,u) for q = (x, y, z, u)."""
        x, y, z, u = (as_point(p) for p in q)
        d = self.dist
        return d(x, z) * d(y, u) + d(x, u) * d(y, z) - d(x, y) * d(z, u)

    def ptolemaic_margin(self, q: Sequence) -> float:
        """Smallest ptolemaic residual over the three pairings of ``q``."""
        x, y, z, u = q
        return min(
            self.ptolemaic_residual((x, y, z, u)),
            self.ptolemaic_residual((x, z, y, u)),
            self.ptolemaic_residual((x, u, y, z)),
        )


def _distinct4(q: Sequence) -> tuple[CirclePoint, ...]:
    pts = tuple(as_point(p) for p in q)
    if len(pts) != 4:
        raise ValueError("expected a 4-tuple of circle points")
    if len(set(pts)) != 4:
        raise DegenerateConfiguration("degenerate 4-tuple")
    return pts


# pairings of opposite tetrahedron edges, indexed like (12)(34), (13)(24), (14)(23)
PAIRINGS = (
    frozenset({frozenset({0, 1}), frozenset({2, 3})}),
    frozenset({frozenset({0, 2}), frozenset({1, 3})}),
    frozenset({frozenset({0, 3}), frozenset({1, 2})}),
)


def permutation_sign(perm: Sequence[int]) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def cross_ratio_homomorphism(perm: Sequence[int]) -> tuple[int, int, int]:
    """Image of a 4-permutation in S3, acting on the three edge pairings.

    ``perm`` acts on tuples by ``q -> (q[perm[0]], ..., q[perm[3]])``; entry
    ``k`` of the result is the pairing of ``q`` that becomes pairing ``k``.
    """
    if sorted(perm) != [0, 1, 2, 3]:
        raise ValueError(f"not a permutation of 0..3: {perm!r}")
    image = []
    for pairing in PAIRINGS:
        moved = frozenset(frozenset(perm[i] for i in pair) for pair in pairing)
        image.append(PAIRINGS.index(moved))
    return tuple(image)


def permute_tuple(q: Sequence, perm: Sequence[int]) -> tuple:
    return tuple(q[i] for i in perm)


def permuted_triple(t: CrossRatioTriple, perm: Sequence[int]) -> CrossRatioTriple:
    """Cross-ratio triple of ``permute_tuple(q, perm)`` given the triple of ``q``."""
    phi = cross_ratio_homomorphism(perm)
    sign = permutation_sign(perm)
    # log-cross-ratio k is a difference of pairings k+1 and k+2; the image
    # permutation has the same parity as perm
    return CrossRatioTriple(*(sign * t[phi[k]] for k in range(3)))
