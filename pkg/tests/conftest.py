import math

import numpy as np
import pytest

from harmonia import CirclePoint, MoebiusStructure, PointPair

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def record(request):
    """Log one pass/fail line per acceptance criterion; printed in the terminal summary."""

    def rec(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}"
        request.config.stash[_ACCEPTANCE].append(line)
        print(line)
        return ok

    return rec


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def canon():
    return MoebiusStructure.canonical()


def chart(s):
    return CirclePoint.from_chart(s)


def cpair(s, t):
    return PointPair.from_chart(s, t)


def random_pair(rng, min_gap=0.0):
    """Uniform random pair of circle points.

    ``min_gap`` rejects pairs closer than that angle; round-trip comparisons
    through a reflection lose about ``(2 pi / gap) ** 2`` ulps, so tests that
    compare angles to 1e-12 keep clear of near-coincident points.
    """
    while True:
        a, b = rng.uniform(0.0, 2 * math.pi, size=2)
        gap = abs(a - b)
        if min(gap, 2 * math.pi - gap) >= min_gap:
            return PointPair(CirclePoint(a), CirclePoint(b))


def chart_close(x: CirclePoint, s: float, tol: float = 1e-9) -> bool:
    """Compare a circle point with a chart value, treating large values via the angle."""
    if math.isinf(s):
        return x.approx_eq(CirclePoint(math.pi), 1e-9)
    return abs(x.to_chart() - s) <= tol * max(1.0, abs(s))
