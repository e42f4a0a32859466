import json
import math

import numpy as np
import pytest

from harmonia import MoebiusStructure, SamplerStarvation, check_increment, check_monotone, check_nonzero
from harmonia.axioms import (CHECKERS, INCREMENT_READING, SLACKS, AxiomReport, check_ptolemaic,
                             monotone_slack, nested_slack, nonzero_slack, ptolemaic_slack,
                             sample_increment_tuple)
from harmonia.circle import CirclePoint, PointPair, cyclic_order
from harmonia.harmonic import harmonic_pair_through


def chordal(a, b):
    return 2 * abs(math.sin((a - b) / 2))


def test_monotone_slack_oracle():
    x, y, z, u = 0.1, 2.0, 1.0, 4.0
    d = chordal
    want = math.log(d(x, y) * d(z, u)) - max(math.log(d(x, z) * d(y, u)), math.log(d(x, u) * d(y, z)))
    assert monotone_slack(MoebiusStructure.canonical(), (x, y, z, u)) == pytest.approx(want, abs=1e-14)


def test_nested_slack_oracle():
    # |xy|_u > |xz|_u when z lies between x and y away from u
    x, z, y, u = 0.2, 1.0, 2.5, 4.5
    d = chordal
    du = lambda p, q: d(p, q) / (d(p, u) * d(q, u))
    want = math.log(du(x, y)) - math.log(du(x, z))
    assert nested_slack(MoebiusStructure.canonical(), (x, z, y, u)) == pytest.approx(want, abs=1e-13)


def test_ptolemaic_slack_is_zero_on_the_canonical_circle():
    # concyclic points: Ptolemy's equality holds for the separating pairing
    m = MoebiusStructure.canonical()
    assert ptolemaic_slack(m, (0.3, 1.7, 2.9, 5.0)) == pytest.approx(0.0, abs=1e-14)


def test_nonzero_slack_is_max_norm(canon):
    pts = (0.3, 1.7, 2.9, 5.0)
    assert nonzero_slack(canon, pts) == canon.cross_ratio_triple(pts).max_norm


def test_canonical_margins_positive(canon):
    assert check_monotone(canon, 2000, seed=3).margin > 0
    assert check_nonzero(canon, 2000, seed=3).margin > 0
    assert check_increment(canon, 300, seed=3).margin > 0


def test_nested_form_is_reported(canon):
    rep = check_monotone(canon, 500)
    assert set(rep.details["margins"]) == {"monotone", "monotone-nested"}
    assert rep.details["margins"]["monotone-nested"] > 0


@pytest.mark.parametrize("fn", list(CHECKERS.values()))
def test_empty_budget(canon, fn):
    with pytest.raises(ValueError, match="empty sample budget"):
        fn(canon, 0, 0)


@pytest.mark.parametrize("name", list(CHECKERS))
def test_reports_are_deterministic(canon, name):
    fn = CHECKERS[name]
    n = 50 if name == "increment" else 300
    assert fn(canon, n, 11).dumps() == fn(canon, n, 11).dumps()
    assert fn(canon, 1, 5).dumps() == fn(canon, 1, 5).dumps()


def test_reports_do_not_depend_on_thread_count(canon, monkeypatch):
    monkeypatch.setenv("HARMONIA_THREADS", "1")
    serial = check_monotone(canon, 500, 2).dumps()
    monkeypatch.setenv("HARMONIA_THREADS", "4")
    assert check_monotone(canon, 500, 2).dumps() == serial


def test_nonzero_on_near_harmonic_tuples(canon):
    # one coordinate of the triple vanishes, the max-norm stays away from 0
    rng = np.random.default_rng(4)
    for _ in range(200):
        a = PointPair(*(CirclePoint(x) for x in rng.uniform(0, 2 * math.pi, size=2)))
        q = harmonic_pair_through(canon, a, CirclePoint(rng.uniform(0, 2 * math.pi)))
        pts = (q.left.p, q.right.p, q.left.q, q.right.q)
        t = canon.cross_ratio_triple(pts)
        assert min(abs(x) for x in t) < 1e-9
        assert nonzero_slack(canon, pts) > 0


def test_seventuple_postconditions(canon):
    for seed in range(1000):
        t = sample_increment_tuple(canon, seed)
        assert t.residual_247 <= canon.tol.harmonic
        assert t.residual_157 <= canon.tol.harmonic
        assert t.in_cyclic_order()
        pts = t.points
        assert all(cyclic_order(pts[i], pts[i + 1], pts[i + 2]) for i in range(5))


def test_seventuple_crossing_out(canon):
    t = sample_increment_tuple(canon, 9)
    x = t.points
    assert t.subtuple("247") == (x[0], x[2], x[4], x[5])
    assert t.subtuple("157") == (x[1], x[2], x[3], x[5])
    assert t.subtuple("345") == (x[0], x[1], x[5], x[6])
    assert t.subtuple("123") == (x[3], x[4], x[5], x[6])


def test_seventuple_deterministic(canon):
    assert sample_increment_tuple(canon, 17) == sample_increment_tuple(canon, 17)


def test_seventuple_starvation(canon, monkeypatch):
    import harmonia.axioms as ax

    monkeypatch.setattr(ax.K, "conjugate", lambda S, a, b, z: (a + 3.0) % (2 * math.pi))
    monkeypatch.setattr(ax, "RETRY_BUDGET", 5)
    with pytest.raises(SamplerStarvation, match="sampler starvation"):
        sample_increment_tuple(canon, 0)


def test_increment_report_records_reading(canon):
    rep = check_increment(canon, 20)
    assert rep.details["harmonic_reading"] == INCREMENT_READING
    assert rep.details["max_harmonic_residual"] <= canon.tol.harmonic


def test_counterexamples_reevaluate_negative():
    m = MoebiusStructure.power_perturbed(0.5)
    rep = check_ptolemaic(m, 2000)
    assert rep.margin < 0 and rep.counterexamples
    for c in rep.counterexamples:
        assert c.reevaluate(m) == c.slack
        assert c.reevaluate(m) <= 0


def test_negative_margin_implies_counterexamples():
    m = MoebiusStructure.power_perturbed(0.5)
    for fn in CHECKERS.values():
        rep = fn(m, 200, 1)
        assert (rep.margin < 0) <= bool(rep.counterexamples)


def test_report_serialization(canon):
    rep = check_nonzero(canon, 10, 4)
    doc = json.loads(rep.dumps())
    assert doc["axiom"] == "nonzero" and doc["seed"] == 4 and doc["n"] == 10
    assert doc["margin"] == rep.margin
    lines = rep.to_csv().splitlines()
    assert lines[0] == ",".join(AxiomReport.CSV_COLUMNS)
    assert lines[1].startswith("nonzero,10,4,10,10,")


def test_slacks_registry():
    assert set(SLACKS) == {"monotone", "monotone-nested", "nonzero", "ptolemaic", "increment"}


@pytest.mark.parametrize("eps", [0.05])
def test_sine_perturbed_monotone_informational(eps):
    rep = check_monotone(MoebiusStructure.sine_perturbed(eps), 10_000)
    print(f"sine eps={eps} monotone margin {rep.margin:.3e}")
    assert math.isfinite(rep.margin)


def test_sine_perturbed_increment_informational():
    rep = check_increment(MoebiusStructure.sine_perturbed(0.2), 300)
    print(f"sine eps=0.2 increment margin {rep.margin:.3e}")
    assert math.isfinite(rep.margin)
