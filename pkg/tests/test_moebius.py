import itertools
import math

import numpy as np
import pytest

from conftest import chart
from harmonia import CirclePoint, DegenerateConfiguration, MoebiusStructure, SemiMetricSpec
from harmonia.moebius import (CrossRatioTriple, cross_ratio_homomorphism, permutation_sign, permute_tuple,
                              permuted_triple)

PI = math.pi
LN2 = math.log(2.0)


def chart_triple(s):
    """Independent oracle: log cross-ratios from Euclidean chart distances (no point at infinity)."""
    L = lambda i, j: math.log(abs(s[i] - s[j]))
    return (L(0, 2) + L(1, 3) - L(0, 3) - L(1, 2),
            L(0, 3) + L(1, 2) - L(0, 1) - L(2, 3),
            L(0, 1) + L(2, 3) - L(1, 3) - L(0, 2))


def test_chordal_values(canon):
    assert canon.dist(0.0, PI) == pytest.approx(2.0)
    assert canon.dist(0.0, PI / 2) == pytest.approx(math.sqrt(2.0))
    assert canon.dist(1.234, 1.234) == 0.0


def test_base_metrics_are_symmetric_and_positive():
    rng = np.random.default_rng(2)
    table = rng.uniform(0.5, 1.5, size=(8, 8))
    for m in (MoebiusStructure.canonical(), MoebiusStructure.sine_perturbed(0.3),
              MoebiusStructure.power_perturbed(0.5), MoebiusStructure.tabulated(table)):
        for _ in range(200):
            x, y = rng.uniform(0, 2 * PI, size=2)
            assert m.dist(x, y) == pytest.approx(m.dist(y, x), rel=1e-14)
            assert m.dist(x, y) > 0
            assert m.dist(x, x) == 0


def test_dist_inverted_is_half_chart_distance(canon):
    # with the chart scaled so that chart(0) = 0 and the pole is omega, d_omega = |s - t| / 2
    omega = CirclePoint(PI)
    assert canon.dist_inverted(omega, chart(0), chart(1)) == pytest.approx(0.5)
    rng = np.random.default_rng(3)
    for s, t in rng.normal(0, 3, size=(1000, 2)):
        assert 2 * canon.dist_inverted(omega, chart(s), chart(t)) == pytest.approx(abs(s - t), rel=1e-9)


def test_dist_inverted_at_remote_point(canon):
    omega = CirclePoint(1.0)
    assert canon.dist_inverted(omega, 2.0, omega) == math.inf
    assert canon.dist_inverted(omega, omega, 2.0) == math.inf
    assert canon.dist_inverted(omega, 2.0, 2.0) == 0.0


def test_dist_inverted_triangle_inequality(canon):
    rng = np.random.default_rng(4)
    omega = CirclePoint(0.3)
    for x, y, z in rng.uniform(0, 2 * PI, size=(1000, 3)):
        d = lambda a, b: canon.dist_inverted(omega, a, b)
        assert d(x, z) <= d(x, y) + d(y, z) + 1e-9 * (1 + d(x, z))


def test_cross_ratio_examples(canon):
    q = [chart(0), chart(1), chart(2), chart(math.inf)]
    t = canon.cross_ratio_triple(q)
    assert tuple(t) == pytest.approx((LN2, 0.0, -LN2), abs=1e-12)
    t2 = canon.cross_ratio_triple(permute_tuple(q, (1, 0, 2, 3)))
    assert tuple(t2) == pytest.approx((-LN2, LN2, 0.0), abs=1e-12)
    assert permuted_triple(t, (1, 0, 2, 3)).allclose(t2, 1e-12)


def test_cross_ratio_rejects_repeated_point(canon):
    with pytest.raises(DegenerateConfiguration, match="degenerate 4-tuple"):
        canon.cross_ratio_triple([0.1, 0.2, 0.1, 0.3])


def test_cross_ratio_matches_chart_oracle(canon):
    rng = np.random.default_rng(5)
    for s in rng.normal(0, 2, size=(500, 4)):
        t = canon.cross_ratio_triple([chart(v) for v in s])
        assert tuple(t) == pytest.approx(chart_triple(s), abs=1e-9)
        assert abs(t.total) <= 1e-9


def test_homomorphism_is_a_group_map():
    perms = list(itertools.permutations(range(4)))
    compose = lambda p, q: tuple(p[q[i]] for i in range(4))  # act by q first, then p
    for p in perms:
        for q in perms:
            phi_pq = cross_ratio_homomorphism(compose(p, q))
            phi_p, phi_q = cross_ratio_homomorphism(p), cross_ratio_homomorphism(q)
            assert phi_pq == tuple(phi_p[phi_q[k]] for k in range(3))
    # the Klein four-group is the kernel
    klein = [(0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0)]
    assert [p for p in perms if cross_ratio_homomorphism(p) == (0, 1, 2)] == sorted(klein)
    assert permutation_sign((1, 0, 2, 3)) == -1 and permutation_sign((1, 2, 3, 0)) == -1


def test_equivariance_all_permutations(canon):
    rng = np.random.default_rng(6)
    for q in rng.uniform(0, 2 * PI, size=(100, 4)):
        t = canon.cross_ratio_triple(q)
        for perm in itertools.permutations(range(4)):
            direct = canon.cross_ratio_triple(permute_tuple(q, perm))
            assert permuted_triple(t, perm).allclose(direct, 1e-9)


def test_identity_permutation_leaves_triple():
    t = CrossRatioTriple(0.1, 0.2, -0.3)
    assert permuted_triple(t, (0, 1, 2, 3)) == t


def test_chart_invariance_of_cross_ratios(canon):
    rng = np.random.default_rng(7)
    omegas = [CirclePoint(w) for w in (0.0, 1.0, 2.5, PI, 5.0)]
    for q in rng.uniform(0, 2 * PI, size=(300, 4)):
        base = canon.cross_ratio_triple(q)
        for w in omegas:
            L = lambda i, j: math.log(canon.dist_inverted(w, q[i], q[j]))
            a1 = L(0, 2) + L(1, 3) - L(0, 3) - L(1, 2)
            a2 = L(0, 3) + L(1, 2) - L(0, 1) - L(2, 3)
            assert (a1, a2) == pytest.approx((base.a1, base.a2), abs=1e-9)


def test_perturbed_structures_are_not_canonical():
    q = [0.3, 1.1, 2.9, 4.4]
    base = MoebiusStructure.canonical().cross_ratio_triple(q)
    for m in (MoebiusStructure.sine_perturbed(0.2), MoebiusStructure.power_perturbed(0.5)):
        assert not m.cross_ratio_triple(q).allclose(base, 1e-6)


def test_canonical_ptolemaic_residual_nonnegative(canon):
    rng = np.random.default_rng(8)
    worst = min(canon.ptolemaic_margin(q) for q in rng.uniform(0, 2 * PI, size=(10_000, 4)))
    assert worst >= -1e-9


def test_ptolemaic_residual_collapsed_pairing(canon):
    assert canon.ptolemaic_residual((0.5, 2.0, 0.5, 4.0)) == pytest.approx(0.0, abs=1e-15)


def test_canonical_additivity_in_inverted_chart(canon):
    rng = np.random.default_rng(9)
    for pts in rng.uniform(0, 2 * PI, size=(1000, 4)):
        sigma, x, y, z = sorted(pts)
        d = lambda a, b: canon.dist_inverted(CirclePoint(sigma), a, b)
        assert d(x, y) + d(y, z) == pytest.approx(d(x, z), rel=1e-9)


def test_power_perturbed_breaks_ptolemy():
    m = MoebiusStructure.power_perturbed(0.5)
    rng = np.random.default_rng(10)
    worst = min(m.ptolemaic_margin(q) for q in rng.uniform(0, 2 * PI, size=(2000, 4)))
    assert worst < 0


def test_spec_json_round_trip():
    spec = SemiMetricSpec.from_json('{"kind": "sine-perturbed", "epsilon": 0.1}')
    assert spec.kind == "sine-perturbed" and spec.epsilon == 0.1
    assert SemiMetricSpec.from_json(spec.to_json()) == spec
    tab = SemiMetricSpec.from_json({"kind": "tabulated", "table": {"values": [[1, 1], [1, 1]]}})
    assert MoebiusStructure(tab).dist(0.0, PI) == pytest.approx(2.0)


@pytest.mark.parametrize("doc", [
    {"kind": "bogus"},
    {"kind": "sine", "epsilon": 1.5},
    {"kind": "power", "epsilon": -1.0},
    {"kind": "tabulated"},
    {"kind": "tabulated", "table": [[1, -1], [1, 1]]},
    {"kind": "canonical", "extra": 1},
    {"epsilon": 0.1},
])
def test_spec_validation(doc):
    with pytest.raises(ValueError):
        SemiMetricSpec.from_json(doc)


def test_unit_table_reproduces_canonical():
    m = MoebiusStructure.tabulated(np.ones((5, 5)))
    q = [0.3, 1.1, 2.9, 4.4]
    assert m.cross_ratio_triple(q).allclose(MoebiusStructure.canonical().cross_ratio_triple(q), 1e-12)
