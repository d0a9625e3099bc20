import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paslab.errors import BudgetError
from paslab.typicality import (
    BTypicalSet,
    TypConfig,
    conditional_typical_prob,
    empirical_rate,
    enumerate_b_typical,
    enumerate_typical,
    is_jointly_typical,
    is_typical,
    lemma1_report,
    product_transition,
)

from oracle import (
    b_typical_oracle,
    cond_typical_prob_oracle,
    jointly_typical_oracle,
    seq_rate,
    typical_count_by_composition,
    typical_set_oracle,
)

BSC01 = [[0.9, 0.1], [0.1, 0.9]]


def test_config_validation():
    with pytest.raises(ValueError):
        TypConfig(n=0, eps=0.1)
    with pytest.raises(ValueError):
        TypConfig(n=4, eps=0.0)
    with pytest.raises(ValueError):
        TypConfig(n=4, eps=0.1, budget=0)


def test_empirical_rate_matches_oracle():
    p = (0.2, 0.3, 0.5)
    for seq in [(0,), (2, 2, 2), (0, 1, 2, 1)]:
        assert empirical_rate(seq, p) == pytest.approx(seq_rate(seq, p), abs=1e-12)


def test_empirical_rate_zero_prob_symbol():
    assert empirical_rate((0, 1), (0.0, 1.0)) == float("inf")
    with pytest.raises(ValueError):
        empirical_rate((), (0.5, 0.5))


def test_typical_set_binary_n4():
    # (0.3, 0.7), n=4, eps=0.1: only the single-zero compositions qualify
    ts = enumerate_typical((0.3, 0.7), TypConfig(n=4, eps=0.1))
    assert ts.h == pytest.approx(0.8812908992306927, abs=1e-12)
    assert ts.members == (
        (0, 1, 1, 1),
        (1, 0, 1, 1),
        (1, 1, 0, 1),
        (1, 1, 1, 0),
    )
    assert ts.bounds.typical_prob == pytest.approx(0.4116, abs=1e-12)
    assert ts.bounds.upper_ok and ts.bounds.member_prob_ok
    # typical mass < 1 - eps, so the cardinality lower bound is not claimed
    assert not ts.bounds.lower_applicable


@pytest.mark.parametrize(
    "pmf,n,eps",
    [
        ((0.3, 0.7), 4, 0.1),
        ((0.3, 0.7), 7, 0.25),
        ((0.2, 0.3, 0.5), 4, 0.2),
        ((0.5, 0.25, 0.25), 5, 0.15),
    ],
)
def test_enumerate_typical_matches_oracle(pmf, n, eps):
    members, mass = typical_set_oracle(pmf, n, eps)
    ts = enumerate_typical(pmf, TypConfig(n=n, eps=eps))
    assert ts.members == tuple(members)
    assert ts.bounds.typical_prob == pytest.approx(mass, abs=1e-12)
    count, mass2 = typical_count_by_composition(pmf, n, eps)
    assert ts.count == count
    assert ts.bounds.typical_prob == pytest.approx(mass2, abs=1e-10)


def test_uniform_pmf_everything_typical():
    ts = enumerate_typical((0.25,) * 4, TypConfig(n=3, eps=0.05))
    assert ts.count == 64
    assert ts.bounds.typical_prob == pytest.approx(1.0, abs=1e-12)
    assert ts.bounds.lower_applicable and ts.bounds.lower_ok
    assert ts.bounds.member_prob_ok


def test_is_typical_against_membership():
    cfg = TypConfig(n=5, eps=0.2)
    ts = enumerate_typical((0.3, 0.7), cfg)
    member_set = set(ts.members)
    for idx in range(2**5):
        seq = tuple((idx >> k) & 1 for k in range(5))
        assert is_typical(seq, (0.3, 0.7), cfg) == (seq in member_set)


def test_enumeration_budget_error():
    with pytest.raises(BudgetError):
        enumerate_typical((0.5, 0.5), TypConfig(n=30, eps=0.1))
    # the exception carries the required count
    try:
        enumerate_typical((0.5, 0.5), TypConfig(n=30, eps=0.1))
    except BudgetError as e:
        assert e.needed == 2**30


def test_jointly_typical_matches_oracle():
    # correlated pair, every aligned sequence combination at n=4
    joint = np.array([[0.4, 0.1], [0.1, 0.4]])
    jdict = {(a, b): joint[a, b] for a in range(2) for b in range(2)}
    cfg = TypConfig(n=4, eps=0.35)
    for ia in range(16):
        for ib in range(16):
            sa = tuple((ia >> k) & 1 for k in range(4))
            sb = tuple((ib >> k) & 1 for k in range(4))
            want = jointly_typical_oracle((sa, sb), jdict, (2, 2), 0.35)
            assert is_jointly_typical((sa, sb), joint, cfg) == want


def test_jointly_typical_needs_all_boxes():
    # marginally typical pair that fails the joint box: X = Y has H(XY) = 1,
    # so anti-aligned uniform-looking sequences flunk only the pair test
    joint = np.array([[0.5, 0.0], [0.0, 0.5]])
    cfg = TypConfig(n=4, eps=0.1)
    sa = (0, 1, 0, 1)
    assert is_jointly_typical((sa, sa), joint, cfg)
    sb = (1, 0, 1, 0)
    assert not is_jointly_typical((sa, sb), joint, cfg)


def test_jointly_typical_validates_shapes():
    joint = np.full((2, 2), 0.25)
    cfg = TypConfig(n=3, eps=0.1)
    with pytest.raises(ValueError):
        is_jointly_typical(((0, 1, 0),), joint, cfg)
    with pytest.raises(ValueError):
        is_jointly_typical(((0, 1, 0), (0, 1)), joint, cfg)


def test_conditional_prob_exact_matches_oracle():
    cfg = TypConfig(n=6, eps=0.3)
    p = (0.3, 0.7)
    for u in [(1, 1, 1, 1, 1, 0), (0, 1, 1, 0, 1, 1), (1, 1, 1, 1, 1, 1)]:
        res = conditional_typical_prob(u, p, BSC01, cfg)
        assert res.exact and res.stderr == 0.0
        assert res.prob == pytest.approx(cond_typical_prob_oracle(u, p, BSC01, 0.3), abs=1e-12)


def test_conditional_prob_atypical_input_is_zero():
    # all-zeros is far outside the typical set at this eps
    res = conditional_typical_prob((0,) * 6, (0.3, 0.7), BSC01, TypConfig(n=6, eps=0.1))
    assert res.prob == 0.0 and res.exact


def test_conditional_prob_mc_agrees_with_exact():
    u = (0, 1, 1, 0, 1, 1, 0, 1, 1, 1)
    p = (0.3, 0.7)
    exact = conditional_typical_prob(u, p, BSC01, TypConfig(n=10, eps=0.3))
    mc = conditional_typical_prob(
        u, p, BSC01, TypConfig(n=10, eps=0.3, budget=512, mc_samples=40000, seed=7)
    )
    assert exact.exact and not mc.exact
    assert mc.stderr > 0
    assert abs(mc.prob - exact.prob) <= 4 * mc.stderr + 1e-12


def test_conditional_prob_mc_deterministic():
    u = (0, 1, 1, 0, 1, 1, 0, 1, 1, 1)
    cfg = TypConfig(n=10, eps=0.3, budget=512, mc_samples=5000, seed=11)
    a = conditional_typical_prob(u, (0.3, 0.7), BSC01, cfg)
    b = conditional_typical_prob(u, (0.3, 0.7), BSC01, cfg)
    assert a == b


def test_conditional_prob_validates_transition():
    cfg = TypConfig(n=4, eps=0.2)
    with pytest.raises(ValueError):
        conditional_typical_prob((0, 1, 0, 1), (0.5, 0.5), [[0.7, 0.7], [0.5, 0.5]], cfg)
    with pytest.raises(ValueError):
        conditional_typical_prob((0, 1, 0), (0.5, 0.5), BSC01, cfg)


def test_b_typical_matches_oracle():
    p = (0.4, 0.6)
    t = [[0.6, 0.4], [0.4, 0.6]]
    orc = b_typical_oracle(p, t, 6, 0.25)
    bt = enumerate_b_typical(p, t, TypConfig(n=6, eps=0.25))
    assert bt.members == tuple(u for u, _ in orc)
    assert bt.count == 56
    assert bt.exact
    for (u, pr), cp in zip(orc, bt.cond_probs):
        assert cp == pytest.approx(pr, abs=1e-12)


def test_b_typical_can_be_empty():
    # harsh eps leaves no sequence with conditional mass >= 1 - eps
    bt = enumerate_b_typical((0.3, 0.7), [[0.95, 0.05], [0.05, 0.95]], TypConfig(n=6, eps=0.25))
    assert bt.count == 0
    assert isinstance(bt, BTypicalSet)


def test_b_typical_subset_of_typical():
    bt = enumerate_b_typical((0.4, 0.6), [[0.6, 0.4], [0.4, 0.6]], TypConfig(n=6, eps=0.25))
    base = set(bt.base_set.members)
    assert set(bt.members) <= base


def test_lemma1_report_bounds_hold():
    # n=12 instance where the conditioned set keeps nearly all typical mass
    bt = enumerate_b_typical((0.4, 0.6), [[0.6, 0.4], [0.4, 0.6]], TypConfig(n=12, eps=0.25))
    rep = lemma1_report(bt)
    assert rep["b_count"] == 3796
    assert rep["p1_ok"]
    assert rep["large_n_proxy"]
    assert rep["p2_ok"] and rep["p2_mass"] <= 0.25
    assert rep["p3_upper_ok"] and rep["p3_lower_ok"]
    assert rep["joint_typical_mass"] == pytest.approx(0.9637, abs=2e-4)


def test_lemma1_report_gates_small_n():
    # same channel at n=6 misses the mass proxy; bounds report without claiming
    bt = enumerate_b_typical((0.4, 0.6), [[0.7, 0.3], [0.3, 0.7]], TypConfig(n=6, eps=0.25))
    rep = lemma1_report(bt)
    assert not rep["large_n_proxy"]
    assert 0.0 <= rep["p2_mass"] <= 1.0
    assert rep["b_count"] == bt.count


def test_product_transition_flattens_stages():
    t1 = np.array([[0.9, 0.1], [0.2, 0.8]])
    t2 = np.array([[0.5, 0.5], [0.25, 0.75]])
    t = product_transition(t1, t2)
    assert t.shape == (2, 4)
    # composite index v1 * 2 + v2
    assert t[0, 0] == pytest.approx(0.9 * 0.5)
    assert t[0, 3] == pytest.approx(0.1 * 0.5)
    assert t[1, 1] == pytest.approx(0.2 * 0.75)
    np.testing.assert_allclose(t.sum(axis=1), 1.0)
    with pytest.raises(ValueError):
        product_transition()
    with pytest.raises(ValueError):
        product_transition(t1, np.ones((3, 2)) / 2)


@settings(deadline=None, max_examples=25)
@given(
    p0=st.floats(0.05, 0.95),
    n=st.integers(1, 8),
    eps=st.floats(0.01, 0.5),
)
def test_typical_set_properties(p0, n, eps):
    pmf = (p0, 1.0 - p0)
    ts = enumerate_typical(pmf, TypConfig(n=n, eps=eps))
    assert 0.0 <= ts.bounds.typical_prob <= 1.0 + 1e-12
    assert ts.bounds.upper_ok
    assert ts.bounds.member_prob_ok
    for u in ts.members[:8]:
        assert is_typical(u, pmf, TypConfig(n=n, eps=eps))


@settings(deadline=None, max_examples=15)
@given(
    p0=st.floats(0.1, 0.9),
    cross=st.floats(0.05, 0.45),
    eps=st.floats(0.1, 0.5),
)
def test_b_typical_probs_meet_threshold(p0, cross, eps):
    pmf = (p0, 1.0 - p0)
    t = [[1 - cross, cross], [cross, 1 - cross]]
    bt = enumerate_b_typical(pmf, t, TypConfig(n=5, eps=eps))
    for cp in bt.cond_probs:
        assert cp >= 1 - eps - 1e-9
