import math

import numpy as np
import pytest

from paslab.alphabets import brgc_label, make_ask
from paslab.airsolver import (
    AirPoint,
    air_sweep,
    find_basic_point,
    fold_pmf,
    gamma_split,
    mb_family,
    mirror_pmf,
    optimize_capacity,
    shaping_gap,
    theorem_feasibility,
    uniform_rate,
)
from paslab.channel import AwgnSpec, gaussian_dmc
from paslab.errors import ConvergenceError
from paslab.infomeasures import entropy, mutual_information

from oracle import capacity_grid_oracle, mb_weights_oracle

# coarse quantizer keeps these tests quick; accuracy tests live in acceptance
FAST = AwgnSpec(snr_db=0.0, num_bins=300)


def test_mb_family_matches_oracle():
    cst = make_ask(2)
    got = mb_family(cst, 0.05)
    want = mb_weights_oracle(cst.amplitudes, 0.05)
    assert np.allclose(got, want, atol=1e-14)
    assert got.sum() == pytest.approx(1.0, abs=1e-12)
    # lam = 0 recovers uniform, large lam concentrates on the inner point
    assert np.allclose(mb_family(cst, 0.0), 0.25)
    assert mb_family(cst, 50.0)[0] == pytest.approx(1.0, abs=1e-12)


def test_mirror_fold_roundtrip():
    p_a = np.array([0.6, 0.3, 0.08, 0.02])
    p_x = mirror_pmf(p_a)
    assert p_x.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(p_x, p_x[::-1])
    assert np.allclose(fold_pmf(p_x), p_a)


def test_optimize_capacity_dominates_grid_oracle():
    cst = make_ask(1)
    for snr in (2.0, 7.0):
        spec = AwgnSpec(snr_db=snr, num_bins=FAST.num_bins)
        pt = optimize_capacity(cst, snr, spec)

        def rows(pts):
            return gaussian_dmc(pts, 1.0, FAST.num_bins, FAST.clip_sigmas).w.tolist()

        lower = capacity_grid_oracle(
            cst.amplitudes,
            snr,
            rows,
            p1_grid=np.linspace(0.25, 0.5, 26),
            delta_grid=np.linspace(0.2, 2.2, 41),
        )
        assert pt.capacity >= lower - 1e-3
        assert 0.0 <= pt.h_a <= 1.0 + 1e-12
        assert np.allclose(np.sum(pt.p_a_star), 1.0)


def test_optimize_capacity_mb_is_not_better():
    # the solver's optimum should not lose to any Maxwell-Boltzmann profile
    cst = make_ask(1)
    snr = 5.0
    spec = AwgnSpec(snr_db=snr, num_bins=FAST.num_bins)
    pt = optimize_capacity(cst, snr, spec)
    power = 10 ** (snr / 10)
    pts = np.asarray(cst.points, dtype=float)
    best = -1.0
    for lam in np.linspace(0.0, 1.5, 31):
        p_a = mb_family(cst, lam)
        p_x = mirror_pmf(p_a)
        for d in np.linspace(0.3, 1.8, 31):
            if p_x @ (d * pts) ** 2 > power * (1 + 1e-9):
                continue
            w = gaussian_dmc(d * pts, 1.0, FAST.num_bins, FAST.clip_sigmas)
            best = max(best, mutual_information(p_x, w))
    assert pt.capacity >= best - 1e-3


def test_capacity_monotone_in_snr():
    cst = make_ask(1)
    caps = [optimize_capacity(cst, s, AwgnSpec(s, FAST.num_bins)).capacity for s in (-2, 1, 4, 8)]
    assert all(b > a for a, b in zip(caps, caps[1:]))


def test_uniform_rate_below_capacity():
    cst = make_ask(1)
    for snr in (0.0, 3.0, 6.0):
        spec = AwgnSpec(snr, FAST.num_bins)
        assert uniform_rate(cst, snr, spec) <= optimize_capacity(cst, snr, spec).capacity + 1e-6


def test_airpoint_split_consistency():
    cst = make_ask(1)
    pt = optimize_capacity(cst, 6.0, AwgnSpec(6.0, FAST.num_bins))
    assert pt.h_a == pytest.approx(entropy(pt.p_a_star), abs=1e-12)
    assert 0.0 <= pt.gamma < 1.0
    # 6 dB sits above the basic point, so the split is exact
    assert pt.capacity == pytest.approx(pt.h_a + pt.gamma, abs=1e-9)
    assert pt.r_bmd_star <= pt.capacity + 1e-9


def test_m0_special_case():
    # 2-ASK has a single amplitude: H(A) = 0, capacity all from the sign
    cst = make_ask(0)
    pt = optimize_capacity(cst, 3.0, AwgnSpec(3.0, FAST.num_bins))
    assert pt.h_a == 0.0
    assert pt.p_a_star == (1.0,)
    assert 0.0 < pt.capacity < 1.0


def test_find_basic_point_coarse():
    cst = make_ask(1)
    snr, rate = find_basic_point(cst, AwgnSpec(0.0, FAST.num_bins))
    # known location near 0.72 dB / 0.562 bit; loose tolerance at 300 bins
    assert abs(snr - 0.72) < 0.2
    assert abs(rate - 0.562) < 0.02


def test_find_basic_point_no_crossing():
    with pytest.raises(ValueError):
        find_basic_point(make_ask(0), AwgnSpec(0.0, FAST.num_bins))


def test_gamma_split_sums_to_capacity():
    cst = make_ask(1)
    spec = AwgnSpec(8.0, FAST.num_bins)
    h_a, gamma = gamma_split(cst, 8.0, spec)
    pt = optimize_capacity(cst, 8.0, spec)
    assert h_a + gamma == pytest.approx(pt.capacity, abs=1e-12)
    with pytest.raises(ValueError):
        gamma_split(cst, -3.0, AwgnSpec(-3.0, FAST.num_bins))


def test_shaping_gap_positive_and_bounded():
    cst = make_ask(1)
    gap = shaping_gap(cst, 1.2, AwgnSpec(0.0, FAST.num_bins))
    assert 0.0 < gap < 1.0
    with pytest.raises(ValueError):
        shaping_gap(cst, 2.5, AwgnSpec(0.0, FAST.num_bins))


def test_theorem_feasibility_fields():
    cst = make_ask(1)
    d = gaussian_dmc(cst.points, sigma=0.6, num_bins=40)
    label = brgc_label(cst)
    out = theorem_feasibility(np.array([0.6, 0.4]), 0.3, d, label)
    assert set(out) >= {
        "h_a",
        "gamma",
        "rate",
        "mi_xy",
        "r_bmd",
        "smd_ok",
        "bmd_ok",
        "smd_slack",
        "bmd_slack",
    }
    assert out["rate"] == pytest.approx(out["h_a"] + 0.3, abs=1e-12)
    assert out["smd_ok"] == (out["smd_slack"] >= 0)
    with pytest.raises(ValueError):
        theorem_feasibility(np.array([0.6, 0.4]), 1.0, d, label)


def test_air_sweep_reports_failures_inline():
    cst = make_ask(1)
    out = list(air_sweep(cst, [3.0, float("nan")], AwgnSpec(3.0, FAST.num_bins)))
    assert isinstance(out[0][1], AirPoint)
    assert isinstance(out[1][1], Exception)


def test_air_sweep_deterministic():
    cst = make_ask(1)
    spec = AwgnSpec(0.0, FAST.num_bins)
    a = [(s, p.capacity) for s, p in air_sweep(cst, [1.0, 2.0], spec)]
    b = [(s, p.capacity) for s, p in air_sweep(cst, [1.0, 2.0], spec)]
    assert a == b
