"""Entropies, mutual information, and mismatched-decoding rates on finite tables.

All logs are base 2, 0*log(0) terms are dropped, and expectations skip
zero-probability (x, y) cells. Channel arguments accept either a Dmc or a
bare row-stochastic matrix.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .alphabets import AskConstellation, LabelMap
from .channel import Dmc, bit_channel
from .optim import golden_max

PMF_TOL = 1e-12
S_RANGE = (0.0, 16.0)
S_XTOL = 1e-6


def as_channel_matrix(chan) -> np.ndarray:
    w = chan.w if isinstance(chan, Dmc) else np.asarray(chan, dtype=float)
    if w.ndim != 2:
        raise ValueError("channel must be a 2-D row-stochastic matrix")
    return w


def check_pmf(p, tol: float = PMF_TOL) -> np.ndarray:
    """Validate and return a probability vector (any shape, summed over all cells)."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr < 0):
        raise ValueError("pmf entries must be non-negative")
    if abs(arr.sum() - 1.0) > tol:
        raise ValueError(f"pmf sums to {arr.sum()!r}, not 1")
    return arr


def entropy(p) -> float:
    """Shannon entropy in bits of a pmf of any shape."""
    arr = check_pmf(p)
    nz = arr[arr > 0]
    return float(-(nz * np.log2(nz)).sum())


def _entropy_raw(p: np.ndarray) -> float:
    # same sum without re-validating; internal use on derived tables
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def joint_from_input(input_pmf, chan) -> np.ndarray:
    """p(x, y) = p(x) w(y|x) as an (nin, nout) table."""
    w = as_channel_matrix(chan)
    p = check_pmf(input_pmf)
    if p.shape != (w.shape[0],):
        raise ValueError("input pmf length must match channel input count")
    return p[:, None] * w


def mutual_information(input_pmf, chan) -> float:
    """I(X;Y) in bits per channel use."""
    j = joint_from_input(input_pmf, chan)
    px = j.sum(axis=1)
    py = j.sum(axis=0)
    return _entropy_raw(px) + _entropy_raw(py) - _entropy_raw(j)


def equivocation(input_pmf, chan) -> float:
    """H(X|Y) in bits."""
    j = joint_from_input(input_pmf, chan)
    return _entropy_raw(j) - _entropy_raw(j.sum(axis=0))


def conditional_level_entropy(input_pmf, chan, label_map: LabelMap, level: int) -> float:
    """H(C_level | Y) for one label level (0 = sign bit, 1..m = amplitude bits)."""
    w = as_channel_matrix(chan)
    dmc = chan if isinstance(chan, Dmc) else Dmc(w=w)
    prior, trans = bit_channel(dmc, label_map, check_pmf(input_pmf), level)
    j = prior[:, None] * trans
    return _entropy_raw(j) - _entropy_raw(j.sum(axis=0))


def bmd_rate_unclipped(input_pmf, chan, label_map: LabelMap) -> float:
    """H(C) - sum_i H(C_i|Y); may be negative for bad channels."""
    p = check_pmf(input_pmf)
    levels = label_map.m + 1
    h_c = _entropy_raw(p)  # labels are a bijection onto inputs
    cond = sum(conditional_level_entropy(p, chan, label_map, i) for i in range(levels))
    return h_c - cond


def r_bmd(input_pmf, chan, label_map: LabelMap) -> float:
    """Binary-level decoding rate, clipped at zero."""
    return max(0.0, bmd_rate_unclipped(input_pmf, chan, label_map))


def product_bit_metric(input_pmf, chan, label_map: LabelMap) -> np.ndarray:
    """Symbol metric q(x,y) = prod_i p(y | c_i(x)) built from the bit subchannels."""
    w = as_channel_matrix(chan)
    dmc = chan if isinstance(chan, Dmc) else Dmc(w=w)
    p = check_pmf(input_pmf)
    bits = label_map.bit_matrix
    q = np.ones_like(w)
    for level in range(bits.shape[1]):
        _, trans = bit_channel(dmc, label_map, p, level)
        q *= trans[bits[:, level]]
    return q


def bmd_cost(input_pmf, label_map: LabelMap) -> np.ndarray:
    """Decoding cost r(x) = prod_i p(c_i(x)) / p(x); needs full input support."""
    p = check_pmf(input_pmf)
    if np.any(p == 0):
        raise ValueError("bmd_cost needs a full-support input pmf")
    bits = label_map.bit_matrix
    r = np.ones_like(p)
    for level in range(bits.shape[1]):
        col = bits[:, level]
        prior = np.array([p[col == 0].sum(), p[col == 1].sum()])
        r *= prior[col]
    return r / p


def _check_metric(joint: np.ndarray, metric: np.ndarray):
    if metric.shape != joint.shape:
        raise ValueError("metric must have the channel's (nin, nout) shape")
    if np.any(metric < 0):
        raise ValueError("metric values must be non-negative")
    if np.any((joint > 0) & (metric == 0)):
        raise ValueError("metric is zero on a point with positive probability")


def _generalized_rate(joint, metric, s, cost=None) -> float:
    """E[log2(q^s r / sum_x' p(x') q^s r)] over the support of p(x,y)."""
    px = joint.sum(axis=1)
    log2_q = np.where(metric > 0, np.log2(np.where(metric > 0, metric, 1.0)), -np.inf)
    num = s * log2_q
    if cost is not None:
        log2_r = np.where(cost > 0, np.log2(np.where(cost > 0, cost, 1.0)), -np.inf)
        num = num + log2_r[:, None]
    qs = metric**s if s != 0 else np.ones_like(metric)
    weights = px if cost is None else px * cost
    den = weights @ qs  # per-output normalizer
    mask = joint > 0
    with np.errstate(divide="ignore"):
        log2_den = np.log2(den)
    vals = (num - log2_den[None, :])[mask]
    return float((joint[mask] * vals).sum())


class GmiResult(NamedTuple):
    value: float
    s_star: float


def gmi(input_pmf, chan, metric) -> GmiResult:
    """Generalized mutual information, maximized over the metric exponent s.

    Golden-section search on s in [0, 16] after a coarse bracket scan; s = 1 is
    probed explicitly and wins ties. The value is clipped below at zero.
    """
    joint = joint_from_input(input_pmf, chan)
    q = np.asarray(metric, dtype=float)
    _check_metric(joint, q)

    def f(s):
        return _generalized_rate(joint, q, s)

    grid = np.linspace(S_RANGE[0], S_RANGE[1], 33)
    vals = [f(s) for s in grid]
    k = int(np.argmax(vals))
    lo = grid[max(0, k - 1)]
    hi = grid[min(len(grid) - 1, k + 1)]
    s_g, v_g = golden_max(f, lo, hi, S_XTOL)
    v_one = f(1.0)
    if v_one >= v_g:
        s_star, value = 1.0, v_one
    else:
        s_star, value = s_g, v_g
    return GmiResult(value=max(0.0, value), s_star=float(s_star))


def lm_rate(input_pmf, chan, metric, s: float, cost) -> float:
    """Mismatched-decoding rate with metric exponent s and input cost r(x)."""
    joint = joint_from_input(input_pmf, chan)
    q = np.asarray(metric, dtype=float)
    _check_metric(joint, q)
    r = np.asarray(cost, dtype=float)
    if r.shape != (joint.shape[0],):
        raise ValueError("cost must have one value per channel input")
    if np.any(r < 0) or np.any((joint.sum(axis=1) > 0) & (r == 0)):
        raise ValueError("cost must be positive on the input support")
    return _generalized_rate(joint, q, s, cost=r)


def sign_amplitude_joint(p_sa, chan, constellation: AskConstellation) -> np.ndarray:
    """Arrange p(s, a, y) as a (2, 2^m, nout) tensor from a sign x amplitude pmf.

    Row 0 of p_sa is the -1 sign, row 1 the +1 sign, columns follow ascending
    amplitudes.
    """
    w = as_channel_matrix(chan)
    p = check_pmf(p_sa)
    na = constellation.num_amplitudes
    if p.shape != (2, na):
        raise ValueError(f"p_sa must be 2 x {na} for this constellation")
    if w.shape[0] != constellation.size:
        raise ValueError("channel input count must match the constellation size")
    t = np.zeros((2, na, w.shape[1]))
    for si, s in enumerate((-1, 1)):
        for ai, a in enumerate(constellation.amplitudes):
            xi = constellation.point_index(s * a)
            t[si, ai] = p[si, ai] * w[xi]
    return t


def mi_inequality_chain(p_sa, chan, constellation: AskConstellation) -> dict:
    """Decompose I(X;Y) across the sign/amplitude split and check the chain
    I(X;Y) - H(A) <= I(S;Y|A) <= I(S;AY)."""
    t = sign_amplitude_joint(p_sa, chan, constellation)
    h_say = _entropy_raw(t)
    h_sa = _entropy_raw(t.sum(axis=2))
    h_ay = _entropy_raw(t.sum(axis=0))
    h_a = _entropy_raw(t.sum(axis=(0, 2)))
    h_s = _entropy_raw(t.sum(axis=(1, 2)))
    h_y = _entropy_raw(t.sum(axis=(0, 1)))
    mi_xy = h_sa + h_y - h_say
    out = {
        "mi_xy": mi_xy,
        "h_a": h_a,
        "h_s": h_s,
        "h_x_given_y": h_say - h_y,
        "i_a_y": h_a + h_y - h_ay,
        "i_s_y_given_a": (h_sa - h_a) - (h_say - h_ay),
        "i_s_ay": h_s + h_ay - h_say,
    }
    tol = 1e-9
    out["chain_ok"] = (
        mi_xy - h_a <= out["i_s_y_given_a"] + tol
        and out["i_s_y_given_a"] <= out["i_s_ay"] + tol
    )
    return out
