"""Weak typicality at desk scale: exhaustive sets, joint tests, and the
conditioned subset whose members stay jointly typical with high probability.

Sequences are tuples of alphabet indices. Membership uses the empirical
log-probability rate against entropy with a 1e-12 slack so boundary
compositions do not flap with float noise. Cardinality/probability bounds
that only hold for large n are reported with an applicability flag instead
of being asserted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import BudgetError
from .infomeasures import check_pmf, entropy

LOG_SLACK = 1e-12
DEFAULT_BUDGET = 10_000_000
DEFAULT_MC_SAMPLES = 100_000
CHUNK = 1 << 16


@dataclass(frozen=True)
class TypConfig:
    """Block length, tolerance and enumeration limits."""

    n: int
    eps: float
    budget: int = DEFAULT_BUDGET
    mc_samples: int = DEFAULT_MC_SAMPLES
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"block length must be >= 1, got {self.n}")
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.budget < 1 or self.mc_samples < 1:
            raise ValueError("budget and mc_samples must be positive")


def _log2_safe(p: np.ndarray) -> np.ndarray:
    return np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), -np.inf)


def empirical_rate(seq, pmf) -> float:
    """-(1/n) log2 p(seq) under an iid pmf; inf when a symbol has probability 0."""
    p = np.asarray(pmf, dtype=float)
    idx = np.asarray(seq, dtype=np.intp)
    if idx.size == 0:
        raise ValueError("sequence must be non-empty")
    vals = p[idx]
    if np.any(vals == 0.0):
        return float("inf")
    return float(-np.log2(vals).sum() / idx.size)


def is_typical(seq, pmf, config: TypConfig) -> bool:
    """Weak typicality: |empirical rate - H| <= eps (+ boundary slack)."""
    h = entropy(pmf)
    rate = empirical_rate(seq, pmf)
    return bool(abs(rate - h) <= config.eps + LOG_SLACK)


def _digit_block(start: int, stop: int, k: int, n: int) -> np.ndarray:
    """Rows start..stop of the lexicographic (base-k, MSB-first) sequence grid."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, n), dtype=np.int64)
    for pos in range(n - 1, -1, -1):
        out[:, pos] = idx % k
        idx //= k
    return out


class SetBounds(NamedTuple):
    """Certified checks for one enumerated typical set."""

    upper_ok: bool  # |A| <= 2^{n(H+eps)}
    lower_ok: bool  # |A| >= (1-eps) 2^{n(H-eps)}
    lower_applicable: bool  # total typical mass >= 1-eps ("n large enough" proxy)
    member_prob_ok: bool  # every member within [2^{-n(H+eps)}, 2^{-n(H-eps)}]
    typical_prob: float


@dataclass(frozen=True)
class TypicalSet:
    pmf: np.ndarray
    config: TypConfig
    h: float
    members: tuple = field(repr=False)
    bounds: SetBounds = None

    @property
    def count(self) -> int:
        return len(self.members)


def _scan_typical(pmf: np.ndarray, config: TypConfig):
    """Yield (digit_block, rate_vector, prob_vector) over the full grid."""
    k = pmf.size
    total = k**config.n
    if total > config.budget:
        raise BudgetError(
            f"enumeration needs {total} sequences, budget is {config.budget}",
            needed=total,
        )
    log2p = _log2_safe(pmf)
    for start in range(0, total, CHUNK):
        block = _digit_block(start, min(start + CHUNK, total), k, config.n)
        with np.errstate(invalid="ignore"):
            lp = log2p[block].sum(axis=1)
        yield block, -lp / config.n, np.exp2(lp)


def enumerate_typical(pmf, config: TypConfig) -> TypicalSet:
    """Exhaustively list the typical set in lexicographic order, with bounds."""
    p = check_pmf(pmf)
    h = entropy(p)
    members = []
    typical_prob = 0.0
    prob_lo = 2.0 ** (-config.n * (h + config.eps)) * (1 - LOG_SLACK)
    prob_hi = 2.0 ** (-config.n * (h - config.eps)) * (1 + LOG_SLACK)
    member_prob_ok = True
    for block, rate, prob in _scan_typical(p, config):
        keep = np.abs(rate - h) <= config.eps + LOG_SLACK
        if keep.any():
            members.extend(tuple(map(int, row)) for row in block[keep])
            typical_prob += float(prob[keep].sum())
            kp = prob[keep]
            member_prob_ok &= bool(np.all(kp >= prob_lo) and np.all(kp <= prob_hi))
    count = len(members)
    bounds = SetBounds(
        upper_ok=count <= 2.0 ** (config.n * (h + config.eps)) * (1 + LOG_SLACK),
        lower_ok=count >= (1 - config.eps) * 2.0 ** (config.n * (h - config.eps)) * (1 - LOG_SLACK),
        lower_applicable=typical_prob >= 1 - config.eps,
        member_prob_ok=member_prob_ok,
        typical_prob=typical_prob,
    )
    return TypicalSet(pmf=p, config=config, h=h, members=tuple(members), bounds=bounds)


def _subset_stats(seqs: dict, joint: np.ndarray) -> list:
    """(empirical rate, entropy) for every nonempty margin of a joint pmf.

    seqs maps axis -> index sequence; margins marginalize the other axes.
    """
    ndim = joint.ndim
    n = len(next(iter(seqs.values())))
    out = []
    for mask in range(1, 2**ndim):
        axes = [d for d in range(ndim) if mask & (1 << d)]
        drop = tuple(d for d in range(ndim) if d not in axes)
        marg = joint.sum(axis=drop) if drop else joint
        h = entropy(marg)
        idx = tuple(np.asarray(seqs[d], dtype=np.intp) for d in axes)
        vals = marg[idx]
        if np.any(vals == 0.0):
            rate = float("inf")
        else:
            rate = float(-np.log2(vals).sum() / n)
        out.append((rate, h))
    return out


def is_jointly_typical(seqs, joint_pmf, config: TypConfig) -> bool:
    """Joint typicality of k aligned sequences: every nonempty subset of
    coordinates must satisfy its own rate/entropy box."""
    joint = check_pmf(joint_pmf)
    seq_list = [np.asarray(s, dtype=np.intp) for s in seqs]
    if len(seq_list) != joint.ndim:
        raise ValueError(f"need {joint.ndim} sequences for this joint pmf")
    lens = {s.size for s in seq_list}
    if len(lens) != 1 or lens.pop() != config.n:
        raise ValueError("all sequences must have length config.n")
    stats = _subset_stats(dict(enumerate(seq_list)), joint)
    return all(abs(rate - h) <= config.eps + LOG_SLACK for rate, h in stats)


class CondProbResult(NamedTuple):
    prob: float
    stderr: float
    exact: bool


def conditional_typical_prob(
    u_seq, input_pmf, transition, config: TypConfig
) -> CondProbResult:
    """Pr{(u, V) jointly typical | U = u} with V drawn per-symbol from the
    transition rows.

    Exact summation over the |V|^n grid inside the budget, otherwise a seeded
    Monte Carlo estimate (the sample seed derives from config.seed and the
    sequence itself, so the answer is a pure function of the inputs).
    """
    p_u = check_pmf(input_pmf)
    t = np.asarray(transition, dtype=float)
    if t.ndim != 2 or t.shape[0] != p_u.size:
        raise ValueError("transition must be |U| x |V| row-stochastic")
    if np.any(np.abs(t.sum(axis=1) - 1.0) > 1e-9):
        raise ValueError("transition rows must sum to 1")
    u = np.asarray(u_seq, dtype=np.intp)
    if u.size != config.n:
        raise ValueError("u_seq must have length config.n")
    n, kv = config.n, t.shape[1]
    joint = p_u[:, None] * t
    p_v = joint.sum(axis=0)
    h_u, h_v, h_uv = entropy(p_u), entropy(p_v), entropy(joint)
    eps = config.eps + LOG_SLACK

    rate_u = empirical_rate(u, p_u)
    if abs(rate_u - h_u) > eps:
        return CondProbResult(prob=0.0, stderr=0.0, exact=True)

    lut_v = _log2_safe(p_v)  # per V symbol
    lut_uv = _log2_safe(joint)[u]  # (n, kv): row i scores position i

    if kv**n <= config.budget:
        total = 0.0
        log2_t = _log2_safe(t)[u]  # (n, kv) channel weights per position
        for start in range(0, kv**n, CHUNK):
            block = _digit_block(start, min(start + CHUNK, kv**n), kv, n)
            rows = np.arange(n)
            rv = -lut_v[block].sum(axis=1) / n
            ruv = -lut_uv[rows, block].sum(axis=1) / n
            ok = (np.abs(rv - h_v) <= eps) & (np.abs(ruv - h_uv) <= eps)
            if ok.any():
                lw = log2_t[rows, block[ok]].sum(axis=1)
                total += float(np.exp2(lw).sum())
        return CondProbResult(prob=min(total, 1.0), stderr=0.0, exact=True)

    rng = np.random.default_rng(np.random.SeedSequence([config.seed, *map(int, u)]))
    cdf = np.cumsum(t[u], axis=1)  # (n, kv)
    hits = 0
    remaining = config.mc_samples
    rows = np.arange(n)
    while remaining > 0:
        batch = min(remaining, CHUNK)
        draws = rng.random((batch, n))
        v = np.empty((batch, n), dtype=np.intp)
        for i in range(n):
            v[:, i] = np.searchsorted(cdf[i], draws[:, i], side="right")
        np.minimum(v, kv - 1, out=v)  # guard against cdf tails just under 1.0
        rv = -lut_v[v].sum(axis=1) / n
        ruv = -lut_uv[rows, v].sum(axis=1) / n
        hits += int(((np.abs(rv - h_v) <= eps) & (np.abs(ruv - h_uv) <= eps)).sum())
        remaining -= batch
    p_hat = hits / config.mc_samples
    stderr = float(np.sqrt(p_hat * (1 - p_hat) / config.mc_samples))
    return CondProbResult(prob=p_hat, stderr=stderr, exact=False)


@dataclass(frozen=True)
class BTypicalSet:
    """Typical input sequences that stay jointly typical with probability
    at least 1 - eps under the transition."""

    input_pmf: np.ndarray
    transition: np.ndarray
    config: TypConfig
    h_u: float
    members: tuple = field(repr=False)
    cond_probs: tuple = field(repr=False)
    exact: bool = True
    base_set: TypicalSet = field(default=None, repr=False)

    @property
    def count(self) -> int:
        return len(self.members)


def enumerate_b_typical(input_pmf, transition, config: TypConfig) -> BTypicalSet:
    """Filter the typical set of U by the conditional joint-typicality test."""
    p_u = check_pmf(input_pmf)
    base = enumerate_typical(p_u, config)
    members, probs = [], []
    exact = True
    threshold = 1.0 - config.eps - LOG_SLACK
    for u in base.members:
        res = conditional_typical_prob(u, p_u, transition, config)
        exact &= res.exact
        if res.prob >= threshold:
            members.append(u)
            probs.append(res.prob)
    return BTypicalSet(
        input_pmf=p_u,
        transition=np.asarray(transition, dtype=float),
        config=config,
        h_u=base.h,
        members=tuple(members),
        cond_probs=tuple(probs),
        exact=exact,
        base_set=base,
    )


def lemma1_report(b_set: BTypicalSet) -> dict:
    """Measured member-probability bounds, complement mass and cardinality
    bounds for a conditioned typical set.

    The complement-mass <= eps claim and the cardinality lower bound only hold
    for n large enough; `large_n_proxy` (joint typical mass >= 1 - eps^2, the
    quantity the proofs actually need) gates those two checks.
    """
    cfg = b_set.config
    n, eps, h = cfg.n, cfg.eps, b_set.h_u
    p_u = b_set.input_pmf
    lo = 2.0 ** (-n * (h + eps)) * (1 - LOG_SLACK)
    hi = 2.0 ** (-n * (h - eps)) * (1 + LOG_SLACK)
    member_probs = np.array(
        [2.0 ** (-n * empirical_rate(u, p_u)) for u in b_set.members]
    )
    p1_ok = bool(np.all(member_probs >= lo) and np.all(member_probs <= hi))
    b_mass = float(member_probs.sum())
    p2_mass = 1.0 - b_mass

    base = b_set.base_set or enumerate_typical(p_u, cfg)
    typ_probs = {u: 2.0 ** (-n * empirical_rate(u, p_u)) for u in base.members}
    cond = dict(zip(b_set.members, b_set.cond_probs))
    joint_mass = 0.0
    for u, pu in typ_probs.items():
        cp = cond.get(u)
        if cp is None:
            cp = conditional_typical_prob(u, p_u, b_set.transition, cfg).prob
        joint_mass += pu * cp
    proxy = joint_mass >= 1.0 - eps**2

    count = b_set.count
    upper_ok = count <= 2.0 ** (n * (h + eps)) * (1 + LOG_SLACK)
    lower_ok = count >= (1 - eps) * 2.0 ** (n * (h - eps)) * (1 - LOG_SLACK)
    return {
        "p1_ok": p1_ok,
        "p2_mass": p2_mass,
        "p2_ok": bool(p2_mass <= eps + LOG_SLACK),
        "p3_upper_ok": bool(upper_ok),
        "p3_lower_ok": bool(lower_ok),
        "large_n_proxy": bool(proxy),
        "joint_typical_mass": float(joint_mass),
        "b_mass": b_mass,
        "b_count": count,
    }


def product_transition(*stages) -> np.ndarray:
    """Flatten independent stage transitions p(v1|u), p(v2|u), ... into one
    p((v1, v2, ...)|u) with row-major composite indices."""
    if not stages:
        raise ValueError("need at least one stage")
    mats = [np.asarray(s, dtype=float) for s in stages]
    rows = mats[0].shape[0]
    if any(m.shape[0] != rows for m in mats):
        raise ValueError("all stages must share the input alphabet")
    out = mats[0]
    for m in mats[1:]:
        out = (out[:, :, None] * m[:, None, :]).reshape(rows, -1)
    return out
