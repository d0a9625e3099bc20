"""Random sign-coding experiment: shaped amplitudes carry the message, signs
carry redundancy (plus an optional gamma * n information-sign budget), and
decoding is a joint-typicality search.

Seed discipline: the codebook draws from SeedSequence([seed, 0]), trial t from
SeedSequence([seed, 1, t]); results are therefore independent of how trials
are scheduled across threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .alphabets import AskConstellation, LabelMap, brgc_label
from .channel import Dmc
from .errors import BudgetError, ConfigError
from .infomeasures import check_pmf
from .typicality import (
    LOG_SLACK,
    BTypicalSet,
    TypConfig,
    enumerate_b_typical,
)

DECODE_BUDGET = 1_000_000


def _log2_safe(p: np.ndarray) -> np.ndarray:
    return np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), -np.inf)


def _entropy(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


@dataclass(frozen=True)
class ShapingLayer:
    """One-to-one message map onto the conditioned typical amplitude set.

    amplitude_seqs[m_a] is an amplitude-index sequence; for the bit-level
    variant bit_seqs holds the same members as flattened bit-tuple sequences.
    """

    kind: str  # "smd" | "bmd"
    constellation: AskConstellation
    label_map: LabelMap
    amplitude_pmf: np.ndarray
    n: int
    eps: float
    amplitude_seqs: tuple = field(repr=False)
    bit_seqs: tuple = field(default=None, repr=False)
    b_set: BTypicalSet = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.amplitude_seqs)

    @property
    def exact(self) -> bool:
        return self.b_set.exact


def sign_output_transition(constellation: AskConstellation, dmc: Dmc, p_a=None) -> np.ndarray:
    """p((s, y) | a) with uniform signs, flattened as v = s_bit * nout + y."""
    na = constellation.num_amplitudes
    if dmc.nin != constellation.size:
        raise ValueError("channel inputs must match the constellation points")
    t = np.zeros((na, 2 * dmc.nout))
    for ai, a in enumerate(constellation.amplitudes):
        for sbit, s in ((0, -1), (1, 1)):
            xi = constellation.point_index(s * a)
            t[ai, sbit * dmc.nout : (sbit + 1) * dmc.nout] = 0.5 * dmc.w[xi]
    return t


def build_shaping_layer(
    constellation: AskConstellation,
    dmc: Dmc,
    amplitude_pmf,
    n: int,
    eps: float,
    kind: str = "smd",
    budget: int = None,
    mc_samples: int = None,
    seed: int = 0,
) -> ShapingLayer:
    """Enumerate the conditioned typical set of shaped amplitudes.

    The bit-level variant is the same member set seen through the label
    bijection, so both kinds share one enumeration.
    """
    if kind not in ("smd", "bmd"):
        raise ValueError(f"kind must be 'smd' or 'bmd', got {kind}")
    p_a = check_pmf(amplitude_pmf)
    if p_a.shape != (constellation.num_amplitudes,):
        raise ValueError("amplitude_pmf must cover the amplitude alphabet")
    kwargs = {}
    if budget is not None:
        kwargs["budget"] = budget
    if mc_samples is not None:
        kwargs["mc_samples"] = mc_samples
    cfg = TypConfig(n=n, eps=eps, seed=seed, **kwargs)
    trans = sign_output_transition(constellation, dmc)
    b_set = enumerate_b_typical(p_a, trans, cfg)
    if b_set.count == 0:
        raise ConfigError(
            f"no amplitude sequence survives the conditioned typicality test "
            f"(n={n}, eps={eps}); widen eps or change n"
        )
    label = brgc_label(constellation)
    bit_seqs = None
    if kind == "bmd":
        amp_bits = label.amplitude_bit_matrix  # (2^m, m)
        weights = 1 << np.arange(constellation.m - 1, -1, -1) if constellation.m else np.array([], dtype=int)
        flat = amp_bits @ weights if constellation.m else np.zeros(1, dtype=int)
        bit_seqs = tuple(tuple(int(flat[a]) for a in seq) for seq in b_set.members)
    return ShapingLayer(
        kind=kind,
        constellation=constellation,
        label_map=label,
        amplitude_pmf=p_a,
        n=n,
        eps=eps,
        amplitude_seqs=b_set.members,
        bit_seqs=bit_seqs,
        b_set=b_set,
    )


@dataclass(frozen=True)
class SignCodebook:
    """Sign sequences per message pair: n1 enumerated information signs
    followed by n2 drawn redundant signs (sign bit 0 <-> -1, 1 <-> +1)."""

    n: int
    n1: int
    mode: str  # "iid" | "linear"
    seed: int
    info_bits: np.ndarray  # (M_s, n1)
    redundant_bits: np.ndarray  # (M_a, M_s, n2)
    generator: np.ndarray = None  # linear mode only

    @property
    def n2(self) -> int:
        return self.n - self.n1

    @property
    def num_sign_messages(self) -> int:
        return self.info_bits.shape[0]

    def sign_bits(self, m_a: int, m_s: int) -> np.ndarray:
        return np.concatenate([self.info_bits[m_s], self.redundant_bits[m_a, m_s]])

    def sign_sequence(self, m_a: int, m_s: int) -> np.ndarray:
        return 2 * self.sign_bits(m_a, m_s).astype(int) - 1


def _bit_rows(count: int, width: int) -> np.ndarray:
    """Rows 0..count-1 as width-bit vectors, MSB first."""
    idx = np.arange(count, dtype=np.int64)
    return ((idx[:, None] >> np.arange(width - 1, -1, -1)) & 1).astype(np.int8) if width else np.zeros(
        (count, 0), dtype=np.int8
    )


def draw_sign_codebook(
    m_a_count: int,
    n1: int,
    n2: int,
    mode: str = "iid",
    seed: int = 0,
    amplitude_bits=None,
) -> SignCodebook:
    """Draw the random sign layer for all (m_a, m_s) message pairs.

    iid mode draws each redundant sign fair-coin; linear mode applies a fixed
    random GF(2) map to (amplitude bits ++ information-sign bits), which needs
    the per-message amplitude-bit strings.
    """
    if mode not in ("iid", "linear"):
        raise ValueError(f"mode must be 'iid' or 'linear', got {mode}")
    if n1 < 0 or n2 < 0:
        raise ValueError("n1 and n2 must be non-negative")
    m_s_count = 2**n1
    if m_a_count * m_s_count > DECODE_BUDGET:
        raise BudgetError(
            f"{m_a_count} x {m_s_count} candidate pairs exceed the decode budget",
            needed=m_a_count * m_s_count,
        )
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    info = _bit_rows(m_s_count, n1)
    if mode == "iid":
        red = rng.integers(0, 2, size=(m_a_count, m_s_count, n2), dtype=np.int8)
        gen = None
    else:
        if amplitude_bits is None:
            raise ValueError("linear mode needs the per-message amplitude bit strings")
        amp = np.asarray(amplitude_bits, dtype=np.int8)
        if amp.ndim != 2 or amp.shape[0] != m_a_count:
            raise ValueError("amplitude_bits must be (M_a, m*n)")
        gen = rng.integers(0, 2, size=(amp.shape[1] + n1, n2), dtype=np.int8)
        red = np.empty((m_a_count, m_s_count, n2), dtype=np.int8)
        for ms in range(m_s_count):
            msg = np.concatenate(
                [amp, np.broadcast_to(info[ms], (m_a_count, n1))], axis=1
            )
            red[:, ms, :] = (msg @ gen) % 2
    return SignCodebook(
        n=n1 + n2, n1=n1, mode=mode, seed=seed, info_bits=info, redundant_bits=red, generator=gen
    )


def layer_amplitude_bits(layer: ShapingLayer) -> np.ndarray:
    """(M_a, m*n) amplitude-bit strings of the layer members, for linear codebooks."""
    amp_bits = layer.label_map.amplitude_bit_matrix
    rows = [np.concatenate([amp_bits[a] for a in seq]) for seq in layer.amplitude_seqs]
    return np.asarray(rows, dtype=np.int8)


class DecodeResult(NamedTuple):
    status: str  # "ok" | "none" | "multiple"
    m_a: int | None
    m_s: int | None
    num_accepted: int


class _Candidates:
    """Precomputed per-candidate index matrices, candidate c = m_a * M_s + m_s."""

    def __init__(self, layer: ShapingLayer, codebook: SignCodebook):
        m_a_count, m_s_count = layer.size, codebook.num_sign_messages
        if m_a_count * m_s_count > DECODE_BUDGET:
            raise BudgetError(
                f"{m_a_count} x {m_s_count} candidate pairs exceed the decode budget",
                needed=m_a_count * m_s_count,
            )
        n = layer.n
        self.m_a_count, self.m_s_count, self.n = m_a_count, m_s_count, n
        amp = np.asarray(layer.amplitude_seqs, dtype=np.intp)  # (M_a, n)
        self.a_idx = np.repeat(amp, m_s_count, axis=0)
        signs = np.empty((m_a_count * m_s_count, n), dtype=np.intp)
        for ma in range(m_a_count):
            for ms in range(m_s_count):
                signs[ma * m_s_count + ms] = np.concatenate(
                    [codebook.info_bits[ms], codebook.redundant_bits[ma, ms]]
                )
        self.s_idx = signs
        bits = layer.label_map.amplitude_bit_matrix  # (2^m, m)
        self.level_bits = [
            bits[:, j][self.a_idx] for j in range(layer.constellation.m)
        ]  # each (C, n) in {0,1}

    @property
    def count(self) -> int:
        return self.a_idx.shape[0]


def _box(stat_sum: np.ndarray, n: int, h: float, eps: float) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        return np.abs(-stat_sum / n - h) <= eps + LOG_SLACK


class SmdDecoder:
    """Accepts (m_a, m_s) iff the amplitude, sign and output sequences are
    jointly typical as a triple (every subset box must hold)."""

    def __init__(self, layer: ShapingLayer, codebook: SignCodebook, dmc: Dmc):
        self.layer, self.codebook, self.eps = layer, codebook, layer.eps
        self.cand = _Candidates(layer, codebook)
        cst = layer.constellation
        na, nout = cst.num_amplitudes, dmc.nout
        t = np.zeros((na, 2, nout))  # p(a, s, y)
        for ai, a in enumerate(cst.amplitudes):
            for sbit, s in ((0, -1), (1, 1)):
                t[ai, sbit] = layer.amplitude_pmf[ai] * 0.5 * dmc.w[cst.point_index(s * a)]
        self.t = t
        self.h = {}
        self.logt = {}
        for name, axes in {
            "a": (1, 2), "s": (0, 2), "y": (0, 1),
            "as": (2,), "ay": (1,), "sy": (0,), "asy": (),
        }.items():
            marg = t.sum(axis=axes) if axes else t
            self.h[name] = _entropy(marg)
            self.logt[name] = _log2_safe(marg)
        c = self.cand
        self.fix_a = self.logt["a"][c.a_idx].sum(axis=1)
        self.fix_s = self.logt["s"][c.s_idx].sum(axis=1)
        self.fix_as = self.logt["as"][c.a_idx, c.s_idx].sum(axis=1)
        self.nout = nout

    def accept_mask(self, y: np.ndarray) -> np.ndarray:
        c, n, eps = self.cand, self.cand.n, self.eps
        sum_y = self.logt["y"][y].sum()
        if not _box(np.asarray(sum_y), n, self.h["y"], eps):
            return np.zeros(c.count, dtype=bool)
        yb = y[None, :]
        sum_ay = self.logt["ay"][c.a_idx, yb].sum(axis=1)
        sum_sy = self.logt["sy"][c.s_idx, yb].sum(axis=1)
        sum_asy = self.logt["asy"][c.a_idx, c.s_idx, yb].sum(axis=1)
        ok = _box(self.fix_a, n, self.h["a"], eps)
        ok &= _box(self.fix_s, n, self.h["s"], eps)
        ok &= _box(self.fix_as, n, self.h["as"], eps)
        ok &= _box(sum_ay, n, self.h["ay"], eps)
        ok &= _box(sum_sy, n, self.h["sy"], eps)
        ok &= _box(sum_asy, n, self.h["asy"], eps)
        return ok

    def triple_mask(self, y: np.ndarray) -> np.ndarray:
        # used by the bit-level decoder to log pairwise-only acceptances
        return self.accept_mask(y)


class BmdDecoder:
    """Accepts (m_a, m_s) iff (s, y) and every (b_j, y) pair is jointly typical."""

    def __init__(self, layer: ShapingLayer, codebook: SignCodebook, dmc: Dmc):
        self.layer, self.codebook, self.eps = layer, codebook, layer.eps
        self.cand = _Candidates(layer, codebook)
        self._smd = SmdDecoder(layer, codebook, dmc)  # for discrepancy logging
        cst = layer.constellation
        t = self._smd.t  # p(a, s, y)
        p_y = t.sum(axis=(0, 1))
        p_sy = t.sum(axis=0)
        self.h_y, self.h_s = _entropy(p_y), _entropy(t.sum(axis=(0, 2)))
        self.h_sy = _entropy(p_sy)
        self.log_y, self.log_sy = _log2_safe(p_y), _log2_safe(p_sy)
        self.log_s = _log2_safe(t.sum(axis=(0, 2)))
        bits = layer.label_map.amplitude_bit_matrix
        self.levels = []
        for j in range(cst.m):
            p_bjy = np.zeros((2, dmc.nout))
            for ai in range(cst.num_amplitudes):
                p_bjy[bits[ai, j]] += t[ai].sum(axis=0)
            self.levels.append(
                {
                    "h_b": _entropy(p_bjy.sum(axis=1)),
                    "h_by": _entropy(p_bjy),
                    "log_b": _log2_safe(p_bjy.sum(axis=1)),
                    "log_by": _log2_safe(p_bjy),
                }
            )
        c = self.cand
        self.fix_s = self.log_s[c.s_idx].sum(axis=1)
        self.fix_b = [
            lv["log_b"][c.level_bits[j]].sum(axis=1) for j, lv in enumerate(self.levels)
        ]

    def accept_mask(self, y: np.ndarray) -> np.ndarray:
        c, n, eps = self.cand, self.cand.n, self.eps
        sum_y = self.log_y[y].sum()
        if not _box(np.asarray(sum_y), n, self.h_y, eps):
            return np.zeros(c.count, dtype=bool)
        yb = y[None, :]
        ok = _box(self.fix_s, n, self.h_s, eps)
        ok &= _box(self.log_sy[c.s_idx, yb].sum(axis=1), n, self.h_sy, eps)
        for j, lv in enumerate(self.levels):
            ok &= _box(self.fix_b[j], n, lv["h_b"], eps)
            ok &= _box(
                lv["log_by"][c.level_bits[j], yb].sum(axis=1), n, lv["h_by"], eps
            )
        return ok

    def triple_mask(self, y: np.ndarray) -> np.ndarray:
        return self._smd.accept_mask(y)


def _make_decoder(kind: str, layer: ShapingLayer, codebook: SignCodebook, dmc: Dmc):
    return (SmdDecoder if kind == "smd" else BmdDecoder)(layer, codebook, dmc)


def decode(decoder, y_seq) -> DecodeResult:
    """Unique-acceptance rule shared by both decoders."""
    mask = decoder.accept_mask(np.asarray(y_seq, dtype=np.intp))
    hits = np.flatnonzero(mask)
    if hits.size == 1:
        c = int(hits[0])
        ms_count = decoder.cand.m_s_count
        return DecodeResult("ok", c // ms_count, c % ms_count, 1)
    return DecodeResult("none" if hits.size == 0 else "multiple", None, None, int(hits.size))


def smd_decode(y_seq, layer: ShapingLayer, codebook: SignCodebook, dmc: Dmc) -> DecodeResult:
    return decode(SmdDecoder(layer, codebook, dmc), y_seq)


def bmd_decode(y_seq, layer: ShapingLayer, codebook: SignCodebook, dmc: Dmc) -> DecodeResult:
    return decode(BmdDecoder(layer, codebook, dmc), y_seq)


@dataclass(frozen=True)
class ExperimentConfig:
    constellation: AskConstellation
    dmc: Dmc
    amplitude_pmf: tuple
    eps: float
    n: int
    gamma: float
    decoder: str  # "smd" | "bmd"
    trials: int
    seed: int
    codebook_mode: str = "iid"
    typ_budget: int = None
    mc_samples: int = None

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError(f"gamma must be in [0, 1), got {self.gamma}")
        if self.decoder not in ("smd", "bmd"):
            raise ConfigError(f"decoder must be 'smd' or 'bmd', got {self.decoder}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if not 0 < self.eps:
            raise ConfigError(f"eps must be positive, got {self.eps}")

    @property
    def n1(self) -> int:
        return int(math.floor(self.gamma * self.n + 0.5))

    @property
    def gamma_realized(self) -> float:
        return self.n1 / self.n


@dataclass(frozen=True)
class TrialStats:
    """Aggregated experiment outcome; errors_total = kind1 + kind2 - both."""

    trials: int
    errors_total: int
    errors_kind1: int  # transmitted tuple failed the typicality test
    errors_kind2: int  # some other tuple passed it
    both: int
    rate_achieved: float
    n: int
    eps: float
    gamma: float
    gamma_realized: float
    n1: int
    m_a_count: int
    seed: int
    decoder: str
    bmd_pairwise_only: int = 0  # accepted bit-level candidates with atypical triple

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "errors_total": self.errors_total,
            "errors_kind1": self.errors_kind1,
            "errors_kind2": self.errors_kind2,
            "both": self.both,
            "rate_achieved": self.rate_achieved,
            "n": self.n,
            "eps": self.eps,
            "gamma": self.gamma,
            "gamma_realized": self.gamma_realized,
            "n1": self.n1,
            "m_a_count": self.m_a_count,
            "seed": self.seed,
            "decoder": self.decoder,
            "bmd_pairwise_only": self.bmd_pairwise_only,
        }


def _run_trials(decoder, cdf_rows, point_idx, config, trial_indices, log_pairwise):
    cand = decoder.cand
    counts = {"err": 0, "k1": 0, "k2": 0, "both": 0, "pairwise_only": 0}
    n, nout = config.n, cdf_rows.shape[1]
    for t in trial_indices:
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, 1, int(t)]))
        m_a = int(rng.integers(cand.m_a_count))
        m_s = int(rng.integers(cand.m_s_count))
        k = m_a * cand.m_s_count + m_s
        x = point_idx[k]
        u = rng.random(n)
        y = (cdf_rows[x] < u[:, None]).sum(axis=1)
        np.minimum(y, nout - 1, out=y)
        mask = decoder.accept_mask(y)
        kind1 = not mask[k]
        kind2 = bool(mask.sum() - int(mask[k]) > 0)
        counts["err"] += int(kind1 or kind2)
        counts["k1"] += int(kind1)
        counts["k2"] += int(kind2)
        counts["both"] += int(kind1 and kind2)
        if log_pairwise and mask.any():
            triple = decoder.triple_mask(y)
            counts["pairwise_only"] += int((mask & ~triple).sum())
    return counts


def run_experiment(config: ExperimentConfig, threads: int = 1) -> TrialStats:
    """Monte Carlo decode-error experiment over the random sign code."""
    layer = build_shaping_layer(
        config.constellation,
        config.dmc,
        np.asarray(config.amplitude_pmf, dtype=float),
        config.n,
        config.eps,
        kind=config.decoder,
        budget=config.typ_budget,
        mc_samples=config.mc_samples,
        seed=config.seed,
    )
    n1, n2 = config.n1, config.n - config.n1
    amp_bits = layer_amplitude_bits(layer) if config.codebook_mode == "linear" else None
    codebook = draw_sign_codebook(
        layer.size, n1, n2, mode=config.codebook_mode, seed=config.seed, amplitude_bits=amp_bits
    )
    decoder = _make_decoder(config.decoder, layer, codebook, config.dmc)
    cand = decoder.cand
    cst = config.constellation
    # candidate -> transmitted point index per position
    amps = np.asarray(cst.amplitudes)[cand.a_idx]
    signs = 2 * cand.s_idx - 1
    point_idx = np.empty_like(cand.a_idx)
    lookup = {x: i for i, x in enumerate(cst.points)}
    flat = amps * signs
    point_idx = np.vectorize(lookup.get, otypes=[np.intp])(flat)
    cdf_rows = np.cumsum(config.dmc.w, axis=1)
    log_pairwise = config.decoder == "bmd"

    all_idx = np.arange(config.trials)
    if threads <= 1:
        parts = [_run_trials(decoder, cdf_rows, point_idx, config, all_idx, log_pairwise)]
    else:
        chunks = np.array_split(all_idx, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(
                    lambda ch: _run_trials(
                        decoder, cdf_rows, point_idx, config, ch, log_pairwise
                    ),
                    chunks,
                )
            )
    tot = {k: sum(p[k] for p in parts) for k in parts[0]}
    rate = (math.log2(layer.size) + n1) / config.n
    return TrialStats(
        trials=config.trials,
        errors_total=tot["err"],
        errors_kind1=tot["k1"],
        errors_kind2=tot["k2"],
        both=tot["both"],
        rate_achieved=rate,
        n=config.n,
        eps=config.eps,
        gamma=config.gamma,
        gamma_realized=config.gamma_realized,
        n1=n1,
        m_a_count=layer.size,
        seed=config.seed,
        decoder=config.decoder,
        bmd_pairwise_only=tot["pairwise_only"],
    )
