"""Discrete memoryless channels, AWGN bin quantization and bit-level subchannels."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .alphabets import AskConstellation, LabelMap

ROW_TOL = 1e-12


@dataclass(frozen=True)
class AwgnSpec:
    """Quantizer settings for a real AWGN channel.

    num_bins uniform bins cover [min(x) - clip_sigmas*sigma, max(x) + clip_sigmas*sigma];
    two extra unbounded tail bins catch the rest, so the output alphabet has
    num_bins + 2 letters.
    """

    snr_db: float
    num_bins: int = 2000
    clip_sigmas: float = 6.0


@dataclass(frozen=True)
class Dmc:
    """Finite-input finite-output channel as a row-stochastic matrix."""

    w: np.ndarray  # (nin, nout), rows sum to 1
    input_points: tuple = ()

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise ValueError("w must be a non-empty 2-D matrix")
        if np.any(w < 0):
            raise ValueError("transition probabilities must be non-negative")
        rows = w.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > ROW_TOL):
            raise ValueError("rows of w must each sum to 1")
        w = w / rows[:, None]  # remove residual float drift
        w.setflags(write=False)
        object.__setattr__(self, "w", w)
        if self.input_points and len(self.input_points) != w.shape[0]:
            raise ValueError("input_points length must match nin")

    @property
    def nin(self) -> int:
        return self.w.shape[0]

    @property
    def nout(self) -> int:
        return self.w.shape[1]

    def to_json(self) -> str:
        doc = {
            "nin": self.nin,
            "nout": self.nout,
            "w": [float(v) for v in self.w.ravel()],  # row-major
            "input_points": list(self.input_points),
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Dmc":
        doc = json.loads(text)
        w = np.array(doc["w"], dtype=float).reshape(doc["nin"], doc["nout"])
        return cls(w=w, input_points=tuple(doc.get("input_points", ())))


def identity_dmc(points) -> Dmc:
    """Noiseless channel: output index reveals the input exactly."""
    k = len(points)
    return Dmc(w=np.eye(k), input_points=tuple(points))


def gaussian_dmc(points, sigma: float, num_bins: int, clip_sigmas: float = 6.0) -> Dmc:
    """Quantize y = x + N(0, sigma^2) onto a uniform bin grid plus two tails."""
    if num_bins < 2:
        raise ValueError(f"num_bins must be >= 2, got {num_bins}")
    if not (np.isfinite(sigma) and sigma > 0):
        raise ValueError(f"noise sigma must be positive and finite, got {sigma}")
    pts = np.asarray(points, dtype=float)
    lo = pts.min() - clip_sigmas * sigma
    hi = pts.max() + clip_sigmas * sigma
    edges = np.linspace(lo, hi, num_bins + 1)
    # tail bin (-inf, lo), num_bins interior bins, tail bin (hi, inf)
    cdf = ndtr((edges[None, :] - pts[:, None]) / sigma)
    w = np.empty((len(pts), num_bins + 2))
    w[:, 0] = cdf[:, 0]
    w[:, 1:-1] = np.diff(cdf, axis=1)
    w[:, -1] = 1.0 - cdf[:, -1]
    w = np.maximum(w, 0.0)
    w /= w.sum(axis=1, keepdims=True)
    return Dmc(w=w, input_points=tuple(points))


def quantize_awgn(constellation: AskConstellation, spec: AwgnSpec, power_pmf) -> Dmc:
    """Build the quantized AWGN channel seen by the constellation at spec.snr_db.

    power_pmf (over the constellation points) only fixes the signal power:
    sigma = sqrt(E[X^2] / 10^(snr_db/10)), so SNR is measured against the
    distribution the channel will be evaluated with.
    """
    p = np.asarray(power_pmf, dtype=float)
    pts = np.asarray(constellation.points, dtype=float)
    if p.shape != pts.shape:
        raise ValueError("power_pmf must have one entry per constellation point")
    energy = float(p @ pts**2)
    snr = 10.0 ** (spec.snr_db / 10.0)
    sigma2 = energy / snr
    if not (np.isfinite(sigma2) and sigma2 > 0):
        raise ValueError(f"derived noise variance {sigma2} is not usable")
    return gaussian_dmc(pts, np.sqrt(sigma2), spec.num_bins, spec.clip_sigmas)


def sequence_log2_likelihood(dmc: Dmc, x_seq, y_seq) -> float:
    """log2 p(y_seq | x_seq); -inf when any factor is exactly zero."""
    x = np.asarray(x_seq, dtype=np.intp)
    y = np.asarray(y_seq, dtype=np.intp)
    if x.shape != y.shape:
        raise ValueError("x_seq and y_seq must have equal length")
    probs = dmc.w[x, y]
    if np.any(probs == 0.0):
        return float("-inf")
    return float(np.log2(probs).sum())


def sequence_likelihood(dmc: Dmc, x_seq, y_seq) -> float:
    """p(y_seq | x_seq), accumulated in the log domain to dodge underflow."""
    lg = sequence_log2_likelihood(dmc, x_seq, y_seq)
    return 0.0 if lg == float("-inf") else float(2.0**lg)


def bit_channel(dmc: Dmc, label_map: LabelMap, input_pmf, level: int):
    """Marginalize a symbol channel onto one label level.

    Level 0 is the sign bit, levels 1..m are amplitude bits. Returns
    (prior over {0,1}, 2 x nout transition matrix p(y | c_level)); the
    transition row for a bit value of prior zero is left as zeros.
    """
    p = np.asarray(input_pmf, dtype=float)
    if p.shape != (dmc.nin,):
        raise ValueError("input_pmf must have one entry per channel input")
    bits = label_map.bit_matrix
    if dmc.nin != bits.shape[0]:
        raise ValueError("label map and channel sizes disagree")
    if not 0 <= level < bits.shape[1]:
        raise ValueError(f"level must be in [0, {bits.shape[1] - 1}], got {level}")
    col = bits[:, level]
    prior = np.array([p[col == 0].sum(), p[col == 1].sum()])
    trans = np.zeros((2, dmc.nout))
    for b in (0, 1):
        if prior[b] > 0:
            trans[b] = (p[col == b] @ dmc.w[col == b]) / prior[b]
    return prior, trans
