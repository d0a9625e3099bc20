"""Tiny 1-D search routines with explicit stopping rules.

Hand-rolled rather than scipy.optimize because the callers stop on function
value (|f| < tol) or need the evaluation trace for warm starts.
"""

from __future__ import annotations

import math

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def golden_max(f, a: float, b: float, xtol: float, max_iter: int = 200):
    """Golden-section maximization of a unimodal f on [a, b].

    Returns (x_best, f_best) over all probed points, so a non-unimodal f
    still yields the best sample seen.
    """
    h = b - a
    c, d = a + INVPHI2 * h, a + INVPHI * h
    fc, fd = f(c), f(d)
    best = max([(fc, c), (fd, d)])
    it = 0
    while h > xtol and it < max_iter:
        if fc >= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + INVPHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + INVPHI * h
            fd = f(d)
        best = max(best, (fc, c), (fd, d))
        it += 1
    fbest, xbest = best
    return xbest, fbest


def bisect_until(f, lo: float, hi: float, ftol: float, xtol: float = 0.0, max_iter: int = 200):
    """Find a root of monotone-crossing f on [lo, hi] by bisection.

    Stops when |f(mid)| <= ftol or the bracket is narrower than xtol.
    Raises ValueError when f(lo) and f(hi) do not straddle zero.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]: f={flo:.6g}, {fhi:.6g}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if abs(fmid) <= ftol or (hi - lo) <= xtol:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)
